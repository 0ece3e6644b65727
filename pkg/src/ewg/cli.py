"""Command-line interface: ``ewg fit | simulate | eval | stats``.

Exit codes: 0 success, 2 input error, 3 fit did not converge.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .distribution import (EwgParams, SampleSpec, cdf, hazard, hazard_shape, pdf, sample,
                           survival)
from .entropy import renyi_entropy, shannon_entropy
from .errors import EWGError
from .estimation import DataSample, FitResult, fit_mle
from .moments import mgf, raw_moment, variance
from .order_stats import OrderStatSpec, order_stat_moment
from .residual import ResidualSpec, mean_residual_life, residual_moment
from .special import default_control
from .submodels import PARAM_NAMES, SubmodelKind, as_kind

SCHEMA_VERSION = "1.0"
EXIT_OK, EXIT_INPUT, EXIT_NOCONV = 0, 2, 3


class InputError(Exception):
    """Bad user input; reported with exit code 2."""


# ---------------------------------------------------------------------------
# model document


@dataclass
class ModelDocument:
    """Self-describing JSON record of a (fitted) model."""

    kind: str
    params: dict[str, float]
    fit: dict | None = None
    provenance: dict = field(default_factory=dict)
    schema_version: str = SCHEMA_VERSION

    def to_params(self) -> EwgParams:
        return EwgParams(**{name: self.params[name] for name in PARAM_NAMES})

    def dumps(self) -> str:
        return json.dumps(asdict(self), sort_keys=True, indent=2) + "\n"

    @classmethod
    def loads(cls, text: str) -> "ModelDocument":
        raw = json.loads(text)
        if not isinstance(raw, dict):
            raise InputError("model document must be a JSON object")
        if raw.get("schema_version") != SCHEMA_VERSION:
            raise InputError(f"unsupported schema_version {raw.get('schema_version')!r}")
        try:
            return cls(kind=raw["kind"], params=raw["params"], fit=raw.get("fit"),
                       provenance=raw.get("provenance", {}),
                       schema_version=raw["schema_version"])
        except KeyError as exc:
            raise InputError(f"model document lacks field {exc}") from None


def fit_summary(f: FitResult) -> dict:
    return {
        "loglik": f.loglik,
        "aic": f.aic,
        "n": f.n,
        "converged": f.converged,
        "status": f.status,
        "iterations": f.iterations,
        "multistart_index": f.multistart_index,
        "score_inf_norm": f.score_inf_norm,
        "level": f.level,
        "free_parameters": list(f.free_names),
        "std_errors": dict(f.std_errors) if f.std_errors else None,
        "ci": {k: [lo, hi] for k, (lo, hi) in f.ci.items()} if f.ci else None,
        "warnings": list(f.warnings),
    }


def _timestamp(path: Path) -> str:
    # reproducible: honour SOURCE_DATE_EPOCH, else the input's modification time
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    seconds = int(epoch) if epoch else int(path.stat().st_mtime)
    return datetime.fromtimestamp(seconds, tz=timezone.utc).isoformat()


# ---------------------------------------------------------------------------
# data files


def read_data(path) -> np.ndarray:
    """One positive decimal per line; blank lines and '#' comments skipped."""
    try:
        text = Path(path).read_text()
    except (OSError, UnicodeDecodeError) as exc:
        raise InputError(f"cannot read {path}: {exc}") from None
    values = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        item = line.strip()
        if not item or item.startswith("#"):
            continue
        try:
            v = float(item)
        except ValueError:
            raise InputError(f"{path}: row {lineno}: not a number: {item!r}") from None
        if not (math.isfinite(v) and v > 0):
            raise InputError(f"{path}: row {lineno}: value must be positive and finite, got {item}")
        values.append(v)
    if not values:
        raise InputError(f"{path}: no data rows")
    return np.array(values)


def _write_lines(out, lines):
    text = "".join(line + "\n" for line in lines)
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


# ---------------------------------------------------------------------------
# commands


def _params_from_args(args) -> EwgParams:
    if getattr(args, "model", None):
        try:
            return ModelDocument.loads(Path(args.model).read_text()).to_params()
        except OSError as exc:
            raise InputError(f"cannot read model {args.model}: {exc}") from None
    missing = [flag for flag in ("alpha", "beta", "gamma") if getattr(args, flag) is None]
    if missing:
        raise InputError("missing parameter flag(s): " + ", ".join("--" + m for m in missing))
    return EwgParams(args.alpha, args.beta, args.gamma, args.theta)


def cmd_fit(args) -> int:
    path = Path(args.file)
    y = read_data(path)
    kind = as_kind(args.kind)
    result = fit_mle(DataSample(y), kind=kind, level=args.level, seed=args.seed)
    doc = ModelDocument(
        kind=kind.value,
        params={name: getattr(result.params, name) for name in PARAM_NAMES},
        fit=fit_summary(result),
        provenance={"input": path.name, "timestamp": _timestamp(path), "seed": args.seed},
    )
    out = Path(args.out) if args.out else path.with_suffix(".model.json")
    out.write_text(doc.dumps())

    print(f"EWG fit ({kind.value}), n = {result.n}, status = {result.status}")
    print(f"{'parameter':<12}{'estimate':>14}{'std.err':>14}   {int(args.level * 100)}% interval")
    for name in PARAM_NAMES:
        est = getattr(result.params, name)
        if name in result.free_names and result.std_errors:
            lo, hi = result.ci[name]
            print(f"{name:<12}{est:>14.6g}{result.std_errors[name]:>14.4g}   [{lo:.6g}, {hi:.6g}]")
        elif name in result.free_names:
            print(f"{name:<12}{est:>14.6g}{'-':>14}")
        else:
            print(f"{name:<12}{est:>14.6g}{'(fixed)':>14}")
    print(f"log-likelihood = {result.loglik:.10g}")
    print(f"AIC = {result.aic:.10g}  (k = {len(result.free_names)})")
    for note in result.warnings:
        print(f"warning: {note}")
    print(f"model written to {out}")
    return EXIT_OK if result.converged else EXIT_NOCONV


def cmd_simulate(args) -> int:
    p = EwgParams(args.alpha, args.beta, args.gamma, args.theta)
    draws = sample(p, SampleSpec(args.n, args.seed, args.method))
    _write_lines(args.out, (repr(float(v)) for v in draws))
    return EXIT_OK


_EVALUATORS = {"pdf": pdf, "cdf": cdf, "survival": survival, "hazard": hazard}


def cmd_eval(args) -> int:
    p = _params_from_args(args)
    if not (args.points >= 2 and 0 <= args.min < args.max and math.isfinite(args.max)):
        raise InputError("grid needs 0 <= --min < --max and --points >= 2")
    grid = np.linspace(args.min, args.max, args.points)
    if args.fn == "mrl":
        values = [mean_residual_life(p, float(t)) for t in grid]
    else:
        values = _EVALUATORS[args.fn](p, grid)
    lines = [f"# y,{args.fn}"]
    if args.fn == "hazard":
        lines.append(f"# shape: {hazard_shape(p)}")
    lines += [f"{y!r},{float(v)!r}" for y, v in zip(grid.tolist(), values)]
    _write_lines(args.out, lines)
    return EXIT_OK


def _split(text, count, label):
    parts = text.split(",")
    if len(parts) != count:
        raise InputError(f"{label} expects {count} comma-separated values, got {text!r}")
    return parts


def cmd_stats(args) -> int:
    p = _params_from_args(args)
    ctrl = default_control()
    items = []
    if args.mean:
        items.append(("mean", lambda: raw_moment(p, 1, ctrl)))
    if args.variance:
        items.append(("variance", lambda: variance(p, ctrl)))
    for k in args.moment or []:
        items.append((f"moment[{k}]", lambda k=k: raw_moment(p, k, ctrl)))
    for r in args.renyi or []:
        items.append((f"renyi[{r:g}]", lambda r=r: renyi_entropy(p, r, ctrl)))
    if args.shannon:
        items.append(("shannon", lambda: shannon_entropy(p, ctrl)))
    for text in args.order_moment or []:
        r, n, k = (int(v) for v in _split(text, 3, "--order-moment"))
        items.append((f"order_moment[r={r},n={n},k={k}]",
                      lambda r=r, n=n, k=k: order_stat_moment(p, OrderStatSpec(n, r), k, ctrl)))
    for text in args.residual or []:
        t, r = _split(text, 2, "--residual")
        t, r = float(t), int(r)
        items.append((f"residual[t={t:g},r={r}]",
                      lambda t=t, r=r: residual_moment(p, ResidualSpec(t, r), ctrl)))
    for t in args.mgf or []:
        items.append((f"mgf[{t:g}]", lambda t=t: mgf(p, t, ctrl)))
    if not items:
        raise InputError("no statistics requested")

    ok = 0
    for label, compute in items:
        try:
            res = compute()
        except EWGError as exc:
            print(f"{label}: error: {exc}")
            continue
        ok += 1
        if isinstance(res, float):
            print(f"{label} = {res!r}")
        elif hasattr(res, "engine"):
            print(f"{label} = {res.value!r}  [engine={res.engine}, terms={res.terms_used}, "
                  f"truncation={res.truncation_estimate:.3g}]")
        else:
            print(f"{label} = {res.value!r}  [method={res.method}, terms={res.terms_used}]")
    return EXIT_OK if ok else EXIT_INPUT


# ---------------------------------------------------------------------------
# argument parsing


def _add_param_flags(p, required):
    p.add_argument("--alpha", type=float, required=required)
    p.add_argument("--beta", type=float, required=required)
    p.add_argument("--gamma", type=float, required=required)
    p.add_argument("--theta", type=float, default=0.0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ewg", description="Exponentiated Weibull-geometric toolkit")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    fit = sub.add_parser("fit", help="maximum-likelihood fit of a data file")
    fit.add_argument("file")
    fit.add_argument("--kind", default="full", choices=[k.value for k in SubmodelKind])
    fit.add_argument("--level", type=float, default=0.95)
    fit.add_argument("--out")
    fit.add_argument("--seed", type=int, default=0)
    fit.set_defaults(func=cmd_fit)

    sim = sub.add_parser("simulate", help="draw a sample")
    _add_param_flags(sim, required=True)
    sim.add_argument("--n", type=int, required=True)
    sim.add_argument("--seed", type=int, required=True)
    sim.add_argument("--method", default="inversion", choices=["inversion", "compound"])
    sim.add_argument("--out", required=True, help="output file, or - for stdout")
    sim.set_defaults(func=cmd_simulate)

    ev = sub.add_parser("eval", help="tabulate a function on a grid")
    ev.add_argument("--model")
    _add_param_flags(ev, required=False)
    ev.add_argument("--fn", required=True, choices=["pdf", "cdf", "survival", "hazard", "mrl"])
    ev.add_argument("--min", type=float, required=True)
    ev.add_argument("--max", type=float, required=True)
    ev.add_argument("--points", type=int, default=101)
    ev.add_argument("--out")
    ev.set_defaults(func=cmd_eval)

    st = sub.add_parser("stats", help="moments, entropies, order statistics, residual life")
    st.add_argument("--model")
    _add_param_flags(st, required=False)
    st.add_argument("--mean", action="store_true")
    st.add_argument("--variance", action="store_true")
    st.add_argument("--moment", type=int, action="append")
    st.add_argument("--renyi", type=float, nargs="+")
    st.add_argument("--shannon", action="store_true")
    st.add_argument("--order-moment", nargs="+", metavar="R,N,K")
    st.add_argument("--residual", nargs="+", metavar="T,R")
    st.add_argument("--mgf", type=float, nargs="+", metavar="T")
    st.set_defaults(func=cmd_stats)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InputError, EWGError, ValueError) as exc:
        print(f"ewg {args.command}: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
