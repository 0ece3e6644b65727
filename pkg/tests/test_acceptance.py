"""Acceptance gate: twelve end-to-end checks, each with a runtime budget.

Every check prints one ``PASS``/``FAIL`` line. Run directly with
``python3 tests/test_acceptance.py`` or through pytest, where the lines are
also repeated in the terminal summary.
"""

from __future__ import annotations

import itertools
import math
import time
from pathlib import Path

import numpy as np
import pytest

from ewg import (DataSample, EwgParams, OrderStatSpec, ResidualSpec, SampleSpec, SubmodelKind,
                 cdf, fit_mle, hazard, hazard_shape, log_likelihood, make_submodel, mean_residual_life,
                 mixture_pdf, order_stat_moment, order_stat_pdf, pdf, quantile, raw_moment,
                 renyi_entropy, residual_moment, sample, score, shannon_entropy)
from ewg.cli import ModelDocument, main
from ewg.distribution import logpdf
from ewg.quadrature import integrate_support
from ewg.moments import variance
from ewg.submodels import display_cdf, display_hazard, display_moments, display_pdf

GRID = list(itertools.product([0.5, 1.0, 2.0, 5.0], [0.5, 1.0, 2.0], [0.5, 1.0, 2.0, 3.0],
                              [0.0, 0.3, 0.9]))  # (alpha, beta, gamma, theta)
PROBS = np.concatenate([[0.001], np.round(np.arange(0.01, 1.0, 0.01), 2), [0.999]])
TRUTH = EwgParams(2.0, 1.0, 1.5, 0.5)


def _mc_band(draws, value, k=4.0):
    se = draws.std(ddof=1) / math.sqrt(draws.size)
    return abs(draws.mean() - value) <= k * se, (draws.mean() - value) / se


# ---------------------------------------------------------------------------


def check_normalization():
    worst = 0.0
    for a, b, g, th in GRID:
        p = EwgParams(a, b, g, th)
        total = integrate_support(lambda y: float(pdf(p, y)), p, epsrel=1e-11).value
        worst = max(worst, abs(total - 1.0))
    return worst <= 1e-8, f"{len(GRID)} parameter sets, max |integral - 1| = {worst:.2e}"


def check_inversion():
    worst = 0.0
    for a, b, g, th in GRID:
        p = EwgParams(a, b, g, th)
        worst = max(worst, float(np.max(np.abs(cdf(p, quantile(p, PROBS)) - PROBS))))
    return worst <= 1e-10, f"max |F(Q(u)) - u| = {worst:.2e} over {len(GRID) * PROBS.size} points"


def check_mixture():
    worst = 0.0
    count = 0
    for a, b, g, th in GRID:
        p = EwgParams(a, b, g, th)
        y = quantile(p, np.linspace(0.001, 0.999, 50))
        worst = max(worst, float(np.max(np.abs(mixture_pdf(p, y) / pdf(p, y) - 1.0))))
        count += 1
    return worst <= 1e-10, f"{count} sets x 50 points, max rel error {worst:.2e}"


MOMENT_SETS = [EwgParams(2.0, 1.0, 1.5, 0.5), EwgParams(0.5, 2.0, 2.0, 0.9),
               EwgParams(1.5, 0.5, 1.0, 0.3), EwgParams(3.0, 1.0, 3.0, 0.0),
               EwgParams(1.0, 1.0, 0.8, 0.7)]


def check_moments():
    worst_rel, worst_z, ok = 0.0, 0.0, True
    for i, p in enumerate(MOMENT_SETS):
        y = sample(p, SampleSpec(1_000_000, seed=100 + i))
        for k in (1, 2, 3):
            s = raw_moment(p, k, engine="series").value
            q = raw_moment(p, k, engine="quadrature").value
            rel = abs(s - q) / abs(q)
            in_s, z_s = _mc_band(y ** k, s)
            in_q, z_q = _mc_band(y ** k, q)
            ok &= rel <= 1e-5 and in_s and in_q
            worst_rel = max(worst_rel, rel)
            worst_z = max(worst_z, abs(z_s), abs(z_q))
    return ok, (f"{len(MOMENT_SETS)} sets, k=1..3: series/quadrature max rel {worst_rel:.1e}, "
                f"Monte-Carlo max |z| {worst_z:.2f}")


RENYI_SETS = [EwgParams(2.0, 1.0, 2.0, 0.5), EwgParams(1.5, 0.5, 1.5, 0.8),
              EwgParams(0.7, 2.0, 1.2, 0.3), EwgParams(3.0, 1.0, 0.8, 0.0)]


def check_entropy():
    worst_rel = 0.0
    for p, r in itertools.product(RENYI_SETS, (2.0, 3.0)):
        s = renyi_entropy(p, r, engine="series").value
        q = renyi_entropy(p, r, engine="quadrature").value
        worst_rel = max(worst_rel, abs(s - q) / max(abs(q), 1e-300))
    p = EwgParams(2.0, 1.0, 1.5, 0.6)
    h = shannon_entropy(p).value
    y = sample(p, SampleSpec(1_000_000, seed=7))
    in_band, z = _mc_band(-logpdf(p, y), h)
    worst_exact = 0.0
    for beta in (0.5, 1.0, 2.0, math.e):
        e = EwgParams(1.0, beta, 1.0, 0.0)
        worst_exact = max(worst_exact,
                          abs(renyi_entropy(e, 2.0).value - (math.log(2) - math.log(beta))),
                          abs(renyi_entropy(e, 3.0).value - (math.log(3) / 2 - math.log(beta))),
                          abs(shannon_entropy(e).value - (1 - math.log(beta))))
    ok = worst_rel <= 1e-4 and in_band and worst_exact <= 1e-8
    return ok, (f"Renyi series/quadrature max rel {worst_rel:.1e}; Shannon MC z={z:.2f}; "
                f"exponential cases max err {worst_exact:.1e}")


ORDER_SETS = [EwgParams(2.0, 1.0, 2.0, 0.5), EwgParams(1.5, 0.7, 0.8, 0.3),
              EwgParams(0.5, 1.0, 1.5, 0.8)]


def check_order_statistics():
    worst_rel = 0.0
    for p in ORDER_SETS:
        for n in range(1, 6):
            for r in range(1, n + 1):
                s = order_stat_moment(p, OrderStatSpec(n, r), 1, engine="series").value
                q = order_stat_moment(p, OrderStatSpec(n, r), 1, engine="quadrature").value
                worst_rel = max(worst_rel, abs(s - q) / q)
    e = EwgParams(1.0, 1.0, 1.0, 0.0)
    worst_exp = 0.0
    for engine in ("series", "quadrature"):
        worst_exp = max(worst_exp,
                        abs(order_stat_moment(e, OrderStatSpec(2, 2), 1, engine=engine).value - 1.5),
                        abs(order_stat_moment(e, OrderStatSpec(2, 1), 1, engine=engine).value - 0.5))
    worst_mix = 0.0
    for p in ORDER_SETS:
        y = quantile(p, np.linspace(0.01, 0.99, 25))
        for n in range(1, 6):
            avg = sum(order_stat_pdf(p, OrderStatSpec(n, r), y) for r in range(1, n + 1)) / n
            worst_mix = max(worst_mix, float(np.max(np.abs(avg / pdf(p, y) - 1))))
    ok = worst_rel <= 1e-4 and worst_exp <= 1e-6 and worst_mix <= 1e-10
    return ok, (f"series/quadrature max rel {worst_rel:.1e}; exponential max/min err "
                f"{worst_exp:.1e}; mixture identity max rel {worst_mix:.1e}")


RESIDUAL_SETS = [EwgParams(2.0, 1.0, 2.0, 0.5), EwgParams(0.5, 1.0, 0.7, 0.3),
                 EwgParams(3.0, 2.0, 1.5, 0.8)]


def check_residual():
    worst_mem = 0.0
    for beta in (0.5, 1.0, 2.0):
        e = EwgParams(1.0, beta, 1.0, 0.0)
        for t in np.linspace(0.0, 5.0 / beta, 11):
            for engine in ("series", "quadrature"):
                m = residual_moment(e, ResidualSpec(float(t), 1), engine=engine).value
                worst_mem = max(worst_mem, abs(m * beta - 1.0))
    worst_zero = 0.0
    for p, r in itertools.product(RESIDUAL_SETS, (1, 2, 3)):
        pairs = (("series", "quadrature"), ("quadrature", "series"))
        for res_engine, mom_engine in pairs:
            m = residual_moment(p, ResidualSpec(0.0, r), engine=res_engine).value
            ek = raw_moment(p, r, engine=mom_engine).value
            worst_zero = max(worst_zero, abs(m / ek - 1))
    worst_mrl = 0.0
    for p in RESIDUAL_SETS:
        for t in (0.1, 0.5, 1.0, 2.0):
            if t > quantile(p, 0.99):
                continue
            s = mean_residual_life(p, t, engine="series")
            q = mean_residual_life(p, t, engine="quadrature")
            worst_mrl = max(worst_mrl, abs(s / q - 1))
    ok = worst_mem <= 1e-10 and worst_zero <= 1e-8 and worst_mrl <= 1e-4
    return ok, (f"memorylessness max rel {worst_mem:.1e}; m_r(0) vs E(Y^r) max rel "
                f"{worst_zero:.1e}; MRL series/quadrature max rel {worst_mrl:.1e}")


def _fd_gradient(p, y):
    v = np.array(p.as_tuple())
    grad = np.empty(4)
    for i in range(4):
        h = 1e-6 * max(1.0, abs(v[i]))
        vals = []
        for step in (-2, -1, 1, 2):
            w = v.copy()
            w[i] += step * h
            vals.append(float(np.sum(logpdf(EwgParams(*w), y))))
        # fourth-order central stencil
        grad[i] = (vals[0] - 8 * vals[1] + 8 * vals[2] - vals[3]) / (12 * h)
    return grad


def check_score():
    rng = np.random.default_rng(8)
    worst = 0.0
    for _ in range(100):
        p = EwgParams(rng.uniform(0.3, 5.0), rng.uniform(0.3, 3.0), rng.uniform(0.4, 3.0),
                      rng.uniform(0.01, 0.95))
        y = sample(p, SampleSpec(int(rng.integers(20, 300)), seed=int(rng.integers(2**31))))
        # evaluate away from the sample's own MLE so no component is near zero
        q = EwgParams(p.alpha * 1.1, p.beta * 0.95, p.gamma_shape * 1.05, p.theta * 0.9)
        analytic = score(q, DataSample(y))
        fd = _fd_gradient(q, y)
        floor = 1e-9 * abs(log_likelihood(q, DataSample(y)))
        worst = max(worst, float(np.max(np.abs(analytic - fd) / np.maximum(np.abs(fd), floor))))
    return worst <= 1e-5, f"100 instances, max component rel error {worst:.1e}"


def check_recovery():
    names = ("alpha", "beta", "gamma_shape", "theta")
    converged, covered, theta_err = 0, dict.fromkeys(names, 0), []
    with_ci = 0
    for rep in range(200):
        y = sample(TRUTH, SampleSpec(5000, seed=10_000 + rep))
        f = fit_mle(DataSample(y))
        if not f.converged:
            continue
        converged += 1
        theta_err.append(abs(f.params.theta - TRUTH.theta))
        if f.ci:
            with_ci += 1
            for name in names:
                lo, hi = f.ci[name]
                covered[name] += lo <= getattr(TRUTH, name) <= hi
    rate = converged / 200
    coverage = {k: v / max(with_ci, 1) for k, v in covered.items()}
    med = float(np.median(theta_err)) if theta_err else math.inf
    ok = rate >= 0.95 and all(0.90 <= c <= 0.99 for c in coverage.values()) and med <= 0.05
    cov_text = ", ".join(f"{k}={v:.3f}" for k, v in coverage.items())
    return ok, f"convergence {rate:.3f}; coverage {cov_text}; median |theta err| {med:.3f}"


SUBMODEL_CASES = {
    SubmodelKind.CWG: [dict(beta=1.0, gamma_shape=1.7, theta=0.4), dict(beta=0.5, gamma_shape=0.6, theta=0.8)],
    SubmodelKind.GEG: [dict(alpha=2.5, beta=1.0, theta=0.3), dict(alpha=0.4, beta=2.0, theta=0.8)],
    SubmodelKind.CEG: [dict(beta=1.0, theta=0.5), dict(beta=3.0, theta=0.1)],
    SubmodelKind.ERG: [dict(alpha=2.0, beta=1.0, theta=0.3), dict(alpha=0.6, beta=0.7, theta=0.8)],
    SubmodelKind.RG: [dict(beta=1.0, theta=0.2), dict(beta=2.0, theta=0.7)],
}


def check_submodels():
    worst_pt, worst_mom = 0.0, 0.0
    for kind, cases in SUBMODEL_CASES.items():
        for free in cases:
            p = make_submodel(kind, **free)
            y = quantile(p, np.linspace(0.001, 0.999, 60))
            for own, general in ((display_pdf, pdf), (display_cdf, cdf),
                                 (display_hazard, hazard)):
                worst_pt = max(worst_pt, float(np.max(np.abs(own(kind, p, y) / general(p, y) - 1))))
            m, v = display_moments(kind, p)
            worst_mom = max(worst_mom, abs(m / raw_moment(p, 1).value - 1), abs(v / variance(p) - 1))
    ok = worst_pt <= 1e-12 and worst_mom <= 1e-4
    return ok, f"pointwise max rel {worst_pt:.1e}; mean/variance max rel {worst_mom:.1e}"


def check_hazard_shapes():
    inc = hazard_shape(EwgParams(2.0, 1.0, 2.0, 0.2))
    dec = hazard_shape(EwgParams(0.5, 1.0, 0.5, 0.2))
    found = {}
    for a, g, th in itertools.product([0.1, 0.25, 0.5, 1, 2, 5, 10], [0.25, 0.5, 1, 2, 4],
                                      [0.0, 0.5, 0.9]):
        found.setdefault(hazard_shape(EwgParams(a, 1.0, g, th)), (a, g, th))
    ok = inc == "increasing" and dec == "decreasing" and "bathtub" in found and "unimodal" in found
    return ok, (f"(2,1,2,0.2)->{inc}, (0.5,1,0.5,0.2)->{dec}, bathtub at (alpha,gamma,theta)="
                f"{found.get('bathtub')}, unimodal at {found.get('unimodal')}")


def check_cli(tmp: Path):
    sim = ["simulate", "--alpha", "2", "--beta", "1", "--gamma", "1.5", "--theta", "0.5",
           "--n", "100000", "--seed", "1"]
    assert main(sim + ["--out", str(tmp / "a.txt")]) == 0
    assert main(sim + ["--out", str(tmp / "b.txt")]) == 0
    same_data = (tmp / "a.txt").read_bytes() == (tmp / "b.txt").read_bytes()
    code1 = main(["fit", str(tmp / "a.txt"), "--out", str(tmp / "m1.json")])
    code2 = main(["fit", str(tmp / "a.txt"), "--out", str(tmp / "m2.json")])
    text = (tmp / "m1.json").read_text()
    same_doc = text == (tmp / "m2.json").read_text()
    doc = ModelDocument.loads(text)
    round_trip = doc.dumps() == text and ModelDocument.loads(doc.dumps()) == doc
    inside = {name: lo <= getattr(TRUTH, name) <= hi for name, (lo, hi) in doc.fit["ci"].items()}
    ok = code1 == code2 == 0 and same_data and same_doc and round_trip and all(inside.values())
    return ok, (f"exit codes {code1},{code2}; deterministic data={same_data} doc={same_doc}; "
                f"round trip={round_trip}; truth inside CI {inside}")


CRITERIA = [
    (1, "normalization", 60, check_normalization),
    (2, "inversion", 10, check_inversion),
    (3, "mixture representation", 30, check_mixture),
    (4, "moment triple agreement", 300, check_moments),
    (5, "entropy", 120, check_entropy),
    (6, "order statistics", 120, check_order_statistics),
    (7, "residual life", 60, check_residual),
    (8, "score correctness", 60, check_score),
    (9, "recovery and coverage", 600, check_recovery),
    (10, "sub-model reduction", 60, check_submodels),
    (11, "hazard-shape exhibition", 120, check_hazard_shapes),
    (12, "CLI round trip", 120, check_cli),
]


def run_criterion(number, title, limit, func, *args):
    start = time.perf_counter()
    ok, detail = func(*args)
    elapsed = time.perf_counter() - start
    passed = ok and elapsed <= limit
    line = (f"{'PASS' if passed else 'FAIL'}  criterion {number:2d} {title}: {detail} "
            f"[{elapsed:.1f} s, budget {limit} s]")
    print(line)
    return passed, line


@pytest.mark.slow
@pytest.mark.parametrize("number,title,limit,func", CRITERIA, ids=[c[1].replace(" ", "_") for c in CRITERIA])
def test_criterion(number, title, limit, func, tmp_path, acceptance_log):
    args = (tmp_path,) if func is check_cli else ()
    passed, line = run_criterion(number, title, limit, func, *args)
    acceptance_log.append(line)
    assert passed, line


if __name__ == "__main__":
    import tempfile

    for number, title, limit, func in CRITERIA:
        with tempfile.TemporaryDirectory() as d:
            run_criterion(number, title, limit, func, *((Path(d),) if func is check_cli else ()))
