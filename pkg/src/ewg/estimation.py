"""Maximum-likelihood fitting with observed information and Wald intervals.

The optimizer works on z = (log alpha, log beta, log gamma, logit theta),
with theta mapped into [1e-8, 1 - 1e-8], and uses the analytic score
chain-ruled through that map. Each start runs BFGS and is then polished by
Newton steps on the original scale, with the Hessian taken from central
differences of the analytic score.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from statistics import NormalDist

import numpy as np
from scipy import optimize
from scipy.special import expit, logit

from . import kernels
from .distribution import EwgParams, logpdf
from .errors import DomainError, EWGError
from .submodels import PARAM_NAMES, PINNED, SubmodelKind, as_kind, free_parameters

MIN_FIT_SIZE = 5
THETA_FLOOR = 1e-8
STATUSES = ("converged", "boundary", "failed")
_START_PATTERNS = ((1, 1, 1, 1), (-1, -1, -1, -1), (1, -1, 1, -1), (-1, 1, -1, 1))
_START_STEP = 0.5
_FD_STEP = np.finfo(float).eps ** (1.0 / 3.0)


@dataclass(frozen=True, eq=False)
class DataSample:
    """Complete (uncensored) lifetimes; every value must be positive and finite."""

    values: np.ndarray

    def __post_init__(self):
        arr = np.array(self.values, dtype=np.float64).ravel()
        bad = np.flatnonzero(~(np.isfinite(arr) & (arr > 0)))
        if bad.size:
            i = int(bad[0])
            raise DomainError(f"observation {i + 1} is {arr[i]!r}; lifetimes must be positive")
        if arr.size == 0:
            raise DomainError("empty sample")
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    @property
    def n(self) -> int:
        return int(self.values.size)


@dataclass(eq=False)
class FitResult:
    """Outcome of :func:`fit_mle`.

    ``observed_info`` and ``std_errors`` refer to ``free_names`` (all four
    parameters for the full model). ``ci`` maps each free parameter to its
    Wald interval and is ``None`` when the information is not positive
    definite or the fit failed.
    """

    params: EwgParams
    loglik: float
    score_inf_norm: float
    observed_info: np.ndarray | None
    std_errors: dict[str, float] | None
    ci: dict[str, tuple[float, float]] | None
    converged: bool
    iterations: int
    multistart_index: int
    status: str
    kind: SubmodelKind = SubmodelKind.FULL
    free_names: tuple[str, ...] = PARAM_NAMES
    level: float = 0.95
    n: int = 0
    warnings: list[str] = field(default_factory=list)

    @property
    def aic(self) -> float:
        return 2.0 * len(self.free_names) - 2.0 * self.loglik


def _as_sample(d) -> DataSample:
    return d if isinstance(d, DataSample) else DataSample(d)


def log_likelihood(p: EwgParams, d: DataSample) -> float:
    """Sum of log densities, through the same path as :func:`ewg.distribution.logpdf`."""
    d = _as_sample(d)
    return float(np.sum(logpdf(p, d.values)))


def _kernel(theta_vec, y):
    a, b, g, t = theta_vec
    return kernels.loglik_score(float(a), float(b), float(g), float(t), y)


def score(p: EwgParams, d: DataSample) -> np.ndarray:
    """Gradient of the log-likelihood in (alpha, beta, gamma, theta)."""
    d = _as_sample(d)
    return np.array(_kernel(p.as_tuple(), d.values)[1:])


def _information(theta_vec, y, free_idx):
    """-d score / d Theta over ``free_idx`` by central differences of the score."""
    k = len(free_idx)
    h = np.zeros((k, k))
    for col, i in enumerate(free_idx):
        step = _FD_STEP * (1.0 + abs(theta_vec[i]))
        up = np.array(theta_vec, dtype=float)
        dn = np.array(theta_vec, dtype=float)
        up[i] += step
        dn[i] -= step
        # theta +- step may leave [0, 1); the score formula stays valid there
        su = np.array(_kernel(up, y)[1:])[free_idx]
        sd = np.array(_kernel(dn, y)[1:])[free_idx]
        h[:, col] = (su - sd) / (2.0 * step)
    raw = -h
    return 0.5 * (raw + raw.T), float(np.max(np.abs(raw - raw.T)))


def observed_information(p: EwgParams, d: DataSample) -> np.ndarray:
    """Observed information I_n = -Hessian, 4x4, symmetrized."""
    d = _as_sample(d)
    info, _ = _information(p.as_tuple(), d.values, [0, 1, 2, 3])
    return info


# ---------------------------------------------------------------------------
# optimisation


class _Problem:
    def __init__(self, y, kind):
        self.y = y
        self.n = y.size
        self.kind = kind
        self.free = free_parameters(kind)
        self.free_idx = [PARAM_NAMES.index(name) for name in self.free]
        pinned = PINNED[kind]
        self.base = np.array([pinned.get(name, np.nan) for name in PARAM_NAMES])

    # z <-> Theta
    def to_theta(self, z):
        th = self.base.copy()
        for zi, i in zip(z, self.free_idx):
            th[i] = (THETA_FLOOR + (1 - 2 * THETA_FLOOR) * expit(zi)) if i == 3 else math.exp(zi)
        return th

    def to_z(self, th):
        z = []
        for i in self.free_idx:
            if i == 3:
                q = (min(max(th[3], THETA_FLOOR), 1 - THETA_FLOOR) - THETA_FLOOR) / (1 - 2 * THETA_FLOOR)
                z.append(float(logit(min(max(q, 1e-12), 1 - 1e-12))))
            else:
                z.append(math.log(th[i]))
        return np.array(z)

    def jac_diag(self, z, th):
        out = []
        for zi, i in zip(z, self.free_idx):
            if i == 3:
                s = expit(zi)
                out.append((1 - 2 * THETA_FLOOR) * s * (1 - s))
            else:
                out.append(th[i])
        return np.array(out)

    def evaluate(self, th):
        ll, *grad = _kernel(th, self.y)
        return ll, np.array(grad)[self.free_idx]

    def objective(self, z):
        th = self.to_theta(z)
        ll, g = self.evaluate(th)
        if not (math.isfinite(ll) and np.all(np.isfinite(g))):
            return 1e300, np.zeros_like(z)
        return -ll / self.n, -g * self.jac_diag(z, th) / self.n

    def tolerance(self, ll):
        return 1e-6 * max(1.0, abs(ll) / self.n)

    def projected(self, th, g):
        # a theta pinned at its floor with a negative score is a KKT point
        g = g.copy()
        for pos, i in enumerate(self.free_idx):
            if i == 3:
                at_low = th[3] <= THETA_FLOOR * (1 + 1e-9) and g[pos] < 0
                at_high = th[3] >= 1 - THETA_FLOOR * 1.0001 and g[pos] > 0
                if at_low or at_high:
                    g[pos] = 0.0
        return g


def _initial_values(y, kind) -> np.ndarray:
    """Weibull probability-plot estimates for (beta, gamma); alpha = 1, theta = 0.5."""
    ys = np.sort(y)
    n = ys.size
    ranks = (np.arange(1, n + 1) - 0.3) / (n + 0.4)
    lx = np.log(ys)
    ly = np.log(-np.log1p(-ranks))
    slope, intercept = np.polyfit(lx, ly, 1)
    gam = float(slope) if slope > 0 and math.isfinite(slope) else 1.0
    beta = math.exp(intercept / gam)
    start = np.array([1.0, beta, gam, 0.5])
    for name, value in PINNED[kind].items():
        start[PARAM_NAMES.index(name)] = value
    return start


def _newton_polish(prob: _Problem, th, max_steps=25):
    steps = 0
    ll, g = prob.evaluate(th)
    active = list(range(len(prob.free_idx)))
    if 3 in prob.free_idx and th[3] < 1e-6 and g[prob.free_idx.index(3)] < 0:
        # the likelihood still pulls theta down: hold it at the floor
        th = th.copy()
        th[3] = THETA_FLOOR
        ll, g = prob.evaluate(th)
        active.remove(prob.free_idx.index(3))
    idx = [prob.free_idx[a] for a in active]
    for _ in range(max_steps):
        # aim well below the convergence tolerance so the verdict is not marginal
        if np.max(np.abs(prob.projected(th, g))) <= 1e-4 * prob.tolerance(ll):
            break
        info, _ = _information(th, prob.y, idx)
        try:
            np.linalg.cholesky(info)
            delta = np.linalg.solve(info, g[active])
        except np.linalg.LinAlgError:
            break
        step = 1.0
        improved = False
        for _ in range(30):
            cand = th.copy()
            cand[idx] = th[idx] + step * delta
            ok = np.all(cand[:3] > 0) and (3 not in idx or THETA_FLOOR <= cand[3] <= 1 - THETA_FLOOR)
            if ok:
                ll_c, g_c = prob.evaluate(cand)
                if math.isfinite(ll_c) and ll_c >= ll - 1e-12 * abs(ll):
                    th, ll, g = cand, ll_c, g_c
                    improved = True
                    break
            step *= 0.5
        steps += 1
        if not improved:
            break
    return th, ll, g, steps


def _run_start(prob: _Problem, start_theta):
    z0 = prob.to_z(start_theta)
    res = optimize.minimize(prob.objective, z0, jac=True, method="BFGS",
                            options={"gtol": 1e-9, "maxiter": 2000})
    th = prob.to_theta(res.x)
    th, ll, g, polish = _newton_polish(prob, th)
    return th, ll, g, int(res.nit) + polish


def fit_mle(d, kind=SubmodelKind.FULL, level: float = 0.95, seed: int | None = None) -> FitResult:
    """Maximum-likelihood estimate of the (restricted) EWG parameters.

    Five starts are tried: the probability-plot initial value and four
    sign patterns of +-0.5 on the transformed scale. The highest
    log-likelihood wins; ties go to the lower start index. ``seed`` is
    accepted for interface symmetry; the procedure is deterministic.
    """
    d = _as_sample(d)
    kind = as_kind(kind)
    if d.n < MIN_FIT_SIZE:
        raise DomainError(f"need at least {MIN_FIT_SIZE} observations to fit, got {d.n}")
    if not 0 < level < 1:
        raise DomainError(f"confidence level must lie in (0, 1), got {level}")
    y = np.ascontiguousarray(d.values)
    prob = _Problem(y, kind)
    base = _initial_values(y, kind)
    z_base = prob.to_z(base)
    starts = [base]
    for pattern in _START_PATTERNS:
        z = z_base + _START_STEP * np.array(pattern[: len(z_base)], dtype=float)
        starts.append(prob.to_theta(z))

    best = None
    iterations = 0
    for index, start in enumerate(starts):
        try:
            th, ll, g, its = _run_start(prob, start)
        except (ArithmeticError, ValueError, np.linalg.LinAlgError):
            continue
        iterations += its
        if not math.isfinite(ll):
            continue
        if best is None or ll > best[1]:
            best = (th, ll, g, index)
    if best is None:
        raise EWGError("every start failed to produce a finite log-likelihood")

    th, ll, g, index = best
    proj = prob.projected(th, g)
    norm = float(np.max(np.abs(proj)))
    converged = norm <= prob.tolerance(ll)
    boundary = converged and bool(np.any(proj != g))
    status = "boundary" if boundary else ("converged" if converged else "failed")
    params = EwgParams(*th)
    result = FitResult(params=params, loglik=ll, score_inf_norm=norm, observed_info=None,
                       std_errors=None, ci=None, converged=converged, iterations=iterations,
                       multistart_index=index, status=status, kind=kind,
                       free_names=prob.free, level=level, n=d.n)
    if boundary:
        result.warnings.append("theta estimate on the boundary; Wald intervals are unreliable")
    info, asym = _information(th, y, prob.free_idx)
    result.observed_info = info
    if asym > 1e-4 * np.linalg.norm(info):
        result.warnings.append(f"observed information asymmetry {asym:.3g} before symmetrizing")
    if not converged:
        result.warnings.append("score tolerance not met")
        return result
    try:
        np.linalg.cholesky(info)
    except np.linalg.LinAlgError:
        result.warnings.append("observed information not positive definite; intervals withheld")
        return result
    cov = np.linalg.inv(info)
    result.std_errors = {name: float(math.sqrt(cov[i, i])) for i, name in enumerate(prob.free)}
    result.ci = confidence_intervals(result, level)
    return result


def confidence_intervals(f: FitResult, level: float = 0.95) -> dict[str, tuple[float, float]]:
    """Wald intervals estimate +- z sqrt((I^-1)_rr), clipped to the parameter space."""
    if not f.converged or f.std_errors is None:
        raise EWGError("confidence intervals need a converged fit with positive-definite information")
    if not 0 < level < 1:
        raise DomainError(f"confidence level must lie in (0, 1), got {level}")
    z = NormalDist().inv_cdf(0.5 + level / 2.0)
    out = {}
    for name in f.free_names:
        est = getattr(f.params, name)
        se = f.std_errors[name]
        lo, hi = est - z * se, est + z * se
        if name == "theta":
            lo, hi = max(lo, 0.0), min(hi, math.nextafter(1.0, 0.0))
        else:
            lo = max(lo, math.nextafter(0.0, 1.0))
        out[name] = (lo, hi)
    return out
