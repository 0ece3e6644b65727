"""The exponentiated Weibull-geometric (EWG) law.

Y = max(X_1, ..., X_N) with X_i iid exponentiated Weibull EW(alpha, beta,
gamma) and N geometric on {1, 2, ...} with P(N = n) = (1 - theta) theta^(n-1).
Writing G(y) = 1 - exp(-(beta y)^gamma),

    F(y) = (1 - theta) G^alpha / (1 - theta G^alpha)

All evaluators work in log space: G, G^alpha and 1 - G^alpha are formed
through ``expm1``/``log1p`` so that neither the lower tail (G -> 0) nor the
upper tail (G^alpha -> 1) loses precision.
"""

from __future__ import annotations

import math
from dataclasses import astuple, dataclass

import numpy as np

from .errors import DomainError, TruncationError
from .special import SeriesControl, default_control

_LN2 = math.log(2.0)
_GEOMETRIC_CAP = 10_000_000


@dataclass(frozen=True)
class EwgParams:
    """Parameter vector (alpha, beta, gamma, theta) of the EWG law.

    alpha: exponent of the EW cdf, > 0.
    beta: scale rate (1/time), > 0.
    gamma_shape: Weibull shape, > 0.
    theta: geometric parameter, 0 <= theta < 1.
    """

    alpha: float
    beta: float
    gamma_shape: float
    theta: float = 0.0

    def __post_init__(self):
        for name in ("alpha", "beta", "gamma_shape"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise DomainError(f"{name} must be positive and finite, got {value}")
        if not 0.0 <= self.theta < 1.0:
            raise DomainError(f"theta must lie in [0, 1), got {self.theta}")
        for name in ("alpha", "beta", "gamma_shape", "theta"):
            object.__setattr__(self, name, float(getattr(self, name)))

    def as_tuple(self) -> tuple[float, float, float, float]:
        return astuple(self)

    def with_beta(self, beta: float) -> "EwgParams":
        return EwgParams(self.alpha, beta, self.gamma_shape, self.theta)


@dataclass(frozen=True)
class SampleSpec:
    """How to draw a sample: size, 64-bit seed and construction method.

    ``method="inversion"`` maps uniforms through the closed-form quantile;
    ``method="compound"`` draws N from the geometric law and takes the max of
    N exponentiated-Weibull variates.
    """

    size: int
    seed: int = 0
    method: str = "inversion"

    def __post_init__(self):
        if int(self.size) != self.size or self.size < 1:
            raise DomainError(f"sample size must be a positive integer, got {self.size}")
        if not 0 <= int(self.seed) < 2 ** 64:
            raise DomainError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if self.method not in ("inversion", "compound"):
            raise DomainError(f"unknown sampling method {self.method!r}")


# ---------------------------------------------------------------------------
# shared log-space pieces


def _log1mexp(x):
    """log(1 - exp(x)) for x <= 0, accurate on both sides of -log 2."""
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore"):
        return np.where(x > -_LN2, np.log(-np.expm1(np.minimum(x, 0.0))), np.log1p(-np.exp(x)))


def _log_weibull_cdf(log_u):
    """log(1 - exp(-u)) from log u; keeps precision when u underflows."""
    with np.errstate(over="ignore"):
        u = np.exp(log_u)
    return np.where(u < 1e-8, log_u - 0.5 * u, _log1mexp(-u))


def _times(y, nonneg=True):
    arr = np.asarray(y, dtype=float)
    if nonneg and not np.all(arr >= 0):
        raise DomainError("time arguments must be nonnegative (and not NaN)")
    return arr


def _result(arr, like):
    return float(np.asarray(arr).item()) if np.ndim(like) == 0 else arr


class _Pieces:
    """log G, log G^alpha, log(1 - G^alpha), log(1 - theta G^alpha) for y > 0."""

    __slots__ = ("u", "log_g", "log_ga", "log_1m_ga", "log_d")

    def __init__(self, p: EwgParams, y):
        alpha, beta, gam, theta = p.as_tuple()
        with np.errstate(divide="ignore", over="ignore"):
            log_u = gam * np.log(beta * y)
            self.u = np.exp(log_u)
        self.log_g = _log_weibull_cdf(log_u)
        self.log_ga = alpha * self.log_g
        with np.errstate(divide="ignore"):
            far = self.u > 700.0
            # 1 - (1 - e^-u)^alpha -> alpha e^-u once e^-u underflows
            self.log_1m_ga = np.where(far, math.log(alpha) - self.u,
                                      _log1mexp(np.minimum(self.log_ga, -1e-300)))
            self.log_d = np.log1p(-theta * np.exp(self.log_ga))


def _logpdf_positive(p: EwgParams, y):
    alpha, beta, gam, theta = p.as_tuple()
    pc = _Pieces(p, y)
    with np.errstate(divide="ignore", invalid="ignore"):
        return (math.log1p(-theta) + math.log(alpha) + math.log(gam) + math.log(beta)
                + (gam - 1.0) * np.log(beta * y) - pc.u + (alpha - 1.0) * pc.log_g
                - 2.0 * pc.log_d)


def _log_density_at_zero(p: EwgParams) -> float:
    # near 0, f(y) ~ (1 - theta) alpha gamma beta^(gamma alpha) y^(gamma alpha - 1)
    power = p.alpha * p.gamma_shape
    if math.isclose(power, 1.0, rel_tol=1e-14, abs_tol=0.0):
        return (math.log1p(-p.theta) + math.log(p.alpha) + math.log(p.gamma_shape)
                + power * math.log(p.beta))
    return math.inf if power < 1.0 else -math.inf


def logpdf(p: EwgParams, y):
    """Log density. At y = 0 the analytic limit is returned (may be +-inf)."""
    arr = _times(y)
    out = np.empty_like(arr)
    pos = arr > 0
    out[pos] = _logpdf_positive(p, arr[pos])
    out[~pos] = _log_density_at_zero(p)
    return _result(out, y)


def pdf(p: EwgParams, y):
    """Density f(y); +inf at y = 0 when alpha * gamma < 1."""
    return _result(np.exp(np.asarray(logpdf(p, y))), y)


def cdf(p: EwgParams, y):
    arr = _times(y)
    with np.errstate(divide="ignore"):
        pos = np.where(arr > 0, arr, 1.0)
        pc = _Pieces(p, pos)
        out = (1.0 - p.theta) * np.exp(pc.log_ga - pc.log_d)
    out = np.where(arr > 0, out, 0.0)
    return _result(out, y)


def log_survival(p: EwgParams, y):
    arr = _times(y)
    pos = np.where(arr > 0, arr, 1.0)
    pc = _Pieces(p, pos)
    out = np.where(arr > 0, pc.log_1m_ga - pc.log_d, 0.0)
    return _result(out, y)


def survival(p: EwgParams, y):
    return _result(np.exp(np.asarray(log_survival(p, y))), y)


def hazard(p: EwgParams, y):
    """Hazard rate f/S, formed as exp(log f - log S).

    At y = 0 the hazard equals the density limit, which is +inf when
    alpha * gamma < 1.
    """
    arr = _times(y)
    pos = arr > 0
    out = np.empty_like(arr)
    yp = arr[pos]
    pc = _Pieces(p, yp)
    out[pos] = np.exp(_logpdf_positive(p, yp) - (pc.log_1m_ga - pc.log_d))
    out[~pos] = math.exp(_log_density_at_zero(p)) if _log_density_at_zero(p) < math.inf else math.inf
    return _result(out, y)


def quantile(p: EwgParams, prob):
    """Closed-form inverse cdf for prob in (0, 1)."""
    u = np.asarray(prob, dtype=float)
    if not np.all((u > 0) & (u < 1)):
        raise DomainError("quantile probabilities must lie strictly inside (0, 1)")
    alpha, beta, gam, theta = p.as_tuple()
    # w = u / (1 - theta (1 - u)); need -log(1 - w^(1/alpha))
    log_w = np.log(u) - np.log1p(-theta * (1.0 - u))
    with np.errstate(divide="ignore"):
        z = -_log1mexp(np.minimum(log_w / alpha, -1e-300))
    out = np.exp(np.log(z) / gam) / beta
    return _result(out, prob)


def median(p: EwgParams) -> float:
    return quantile(p, 0.5)


# ---------------------------------------------------------------------------
# exponentiated Weibull components


def ew_logpdf(y, alpha, beta, gam):
    """Log density of EW(alpha, beta, gamma) for y > 0."""
    y = np.asarray(y, dtype=float)
    with np.errstate(divide="ignore", over="ignore"):
        lby = np.log(beta * y)
        u = np.exp(gam * lby)
        return (math.log(alpha) + math.log(gam) + math.log(beta) + (gam - 1.0) * lby - u
                + (alpha - 1.0) * _log_weibull_cdf(gam * lby))


def ew_pdf(y, alpha, beta, gam):
    return np.exp(ew_logpdf(y, alpha, beta, gam))


def ew_cdf(y, alpha, beta, gam):
    y = np.asarray(y, dtype=float)
    with np.errstate(divide="ignore"):
        return np.exp(alpha * _log_weibull_cdf(gam * np.log(beta * y)))


def ew_quantile(prob, alpha, beta, gam):
    u = np.asarray(prob, dtype=float)
    with np.errstate(divide="ignore"):
        z = -_log1mexp(np.minimum(np.log(u) / alpha, -1e-300))
    return np.exp(np.log(z) / gam) / beta


def mixture_pdf(p: EwgParams, y, ctrl: SeriesControl | None = None):
    """Density as the geometric mixture (1 - theta) sum_j theta^j f_EW(y; alpha (j+1)).

    Independent of :func:`pdf`; used as a cross-check. Requires y > 0.
    """
    ctrl = ctrl or default_control()
    arr = np.atleast_1d(_times(y))
    if np.any(arr <= 0):
        raise DomainError("mixture_pdf requires y > 0")
    alpha, beta, gam, theta = p.as_tuple()
    ga = ew_cdf(arr, alpha, beta, gam)
    total = np.zeros_like(arr)
    small = 0
    for j in range(ctrl.max_terms):
        term = (1.0 - theta) * theta ** j * ew_pdf(arr, alpha * (j + 1), beta, gam)
        total += term
        if theta == 0.0:
            break
        rho = theta * ga * (j + 2.0) / (j + 1.0)
        with np.errstate(divide="ignore", invalid="ignore"):
            tail = np.where(rho < 1.0, term * rho / (1.0 - rho), np.inf)
        if np.all(tail <= np.maximum(ctrl.rel_tol * total, ctrl.abs_tol)):
            small += 1
            if small >= ctrl.consecutive_small:
                break
        else:
            small = 0
    else:
        raise TruncationError("mixture series did not converge", partial_sum=total,
                              terms=ctrl.max_terms)
    return _result(total, y)


# ---------------------------------------------------------------------------
# sampling


def _open_uniform(rng, size):
    u = rng.random(size)
    return np.where(u == 0.0, 2.0 ** -54, u)


def sample(p: EwgParams, spec: SampleSpec) -> np.ndarray:
    """Draw ``spec.size`` variates; identical (p, spec) gives identical output."""
    rng = np.random.default_rng(int(spec.seed))
    if spec.method == "inversion":
        return quantile(p, _open_uniform(rng, spec.size))
    alpha, beta, gam, theta = p.as_tuple()
    if theta == 0.0:
        n = np.ones(spec.size, dtype=np.int64)
    else:
        v = _open_uniform(rng, spec.size)
        draws = 1.0 + np.floor(np.log(v) / math.log(theta))
        if np.any(draws > _GEOMETRIC_CAP):
            raise DomainError("geometric draw exceeded the 1e7 component cap")
        n = draws.astype(np.int64)
    out = np.empty(spec.size)
    # bound memory: process the compound draws in chunks of samples
    start = 0
    while start < spec.size:
        stop = start + 1
        budget = int(n[start])
        while stop < spec.size and budget + n[stop] <= 4_000_000:
            budget += int(n[stop])
            stop += 1
        counts = n[start:stop]
        x = ew_quantile(_open_uniform(rng, int(counts.sum())), alpha, beta, gam)
        offsets = np.concatenate(([0], np.cumsum(counts)[:-1]))
        out[start:stop] = np.maximum.reduceat(x, offsets)
        start = stop
    return out


# ---------------------------------------------------------------------------
# hazard shape

HAZARD_SHAPES = ("increasing", "decreasing", "bathtub", "unimodal", "constant", "other")


def hazard_shape(p: EwgParams, points: int = 2048, dead_band: float = 1e-9,
                 lower_prob: float = 1e-4, upper_prob: float = 1 - 1e-4) -> str:
    """Classify the hazard curve over the bulk of the distribution.

    The hazard is evaluated on a log-spaced grid between two quantiles; each
    successive difference is given a sign (zero inside a relative dead band)
    and the sequence of sign runs decides the label.
    """
    lo, hi = quantile(p, lower_prob), quantile(p, upper_prob)
    grid = np.geomspace(lo, hi, points)
    h = hazard(p, grid)
    d = np.diff(h)
    scale = np.maximum(np.abs(h[1:]), np.abs(h[:-1]))
    signs = np.where(np.abs(d) <= dead_band * scale, 0, np.sign(d)).astype(int)
    signs = signs[signs != 0]
    if signs.size == 0:
        return "constant"
    runs = [int(signs[0])]
    for s in signs[1:]:
        if s != runs[-1]:
            runs.append(int(s))
    pattern = tuple(runs)
    return {(1,): "increasing", (-1,): "decreasing", (-1, 1): "bathtub",
            (1, -1): "unimodal"}.get(pattern, "other")
