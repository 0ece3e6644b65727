"""Raw moments, mean, variance and moment generating function.

Two engines are available. ``"series"`` sums the double series

    E(Y^k) = (1-theta) alpha beta^-k Gamma(k/gamma + 1)
             * sum_{n>=1} n theta^(n-1) sum_{j>=0} (-1)^j C(n alpha - 1, j) (j+1)^-(k/gamma+1)

obtained by expanding the geometric denominator of the density and then
(1 - e^-u)^(n alpha - 1) binomially. For integer alpha the inner sum stops
at j = n alpha - 1. ``"quadrature"`` integrates y^k f(y) directly and is the
default because it needs no care as theta -> 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .distribution import EwgParams, pdf
from .errors import ConditioningError, DivergenceError, DomainError, TruncationError
from .quadrature import integrate_support
from .special import (MpWeights, SeriesControl, SeriesSum, binomial_power_sum,
                      default_control, positive_series)

ENGINES = ("series", "quadrature")
_QUAD_RTOL = 1e-11


@dataclass(frozen=True)
class MomentResult:
    """A moment-type quantity with its evaluation diagnostics."""

    value: float
    terms_used: int
    truncation_estimate: float
    engine: str

    def __post_init__(self):
        if not self.truncation_estimate >= 0:
            raise ValueError("truncation_estimate must be nonnegative")
        if self.engine not in ENGINES:
            raise ValueError(f"unknown engine {self.engine!r}")


def _check_order(k, name="k"):
    if int(k) != k or k < 1:
        raise DomainError(f"{name} must be a positive integer, got {k}")
    return int(k)


def _check_engine(engine):
    if engine not in ENGINES:
        raise DomainError(f"engine must be one of {ENGINES}, got {engine!r}")


def geometric_binomial_sum(p: EwgParams, power: float, ctrl: SeriesControl) -> SeriesSum:
    """sum_{n>=1} n theta^(n-1) sum_j (-1)^j C(n alpha - 1, j) (j+1)^-power.

    Shared by the raw moments and the closed-form sub-model displays.
    """
    alpha, theta = p.alpha, p.theta
    weights = MpWeights("power", 1.0, power)

    def term(n, target):
        w = n * theta ** (n - 1)
        inner = binomial_power_sum(n * alpha - 1.0, 1.0, power, ctrl,
                                   abs_target=target / w, weights=weights)
        return SeriesSum(w * inner.value, inner.terms, w * inner.truncation_estimate)

    return positive_series(term, lambda n: theta * (n + 1.0) / n, ctrl, start=1,
                           what="moment series")


def _log_moment_series(p: EwgParams, k: int, ctrl: SeriesControl):
    power = k / p.gamma_shape + 1.0
    s = geometric_binomial_sum(p, power, ctrl)
    log_scale = (math.log1p(-p.theta) + math.log(p.alpha) - k * math.log(p.beta)
                 + math.lgamma(power))
    return log_scale + math.log(s.value), s


def raw_moment_series(p: EwgParams, k: int, ctrl: SeriesControl | None = None) -> MomentResult:
    """E(Y^k) from the double series (see module docstring)."""
    k = _check_order(k)
    ctrl = ctrl or default_control()
    log_value, s = _log_moment_series(p, k, ctrl)
    value = math.exp(log_value)
    return MomentResult(value, s.terms, value * s.truncation_estimate / s.value, "series")


def raw_moment_quadrature(p: EwgParams, k: int) -> MomentResult:
    """E(Y^k) by adaptive quadrature of y^k f(y) over (0, inf)."""
    k = _check_order(k)
    res = integrate_support(lambda y: y ** k * pdf(p, y), p, epsrel=_QUAD_RTOL)
    return MomentResult(res.value, res.evaluations, res.abserr, "quadrature")


def raw_moment(p: EwgParams, k: int, ctrl: SeriesControl | None = None,
               engine: str = "quadrature") -> MomentResult:
    _check_engine(engine)
    if engine == "series":
        return raw_moment_series(p, k, ctrl)
    return raw_moment_quadrature(p, k)


def mean(p: EwgParams, ctrl: SeriesControl | None = None, engine: str = "quadrature") -> float:
    return raw_moment(p, 1, ctrl, engine).value


def variance(p: EwgParams, ctrl: SeriesControl | None = None,
             engine: str = "quadrature") -> float:
    """E(Y^2) - E(Y)^2, floored at zero."""
    m1 = raw_moment(p, 1, ctrl, engine).value
    m2 = raw_moment(p, 2, ctrl, engine).value
    return max(m2 - m1 * m1, 0.0)


# ---------------------------------------------------------------------------
# moment generating function


def mgf_domain_check(p: EwgParams, t: float, engine: str) -> None:
    """Raise :class:`DivergenceError` where the requested evaluation cannot converge.

    The density tail behaves like exp(-(beta y)^gamma), so E(e^{tY}) is finite
    for every t when gamma > 1, for t < beta when gamma = 1 and only for
    t <= 0 when gamma < 1. The power series sum_i t^i E(Y^i)/i! has a smaller
    domain: its terms grow like Gamma(i/gamma)/i!, so it converges for every
    t when gamma > 1, for |t| < beta when gamma = 1 and never when gamma < 1.
    """
    g = p.gamma_shape
    if engine == "quadrature":
        if t > 0 and (g < 1 or (g == 1 and t >= p.beta)):
            raise DivergenceError(f"E(exp(tY)) is infinite for t={t} with gamma={g}")
        return
    if g < 1:
        raise DivergenceError(f"moment series of the mgf diverges for gamma={g} < 1")
    if g == 1 and abs(t) >= p.beta:
        raise DivergenceError(f"moment series of the mgf needs |t| < beta={p.beta} when gamma=1")


def mgf(p: EwgParams, t: float, ctrl: SeriesControl | None = None,
        engine: str = "series") -> float:
    """E(exp(tY)).

    The series engine sums t^i E(Y^i) / i! with each moment taken from the
    double series; the quadrature engine integrates e^{ty} f(y).
    """
    _check_engine(engine)
    t = float(t)
    if t == 0.0:
        return 1.0
    mgf_domain_check(p, t, engine)
    ctrl = ctrl or default_control()
    if engine == "quadrature":
        return integrate_support(lambda y: math.exp(t * y) * pdf(p, y), p,
                                 epsrel=_QUAD_RTOL).value

    total = 1.0
    abs_total = 1.0
    small = 0
    prev = 1.0
    log_t = math.log(abs(t))
    growing = 0
    for i in range(1, ctrl.max_terms):
        log_m, _ = _log_moment_series(p, i, ctrl)
        mag = math.exp(i * log_t - math.lgamma(i + 1.0) + log_m)
        term = -mag if (t < 0 and i % 2) else mag
        total += term
        abs_total += mag
        rho = mag / prev
        prev = mag
        growing = growing + 1 if rho >= 1.0 else 0
        if growing >= 50 or not math.isfinite(total):
            raise DivergenceError(f"mgf series terms keep growing at t={t}")
        tail = mag * rho / (1.0 - rho) if rho < 1.0 else math.inf
        if tail <= max(ctrl.rel_tol * abs(total), ctrl.abs_tol):
            small += 1
            if small >= ctrl.consecutive_small:
                break
        else:
            small = 0
    else:
        raise TruncationError("mgf series did not converge", partial_sum=total,
                              terms=ctrl.max_terms)
    if 4.0 * 2.2e-16 * abs_total > 1e-8 * abs(total):
        raise ConditioningError(
            f"alternating mgf series lost too many digits at t={t}; use the quadrature engine")
    return total
