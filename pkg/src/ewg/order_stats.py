"""Distribution and moments of the r-th order statistic Y_{r:n}.

With B = B(r, n - r + 1) the density is

    f_{r:n}(y) = alpha gamma beta^gamma (1-theta)^r / B
                 * y^(gamma-1) e^-u G^(alpha r - 1) (1 - G^alpha)^(n-r) / (1 - theta G^alpha)^(n+1)

and expanding the denominator in theta and both powers binomially gives the
moment series

    E(Y_{r:n}^k) = alpha beta^-k (1-theta)^r Gamma(k/gamma + 1) / B
                   * sum_i theta^i C(n+i, i) sum_{j<=n-r} (-1)^j C(n-r, j)
                     sum_s (-1)^s C(alpha (i+j+r) - 1, s) (s+1)^-(k/gamma+1)
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .distribution import EwgParams, _Pieces, _times, cdf, log_survival
from .errors import DomainError
from .moments import ENGINES, MomentResult
from .quadrature import integrate_support
from .special import (MpWeights, SeriesControl, SeriesSum, binomial_power_sum,
                      default_control, positive_series)


@dataclass(frozen=True)
class OrderStatSpec:
    """Rank ``r`` within a sample of size ``n`` (1 <= r <= n)."""

    n: int
    r: int

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise DomainError(f"sample size n must be a positive integer, got {self.n}")
        if int(self.r) != self.r or not 1 <= self.r <= self.n:
            raise DomainError(f"rank r must satisfy 1 <= r <= n={self.n}, got {self.r}")

    def log_beta(self) -> float:
        n, r = self.n, self.r
        return math.lgamma(r) + math.lgamma(n - r + 1) - math.lgamma(n + 1)


def _positive_times(y):
    arr = _times(y)
    if not np.all(arr > 0):
        raise DomainError("order statistic functions require y > 0")
    return arr


def order_stat_logpdf(p: EwgParams, s: OrderStatSpec, y):
    arr = _positive_times(y)
    alpha, beta, gam, theta = p.as_tuple()
    pc = _Pieces(p, arr)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = (math.log(alpha) + math.log(gam) + gam * math.log(beta)
               + s.r * math.log1p(-theta) - s.log_beta()
               + (gam - 1.0) * np.log(arr) - pc.u + (alpha * s.r - 1.0) * pc.log_g
               + (s.n - s.r) * pc.log_1m_ga - (s.n + 1) * pc.log_d)
    return float(out) if np.ndim(y) == 0 else out


def order_stat_pdf(p: EwgParams, s: OrderStatSpec, y):
    """Density of Y_{r:n} at y > 0."""
    out = np.exp(order_stat_logpdf(p, s, y))
    return float(out) if np.ndim(y) == 0 else out


def order_stat_cdf(p: EwgParams, s: OrderStatSpec, y):
    """P(Y_{r:n} <= y) = sum_{k=r}^n C(n, k) F^k (1 - F)^(n-k)."""
    arr = _positive_times(y)
    f = np.asarray(cdf(p, arr))
    surv = np.exp(np.asarray(log_survival(p, arr)))
    out = np.zeros_like(f)
    for k in range(s.r, s.n + 1):
        out += math.comb(s.n, k) * f ** k * surv ** (s.n - k)
    out = np.minimum(out, 1.0)
    return float(out) if np.ndim(y) == 0 else out


def order_stat_moment_series(p: EwgParams, s: OrderStatSpec, k: int,
                             ctrl: SeriesControl | None = None) -> MomentResult:
    """E(Y_{r:n}^k) from the triple series in the module docstring."""
    if int(k) != k or k < 1:
        raise DomainError(f"k must be a positive integer, got {k}")
    ctrl = ctrl or default_control()
    alpha, beta, gam, theta = p.as_tuple()
    n, r = s.n, s.r
    power = k / gam + 1.0
    weights = MpWeights("power", 1.0, power)
    signs = [(-1) ** j * math.comb(n - r, j) for j in range(n - r + 1)]
    log_theta = math.log(theta) if theta > 0 else -math.inf

    def term(i, target):
        w = math.exp(i * log_theta + math.lgamma(n + i + 1.0) - math.lgamma(i + 1.0)
                     - math.lgamma(n + 1.0)) if i else 1.0
        total = 0.0
        err = 0.0
        used = 0
        for j, c in enumerate(signs):
            inner = binomial_power_sum(alpha * (i + j + r) - 1.0, 1.0, power, ctrl,
                                       abs_target=target / (w * abs(c) * len(signs)),
                                       weights=weights)
            total += c * inner.value
            err += abs(c) * inner.truncation_estimate
            used += inner.terms
        return SeriesSum(w * total, used, w * err)

    res = positive_series(term, lambda i: theta * (n + i + 1.0) / (i + 1.0), ctrl,
                          what="order statistic series")
    log_scale = (math.log(alpha) - k * math.log(beta) + r * math.log1p(-theta)
                 + math.lgamma(power) - s.log_beta())
    scale = math.exp(log_scale)
    return MomentResult(scale * res.value, res.terms, scale * res.truncation_estimate, "series")


def order_stat_moment_quadrature(p: EwgParams, s: OrderStatSpec, k: int) -> MomentResult:
    if int(k) != k or k < 1:
        raise DomainError(f"k must be a positive integer, got {k}")
    res = integrate_support(lambda y: y ** k * order_stat_pdf(p, s, y), p, epsrel=1e-11)
    return MomentResult(res.value, res.evaluations, res.abserr, "quadrature")


def order_stat_moment(p: EwgParams, s: OrderStatSpec, k: int,
                      ctrl: SeriesControl | None = None,
                      engine: str = "quadrature") -> MomentResult:
    """k-th raw moment of Y_{r:n}; quadrature by default, series on request."""
    if engine not in ENGINES:
        raise DomainError(f"engine must be one of {ENGINES}, got {engine!r}")
    if engine == "series":
        return order_stat_moment_series(p, s, k, ctrl)
    return order_stat_moment_quadrature(p, s, k)
