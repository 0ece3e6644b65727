"""Rényi and Shannon entropies.

Expanding f^r with the negative-binomial series of the geometric denominator
and the binomial series of (1 - e^-u)^(alpha (j + r) - r) gives

    int f^r = [alpha (1-theta)]^r (beta gamma)^(r-1) Gamma(s)
              * sum_j C(2r+j-1, j) theta^j sum_k (-1)^k C(alpha (j+r) - r, k) (k + r)^-s

with s = r - (r - 1)/gamma. The inner sum converges iff alpha r - (r-1)/gamma > 0,
which is also the condition for int f^r to be finite near the origin.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .distribution import EwgParams, logpdf
from .errors import DivergenceError, DomainError
from .quadrature import integrate_support
from .special import (MpWeights, SeriesControl, SeriesSum, binomial_power_sum,
                      default_control, positive_series)

METHODS = ("closed_series", "quadrature", "limit")
_LIMIT_STEP = 1e-4


@dataclass(frozen=True)
class EntropyResult:
    value: float
    method: str
    terms_used: int

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}")


def _check_order(p: EwgParams, r: float) -> float:
    r = float(r)
    if not (r > 0 and math.isfinite(r)):
        raise DomainError(f"Renyi order must be positive, got {r}")
    if r == 1.0:
        raise DomainError("Renyi order r = 1 is the Shannon entropy; use shannon_entropy")
    return r


def _power_integral_finite(p: EwgParams, r: float) -> bool:
    # near 0, f^r ~ y^(r (alpha gamma - 1)); integrable iff that power exceeds -1
    return r * (p.alpha * p.gamma_shape - 1.0) > -1.0


def log_power_integral_series(p: EwgParams, r: float, ctrl: SeriesControl) -> tuple[float, int]:
    """log of int f^r from the double series; returns (value, terms)."""
    alpha, beta, gam, theta = p.as_tuple()
    s = r - (r - 1.0) / gam
    if not s > 0:
        raise DomainError(
            f"series needs r - (r-1)/gamma > 0; fails for gamma={gam}, r={r}")
    if not _power_integral_finite(p, r):
        raise DivergenceError(f"int f^r diverges at the origin for r={r}, alpha*gamma={alpha * gam}")
    weights = MpWeights("power", r, s)
    log_theta = math.log(theta) if theta > 0 else -math.inf

    def term(j, target):
        log_w = math.lgamma(2 * r + j) - math.lgamma(2 * r) - math.lgamma(j + 1.0)
        w = math.exp(log_w + j * log_theta) if j else 1.0
        inner = binomial_power_sum(alpha * (j + r) - r, r, s, ctrl,
                                   abs_target=target / w if w > 0 else 0.0, weights=weights)
        return SeriesSum(w * inner.value, inner.terms, w * inner.truncation_estimate)

    total = positive_series(term, lambda j: theta * max(1.0, (2 * r + j) / (j + 1.0)), ctrl,
                            what="Renyi series")
    log_value = (r * (math.log(alpha) + math.log1p(-theta)) + (r - 1.0) * math.log(beta * gam)
                 + math.lgamma(s) + math.log(total.value))
    return log_value, total.terms


def log_power_integral_quadrature(p: EwgParams, r: float) -> tuple[float, int]:
    """log of int f^r by adaptive quadrature."""
    if not _power_integral_finite(p, r):
        raise DivergenceError(f"int f^r diverges at the origin for r={r}, alpha*gamma={p.alpha * p.gamma_shape}")
    res = integrate_support(lambda y: math.exp(r * logpdf(p, y)), p, epsrel=1e-11)
    return math.log(res.value), res.evaluations


def renyi_entropy(p: EwgParams, r: float, ctrl: SeriesControl | None = None,
                  engine: str = "series") -> EntropyResult:
    """Rényi entropy log(int f^r) / (1 - r), in nats.

    ``engine`` is ``"series"`` (the double series above) or ``"quadrature"``.
    """
    r = _check_order(p, r)
    ctrl = ctrl or default_control()
    if engine == "series":
        log_int, terms = log_power_integral_series(p, r, ctrl)
        method = "closed_series"
    elif engine == "quadrature":
        log_int, terms = log_power_integral_quadrature(p, r)
        method = "quadrature"
    else:
        raise DomainError(f"unknown engine {engine!r}")
    return EntropyResult(log_int / (1.0 - r) + 0.0, method, terms)


def shannon_entropy(p: EwgParams, ctrl: SeriesControl | None = None,
                    engine: str = "quadrature") -> EntropyResult:
    """Shannon entropy E[-log f(Y)].

    ``engine="quadrature"`` integrates -f log f; ``engine="limit"`` averages the
    series Rényi entropies at r = 1 -+ 1e-4, which cancels the first-order
    term of the expansion around r = 1.
    """
    if engine == "quadrature":
        def integrand(y):
            lf = logpdf(p, y)
            return -math.exp(lf) * lf if lf > -math.inf else 0.0

        # the entropy can vanish, so an absolute floor joins the relative target
        res = integrate_support(integrand, p, epsrel=1e-11, epsabs=1e-13)
        return EntropyResult(res.value, "quadrature", res.evaluations)
    if engine == "limit":
        lo = renyi_entropy(p, 1.0 - _LIMIT_STEP, ctrl)
        hi = renyi_entropy(p, 1.0 + _LIMIT_STEP, ctrl)
        return EntropyResult(0.5 * (lo.value + hi.value), "limit", lo.terms_used + hi.terms_used)
    raise DomainError(f"unknown engine {engine!r}")
