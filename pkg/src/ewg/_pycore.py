"""Pure-Python implementation of the numeric kernels.

Mirrors ``ewg._core`` (Cython) function for function; ``ewg.kernels`` picks
one of the two at import time.
"""

import math

import numpy as np

FINITE = 0
CONVERGED = 1
LIMIT = 2

_EPS = 2.220446049250313e-16
_FPMIN = 1e-300
_MAXIT = 100000


def _lower_series(s, t):
    # gamma(s, t) = t^s e^-t sum_n t^n / (s (s+1) ... (s+n))
    ap = s
    term = 1.0 / s
    total = term
    for _ in range(_MAXIT):
        ap += 1.0
        term *= t / ap
        total += term
        if abs(term) < abs(total) * _EPS:
            break
    return total * math.exp(s * math.log(t) - t)


def _upper_cf(s, t):
    # modified Lentz evaluation of the Legendre continued fraction
    b = t + 1.0 - s
    c = 1.0 / _FPMIN
    d = 1.0 / b
    h = d
    for i in range(1, _MAXIT):
        an = -i * (i - s)
        b += 2.0
        d = an * d + b
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = b + an / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            break
    return math.exp(s * math.log(t) - t) * h


def upper_gamma(s, t):
    """Upper incomplete gamma integral from t to infinity (unregularized)."""
    if t <= 0.0:
        return math.gamma(s)
    if t < s + 1.0:
        return math.gamma(s) - _lower_series(s, t)
    return _upper_cf(s, t)


def lower_gamma(s, t):
    """Lower incomplete gamma integral from 0 to t (unregularized)."""
    if t <= 0.0:
        return 0.0
    if t < s + 1.0:
        return _lower_series(s, t)
    return math.gamma(s) - _upper_cf(s, t)


def binom_power_head(a, shift, power, k_start, k_stop, c_start, ref,
                     rel_tol, abs_tol, consecutive_small):
    """Partial sum of (-1)^k C(a, k) (k + shift)^-power for k_start <= k < k_stop.

    ``c_start`` is (-1)^k_start C(a, k_start). Stops early once the estimated
    tail is below tolerance relative to ``ref`` plus the partial sum.

    Returns (partial, abs_partial, k_next, c_next, status).
    """
    c = c_start
    total = 0.0
    abs_total = 0.0
    small = 0
    q = a + 1.0 + power
    k_mono = abs(a) + 1.0
    k = k_start
    while k < k_stop:
        term = c * (k + shift) ** (-power)
        total += term
        abs_total += abs(term)
        c_next = c * (k - a) / (k + 1.0)
        k += 1
        if c_next == 0.0:
            return total, abs_total, k, 0.0, FINITE
        if k > k_mono and q > 1.0:
            rho = abs(c_next / c) * ((k - 1.0 + shift) / (k + shift)) ** power
            if rho < 1.0:
                tail = abs(term) * max((k - 1.0 + shift) / (q - 1.0), rho / (1.0 - rho))
                if tail <= max(rel_tol * abs(ref + total), abs_tol):
                    small += 1
                    if small >= consecutive_small:
                        return total, abs_total, k, c_next, CONVERGED
                else:
                    small = 0
        c = c_next
    return total, abs_total, k, c, LIMIT


def binom_gamma_head(a, s, x, k_start, k_stop, c_start, ref,
                     rel_tol, abs_tol, consecutive_small):
    """Partial sum of (-1)^k C(a, k) (k+1)^-s UpperGamma(s, (k+1) x).

    Same contract as :func:`binom_power_head`; requires x > 0.
    """
    c = c_start
    total = 0.0
    abs_total = 0.0
    small = 0
    q = a + 1.0 + s
    geo = 1.0 / math.expm1(x)
    k_mono = abs(a) + 1.0
    k = k_start
    while k < k_stop:
        term = c * (k + 1.0) ** (-s) * upper_gamma(s, (k + 1.0) * x)
        total += term
        abs_total += abs(term)
        c_next = c * (k - a) / (k + 1.0)
        k += 1
        if c_next == 0.0:
            return total, abs_total, k, 0.0, FINITE
        if k > k_mono:
            bound = geo
            if q > 1.0:
                bound = min(bound, k / (q - 1.0))
            if abs(term) * bound <= max(rel_tol * abs(ref + total), abs_tol):
                small += 1
                if small >= consecutive_small:
                    return total, abs_total, k, c_next, CONVERGED
            else:
                small = 0
        c = c_next
    return total, abs_total, k, c, LIMIT


def _log1mexp(x):
    # log(1 - exp(x)) for x < 0
    with np.errstate(divide="ignore"):
        return np.where(x > -0.6931471805599453,
                        np.log(-np.expm1(np.minimum(x, -1e-300))),
                        np.log1p(-np.exp(x)))


def loglik_score(alpha, beta, gamma, theta, y):
    """Log-likelihood and its gradient in (alpha, beta, gamma, theta).

    ``y`` must be a contiguous float64 array of positive values.
    Returns (loglik, d_alpha, d_beta, d_gamma, d_theta).
    """
    y = np.asarray(y, dtype=np.float64)
    n = y.size
    lby = np.log(beta * y)
    u = np.exp(gamma * lby)
    tiny = u < 1e-8
    lg = np.where(tiny, gamma * lby - 0.5 * u, _log1mexp(-u))
    ga = np.exp(alpha * lg)
    tga = theta * ga
    logd = np.log1p(-tga)
    with np.errstate(over="ignore", invalid="ignore"):
        r = np.where(tiny, 1.0 - 0.5 * u, u / np.expm1(u))
    b = ga / (1.0 - tga)
    ll = (n * (math.log(alpha) + math.log(gamma) + math.log(beta) + math.log1p(-theta))
          + (gamma - 1.0) * lby.sum() - u.sum() + (alpha - 1.0) * lg.sum()
          - 2.0 * logd.sum())
    d_alpha = n / alpha + lg.sum() + 2.0 * theta * (lg * b).sum()
    inner = 1.0 - u + (alpha - 1.0) * r + 2.0 * theta * alpha * r * b
    d_beta = gamma / beta * inner.sum()
    d_gamma = n / gamma + (lby * inner).sum()
    d_theta = -n / (1.0 - theta) + 2.0 * b.sum()
    return float(ll), float(d_alpha), float(d_beta), float(d_gamma), float(d_theta)
