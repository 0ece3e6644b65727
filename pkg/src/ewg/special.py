"""Gamma-type primitives and the binomial series shared by every expansion.

Most closed-form expansions of the EWG law reduce to sums of the form

    sum_k (-1)^k C(a, k) w(k)

with a real upper argument ``a`` and a smooth positive weight ``w``.  Two
weights occur: ``(k + shift)^-power`` (moments, entropies, order statistics)
and ``(k+1)^-s * UpperGamma(s, (k+1) x)`` (residual life).  Such sums are
awkward in floating point:

* for large ``a`` the first ``a`` terms alternate with magnitudes up to
  ``C(a, a/2) ~ 2^a`` and cancel down to an O(1) result, and
* once ``k > a`` the terms keep one sign and decay only like a power of ``k``
  when ``a`` is small, so plain truncation needs an enormous number of terms.

Both are handled here: the head of the series runs in the compiled kernel,
and it is re-summed in extended precision (mpmath) whenever the observed
cancellation would eat the requested tolerance.  A slowly decaying tail is
replaced by its Euler-Maclaurin estimate.
"""

from __future__ import annotations

import math
import os
import warnings
from dataclasses import dataclass
from typing import NamedTuple

import mpmath
from scipy import integrate
from scipy.special import polygamma

from . import kernels
from .errors import DivergenceError, DomainError, TruncationError

_EPS = 2.220446049250313e-16
# head terms summed past max(|a|) before the tail estimate takes over
_HEAD_EXTRA = 64


@dataclass(frozen=True)
class SeriesControl:
    """Truncation policy for every infinite series.

    A series stops once its estimated remaining tail is below
    ``max(rel_tol * |partial sum|, abs_tol)`` for ``consecutive_small``
    consecutive terms. ``max_terms`` caps each summation index.
    """

    rel_tol: float = 1e-12
    abs_tol: float = 1e-300
    max_terms: int = 100_000
    consecutive_small: int = 3

    def __post_init__(self):
        if not self.rel_tol > 0:
            raise DomainError(f"rel_tol must be positive, got {self.rel_tol}")
        if not self.abs_tol >= 0:
            raise DomainError(f"abs_tol must be nonnegative, got {self.abs_tol}")
        if self.max_terms < 1:
            raise DomainError(f"max_terms must be >= 1, got {self.max_terms}")
        if self.consecutive_small < 1:
            raise DomainError(f"consecutive_small must be >= 1, got {self.consecutive_small}")


def default_control() -> SeriesControl:
    """Default :class:`SeriesControl`, honouring ``EWG_SERIES_TOL``."""
    raw = os.environ.get("EWG_SERIES_TOL")
    if raw:
        try:
            return SeriesControl(rel_tol=float(raw))
        except ValueError as exc:
            raise DomainError(f"invalid EWG_SERIES_TOL={raw!r}") from exc
    return SeriesControl()


class SeriesSum(NamedTuple):
    value: float
    terms: int
    truncation_estimate: float


def ln_gamma(x: float) -> float:
    """Natural log of the gamma function for x > 0."""
    if not x > 0:
        raise DomainError(f"ln_gamma requires x > 0, got {x}")
    return math.lgamma(x)


def _check_gamma_args(s, t):
    if not s > 0:
        raise DomainError(f"incomplete gamma requires s > 0, got {s}")
    if not t >= 0:
        raise DomainError(f"incomplete gamma requires t >= 0, got {t}")


def upper_incomplete_gamma(s: float, t: float) -> float:
    """Integral of x^(s-1) e^-x over [t, inf).

    Series expansion of the lower part for t < s + 1, Legendre continued
    fraction otherwise.
    """
    _check_gamma_args(s, t)
    return kernels.upper_gamma(float(s), float(t))


def lower_incomplete_gamma(s: float, t: float) -> float:
    """Integral of x^(s-1) e^-x over [0, t]."""
    _check_gamma_args(s, t)
    return kernels.lower_gamma(float(s), float(t))


def generalized_binomial(a: float, j: int) -> float:
    """C(a, j) = a (a-1) ... (a-j+1) / j! for real ``a`` by running product.

    Exact for integer ``a`` up to the float range of the result, and exactly
    zero when ``a`` is a nonnegative integer smaller than ``j``.
    """
    if j < 0 or int(j) != j:
        raise DomainError(f"j must be a nonnegative integer, got {j}")
    c = 1.0
    for i in range(int(j)):
        c = c * (a - i) / (i + 1)
    return c


def _snap_integer(a):
    r = round(a)
    if r >= 0 and abs(a - r) <= 1e-12 * max(1.0, abs(a)):
        return float(r)
    return float(a)


# ---------------------------------------------------------------------------
# Euler-Maclaurin tail for the constant-sign part of a binomial series


def _em_tail(a, n0, c0, weight, weight_derivs, q):
    """Estimate sum_{k >= n0} c(k) w(k) where c(k) = (-1)^k C(a, k).

    For k > a the coefficient is c0 * Gamma(k-a) Gamma(n0+1) /
    (Gamma(n0-a) Gamma(k+1)), a smooth function of continuous k, so the tail
    is its integral plus the first Euler-Maclaurin corrections.

    Returns (tail, error_estimate).
    """
    lg_n = math.lgamma(n0 - a) - math.lgamma(n0 + 1.0)
    w0, w1, w2, w3 = weight_derivs(n0)

    def ratio(k):
        return math.exp(math.lgamma(k - a) - math.lgamma(k + 1.0) - lg_n) * weight(k) / w0

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        integral, abserr = integrate.quad(ratio, n0, math.inf, epsabs=0.0, epsrel=1e-13,
                                          limit=400)
    l1 = float(polygamma(0, n0 - a) - polygamma(0, n0 + 1.0))
    l2 = float(polygamma(1, n0 - a) - polygamma(1, n0 + 1.0))
    l3 = float(polygamma(2, n0 - a) - polygamma(2, n0 + 1.0))
    g0 = w0
    g1 = l1 * w0 + w1
    g3 = (l3 + 3 * l1 * l2 + l1 ** 3) * w0 + 3 * (l2 + l1 ** 2) * w1 + 3 * l1 * w2 + w3
    tail = c0 * (w0 * integral + g0 / 2.0 - g1 / 12.0 + g3 / 720.0)
    # next Euler-Maclaurin term is of order g5 / 30240 ~ g3 (q/n0)^2 / 42
    err = abs(c0) * (abs(g3) / 720.0 * ((q + 3.0) / n0) ** 2 / 42.0 + w0 * abserr)
    return tail, err


def _power_weight(shift, power):
    def weight(k):
        return (k + shift) ** (-power)

    def derivs(k):
        x = k + shift
        return (x ** (-power),
                -power * x ** (-power - 1.0),
                power * (power + 1.0) * x ** (-power - 2.0),
                -power * (power + 1.0) * (power + 2.0) * x ** (-power - 3.0))

    return weight, derivs


def _gamma_weight(s, x):
    up = kernels.upper_gamma

    def weight(k):
        return (k + 1.0) ** (-s) * up(s, (k + 1.0) * x)

    def derivs(k):
        z = (k + 1.0) * x
        return tuple((-1.0) ** m * (k + 1.0) ** (-(s + m)) * up(s + m, z) for m in range(4))

    return weight, derivs


# ---------------------------------------------------------------------------
# extended-precision head


class MpWeights:
    """Cache of extended-precision series weights, shared across calls.

    One instance belongs to one outer summation; it stores the weights at a
    few precisions so consecutive inner sums reuse them.
    """

    def __init__(self, kind, p1, p2):
        self.kind = kind
        self.p1 = p1
        self.p2 = p2
        self._tables = {}

    def get(self, dps, upto):
        table = self._tables.setdefault(dps, [])
        if len(table) < upto:
            with mpmath.workdps(dps):
                if self.kind == "power":
                    shift = mpmath.mpf(self.p1)
                    mpow = -mpmath.mpf(self.p2)
                    table.extend((shift + k) ** mpow for k in range(len(table), upto))
                else:
                    s = mpmath.mpf(self.p1)
                    x = mpmath.mpf(self.p2)
                    table.extend(mpmath.gammainc(s, a=(k + 1) * x) / mpmath.mpf(k + 1) ** s
                                 for k in range(len(table), upto))
        return table


def _mp_head(a, stop, weights, dps):
    table = weights.get(dps, stop)
    with mpmath.workdps(dps):
        am = mpmath.mpf(a)
        c = mpmath.mpf(1)
        total = mpmath.mpf(0)
        for k in range(stop):
            total += c * table[k]
            c = c * (k - am) / (k + 1)
            if c == 0:
                break
        return total, float(c)


def _bucket(dps):
    return int(math.ceil(dps / 24.0) * 24)


def _binomial_series(a, kind, p1, p2, ctrl, abs_target, weights):
    a = _snap_integer(a)
    if kind == "power":
        head = kernels.binom_power_head
        q = a + 1.0 + p2
        weight, derivs = _power_weight(p1, p2)
    else:
        head = kernels.binom_gamma_head
        q = a + 1.0 + p1
        weight, derivs = _gamma_weight(p1, p2)
    finite = a >= 0 and a == int(a)
    if not finite and kind == "power" and q <= 1.0:
        raise DivergenceError(
            f"binomial series diverges: a + 1 + power = {q:.6g} <= 1")

    limit = ctrl.max_terms
    k_stop = min(int(math.ceil(abs(a))) + _HEAD_EXTRA, limit)
    abs_floor = max(ctrl.abs_tol, abs_target)
    h_sum, h_abs, n_next, c_next, status = head(
        a, p1, p2, 0, k_stop, 1.0, 0.0, ctrl.rel_tol, abs_floor, ctrl.consecutive_small)

    # cancellation check: rounding of the head is ~ eps * sum|terms|
    need = max(ctrl.rel_tol * abs(h_sum), abs_floor)
    roundoff = 2.0 * _EPS * h_abs
    overflow = not (math.isfinite(h_abs) and math.isfinite(h_sum))
    if overflow or roundoff > 0.25 * need:
        if weights is None:
            weights = MpWeights(kind, p1, p2)
        # sum_k |C(a, k)| is at most 2^(|a|+1) over the head
        log_abs = (abs(a) + 1.0) * math.log10(2.0) if overflow else math.log10(h_abs)
        # the float partial sum is unreliable here, so size the precision
        # for an O(1) result and let the loop below confirm it
        dps = _bucket(20 + max(log_abs, 0.0) + max(0.0, -math.log10(ctrl.rel_tol)))
        for _ in range(6):
            exact, c_mp = _mp_head(a, n_next, weights, dps)
            need = max(ctrl.rel_tol * abs(float(exact)), abs_floor)
            slack = log_abs - dps + math.log10(n_next) - math.log10(0.01 * need)
            if slack <= 0:
                break
            dps = _bucket(dps + 10 + slack)
        h_sum = float(exact)
        c_next = c_mp
        if finite and n_next > a:
            status = kernels.FINITE
        roundoff = 10.0 ** (log_abs - dps) * n_next + _EPS * abs(h_sum)
        if status == kernels.CONVERGED:
            # convergence was judged against an unreliable partial sum
            status = kernels.LIMIT

    terms = n_next
    total = h_sum
    tail_err = 0.0
    if status == kernels.LIMIT and n_next < limit:
        more = head(a, p1, p2, n_next, min(n_next + _HEAD_EXTRA, limit), c_next, total,
                    ctrl.rel_tol, abs_floor, ctrl.consecutive_small)
        total += more[0]
        _, _, terms, c_next, status = more
    if status == kernels.LIMIT:
        if terms < abs(a) + 2 or (kind == "power" and q <= 1.0):
            raise TruncationError(
                f"binomial series with a={a:g} did not converge within {limit} terms",
                partial_sum=total, terms=terms)
        tail, tail_err = _em_tail(a, float(terms), c_next, weight, derivs, q)
        total += tail
        if tail_err > max(ctrl.rel_tol * abs(total), abs_floor) * 1e3:
            raise TruncationError(
                f"binomial series tail estimate too uncertain (a={a:g})",
                partial_sum=total, terms=terms)
    elif status == kernels.CONVERGED:
        tail_err = ctrl.rel_tol * abs(total)
    return SeriesSum(total, terms, tail_err + roundoff)


def binomial_power_sum(a: float, shift: float, power: float,
                       ctrl: SeriesControl | None = None, *, abs_target: float = 0.0,
                       weights: MpWeights | None = None) -> SeriesSum:
    """sum_{k>=0} (-1)^k C(a, k) (k + shift)^-power.

    For nonnegative integer ``a`` the sum is finite. Otherwise it converges
    iff ``a + 1 + power > 1``. ``abs_target`` loosens the required accuracy
    to an absolute level when the caller multiplies the result by a small
    weight. ``weights`` shares extended-precision weights across calls with
    the same ``shift`` and ``power``.
    """
    if not shift > 0:
        raise DomainError(f"shift must be positive, got {shift}")
    ctrl = ctrl or default_control()
    return _binomial_series(float(a), "power", float(shift), float(power), ctrl,
                            abs_target, weights)


def binomial_gamma_sum(a: float, s: float, x: float,
                       ctrl: SeriesControl | None = None, *, abs_target: float = 0.0,
                       weights: MpWeights | None = None) -> SeriesSum:
    """sum_{k>=0} (-1)^k C(a, k) (k+1)^-s UpperGamma(s, (k+1) x), for a > -1."""
    if not s > 0:
        raise DomainError(f"s must be positive, got {s}")
    if not x >= 0:
        raise DomainError(f"x must be nonnegative, got {x}")
    if not a > -1:
        raise DomainError(f"a must exceed -1, got {a}")
    ctrl = ctrl or default_control()
    if x == 0.0:
        inner = binomial_power_sum(a, 1.0, s, ctrl, abs_target=abs_target / math.gamma(s))
        g = math.gamma(s)
        return SeriesSum(g * inner.value, inner.terms, g * inner.truncation_estimate)
    return _binomial_series(float(a), "gamma", float(s), float(x), ctrl, abs_target, weights)


def positive_series(term, ratio_bound, ctrl: SeriesControl, start: int = 0,
                    what: str = "series") -> SeriesSum:
    """Sum positive terms ``term(n, abs_target)`` for n = start, start+1, ...

    ``term`` returns a :class:`SeriesSum` for index n; ``abs_target`` is the
    absolute accuracy the caller can afford on that term. ``ratio_bound(n)``
    bounds term(m+1)/term(m) for every m >= n (0 means the series stops at
    n). Once that bound drops below one the geometric tail estimate
    term * rho / (1 - rho) drives the stopping rule.
    """
    total = 0.0
    err = 0.0
    terms = 0
    small = 0
    for n in range(start, start + ctrl.max_terms):
        rho = ratio_bound(n)
        target = 0.1 * ctrl.rel_tol * total
        piece = term(n, target)
        total += piece.value
        err += piece.truncation_estimate
        terms += piece.terms
        if rho == 0.0:
            return SeriesSum(total, terms, err)
        if rho < 1.0:
            tail = piece.value * rho / (1.0 - rho)
            if tail <= max(ctrl.rel_tol * total, ctrl.abs_tol):
                small += 1
                if small >= ctrl.consecutive_small:
                    return SeriesSum(total, terms, err + tail)
            else:
                small = 0
    raise TruncationError(f"{what} did not converge within {ctrl.max_terms} terms",
                          partial_sum=total, terms=terms)
