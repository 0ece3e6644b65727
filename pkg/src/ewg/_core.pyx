# cython: language_level=3, boundscheck=False, wraparound=False, initializedcheck=False, cdivision=True
"""Compiled numeric kernels; see ``ewg._pycore`` for the reference twin."""

from libc.math cimport exp, log, log1p, expm1, pow, fabs, tgamma, fmax, fmin

cdef double EPS = 2.220446049250313e-16
cdef double FPMIN = 1e-300
cdef int MAXIT = 100000
cdef double LN2 = 0.6931471805599453

cdef enum:
    ST_FINITE = 0
    ST_CONVERGED = 1
    ST_LIMIT = 2

FINITE = ST_FINITE
CONVERGED = ST_CONVERGED
LIMIT = ST_LIMIT


cdef double _lower_series(double s, double t) noexcept nogil:
    cdef double ap = s
    cdef double term = 1.0 / s
    cdef double total = term
    cdef int i
    for i in range(MAXIT):
        ap += 1.0
        term *= t / ap
        total += term
        if fabs(term) < fabs(total) * EPS:
            break
    return total * exp(s * log(t) - t)


cdef double _upper_cf(double s, double t) noexcept nogil:
    cdef double b = t + 1.0 - s
    cdef double c = 1.0 / FPMIN
    cdef double d = 1.0 / b
    cdef double h = d
    cdef double an, delta
    cdef int i
    for i in range(1, MAXIT):
        an = -i * (i - s)
        b += 2.0
        d = an * d + b
        if fabs(d) < FPMIN:
            d = FPMIN
        c = b + an / c
        if fabs(c) < FPMIN:
            c = FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if fabs(delta - 1.0) < EPS:
            break
    return exp(s * log(t) - t) * h


cdef double c_upper_gamma(double s, double t) noexcept nogil:
    if t <= 0.0:
        return tgamma(s)
    if t < s + 1.0:
        return tgamma(s) - _lower_series(s, t)
    return _upper_cf(s, t)


cdef double c_lower_gamma(double s, double t) noexcept nogil:
    if t <= 0.0:
        return 0.0
    if t < s + 1.0:
        return _lower_series(s, t)
    return tgamma(s) - _upper_cf(s, t)


def upper_gamma(double s, double t):
    """Upper incomplete gamma integral from t to infinity (unregularized)."""
    return c_upper_gamma(s, t)


def lower_gamma(double s, double t):
    """Lower incomplete gamma integral from 0 to t (unregularized)."""
    return c_lower_gamma(s, t)


def binom_power_head(double a, double shift, double power, long k_start,
                     long k_stop, double c_start, double ref, double rel_tol,
                     double abs_tol, int consecutive_small):
    cdef double c = c_start
    cdef double total = 0.0
    cdef double abs_total = 0.0
    cdef int small = 0
    cdef double q = a + 1.0 + power
    cdef double k_mono = fabs(a) + 1.0
    cdef long k = k_start
    cdef double term, c_next, rho, tail
    cdef int status = ST_LIMIT
    with nogil:
        while k < k_stop:
            term = c * pow(k + shift, -power)
            total += term
            abs_total += fabs(term)
            c_next = c * (k - a) / (k + 1.0)
            k += 1
            if c_next == 0.0:
                status = ST_FINITE
                break
            if k > k_mono and q > 1.0:
                rho = fabs(c_next / c) * pow((k - 1.0 + shift) / (k + shift), power)
                if rho < 1.0:
                    tail = fabs(term) * fmax((k - 1.0 + shift) / (q - 1.0), rho / (1.0 - rho))
                    if tail <= fmax(rel_tol * fabs(ref + total), abs_tol):
                        small += 1
                        if small >= consecutive_small:
                            c = c_next
                            status = ST_CONVERGED
                            break
                    else:
                        small = 0
            c = c_next
    if status == ST_FINITE:
        return total, abs_total, k, 0.0, ST_FINITE
    return total, abs_total, k, c, status


def binom_gamma_head(double a, double s, double x, long k_start, long k_stop,
                     double c_start, double ref, double rel_tol, double abs_tol,
                     int consecutive_small):
    cdef double c = c_start
    cdef double total = 0.0
    cdef double abs_total = 0.0
    cdef int small = 0
    cdef double q = a + 1.0 + s
    cdef double geo = 1.0 / expm1(x)
    cdef double k_mono = fabs(a) + 1.0
    cdef long k = k_start
    cdef double term, c_next = 1.0, bound
    cdef int status = ST_LIMIT
    with nogil:
        while k < k_stop:
            term = c * pow(k + 1.0, -s) * c_upper_gamma(s, (k + 1.0) * x)
            total += term
            abs_total += fabs(term)
            c_next = c * (k - a) / (k + 1.0)
            k += 1
            if c_next == 0.0:
                status = ST_FINITE
                break
            if k > k_mono:
                bound = geo
                if q > 1.0:
                    bound = fmin(bound, k / (q - 1.0))
                if fabs(term) * bound <= fmax(rel_tol * fabs(ref + total), abs_tol):
                    small += 1
                    if small >= consecutive_small:
                        c = c_next
                        status = ST_CONVERGED
                        break
                else:
                    small = 0
            c = c_next
    if status == ST_FINITE:
        return total, abs_total, k, 0.0, ST_FINITE
    return total, abs_total, k, c, status


cdef inline double _log1mexp(double x) noexcept nogil:
    if x > -LN2:
        return log(-expm1(x))
    return log1p(-exp(x))


def loglik_score(double alpha, double beta, double gamma, double theta,
                 const double[::1] y):
    """Fused log-likelihood and score; returns (ll, d_alpha, d_beta, d_gamma, d_theta)."""
    cdef Py_ssize_t i, n = y.shape[0]
    cdef double lby, u, lg, ga, tga, r, b, inner, em1
    cdef double s_lby = 0.0, s_u = 0.0, s_lg = 0.0, s_logd = 0.0
    cdef double s_lgb = 0.0, s_inner = 0.0, s_lby_inner = 0.0, s_b = 0.0
    with nogil:
        for i in range(n):
            lby = log(beta * y[i])
            u = exp(gamma * lby)
            if u < 1e-8:
                # log(1 - e^-u) and u / (e^u - 1) without underflow
                lg = gamma * lby - 0.5 * u
                r = 1.0 - 0.5 * u
            else:
                lg = _log1mexp(-u)
                em1 = expm1(u)
                r = u / em1
            ga = exp(alpha * lg)
            tga = theta * ga
            b = ga / (1.0 - tga)
            inner = 1.0 - u + (alpha - 1.0) * r + 2.0 * theta * alpha * r * b
            s_lby += lby
            s_u += u
            s_lg += lg
            s_logd += log1p(-tga)
            s_lgb += lg * b
            s_inner += inner
            s_lby_inner += lby * inner
            s_b += b
    ll = (n * (log(alpha) + log(gamma) + log(beta) + log1p(-theta))
          + (gamma - 1.0) * s_lby - s_u + (alpha - 1.0) * s_lg - 2.0 * s_logd)
    return (ll,
            n / alpha + s_lg + 2.0 * theta * s_lgb,
            gamma / beta * s_inner,
            n / gamma + s_lby_inner,
            -n / (1.0 - theta) + 2.0 * s_b)
