"""Named restrictions of the EWG family.

============  =====================
kind          pinned coordinates
============  =====================
``cwg``       alpha = 1
``geg``       gamma = 1
``ceg``       alpha = 1, gamma = 1
``erg``       gamma = 2
``rg``        alpha = 1, gamma = 2
``ew``        theta = 0
``full``      none
============  =====================

Each kind carries its own closed-form pdf, cdf and hazard plus mean and
variance series. These are independent of the general kernels and serve as
cross-checks; the values returned by :func:`submodel_mean` and
:func:`submodel_variance` come from the general engines.
"""

from __future__ import annotations

import math
from enum import Enum

import numpy as np

from .distribution import EwgParams
from .errors import ConsistencyError, DomainError
from .moments import geometric_binomial_sum, mean, variance
from .special import SeriesControl, binomial_power_sum, default_control

PARAM_NAMES = ("alpha", "beta", "gamma_shape", "theta")
CONSISTENCY_RTOL = 1e-4


class SubmodelKind(str, Enum):
    FULL = "full"
    CWG = "cwg"
    GEG = "geg"
    CEG = "ceg"
    ERG = "erg"
    RG = "rg"
    EW = "ew"


PINNED: dict[SubmodelKind, dict[str, float]] = {
    SubmodelKind.FULL: {},
    SubmodelKind.CWG: {"alpha": 1.0},
    SubmodelKind.GEG: {"gamma_shape": 1.0},
    SubmodelKind.CEG: {"alpha": 1.0, "gamma_shape": 1.0},
    SubmodelKind.ERG: {"gamma_shape": 2.0},
    SubmodelKind.RG: {"alpha": 1.0, "gamma_shape": 2.0},
    SubmodelKind.EW: {"theta": 0.0},
}


def as_kind(kind) -> SubmodelKind:
    try:
        return SubmodelKind(kind.lower() if isinstance(kind, str) else kind)
    except ValueError:
        raise DomainError(f"unknown sub-model kind {kind!r}") from None


def free_parameters(kind) -> tuple[str, ...]:
    pinned = PINNED[as_kind(kind)]
    return tuple(name for name in PARAM_NAMES if name not in pinned)


def make_submodel(kind, **free: float) -> EwgParams:
    """Full parameter vector for ``kind`` from its free coordinates.

    >>> make_submodel("ceg", beta=1.0, theta=0.5)
    EwgParams(alpha=1.0, beta=1.0, gamma_shape=1.0, theta=0.5)
    """
    kind = as_kind(kind)
    pinned = PINNED[kind]
    clash = sorted(set(free) & set(pinned))
    if clash:
        raise DomainError(f"{kind.value} pins {', '.join(clash)}; do not supply it")
    unknown = sorted(set(free) - set(PARAM_NAMES))
    if unknown:
        raise DomainError(f"unknown parameter(s): {', '.join(unknown)}")
    missing = [n for n in free_parameters(kind) if n not in free and n != "theta"]
    if missing:
        raise DomainError(f"{kind.value} needs {', '.join(missing)}")
    values = {"theta": 0.0, **pinned, **free}
    return EwgParams(**{n: values[n] for n in PARAM_NAMES})


def satisfies(kind, p: EwgParams) -> bool:
    return all(getattr(p, name) == value for name, value in PINNED[as_kind(kind)].items())


def _require(kind, p):
    kind = as_kind(kind)
    if not satisfies(kind, p):
        raise DomainError(f"parameters {p} do not satisfy the {kind.value} restriction")
    return kind


# ---------------------------------------------------------------------------
# closed-form displays


def _weibull_terms(y, beta, gam):
    y = np.asarray(y, dtype=float)
    u = (beta * y) ** gam
    return y, u, np.exp(-u), -np.expm1(-u)


def _one_minus_power(e, alpha):
    # 1 - (1 - e)^alpha without cancellation when e = exp(-u) is small
    return -np.expm1(alpha * np.log1p(-e))


def _pdf_cwg(p, y):
    y, u, e, g = _weibull_terms(y, p.beta, p.gamma_shape)
    th, gm, b = p.theta, p.gamma_shape, p.beta
    return (1 - th) * gm * b ** gm * y ** (gm - 1) * e / (1 - th * g) ** 2


def _cdf_cwg(p, y):
    _, _, _, g = _weibull_terms(y, p.beta, p.gamma_shape)
    return (1 - p.theta) * g / (1 - p.theta * g)


def _hazard_cwg(p, y):
    y, u, e, g = _weibull_terms(y, p.beta, p.gamma_shape)
    th, gm, b = p.theta, p.gamma_shape, p.beta
    return (1 - th) * gm * b ** gm * y ** (gm - 1) * e / ((1 - th * g) * e)


def _pdf_geg(p, y):
    y, u, e, g = _weibull_terms(y, p.beta, 1.0)
    a, b, th = p.alpha, p.beta, p.theta
    return (1 - th) * a * b * e * g ** (a - 1) / (1 - th * g ** a) ** 2


def _cdf_geg(p, y):
    _, _, _, g = _weibull_terms(y, p.beta, 1.0)
    ga = g ** p.alpha
    return (1 - p.theta) * ga / (1 - p.theta * ga)


def _hazard_geg(p, y):
    y, u, e, g = _weibull_terms(y, p.beta, 1.0)
    a, b, th = p.alpha, p.beta, p.theta
    return (1 - th) * a * b * e * g ** (a - 1) / ((1 - th * g ** a) * _one_minus_power(e, a))


def _pdf_ceg(p, y):
    y, u, e, g = _weibull_terms(y, p.beta, 1.0)
    return (1 - p.theta) * p.beta * e / (1 - p.theta * g) ** 2


def _cdf_ceg(p, y):
    _, _, _, g = _weibull_terms(y, p.beta, 1.0)
    return (1 - p.theta) * g / (1 - p.theta * g)


def _hazard_ceg(p, y):
    y, u, e, g = _weibull_terms(y, p.beta, 1.0)
    return (1 - p.theta) * p.beta * e / ((1 - p.theta * g) * e)


def _pdf_erg(p, y):
    y, u, e, g = _weibull_terms(y, p.beta, 2.0)
    a, b, th = p.alpha, p.beta, p.theta
    return 2 * (1 - th) * a * b ** 2 * y * e * g ** (a - 1) / (1 - th * g ** a) ** 2


def _cdf_erg(p, y):
    _, _, _, g = _weibull_terms(y, p.beta, 2.0)
    ga = g ** p.alpha
    return (1 - p.theta) * ga / (1 - p.theta * ga)


def _hazard_erg(p, y):
    y, u, e, g = _weibull_terms(y, p.beta, 2.0)
    a, b, th = p.alpha, p.beta, p.theta
    return (2 * (1 - th) * a * b ** 2 * y * e * g ** (a - 1)
            / ((1 - th * g ** a) * _one_minus_power(e, a)))


def _pdf_rg(p, y):
    y, u, e, g = _weibull_terms(y, p.beta, 2.0)
    return 2 * (1 - p.theta) * p.beta ** 2 * y * e / (1 - p.theta * g) ** 2


def _cdf_rg(p, y):
    _, _, _, g = _weibull_terms(y, p.beta, 2.0)
    return (1 - p.theta) * g / (1 - p.theta * g)


def _hazard_rg(p, y):
    y, u, e, g = _weibull_terms(y, p.beta, 2.0)
    return 2 * (1 - p.theta) * p.beta ** 2 * y * e / (e * (1 - p.theta * g))


def _pdf_ew(p, y):
    y, u, e, g = _weibull_terms(y, p.beta, p.gamma_shape)
    a, b, gm = p.alpha, p.beta, p.gamma_shape
    return a * gm * b ** gm * y ** (gm - 1) * e * g ** (a - 1)


def _cdf_ew(p, y):
    _, _, _, g = _weibull_terms(y, p.beta, p.gamma_shape)
    return g ** p.alpha


def _hazard_ew(p, y):
    _, _, e, _ = _weibull_terms(y, p.beta, p.gamma_shape)
    return _pdf_ew(p, y) / _one_minus_power(e, p.alpha)


_DISPLAYS = {
    SubmodelKind.CWG: (_pdf_cwg, _cdf_cwg, _hazard_cwg),
    SubmodelKind.GEG: (_pdf_geg, _cdf_geg, _hazard_geg),
    SubmodelKind.CEG: (_pdf_ceg, _cdf_ceg, _hazard_ceg),
    SubmodelKind.ERG: (_pdf_erg, _cdf_erg, _hazard_erg),
    SubmodelKind.RG: (_pdf_rg, _cdf_rg, _hazard_rg),
    SubmodelKind.EW: (_pdf_ew, _cdf_ew, _hazard_ew),
}


def _display(kind, p, y, which):
    kind = _require(kind, p)
    if kind is SubmodelKind.FULL:
        raise DomainError("the full model has no separate display; use ewg.distribution")
    if not np.all(np.asarray(y) > 0):
        raise DomainError("display formulas are evaluated at y > 0")
    out = _DISPLAYS[kind][which](p, y)
    return float(out) if np.ndim(y) == 0 else out


def display_pdf(kind, p: EwgParams, y):
    """Density from the sub-model's own closed form."""
    return _display(kind, p, y, 0)


def display_cdf(kind, p: EwgParams, y):
    return _display(kind, p, y, 1)


def display_hazard(kind, p: EwgParams, y):
    return _display(kind, p, y, 2)


# ---------------------------------------------------------------------------
# mean and variance series


def display_moments(kind, p: EwgParams, ctrl: SeriesControl | None = None) -> tuple[float, float]:
    """(mean, variance) from the sub-model's own series.

    Every display is a multiple of DS(q) = sum_n sum_j n theta^(n-1) (-1)^j
    C(n alpha - 1, j) (j+1)^-q with alpha = 1 where pinned. The Rayleigh-
    geometric series use (j+1)^-3/2 and (j+1)^-2 as factors.
    """
    kind = _require(kind, p)
    ctrl = ctrl or default_control()
    a, b, g, th = p.as_tuple()

    def ds(q):
        return geometric_binomial_sum(p, q, ctrl).value

    if kind is SubmodelKind.CWG:
        m = (1 - th) / b * math.gamma(1 + 1 / g) * ds(1 + 1 / g)
        m2 = (1 - th) / b ** 2 * math.gamma(1 + 2 / g) * ds(1 + 2 / g)
    elif kind is SubmodelKind.GEG:
        m = a * (1 - th) / b * ds(2.0)
        m2 = 2 * a * (1 - th) / b ** 2 * ds(3.0)
    elif kind is SubmodelKind.CEG:
        m = (1 - th) / b * ds(2.0)
        m2 = (1 - th) / b ** 2 * math.gamma(3) * ds(3.0)
    elif kind is SubmodelKind.ERG:
        m = (1 - th) * a / b * math.gamma(1.5) * ds(1.5)
        m2 = (1 - th) * a / b ** 2 * ds(2.0)
    elif kind is SubmodelKind.RG:
        m = (1 - th) / b * math.gamma(1.5) * ds(1.5)
        m2 = (1 - th) / b ** 2 * ds(2.0)
    elif kind is SubmodelKind.EW:
        def ew(k):
            q = k / g + 1
            return a * b ** -k * math.gamma(q) * binomial_power_sum(a - 1, 1.0, q, ctrl).value
        m, m2 = ew(1), ew(2)
    else:
        m = (1 - th) * a / b * math.gamma(1 + 1 / g) * ds(1 + 1 / g)
        m2 = (1 - th) * a / b ** 2 * math.gamma(1 + 2 / g) * ds(1 + 2 / g)
    return m, m2 - m * m


def _checked(kind, general, own, what):
    if not math.isclose(general, own, rel_tol=CONSISTENCY_RTOL, abs_tol=0.0):
        raise ConsistencyError(
            f"{as_kind(kind).value} {what}: series {own!r} vs general engine {general!r}")
    return general


def submodel_mean(kind, p: EwgParams, ctrl: SeriesControl | None = None) -> float:
    """Mean of a restricted model, checked against its own series."""
    own, _ = display_moments(kind, p, ctrl)
    return _checked(kind, mean(p, ctrl), own, "mean")


def submodel_variance(kind, p: EwgParams, ctrl: SeriesControl | None = None) -> float:
    """Variance of a restricted model, checked against its own series."""
    _, own = display_moments(kind, p, ctrl)
    return _checked(kind, variance(p, ctrl), own, "variance")
