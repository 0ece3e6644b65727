"""Backend selection for the hot numeric kernels.

The compiled ``ewg._core`` extension is used when it is importable; otherwise,
or when the environment variable ``EWG_PURE_PYTHON`` is set to a non-empty
value other than ``0``, the pure-Python twin ``ewg._pycore`` is used. Both
expose the same functions with the same signatures.
"""

import os

from . import _pycore

if os.environ.get("EWG_PURE_PYTHON", "") not in ("", "0"):
    _impl = _pycore
else:
    try:
        from . import _core as _impl
    except ImportError:  # extension not built
        _impl = _pycore

BACKEND = "cython" if _impl is not _pycore else "python"

FINITE = _pycore.FINITE
CONVERGED = _pycore.CONVERGED
LIMIT = _pycore.LIMIT

upper_gamma = _impl.upper_gamma
lower_gamma = _impl.lower_gamma
binom_power_head = _impl.binom_power_head
binom_gamma_head = _impl.binom_gamma_head
loglik_score = _impl.loglik_score


def available_backends():
    """Map backend name to kernel module for every backend importable here."""
    found = {"python": _pycore}
    try:
        from . import _core
    except ImportError:
        pass
    else:
        found["cython"] = _core
    return found
