"""Backend selection for the numerical kernels.

The compiled ``_ckernels`` extension is used when it imports; otherwise,
or when the environment variable ``EXPURGATE_PURE_PYTHON`` is set to a
non-empty value, the pure-Python ``_pykernels`` module is used instead.
"""
from __future__ import annotations

import os

from . import _pykernels

GALLAGER = 0
CKM = 1

if os.environ.get("EXPURGATE_PURE_PYTHON"):
    _impl = _pykernels
else:
    try:
        from . import _ckernels as _impl
    except ImportError:  # extension not built
        _impl = _pykernels

BACKEND = "python" if _impl is _pykernels else "cython"

chernoff_matrix = _impl.chernoff_matrix
log_partition = _impl.log_partition
e_value = _impl.e_value
sup_rho = _impl.sup_rho
log_fractional_moment = _impl.log_fractional_moment
oracle_scan = _impl.oracle_scan


def available_backends() -> dict:
    """Map backend name to module, for parity tests and benchmarks."""
    out = {"python": _pykernels}
    try:
        from . import _ckernels
    except ImportError:
        pass
    else:
        out["cython"] = _ckernels
    return out
