"""Backend selection for the ADMM inner loops.

The compiled extension is used when it imports; otherwise the numpy
fallback. Setting ``JVMD_PURE_PYTHON=1`` forces the fallback.
"""
import os

from . import _kernels_py

if os.environ.get("JVMD_PURE_PYTHON", "") not in ("", "0"):
    _impl = _kernels_py
else:
    try:
        from . import _kernels as _impl
    except ImportError:  # extension not built
        _impl = _kernels_py

BACKEND = "compiled" if _impl is not _kernels_py else "python"

CUBE_ROOT = _kernels_py.CUBE_ROOT
DUAL_ASCENT = _kernels_py.DUAL_ASCENT

mode_sweep = _impl.mode_sweep
frame_sweep = _impl.frame_sweep
kappa = _impl.kappa
principal_cbrt = _impl.principal_cbrt


def backends():
    """Map of available backend name to kernel module."""
    out = {"python": _kernels_py}
    try:
        from . import _kernels

        out["compiled"] = _kernels
    except ImportError:
        pass
    return out
