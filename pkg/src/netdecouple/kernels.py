"""Backend selection for the hot kernels.

The compiled extension is preferred when it imported cleanly; the
pure-Python module is the fallback and the reference implementation.
Set NETDECOUPLE_PURE_PYTHON=1 to force the fallback.
"""

import os

from netdecouple import _kernels_py

if os.environ.get("NETDECOUPLE_PURE_PYTHON"):
    _impl = _kernels_py
    BACKEND = "python"
else:
    try:
        from netdecouple import _speedups as _impl

        BACKEND = "compiled"
    except ImportError:
        _impl = _kernels_py
        BACKEND = "python"

zstar_fixpoint = _impl.zstar_fixpoint
sstar_fixpoint = _impl.sstar_fixpoint
reachable_mask = _impl.reachable_mask
max_flow = _impl.max_flow


def available_backends():
    """Name -> module for every importable backend (for tests/benchmarks)."""
    backends = {"python": _kernels_py}
    try:
        from netdecouple import _speedups

        backends["compiled"] = _speedups
    except ImportError:
        pass
    return backends
