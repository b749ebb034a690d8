"""Backend selection for the hot loops.

The compiled extension is used when it imports; set QUADDYN_KERNEL=python
to force the pure-Python versions."""

import os

from . import _kernels_py

_choice = os.environ.get("QUADDYN_KERNEL", "auto").lower()
if _choice == "python":
    _impl = _kernels_py
else:
    try:
        from . import _ckernels as _impl
    except ImportError:
        if _choice == "compiled":
            raise
        _impl = _kernels_py

BACKEND = _impl.BACKEND
rat_screen = _impl.rat_screen
poly_screen = _impl.poly_screen
preper_scan = _impl.preper_scan
triple_coeffs = _kernels_py.triple_coeffs


def get_backend(name: str):
    """The module implementing ``name`` ('compiled' or 'python')."""
    if name == "python":
        return _kernels_py
    if name == "compiled":
        from . import _ckernels

        return _ckernels
    raise ValueError(f"unknown backend {name!r}")
