"""Kernel backend selection.

``GRPDOUBLE_BACKEND=numpy`` forces the pure-numpy kernels; the default is
numba, falling back to numpy when numba cannot be imported.
"""
import os

ENV_VAR = "GRPDOUBLE_BACKEND"


def _choose():
    want = os.environ.get(ENV_VAR, "numba").strip().lower() or "numba"
    if want not in ("numba", "numpy"):
        raise RuntimeError(f"{ENV_VAR} must be 'numba' or 'numpy', got {want!r}")
    if want == "numba":
        try:
            import numba  # noqa: F401
        except ImportError:
            return "numpy"
    return want


BACKEND = _choose()


def kernels(name=None):
    """Return the kernel module for ``name`` (default: the active backend)."""
    name = name or BACKEND
    if name == "numba":
        from . import _kernels_nb as mod
    elif name == "numpy":
        from . import _kernels_np as mod
    else:
        raise ValueError(f"unknown backend {name!r}")
    return mod
