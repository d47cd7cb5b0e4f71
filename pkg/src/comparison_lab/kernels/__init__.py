"""Hot numeric kernels.

The numba versions are used unless ``COMPARISON_LAB_NO_NUMBA`` is set to a
truthy value (or numba is not importable), in which case the vectorised
numpy versions are used. Both backends implement the same algorithms;
results agree to rounding, and each backend is deterministic on its own.
"""

import importlib
import os

from . import _numpy
from .codes import *  # noqa: F401,F403

_disabled = os.environ.get("COMPARISON_LAB_NO_NUMBA", "").strip().lower() in {
    "1", "true", "yes", "on",
}

try:
    if _disabled:
        raise ImportError("numba disabled by COMPARISON_LAB_NO_NUMBA")
    from . import _numba
except ImportError:
    _numba = None

BACKEND = "numba" if _numba is not None else "numpy"
_impl = _numba if _numba is not None else _numpy

jacobi_eigvalsh = _impl.jacobi_eigvalsh
radial_em = _impl.radial_em
laplace_beltrami = _impl.laplace_beltrami


def backend(name):
    """Return the kernel module for ``name`` ('numba' or 'numpy')."""
    if name == "numpy":
        return _numpy
    if name == "numba":
        if _numba is None:
            # the package attribute _numba is None here, so import by full name
            return importlib.import_module(f"{__name__}._numba")
        return _numba
    raise ValueError(f"unknown kernel backend {name!r}")
