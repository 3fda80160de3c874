"""Backend selection for the pulse-moment quadrature.

The compiled extension is used when it was built; otherwise the pure-Python
module provides identical results.  Set ``COMOVING_PURE_PYTHON=1`` to force
the fallback.
"""
import os

from . import _quad_py
from ._quad_py import QuadratureError

BACKEND = "python"
_impl = _quad_py

if os.environ.get("COMOVING_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _quad as _impl  # type: ignore[no-redef]
        BACKEND = "cython"
    except ImportError:  # extension not built
        _impl = _quad_py

train_moments = _impl.train_moments
train_moments_cumulative = _impl.train_moments_cumulative

__all__ = ["BACKEND", "QuadratureError", "train_moments",
           "train_moments_cumulative"]
