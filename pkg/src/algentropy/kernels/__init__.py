"""Hot kernels for lowered element rows.

The compiled extension ``_ckernels`` is used when it was built; otherwise the
numpy implementation in ``_pykernels`` is selected.  Setting
``ALGENTROPY_PURE_PYTHON=1`` forces the fallback.
"""
from __future__ import annotations

import os
from typing import NamedTuple

import numpy as np


class Program(NamedTuple):
    kind: np.ndarray
    start: np.ndarray
    width: np.ndarray
    p0: np.ndarray
    p1: np.ndarray
    p2: np.ndarray
    mods: np.ndarray
    tables: np.ndarray
    mats: np.ndarray
    ncols: int


from . import _pykernels  # noqa: E402

_compiled = None
if os.environ.get("ALGENTROPY_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _ckernels as _compiled  # type: ignore[no-redef]
    except ImportError:
        _compiled = None

BACKEND = "cython" if _compiled is not None else "python"
_impl = _compiled if _compiled is not None else _pykernels


def backends() -> dict:
    """Available implementations by name (for benchmarks and equivalence tests)."""
    out = {"python": _pykernels}
    if _compiled is not None:
        out["cython"] = _compiled
    return out


def mul_rows(X: np.ndarray, Y: np.ndarray, prog: Program) -> np.ndarray:
    """Row-wise products; ``Y`` may be a single row broadcast over ``X``."""
    X = np.ascontiguousarray(X, dtype=np.int64)
    Y = np.ascontiguousarray(Y, dtype=np.int64)
    return _impl.mul_rows(X, Y, prog)


def product_keys(X: np.ndarray, Y: np.ndarray, prog: Program, places: np.ndarray) -> np.ndarray:
    """Packed keys of x*y for every x in X, y in Y, ordered y-major."""
    X = np.ascontiguousarray(X, dtype=np.int64)
    Y = np.ascontiguousarray(Y, dtype=np.int64)
    return _impl.product_keys(X, Y, prog, np.ascontiguousarray(places, dtype=np.int64))
