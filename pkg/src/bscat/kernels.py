"""Backend selection for the lattice-reduction kernel.

The compiled extension is used when it was built; otherwise (or when the
``BSCAT_PURE_PYTHON`` environment variable is set) the numpy implementation
in :mod:`bscat._pykernels` runs instead.  Both raise ``OverflowError`` on
int64 overflow; :func:`reduce_columns` then reruns on exact Python integers.
"""
from __future__ import annotations

import os

import numpy as np

from . import _pykernels

try:
    if os.environ.get("BSCAT_PURE_PYTHON"):
        raise ImportError("pure-Python backend forced")
    from ._ckernels import reduce_columns as _compiled_reduce
except ImportError:
    _compiled_reduce = None

BACKEND = "compiled" if _compiled_reduce is not None else "python"


def available_backends() -> list[str]:
    return ["compiled", "python"] if _compiled_reduce is not None else ["python"]


def reduce_columns(cols, track: int | None = None, backend: str | None = None):
    """Echelon-reduce a list of integer column vectors.

    ``cols`` has shape ``(ncols, nrows)``; row ``j`` is column ``j`` of the
    matrix being reduced.  When ``track`` is given, the unimodular transform is
    accumulated into a ``(ncols, ncols)`` array as well.

    Returns ``(reduced, lows, ops, transform)``.
    """
    backend = backend or BACKEND
    if backend == "compiled" and _compiled_reduce is None:
        raise ValueError("compiled backend not built")
    cols = np.asarray(cols)
    ncols = cols.shape[0]
    if cols.dtype != object:
        M = np.ascontiguousarray(cols, dtype=np.int64).copy()
        V = np.eye(ncols, dtype=np.int64) if track else None
        fn = _compiled_reduce if backend == "compiled" else _pykernels.reduce_columns
        try:
            lows, ops = fn(M, V)
            return M, lows, ops, V
        except OverflowError:
            pass
    M = np.array(cols, dtype=object)
    V = np.eye(ncols, dtype=np.int64).astype(object) if track else None
    lows, ops = _pykernels.reduce_columns(M, V)
    return M, lows, ops, V
