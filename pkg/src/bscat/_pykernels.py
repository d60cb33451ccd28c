"""Pure-Python lattice-reduction kernel (numpy row operations).

Same contract as the compiled ``_ckernels.reduce_columns``.  Works on int64
arrays, where every update is bounds-checked and overflow raises
``OverflowError``, and on object arrays, where arithmetic is exact.
"""
from __future__ import annotations

import numpy as np

_LIMIT = 2**62


def _low(col: np.ndarray, start: int) -> int:
    nz = np.flatnonzero(col[: start + 1])
    return int(nz[-1]) if len(nz) else -1


def _maxabs(x: np.ndarray) -> int:
    return int(np.max(np.abs(x))) if x.size else 0


def _axpy(M, i, j, n, q, checked):
    if checked and abs(q) * _maxabs(M[i, :n]) + _maxabs(M[j, :n]) >= _LIMIT:
        raise OverflowError("int64 overflow in column reduction")
    M[j, :n] -= q * M[i, :n]


def _rdiv(a: int, b: int) -> int:
    # nearest-integer quotient, so the remainder is at most |b| / 2
    # truncating division first, as in C, so both kernels break ties alike
    q = abs(a) // abs(b)
    if (a < 0) != (b < 0):
        q = -q
    r = a - q * b
    if 2 * abs(r) > abs(b):
        q += 1 if (r > 0) == (b > 0) else -1
    return q


def _sub(M, V, ops, i, j, n, q, checked):
    _axpy(M, i, j, n, q, checked)
    if V is not None:
        _axpy(V, i, j, V.shape[1], q, checked)
    ops.append((i, j, 1, -q, 0, 1))


def _place(M, V, pivot, p, r, ops, checked):
    # keep the pivot set reduced after column p takes row r
    for rr in range(r - 1, -1, -1):
        i = pivot[rr]
        if i >= 0 and M[p, rr] != 0:
            q = _rdiv(int(M[p, rr]), int(M[i, rr]))
            if q:
                _sub(M, V, ops, i, p, rr + 1, q, checked)
    for rr in range(r + 1, M.shape[1]):
        i = pivot[rr]
        if i >= 0 and M[i, r] != 0:
            q = _rdiv(int(M[i, r]), int(M[p, r]))
            if q:
                _sub(M, V, ops, p, i, r + 1, q, checked)


def reduce_columns(M: np.ndarray, V: np.ndarray | None = None):
    """Reduce the rows of ``M`` (each row is one matrix column) in place.

    Returns ``(lows, ops)`` exactly as the compiled kernel does.
    """
    checked = M.dtype != object
    ncols, nrows = M.shape
    pivot = [-1] * nrows
    lows = np.full(ncols, -1, dtype=np.int64)
    ops: list[tuple[int, int, int, int, int, int]] = []
    for j in range(ncols):
        cur = j
        r = _low(M[cur], nrows - 1)
        while r >= 0:
            i = pivot[r]
            if i < 0:
                pivot[r] = cur
                lows[cur] = r
                _place(M, V, pivot, cur, r, ops, checked)
                break
            q = _rdiv(int(M[cur, r]), int(M[i, r]))
            _sub(M, V, ops, i, cur, r + 1, q, checked)
            if M[cur, r] != 0:
                # Euclid step: the remainder takes over as pivot at r
                pivot[r] = cur
                lows[cur] = r
                lows[i] = -1
                _place(M, V, pivot, cur, r, ops, checked)
                cur = i
            else:
                r = _low(M[cur], r - 1)
    if checked:
        ops_arr = np.array(ops, dtype=np.int64).reshape(-1, 6)
    else:
        ops_arr = np.array(ops, dtype=object).reshape(-1, 6)
    return lows, ops_arr
