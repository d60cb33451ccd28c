# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled lattice-reduction kernel over int64 with overflow detection.

Mirrors :mod:`bscat._pykernels`.  Any int64 overflow raises ``OverflowError``
so the caller can rerun the reduction with exact Python integers.
"""
import numpy as np
cimport numpy as cnp
from libc.stdlib cimport malloc, realloc, free

ctypedef long long i64

cdef extern from *:
    """
    static inline int bscat_mul_ovf(long long a, long long b, long long *r) {
        return __builtin_mul_overflow(a, b, r);
    }
    static inline int bscat_sub_ovf(long long a, long long b, long long *r) {
        return __builtin_sub_overflow(a, b, r);
    }
    """
    bint bscat_mul_ovf(i64 a, i64 b, i64 *r) nogil
    bint bscat_sub_ovf(i64 a, i64 b, i64 *r) nogil


cdef struct OpLog:
    i64 *data
    Py_ssize_t n
    Py_ssize_t cap


cdef int _emit(OpLog *log, i64 i, i64 j, i64 q) noexcept nogil:
    # record col_j -= q col_i; 1 on allocation failure
    cdef i64 *grown
    if log.n == log.cap:
        grown = <i64 *> realloc(log.data, 2 * log.cap * 3 * sizeof(i64))
        if grown == NULL:
            return 1
        log.data = grown
        log.cap *= 2
    log.data[3 * log.n] = i
    log.data[3 * log.n + 1] = j
    log.data[3 * log.n + 2] = q
    log.n += 1
    return 0


cdef inline Py_ssize_t _low(i64[:, ::1] M, Py_ssize_t j, Py_ssize_t start) noexcept nogil:
    cdef Py_ssize_t r = start
    while r >= 0:
        if M[j, r] != 0:
            return r
        r -= 1
    return -1


cdef int _axpy(i64[:, ::1] M, Py_ssize_t i, Py_ssize_t j, Py_ssize_t n, i64 q) noexcept nogil:
    # col_j <- col_j - q col_i; 1 on overflow
    cdef Py_ssize_t k
    cdef i64 w, t, nj
    for k in range(n):
        w = M[i, k]
        if w == 0:
            continue
        if bscat_mul_ovf(q, w, &t) or bscat_sub_ovf(M[j, k], t, &nj):
            return 1
        M[j, k] = nj
    return 0


cdef inline i64 _rdiv(i64 a, i64 b) noexcept nogil:
    # nearest-integer quotient, so the remainder is at most |b| / 2
    cdef i64 q = a / b
    cdef i64 r = a - q * b
    cdef i64 ab = b if b > 0 else -b
    cdef i64 ar = r if r > 0 else -r
    if 2 * ar > ab:
        if (r > 0) == (b > 0):
            q += 1
        else:
            q -= 1
    return q


cdef int _sub(i64[:, ::1] M, i64[:, ::1] V, bint track, Py_ssize_t nv, OpLog *log,
              Py_ssize_t i, Py_ssize_t j, Py_ssize_t n, i64 q) noexcept nogil:
    # col_j -= q col_i on M[:, :n] and V, logged; 1 on overflow, 2 on OOM
    if _axpy(M, i, j, n, q):
        return 1
    if track and _axpy(V, i, j, nv, q):
        return 1
    if _emit(log, i, j, q):
        return 2
    return 0


cdef int _place(i64[:, ::1] M, i64[:, ::1] V, bint track, Py_ssize_t nv, OpLog *log,
                i64[::1] pivot, Py_ssize_t p, Py_ssize_t r) noexcept nogil:
    # keep the pivot set reduced after column p takes row r
    cdef Py_ssize_t rr, i, nrows = M.shape[1]
    cdef i64 q
    cdef int err
    for rr in range(r - 1, -1, -1):
        i = pivot[rr]
        if i < 0 or M[p, rr] == 0:
            continue
        q = _rdiv(M[p, rr], M[i, rr])
        if q != 0:
            err = _sub(M, V, track, nv, log, i, p, rr + 1, q)
            if err:
                return err
    for rr in range(r + 1, nrows):
        i = pivot[rr]
        if i < 0 or M[i, r] == 0:
            continue
        q = _rdiv(M[i, r], M[p, r])
        if q != 0:
            err = _sub(M, V, track, nv, log, p, i, r + 1, q)
            if err:
                return err
    return 0


def reduce_columns(cnp.ndarray M_arr, cnp.ndarray V_arr=None):
    """Reduce the rows of ``M_arr`` (each row is one matrix column) in place.

    Returns ``(lows, ops)``: ``lows[j]`` is the lowest nonzero index of the
    reduced column ``j`` (``-1`` for zero columns) and ``ops`` is an ``(k, 6)``
    array of unimodular column operations ``(i, j, a, b, c, d)``.  Only
    ``col_j -= q col_i`` is emitted, stored as ``(i, j, 1, -q, 0, 1)``.
    """
    if M_arr.dtype != np.int64 or not M_arr.flags.c_contiguous:
        raise TypeError("expected a C-contiguous int64 array")
    cdef i64[:, ::1] M = M_arr
    cdef Py_ssize_t ncols = M.shape[0]
    cdef Py_ssize_t nrows = M.shape[1]
    cdef bint track = V_arr is not None
    cdef i64[:, ::1] V = np.zeros((1, 1), dtype=np.int64)
    cdef Py_ssize_t nv = 0
    if track:
        if V_arr.dtype != np.int64 or not V_arr.flags.c_contiguous:
            raise TypeError("expected a C-contiguous int64 array")
        V = V_arr
        nv = V.shape[1]

    pivot_arr = np.full(nrows, -1, dtype=np.int64)
    lows_arr = np.full(ncols, -1, dtype=np.int64)
    cdef i64[::1] pivot = pivot_arr
    cdef i64[::1] lows = lows_arr

    cdef OpLog log
    log.n = 0
    log.cap = 1024
    log.data = <i64 *> malloc(log.cap * 3 * sizeof(i64))
    if log.data == NULL:
        raise MemoryError()

    cdef Py_ssize_t j, i, r, cur
    cdef i64 q
    cdef int err = 0
    try:
        with nogil:
            for j in range(ncols):
                cur = j
                r = _low(M, cur, nrows - 1)
                while r >= 0:
                    i = pivot[r]
                    if i < 0:
                        pivot[r] = cur
                        lows[cur] = r
                        err = _place(M, V, track, nv, &log, pivot, cur, r)
                        break
                    q = _rdiv(M[cur, r], M[i, r])
                    err = _sub(M, V, track, nv, &log, i, cur, r + 1, q)
                    if err:
                        break
                    if M[cur, r] != 0:
                        # Euclid step: the remainder takes over as pivot at r
                        pivot[r] = cur
                        lows[cur] = r
                        lows[i] = -1
                        err = _place(M, V, track, nv, &log, pivot, cur, r)
                        if err:
                            break
                        cur = i
                    else:
                        r = _low(M, cur, r - 1)
                if err:
                    break
        if err == 1:
            raise OverflowError("int64 overflow in column reduction")
        if err == 2:
            raise MemoryError()
        ops_arr = np.zeros((log.n, 6), dtype=np.int64)
        for k in range(log.n):
            ops_arr[k, 0] = log.data[3 * k]
            ops_arr[k, 1] = log.data[3 * k + 1]
            ops_arr[k, 2] = 1
            ops_arr[k, 3] = -log.data[3 * k + 2]
            ops_arr[k, 5] = 1
    finally:
        free(log.data)
    return lows_arr, ops_arr
