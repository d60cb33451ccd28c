"""Exact integer linear algebra.

Matrices are plain 2-D numpy arrays.  They are kept as ``int64`` while every
intermediate provably fits and are promoted to ``object`` arrays (Python
integers) otherwise, so no result is ever silently wrapped.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import reduce

import numpy as np

from . import kernels

INFINITE = math.inf
"""Order of an element of infinite order (never encoded as 0)."""

_LIMIT = 2**62


class InputError(ValueError):
    """Raised for malformed or incompatible inputs."""


def _maxabs(A) -> int:
    A = np.asarray(A)
    if A.size == 0:
        return 0
    return int(np.max(np.abs(A)))


def exact(A, ndim: int | None = None) -> np.ndarray:
    """Return ``A`` as an integer array: int64 when safe, object otherwise."""
    arr = np.asarray(A)
    if arr.dtype == object or arr.dtype.kind not in "iub":
        arr = np.array(arr, dtype=object)
        if arr.size and _maxabs(arr) < _LIMIT:
            arr = arr.astype(np.int64)
    elif arr.dtype != np.int64:
        arr = arr.astype(np.int64)
    if ndim == 2 and arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    if arr.size == 0:
        arr = arr.astype(np.int64)
    return arr


def from_triplets(rows, cols, vals, shape) -> np.ndarray:
    """Assemble a dense exact matrix from (row, col, value) triplets."""
    out = np.zeros(shape, dtype=object)
    for r, c, v in zip(rows, cols, vals):
        out[r, c] += int(v)
    return exact(out)


def matmul(A, B) -> np.ndarray:
    """Exact matrix (or matrix-vector) product."""
    A, B = exact(A), exact(B)
    inner = A.shape[-1] if A.ndim else 1
    if A.dtype == np.int64 and B.dtype == np.int64:
        if _maxabs(A) * _maxabs(B) * max(inner, 1) < _LIMIT:
            return A @ B
    out = np.dot(A.astype(object), B.astype(object))
    return exact(out)


def lincomb(terms, shape) -> np.ndarray:
    """Exact ``sum c * A`` over ``(c, A)`` pairs, all of the given shape."""
    terms = [(int(c), exact(A)) for c, A in terms if c]
    bound = sum(abs(c) * _maxabs(A) for c, A in terms)
    if bound < _LIMIT and all(A.dtype == np.int64 for _, A in terms):
        out = np.zeros(shape, dtype=np.int64)
        for c, A in terms:
            out += c * A
        return out
    out = np.zeros(shape, dtype=object)
    for c, A in terms:
        out = out + c * A.astype(object)
    return exact(out)


def identity(n: int) -> np.ndarray:
    return np.eye(n, dtype=np.int64)


def to_ints(v) -> list[int]:
    return [int(x) for x in np.asarray(v).ravel()]


# --------------------------------------------------------------------------
# Smith normal form


@dataclass(frozen=True)
class SmithDecomposition:
    """``source = U @ S @ V`` with ``U``, ``V`` unimodular and ``S`` diagonal."""

    U: np.ndarray
    S: np.ndarray
    V: np.ndarray
    source: np.ndarray
    U_inv: np.ndarray
    V_inv: np.ndarray

    @property
    def diagonal(self) -> list[int]:
        k = min(self.S.shape)
        return [int(self.S[i, i]) for i in range(k)]

    @property
    def rank(self) -> int:
        return sum(1 for d in self.diagonal if d != 0)

    def check(self) -> bool:
        return bool(np.array_equal(matmul(matmul(self.U, self.S), self.V), exact(self.source)))


class _Work:
    """Mutable arrays for the SNF loop, promoted to object dtype on demand."""

    def __init__(self, A):
        m, n = A.shape
        self.S = A.copy()
        self.L = identity(m)
        self.U = identity(m)
        self.R = identity(n)
        self.V = identity(n)

    def promote_if(self, bound: int) -> None:
        if bound >= _LIMIT and self.S.dtype != object:
            for name in ("S", "L", "U", "R", "V"):
                setattr(self, name, getattr(self, name).astype(object))

    def swap_rows(self, a: int, b: int) -> None:
        if a != b:
            self.S[[a, b]] = self.S[[b, a]]
            self.L[[a, b]] = self.L[[b, a]]
            self.U[:, [a, b]] = self.U[:, [b, a]]

    def swap_cols(self, a: int, b: int) -> None:
        if a != b:
            self.S[:, [a, b]] = self.S[:, [b, a]]
            self.R[:, [a, b]] = self.R[:, [b, a]]
            self.V[[a, b]] = self.V[[b, a]]

    def clear_column(self, t: int) -> None:
        p = self.S[t, t]
        qs = self.S[t + 1 :, t] // p
        if not np.any(qs):
            return
        mq = _maxabs(qs)
        self.promote_if(
            mq * max(_maxabs(self.S[t]), _maxabs(self.L[t]), _maxabs(self.U)) * max(len(qs), 1)
            + max(_maxabs(self.S), _maxabs(self.L), _maxabs(self.U))
        )
        qs = self.S[t + 1 :, t] // p
        self.S[t + 1 :] -= np.outer(qs, self.S[t])
        self.L[t + 1 :] -= np.outer(qs, self.L[t])
        self.U[:, t] += self.U[:, t + 1 :] @ qs

    def clear_row(self, t: int) -> None:
        p = self.S[t, t]
        qs = self.S[t, t + 1 :] // p
        if not np.any(qs):
            return
        mq = _maxabs(qs)
        self.promote_if(
            mq * max(_maxabs(self.S[:, t]), _maxabs(self.R[:, t]), _maxabs(self.V)) * max(len(qs), 1)
            + max(_maxabs(self.S), _maxabs(self.R), _maxabs(self.V))
        )
        qs = self.S[t, t + 1 :] // p
        self.S[:, t + 1 :] -= np.outer(self.S[:, t], qs)
        self.R[:, t + 1 :] -= np.outer(self.R[:, t], qs)
        self.V[t] += qs @ self.V[t + 1 :]

    def add_row(self, target: int, src: int) -> None:
        self.promote_if(2 * max(_maxabs(self.S), _maxabs(self.L), _maxabs(self.U)))
        self.S[target] += self.S[src]
        self.L[target] += self.L[src]
        self.U[:, src] -= self.U[:, target]

    def negate_row(self, t: int) -> None:
        self.S[t] *= -1
        self.L[t] *= -1
        self.U[:, t] *= -1


def smith(A) -> SmithDecomposition:
    """Smith normal form with explicit unimodular transforms.

    Pivoting uses the smallest nonzero entry of the active block.  Diagonal
    entries are nonnegative, satisfy ``d1 | d2 | ...`` and zeros trail.
    """
    A = exact(A, ndim=2)
    m, n = A.shape
    w = _Work(A)
    for t in range(min(m, n)):
        block = w.S[t:, t:]
        nz = np.argwhere(block != 0)
        if len(nz) == 0:
            break
        mags = np.abs(block[nz[:, 0], nz[:, 1]])
        i, j = nz[int(np.argmin(mags))]
        w.swap_rows(t, t + int(i))
        w.swap_cols(t, t + int(j))
        while True:
            w.clear_column(t)
            w.clear_row(t)
            col = w.S[t + 1 :, t]
            row = w.S[t, t + 1 :]
            if np.any(col) or np.any(row):
                # remainders are smaller than the pivot: move the least one in
                best = abs(int(w.S[t, t]))
                pick = None
                for k in np.flatnonzero(col):
                    if abs(int(col[k])) < best:
                        best, pick = abs(int(col[k])), ("r", t + 1 + int(k))
                for k in np.flatnonzero(row):
                    if abs(int(row[k])) < best:
                        best, pick = abs(int(row[k])), ("c", t + 1 + int(k))
                if pick[0] == "r":
                    w.swap_rows(t, pick[1])
                else:
                    w.swap_cols(t, pick[1])
                continue
            p = int(w.S[t, t])
            rest = w.S[t + 1 :, t + 1 :]
            bad = np.argwhere(rest % p != 0) if rest.size else []
            if len(bad):
                w.add_row(t, t + 1 + int(bad[0][0]))
                continue
            break
        if w.S[t, t] < 0:
            w.negate_row(t)
    return SmithDecomposition(
        U=exact(w.U), S=exact(w.S), V=exact(w.V), source=A, U_inv=exact(w.L), V_inv=exact(w.R)
    )


def invariant_factors(A) -> tuple[int, ...]:
    """Nonunit SNF diagonal of ``A`` viewed as a relation matrix (columns)."""
    A = exact(A, ndim=2)
    diag = smith(A).diagonal if A.size else []
    diag = diag + [0] * (A.shape[0] - len(diag))
    return tuple(d for d in diag if d != 1)


# --------------------------------------------------------------------------
# Lattice reduction, solving and kernels


def _transform_from_ops(ops, n: int) -> np.ndarray:
    """The ``n x n`` product of logged column operations, int64 when it fits."""
    ops = ops.tolist()
    R = np.eye(n, dtype=np.int64)  # row k holds column k of the transform
    while True:
        try:
            for i, j, a, b, c, d in ops:
                Ri, Rj = R[i], R[j]
                if R.dtype != object and (abs(a) + abs(b) + abs(c) + abs(d)) * max(_maxabs(Ri), _maxabs(Rj)) >= _LIMIT:
                    raise OverflowError
                R[i], R[j] = a * Ri + c * Rj, b * Ri + d * Rj
            return R.T
        except OverflowError:
            if R.dtype == object:
                raise
            R = np.eye(n, dtype=object)


def _replay(ops, y: list[int]) -> list[int]:
    # x = V y where V is the product of the logged column operations
    for i, j, a, b, c, d in reversed(ops.tolist()):
        yi, yj = y[i], y[j]
        y[i] = a * yi + b * yj
        y[j] = c * yi + d * yj
    return y


class LatticeSolver:
    """Column-echelon reduction of ``A`` reused for many right-hand sides.

    The reduced pivot columns form a basis of the lattice spanned by the
    columns of ``A`` with distinct lowest indices, which makes membership
    decidable by greedy elimination.
    """

    def __init__(self, A, track: bool = False, backend: str | None = None):
        A = exact(A, ndim=2)
        self.A = A
        self.shape = A.shape
        reduced, lows, ops, V = kernels.reduce_columns(A.T, track=track, backend=backend)
        self._reduced = reduced
        self._lows = lows
        self._ops = ops
        self._V = V
        self._pivot_at = {int(r): j for j, r in enumerate(lows) if r >= 0}
        self.rank = len(self._pivot_at)

    def _reduce(self, B: np.ndarray):
        """Greedy elimination of the columns of ``B``; returns coefficients or None."""
        nrows = self.shape[0]
        ncols_b = B.shape[1]
        B = B.copy()
        Y = np.zeros((self.shape[1], ncols_b), dtype=object)
        if self._reduced.dtype == object:
            B = B.astype(object)
        r = nrows - 1
        while r >= 0:
            row = B[r]
            if not np.any(row):
                r -= 1
                continue
            j = self._pivot_at.get(r)
            if j is None:
                return None
            w = self._reduced[j, : r + 1]
            wr = int(w[r])
            if np.any(row % wr != 0):
                return None
            c = row // wr
            if B.dtype != object and _maxabs(c) * _maxabs(w) + _maxabs(B[: r + 1]) >= _LIMIT:
                B = B.astype(object)
                c = c.astype(object)
            if B.dtype == object:
                w = w.astype(object)
            B[: r + 1] -= np.outer(w, c)
            Y[j] = Y[j] + c.astype(object)
            r -= 1
        return Y

    def solve_many(self, B) -> np.ndarray | None:
        """Integer ``X`` with ``A X = B``, or None if some column has no solution."""
        B = exact(B, ndim=2)
        if B.shape[0] != self.shape[0]:
            raise InputError(f"right-hand side has {B.shape[0]} rows, expected {self.shape[0]}")
        Y = self._reduce(B)
        if Y is None:
            return None
        if self._V is not None:
            X = matmul(self._V.T, exact(Y))
        else:
            X = np.array([_replay(self._ops, list(Y[:, k])) for k in range(B.shape[1])], dtype=object).T
            X = exact(X.reshape(self.shape[1], B.shape[1]))
        return X

    def solve(self, b) -> np.ndarray | None:
        b = exact(b).reshape(-1)
        if b.shape[0] != self.shape[0]:
            raise InputError(f"right-hand side has length {b.shape[0]}, expected {self.shape[0]}")
        Y = self._reduce(b.reshape(-1, 1))
        if Y is None:
            return None
        if self._V is not None:
            return matmul(self._V.T, exact(Y)).reshape(-1)
        return exact(np.array(_replay(self._ops, list(Y[:, 0])), dtype=object))

    def contains(self, b) -> bool:
        b = exact(b).reshape(-1, 1)
        return self._reduce(b) is not None

    def kernel_basis(self) -> np.ndarray:
        if self._V is None:
            self._V = exact(_transform_from_ops(self._ops, self.shape[1]).T)
        zero = [j for j, r in enumerate(self._lows) if r < 0]
        return exact(self._V[zero].T.reshape(self.shape[1], len(zero)))


def solve_integer(A, b) -> np.ndarray | None:
    """An integer ``x`` with ``A x = b`` or None when none exists."""
    A = exact(A, ndim=2)
    b = exact(b).reshape(-1)
    if A.shape[0] != b.shape[0]:
        raise InputError(f"A has {A.shape[0]} rows but b has length {b.shape[0]}")
    if A.shape[1] == 0:
        return np.zeros(0, dtype=np.int64) if not np.any(b) else None
    x = LatticeSolver(A).solve(b)
    if x is not None:
        assert np.array_equal(matmul(A, x), b), "solver post-condition violated"
    return x


def kernel_basis(A) -> np.ndarray:
    """Columns form a Z-basis of the full integer kernel of ``A``."""
    A = exact(A, ndim=2)
    if A.shape[1] == 0:
        return np.zeros((0, 0), dtype=np.int64)
    if A.shape[0] == 0:
        return identity(A.shape[1])
    return LatticeSolver(A, track=True).kernel_basis()


# --------------------------------------------------------------------------
# Finitely generated abelian groups


@dataclass
class AbelianPresentation:
    """``Z^ambient_rank / colspan(relations)`` with SNF coordinates.

    When the group is a subquotient, ``cycle_basis`` maps ambient coordinates
    into the outer space (columns are a basis of the cycles).
    """

    ambient_rank: int
    relations: np.ndarray
    invariant_factors: tuple[int, ...]
    snf: SmithDecomposition | None
    cycle_basis: np.ndarray | None = None
    _diag: list[int] = field(default_factory=list, repr=False)
    _cycle_solver: LatticeSolver | None = field(default=None, repr=False)

    @classmethod
    def from_relations(cls, relations, cycle_basis=None) -> "AbelianPresentation":
        R = exact(relations, ndim=2)
        k = R.shape[0]
        snf = smith(R) if R.size else None
        diag = snf.diagonal if snf is not None else []
        diag = diag + [0] * (k - len(diag))
        return cls(
            ambient_rank=k,
            relations=R,
            invariant_factors=tuple(d for d in diag if d != 1),
            snf=snf,
            cycle_basis=cycle_basis,
            _diag=diag,
        )

    @property
    def is_trivial(self) -> bool:
        return not self.invariant_factors

    @property
    def torsion_exponent(self) -> int:
        tors = [d for d in self.invariant_factors if d > 0]
        return reduce(math.lcm, tors, 1)

    @property
    def free_rank(self) -> int:
        return sum(1 for d in self.invariant_factors if d == 0)

    def _snf_coords(self, x) -> list[int]:
        x = exact(x).reshape(-1)
        if x.shape[0] != self.ambient_rank:
            raise InputError(f"expected {self.ambient_rank} coordinates, got {x.shape[0]}")
        if self.snf is None:
            return to_ints(x)
        return to_ints(matmul(self.snf.U_inv, x))

    def coordinates(self, x) -> tuple[int, ...]:
        """Invariant-factor coordinates of the element with ambient coordinates ``x``."""
        c = self._snf_coords(x)
        out = []
        for ci, d in zip(c, self._diag):
            if d == 1:
                continue
            out.append(ci % d if d else ci)
        return tuple(out)

    def element(self, coords) -> np.ndarray:
        """Ambient coordinates of the element with the given invariant-factor coordinates."""
        full = [0] * self.ambient_rank
        it = iter(coords)
        for i, d in enumerate(self._diag):
            if d != 1:
                full[i] = int(next(it))
        if self.snf is None:
            return exact(full)
        return matmul(self.snf.U, exact(full))

    def ambient(self, z) -> np.ndarray:
        """Ambient coordinates of an outer-space cycle ``z``."""
        if self.cycle_basis is None:
            return exact(z).reshape(-1)
        if self._cycle_solver is None:
            self._cycle_solver = LatticeSolver(self.cycle_basis)
        y = self._cycle_solver.solve(z)
        if y is None:
            raise InputError("vector is not a cycle of this subquotient")
        return y

    def class_coordinates(self, z) -> tuple[int, ...]:
        return self.coordinates(self.ambient(z))

    def is_zero(self, x) -> bool:
        return not any(self.coordinates(x))

    def __str__(self) -> str:
        if not self.invariant_factors:
            return "0"
        parts = [f"Z_{d}" if d else "Z" for d in self.invariant_factors]
        return " + ".join(parts)


def subquotient(d_in, d_out) -> AbelianPresentation:
    """Presentation of ``ker(d_out) / im(d_in)`` in kernel coordinates."""
    d_in = exact(d_in, ndim=2)
    d_out = exact(d_out, ndim=2)
    n = d_in.shape[0]
    if d_out.shape[1] != n:
        raise InputError(f"d_out has {d_out.shape[1]} columns, d_in has {n} rows")
    if d_out.size and d_in.size and np.any(matmul(d_out, d_in)):
        raise InputError("d_out @ d_in is not zero")
    K = kernel_basis(d_out) if d_out.shape[0] else identity(n)
    k = K.shape[1]
    if d_in.shape[1] == 0 or k == 0:
        rel = np.zeros((k, 0), dtype=np.int64)
    else:
        rel = LatticeSolver(K, track=True).solve_many(d_in)
        if rel is None:
            raise InputError("image of d_in is not contained in ker d_out")
    return AbelianPresentation.from_relations(rel, cycle_basis=K)


def cyclic_group(d: int) -> AbelianPresentation:
    return AbelianPresentation.from_relations([[d]])


def element_order(G: AbelianPresentation, x) -> float | int:
    """Least ``n >= 1`` with ``n x`` in the relation span, or INFINITE."""
    c = G._snf_coords(x)
    order = 1
    for ci, d in zip(c, G._diag):
        if d == 1:
            continue
        if d == 0:
            if ci:
                return INFINITE
            continue
        order = math.lcm(order, d // math.gcd(d, ci))
    return order


def is_divisible(G: AbelianPresentation, x, q: int) -> np.ndarray | None:
    """A witness ``y`` with ``q y - x`` in the relation span, or None."""
    if q < 1:
        raise InputError("q must be positive")
    x = exact(x).reshape(-1)
    k = G.ambient_rank
    if k == 0:
        return np.zeros(0, dtype=np.int64)
    system = np.hstack([q * identity(k).astype(object), G.relations.astype(object)])
    z = solve_integer(system, x)
    if z is None:
        return None
    y = exact(z[:k])
    residue = exact(q * y.astype(object) - x.astype(object))
    if G.relations.shape[1]:
        assert solve_integer(G.relations, residue) is not None
    else:
        assert not np.any(residue)
    return y


def cokernel_obstruction(A, c) -> tuple[np.ndarray, int] | None:
    """A functional certifying ``c`` is not in the column span of ``A``.

    Returns ``(phi, d)`` with ``phi @ A = 0 (mod d)`` and ``phi @ c != 0 (mod d)``
    (``d = 0`` meaning exact equality), or None when ``c`` lies in the span.
    """
    A = exact(A, ndim=2)
    c = exact(c).reshape(-1)
    n = c.shape[0]
    if A.shape[1] == 0:
        for i in range(n):
            if c[i]:
                phi = np.zeros(n, dtype=np.int64)
                phi[i] = 1
                return phi, 0
        return None
    snf = smith(A)
    diag = snf.diagonal + [0] * (n - len(snf.diagonal))
    coords = matmul(snf.U_inv, c)
    for i, d in enumerate(diag):
        ci = int(coords[i])
        if (d == 0 and ci != 0) or (d > 1 and ci % d != 0):
            return exact(snf.U_inv[i]), d
    return None


def check_obstruction(A, c, phi, d: int) -> bool:
    """Re-verify a functional produced by :func:`cokernel_obstruction`."""
    A = exact(A, ndim=2)
    phi = exact(phi).reshape(-1)
    lhs = to_ints(matmul(phi.reshape(1, -1), A)) if A.shape[1] else []
    val = int(matmul(phi.reshape(1, -1), exact(c).reshape(-1, 1))[0, 0])
    if d == 0:
        return all(v == 0 for v in lhs) and val != 0
    if d == 1:
        return False
    return all(v % d == 0 for v in lhs) and val % d != 0


# --------------------------------------------------------------------------
# linear algebra over F_p


def nullspace_mod_p(A, p: int) -> np.ndarray:
    """Columns spanning ``{x : A x = 0 (mod p)}`` for a prime ``p``."""
    if p < 2 or any(p % d == 0 for d in range(2, math.isqrt(p) + 1)):
        raise InputError(f"{p} is not prime")
    A = exact(A, ndim=2)
    R = np.array([[int(v) % p for v in row] for row in A.tolist()], dtype=np.int64).reshape(A.shape)
    rows, cols = R.shape
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(R[r:, c])[0]
        if nz.size == 0:
            continue
        k = r + int(nz[0])
        if k != r:
            R[[r, k]] = R[[k, r]]
        R[r] = (R[r] * pow(int(R[r, c]), -1, p)) % p
        col = R[:, c].copy()
        col[r] = 0
        hit = np.nonzero(col)[0]
        if hit.size:
            R[hit] = (R[hit] - np.outer(col[hit], R[r])) % p
        pivots.append(c)
        r += 1
    free = [c for c in range(cols) if c not in set(pivots)]
    N = np.zeros((cols, len(free)), dtype=np.int64)
    for j, f in enumerate(free):
        N[f, j] = 1
        for i, c in enumerate(pivots):
            N[c, j] = (-R[i, f]) % p
    return N
