"""Free chain complexes over Z[Z_m] and diagonal approximations.

A complex stores each differential ``d_n: C_n -> C_(n-1)`` as an integer
array of shape ``(rank C_(n-1), rank C_n, m)``: entry ``[a, b]`` is the ring
element (coefficient of ``t^k`` at ``k``) by which generator ``b`` hits
generator ``a``.  The underlying free abelian group of ``C_n`` has basis
``t^x e_g`` with index ``g * m + x``; contracting homotopies are plain integer
matrices in that basis.

An element of ``(C x C)_n`` (diagonal action) is a dict mapping
``(a, g, h)`` (left degree, left generator, right generator) to an
``m x m`` array ``D`` holding the coefficient of ``t^x e_g x t^y e_h`` at
``D[x, y]``.
"""
from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field
import numpy as np

from .exactla import InputError, LatticeSolver, exact, identity, lincomb, matmul
from .groupring import CyclicRingElement, crt_index


class PreconditionError(RuntimeError):
    """An operation was called on an object lacking a verified property."""


# --------------------------------------------------------------------------
# ring-matrix helpers


def circulant(c, m: int) -> np.ndarray:
    """Matrix of multiplication by ``sum c_k t^k`` on the basis ``t^x``."""
    B = np.zeros((m, m), dtype=np.int64)
    c = [int(v) for v in c]
    if any(abs(v) >= 2**62 for v in c):
        B = B.astype(object)
    for k, ck in enumerate(c):
        if ck:
            for x in range(m):
                B[(x + k) % m, x] += ck
    return B


def zmatrix(R: np.ndarray, m: int) -> np.ndarray:
    """Integer matrix of a ring matrix ``R`` of shape ``(rows, cols, m)``."""
    rows, cols = R.shape[0], R.shape[1]
    Z = np.zeros((rows * m, cols * m), dtype=R.dtype if R.dtype == object else np.int64)
    for a in range(rows):
        for b in range(cols):
            if np.any(R[a, b]):
                Z[a * m : (a + 1) * m, b * m : (b + 1) * m] = circulant(R[a, b], m)
    return Z


def _left_embed(c, p: int, q: int) -> np.ndarray:
    out = np.zeros(p * q, dtype=np.int64)
    for k, v in enumerate(c):
        out[crt_index(k, 0, p, q)] += int(v)
    return out


def _right_embed(c, p: int, q: int) -> np.ndarray:
    out = np.zeros(p * q, dtype=np.int64)
    for k, v in enumerate(c):
        out[crt_index(0, k, p, q)] += int(v)
    return out


def _crt_product(a, b, p: int, q: int) -> np.ndarray:
    out = np.zeros(p * q, dtype=np.int64)
    for k, u in enumerate(a):
        if u:
            for l, v in enumerate(b):
                if v:
                    out[crt_index(k, l, p, q)] += int(u) * int(v)
    return out


def crt_basis_perm(p: int, q: int) -> np.ndarray:
    """``P[crt(x, y), x * q + y] = 1``: Z(p) x Z(q) coordinates -> Z(pq)."""
    P = np.zeros((p * q, p * q), dtype=np.int64)
    for x in range(p):
        for y in range(q):
            P[crt_index(x, y, p, q), x * q + y] = 1
    return P


# --------------------------------------------------------------------------
# complexes


@dataclass
class FreeComplex:
    """A complex of free Z[Z_m]-modules in degrees ``0..top``."""

    m: int
    top: int
    ranks: list[int]
    diff: dict[int, np.ndarray]
    homotopy: dict[int, np.ndarray] | None = None
    gens: list[list[tuple]] | None = None
    name: str = ""
    factors: tuple | None = None
    _zcache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if len(self.ranks) != self.top + 1:
            raise InputError("ranks must cover degrees 0..top")
        for n in range(1, self.top + 1):
            D = self.diff[n]
            if D.shape != (self.ranks[n - 1], self.ranks[n], self.m):
                raise InputError(f"d_{n} has shape {D.shape}")
        if self.gens is None:
            self.gens = [[(n, g) for g in range(r)] for n, r in enumerate(self.ranks)]

    def zrank(self, n: int) -> int:
        return self.ranks[n] * self.m if 0 <= n <= self.top else 0

    def dz(self, n: int) -> np.ndarray:
        """Integer matrix of ``d_n`` (zero matrix outside ``1..top``)."""
        if n not in self._zcache:
            if 1 <= n <= self.top:
                self._zcache[n] = zmatrix(self.diff[n], self.m)
            else:
                self._zcache[n] = np.zeros((self.zrank(n - 1), self.zrank(n)), dtype=np.int64)
        return self._zcache[n]

    def ring_entry(self, n: int, a: int, b: int) -> CyclicRingElement:
        return CyclicRingElement(self.m, tuple(self.diff[n][a, b]))

    def augmentation_row(self) -> np.ndarray:
        return np.ones((1, self.zrank(0)), dtype=np.int64)

    def eta_eps(self) -> np.ndarray:
        """``eta o eps`` on ``C_0`` with ``eta(1) = e_0``."""
        E = np.zeros((self.zrank(0), self.zrank(0)), dtype=np.int64)
        E[0, :] = 1
        return E

    def check_dd(self) -> bool:
        for n in range(2, self.top + 1):
            if np.any(matmul(self.dz(n - 1), self.dz(n))):
                return False
        return True

    def homotopy_defect(self, n: int) -> np.ndarray:
        """``d s_n + s_(n-1) d - id + (eta eps)_n``; zero when the identity holds."""
        s = self.homotopy
        terms = [(1, matmul(self.dz(n + 1), s[n])), (-1, identity(self.zrank(n)))]
        if n >= 1:
            terms.append((1, matmul(s[n - 1], self.dz(n))))
        else:
            terms.append((1, self.eta_eps()))
        return lincomb(terms, (self.zrank(n), self.zrank(n)))

    def check_homotopy(self) -> bool:
        if self.homotopy is None:
            return False
        return all(not np.any(self.homotopy_defect(n)) for n in range(self.top))

    def truncate(self, n: int, keep_homotopy: bool = False) -> "FreeComplex":
        if n > self.top:
            raise InputError(f"cannot truncate degree {self.top} complex at {n}")
        hom = None
        if keep_homotopy and self.homotopy is not None:
            hom = {k: v for k, v in self.homotopy.items() if k < n}
        return FreeComplex(
            self.m,
            n,
            self.ranks[: n + 1],
            {k: self.diff[k] for k in range(1, n + 1)},
            hom,
            self.gens[: n + 1],
            name=f"{self.name}<={n}",
            factors=self.factors,
        )

    def gen_index(self, n: int, label) -> int:
        return self.gens[n].index(label)


def _norm(m: int) -> np.ndarray:
    return np.ones(m, dtype=np.int64)


def _t_minus_1(m: int) -> np.ndarray:
    c = np.zeros(m, dtype=np.int64)
    c[1 % m] += 1
    c[0] -= 1
    return c


def _periodic_diffs(m: int, top: int) -> dict[int, np.ndarray]:
    return {n: (_t_minus_1(m) if n % 2 else _norm(m)).reshape(1, 1, m) for n in range(1, top + 1)}


def solve_homotopy(C: FreeComplex, seed: dict[int, np.ndarray] | None = None) -> dict[int, np.ndarray]:
    """Contracting homotopy found degree by degree by integer solving.

    Degrees present in ``seed`` are taken from it instead of being solved.
    """
    if C.ranks[0] != 1:
        raise InputError("homotopy solving needs a single degree-0 generator")
    s: dict[int, np.ndarray] = dict(seed or {})
    for n in range(C.top):
        if n in s:
            continue
        rhs_terms = [(1, identity(C.zrank(n)))]
        if n == 0:
            rhs_terms.append((-1, C.eta_eps()))
        else:
            rhs_terms.append((-1, matmul(s[n - 1], C.dz(n))))
        rhs = lincomb(rhs_terms, (C.zrank(n), C.zrank(n)))
        X = LatticeSolver(C.dz(n + 1)).solve_many(rhs)
        if X is None:
            raise PreconditionError(f"complex is not acyclic in degree {n}")
        s[n] = X
    return s


def standard_homotopy(m: int, top: int) -> dict[int, np.ndarray]:
    """Closed-form homotopy of W(m): the geometric-series lift."""
    s: dict[int, np.ndarray] = {}
    for n in range(top):
        S = np.zeros((m, m), dtype=np.int64)
        if n == 0 or n % 2 == 0:
            for i in range(m):
                S[:i, i] = 1
        else:
            S[0, m - 1] = 1
        s[n] = S
    return s


def reverse_seed(m: int) -> np.ndarray:
    """``s_0(t^i e_0) = -(t^i + ... + t^(m-1)) e_1`` for ``i >= 1``."""
    S = np.zeros((m, m), dtype=np.int64)
    for i in range(1, m):
        S[i:, i] = -1
    return S


def periodic_resolution(m: int, top: int, homotopy: str = "solved") -> FreeComplex:
    """W(m) in degrees ``0..top`` with differentials ``t - 1`` and ``N``.

    ``homotopy`` selects ``"solved"`` (integer solving), ``"standard"`` (the
    closed-form geometric series) or ``"reverse"`` (the opposite series in
    degree 0, higher degrees solved).  It is verified before being attached.
    """
    if m < 2:
        raise InputError(f"modulus must be at least 2, got {m}")
    if top < 0:
        raise InputError("top must be nonnegative")
    C = FreeComplex(m, top, [1] * (top + 1), _periodic_diffs(m, top), name=f"W({m})")
    if homotopy == "solved":
        C.homotopy = solve_homotopy(C)
    elif homotopy == "standard":
        C.homotopy = standard_homotopy(m, top)
    elif homotopy == "reverse":
        C.homotopy = solve_homotopy(C, {0: reverse_seed(m)} if top > 0 else {})
    elif homotopy is not None:
        raise InputError(f"unknown homotopy kind {homotopy!r}")
    if C.homotopy is not None and not C.check_homotopy():
        raise AssertionError("contracting homotopy identity failed")
    return C


def lens_complex(p: int, n: int) -> FreeComplex:
    """Cellular chains of the universal cover of L^n_p (one cell per degree)."""
    if p < 2 or n < 1:
        raise InputError("need p >= 2 and n >= 1")
    C = FreeComplex(p, n, [1] * (n + 1), _periodic_diffs(p, n), name=f"L({p},{n})")
    return C


def tensor_complex(C: FreeComplex, D: FreeComplex, top: int | None = None) -> FreeComplex:
    """``C x D`` over Z_pq with ``d(a x b) = da x b + (-1)^|a| a x db``.

    Degrees are cut at ``top`` (default ``C.top + D.top``).  When both inputs
    carry homotopies and ``top`` does not exceed either input's top degree,
    the combined one ``s x 1 + eta eps x s`` is attached and verified.
    """
    p, q = C.m, D.m
    if math.gcd(p, q) != 1:
        raise InputError(f"gcd({p}, {q}) != 1")
    m = p * q
    top = C.top + D.top if top is None else top
    gens = []
    for n in range(top + 1):
        gens.append(
            [
                (i, a, n - i, b)
                for i in range(max(0, n - D.top), min(n, C.top) + 1)
                for a in range(C.ranks[i])
                for b in range(D.ranks[n - i])
            ]
        )
    ranks = [len(g) for g in gens]
    index = [{g: k for k, g in enumerate(gs)} for gs in gens]
    diff = {}
    for n in range(1, top + 1):
        R = np.zeros((ranks[n - 1], ranks[n], m), dtype=np.int64)
        for col, (i, a, j, b) in enumerate(gens[n]):
            if i >= 1:
                for a2 in range(C.ranks[i - 1]):
                    c = C.diff[i][a2, a]
                    if np.any(c):
                        R[index[n - 1][(i - 1, a2, j, b)], col] += _left_embed(c, p, q)
            if j >= 1:
                sign = -1 if i % 2 else 1
                for b2 in range(D.ranks[j - 1]):
                    c = D.diff[j][b2, b]
                    if np.any(c):
                        R[index[n - 1][(i, a, j - 1, b2)], col] += sign * _right_embed(c, p, q)
        diff[n] = R
    T = FreeComplex(m, top, ranks, diff, gens=gens, name=f"{C.name}x{D.name}", factors=(C, D))
    # the combined homotopy needs factor cells one degree above the cut
    if (C.homotopy is not None and D.homotopy is not None and C.ranks[0] == D.ranks[0] == 1
            and top <= min(C.top, D.top)):
        T.homotopy = _tensor_homotopy(C, D, T)
        if not T.check_homotopy():
            raise AssertionError("tensor homotopy identity failed")
    return T


def _tensor_homotopy(C: FreeComplex, D: FreeComplex, T: FreeComplex) -> dict[int, np.ndarray]:
    p, q, m = C.m, D.m, T.m
    P = crt_basis_perm(p, q)
    # the coordinate of t_p^x e_a x t_q^y e_b inside T_n is gen * m + crt(x, y)
    s: dict[int, np.ndarray] = {}
    epsC = C.augmentation_row()
    for n in range(T.top):
        S = np.zeros((T.zrank(n + 1), T.zrank(n)), dtype=np.int64)
        for col, (i, a, j, b) in enumerate(T.gens[n]):
            src = slice(col * m, (col + 1) * m)
            # s x 1
            if i < C.top and i in C.homotopy:
                blockC = C.homotopy[i]
                for a2 in range(C.ranks[i + 1]):
                    label = (i + 1, a2, j, b)
                    if label not in T.gens[n + 1]:
                        continue
                    row = T.gen_index(n + 1, label)
                    sub = blockC[a2 * p : (a2 + 1) * p, a * p : (a + 1) * p]
                    if np.any(sub):
                        S[row * m : (row + 1) * m, src] += P @ np.kron(sub, identity(q)) @ P.T
            # eta eps x s
            if i == 0 and j < D.top and j in D.homotopy:
                blockD = D.homotopy[j]
                for b2 in range(D.ranks[j + 1]):
                    label = (0, 0, j + 1, b2)
                    if label not in T.gens[n + 1]:
                        continue
                    row = T.gen_index(n + 1, label)
                    sub = blockD[b2 * q : (b2 + 1) * q, b * q : (b + 1) * q]
                    if np.any(sub):
                        etaeps = np.zeros((p, p), dtype=np.int64)
                        etaeps[0, :] = epsC[0, :p]
                        S[row * m : (row + 1) * m, src] += P @ np.kron(etaeps, sub) @ P.T
        s[n] = S
    return s


# --------------------------------------------------------------------------
# chain maps


@dataclass
class ChainMap:
    """Per-degree ring matrices ``f_n`` of shape ``(rank D_n, rank C_n, m)``."""

    source: FreeComplex
    target: FreeComplex
    maps: dict[int, np.ndarray]

    @property
    def top(self) -> int:
        return min(self.source.top, self.target.top)

    def fz(self, n: int) -> np.ndarray:
        return zmatrix(self.maps[n], self.source.m)

    def check(self) -> bool:
        for n in range(1, self.top + 1):
            lhs = matmul(self.fz(n - 1), self.source.dz(n))
            rhs = matmul(self.target.dz(n), self.fz(n))
            if not np.array_equal(lhs, rhs):
                return False
        return True


def classifying_chain_map(p: int, n: int, top: int, target: FreeComplex | None = None) -> ChainMap:
    """The truncation inclusion ``lens(p, n) -> W(p)``."""
    if top < n:
        raise InputError(f"top {top} < n {n}")
    W = target if target is not None else periodic_resolution(p, top)
    one = np.zeros((1, 1, p), dtype=np.int64)
    one[0, 0, 0] = 1
    f = ChainMap(lens_complex(p, n), W, {k: one.copy() for k in range(n + 1)})
    if not f.check():
        raise AssertionError("classifying map is not a chain map")
    return f


def tensor_chain_map(f: ChainMap, g: ChainMap, source: FreeComplex, target: FreeComplex) -> ChainMap:
    """``f x g`` between tensor complexes built by :func:`tensor_complex`."""
    p, q = f.source.m, g.source.m
    maps = {}
    for n in range(min(source.top, target.top) + 1):
        R = np.zeros((target.ranks[n], source.ranks[n], p * q), dtype=np.int64)
        for col, (i, a, j, b) in enumerate(source.gens[n]):
            for a2 in range(f.target.ranks[i]):
                for b2 in range(g.target.ranks[j]):
                    label = (i, a2, j, b2)
                    if label not in target.gens[n]:
                        continue
                    R[target.gen_index(n, label), col] += _crt_product(
                        f.maps[i][a2, a], g.maps[j][b2, b], p, q
                    )
        maps[n] = R
    h = ChainMap(source, target, maps)
    if not h.check():
        raise AssertionError("tensor of chain maps is not a chain map")
    return h


# --------------------------------------------------------------------------
# diagonals

Elem = dict  # (a, g, h) -> m x m array


def _roll(D: np.ndarray, k: int) -> np.ndarray:
    return np.roll(np.roll(D, k, axis=0), k, axis=1)


def _acc(out: Elem, key, D) -> None:
    if key in out:
        out[key] = exact(out[key].astype(object) + exact(D).astype(object))
    else:
        out[key] = exact(D)


def _prune(e: Elem) -> Elem:
    return {k: v for k, v in e.items() if np.any(v)}


def act_ring(c, e: Elem) -> Elem:
    """Ring element ``sum c_k t^k`` acting diagonally on an element."""
    out: Elem = {}
    for k, ck in enumerate(c):
        if ck:
            for key, D in e.items():
                _acc(out, key, int(ck) * _roll(D, k).astype(object))
    return _prune(out)


@dataclass
class Diagonal:
    """``Delta_n`` on each generator of ``base`` in degrees ``0..verified_to``."""

    base: FreeComplex
    maps: dict[int, list[Elem]]
    verified_to: int = -1
    method: str = "lifted"

    @property
    def top(self) -> int:
        return max(self.maps) if self.maps else -1

    def on_chain(self, n: int, coeffs: np.ndarray) -> Elem:
        """``Delta`` of the chain with ring coefficients ``coeffs[g]`` on generator g."""
        out: Elem = {}
        for g, c in enumerate(coeffs):
            if np.any(c):
                for key, D in act_ring(c, self.maps[n][g]).items():
                    _acc(out, key, D)
        return _prune(out)

    def tensor_differential(self, n: int, e: Elem) -> Elem:
        C, m = self.base, self.base.m
        out: Elem = {}
        for (a, g, h), D in e.items():
            b = n - a
            if a >= 1:
                for g2 in range(C.ranks[a - 1]):
                    c = C.diff[a][g2, g]
                    if np.any(c):
                        _acc(out, (a - 1, g2, h), matmul(circulant(c, m), D))
            if b >= 1:
                sign = -1 if a % 2 else 1
                for h2 in range(C.ranks[b - 1]):
                    c = C.diff[b][h2, h]
                    if np.any(c):
                        _acc(out, (a, g, h2), sign * matmul(D, circulant(c, m).T).astype(object))
        return _prune(out)

    def chain_map_defect(self, n: int, g: int) -> Elem:
        lhs = self.tensor_differential(n, self.maps[n][g])
        rhs = self.on_chain(n - 1, self.base.diff[n][:, g])
        out = dict(lhs)
        for key, D in rhs.items():
            _acc(out, key, -exact(D).astype(object))
        return _prune(out)

    def counit_defect(self, n: int, g: int) -> tuple[np.ndarray, np.ndarray]:
        """``(eps x 1) Delta(e_g) - e_g`` and ``(1 x eps) Delta(e_g) - e_g`` as vectors."""
        m, r = self.base.m, self.base.ranks[n]
        left = np.zeros(r * m, dtype=object)
        right = np.zeros(r * m, dtype=object)
        for (a, g1, h), D in self.maps[n][g].items():
            D = exact(D).astype(object)
            if a == 0:
                left[h * m : (h + 1) * m] += D.sum(axis=0)
            if a == n:
                right[g1 * m : (g1 + 1) * m] += D.sum(axis=1)
        left[g * m] -= 1
        right[g * m] -= 1
        return exact(left), exact(right)

    def verify(self, upto: int | None = None) -> bool:
        upto = self.top if upto is None else upto
        for n in range(0, upto + 1):
            for g in range(self.base.ranks[n]):
                if n >= 1 and self.chain_map_defect(n, g):
                    return False
                l, r = self.counit_defect(n, g)
                if np.any(l) or np.any(r):
                    return False
        self.verified_to = max(self.verified_to, upto)
        return True

    def restrict(self, C: FreeComplex) -> "Diagonal":
        """The diagonal on a truncation ``C`` of the base (components must land in C x C)."""
        if C.m != self.base.m or C.top > self.top:
            raise InputError("complex is not a truncation covered by this diagonal")
        maps = {}
        for n in range(C.top + 1):
            idx = [self.base.gen_index(n, lab) for lab in C.gens[n]]
            maps[n] = []
            for gi in idx:
                e = {}
                for (a, g, h), D in self.maps[n][gi].items():
                    lg = self.base.gens[a][g]
                    lh = self.base.gens[n - a][h]
                    if lg not in C.gens[a] or lh not in C.gens[n - a]:
                        raise AssertionError("diagonal component leaves the truncation")
                    e[(a, C.gen_index(a, lg), C.gen_index(n - a, lh))] = D
                maps[n].append(e)
        return Diagonal(C, maps, verified_to=min(self.verified_to, C.top), method=self.method)


def _apply_tensor_homotopy(C: FreeComplex, n: int, e: Elem) -> Elem:
    # (s x 1 + eta eps x s) on an element of (C x C)_n
    m = C.m
    s = C.homotopy
    out: Elem = {}
    for (a, g, h), D in e.items():
        b = n - a
        blk = s[a][:, g * m : (g + 1) * m]
        for g2 in range(C.ranks[a + 1]):
            sub = blk[g2 * m : (g2 + 1) * m]
            if np.any(sub):
                _acc(out, (a + 1, g2, h), matmul(sub, D))
        if a == 0:
            v = exact(D).astype(object).sum(axis=0)
            blk = s[b][:, h * m : (h + 1) * m]
            w = matmul(blk, exact(v))
            for h2 in range(C.ranks[b + 1]):
                piece = w[h2 * m : (h2 + 1) * m]
                if np.any(piece):
                    E = np.zeros((m, m), dtype=object)
                    E[0, :] = piece
                    _acc(out, (0, 0, h2), E)
    return _prune(out)


def diagonal(W: FreeComplex, top: int | None = None) -> Diagonal:
    """Diagonal approximation by lifting through the contracting homotopy."""
    top = W.top if top is None else top
    if W.homotopy is None or top > W.top:
        raise PreconditionError("diagonal lifting needs a contracting homotopy through degree top")
    if W.ranks[0] != 1:
        raise PreconditionError("diagonal lifting needs a single degree-0 generator")
    for n in range(top):
        if np.any(W.homotopy_defect(n)):
            raise PreconditionError(f"homotopy identity fails in degree {n}")
    m = W.m
    e00 = np.zeros((m, m), dtype=np.int64)
    e00[0, 0] = 1
    maps: dict[int, list[Elem]] = {0: [{(0, 0, 0): e00}]}
    for n in range(1, top + 1):
        maps[n] = []
        partial = Diagonal(W, maps)
        for g in range(W.ranks[n]):
            x = partial.on_chain(n - 1, W.diff[n][:, g])
            val = _apply_tensor_homotopy(W, n - 1, x)
            # counit normalization: y = e - (eps x 1)(val) is a cycle; add eta x y + y x eta
            y = np.zeros(W.zrank(n), dtype=object)
            y[g * m] = 1
            for (a, g1, h), D in val.items():
                if a == 0:
                    y[h * m : (h + 1) * m] -= exact(D).astype(object).sum(axis=0)
            for h in range(W.ranks[n]):
                piece = y[h * m : (h + 1) * m]
                if np.any(piece):
                    E = np.zeros((m, m), dtype=object)
                    E[0, :] = piece
                    _acc(val, (0, 0, h), E)
                    F = np.zeros((m, m), dtype=object)
                    F[:, 0] = piece
                    _acc(val, (n, h, 0), F)
            maps[n].append(_prune(val))
    Delta = Diagonal(W, maps, method="lifted")
    if not Delta.verify(top):
        raise AssertionError("lifted diagonal fails verification")
    return Delta


def product_diagonal(Dp: Diagonal, Dq: Diagonal, base: FreeComplex | None = None) -> Diagonal:
    """``(1 x tau x 1)(Delta_p x Delta_q)`` on the tensor complex of the two bases."""
    for D in (Dp, Dq):
        if D.verified_to < D.top:
            raise PreconditionError("product diagonal needs verified factor diagonals")
    C, E = Dp.base, Dq.base
    p, q = C.m, E.m
    T = base if base is not None else tensor_complex(C, E, top=min(C.top + E.top, Dp.top + Dq.top))
    maps: dict[int, list[Elem]] = {}
    for n in range(T.top + 1):
        maps[n] = []
        for (i, a, j, b) in T.gens[n]:
            if i > Dp.top or j > Dq.top:
                raise PreconditionError("factor diagonal too shallow for the product")
            out: Elem = {}
            for (a1, g1, h1), X in Dp.maps[i][a].items():
                i2 = i - a1
                for (b1, g2, h2), Y in Dq.maps[j][b].items():
                    j2 = j - b1
                    sign = -1 if (i2 * b1) % 2 else 1
                    left = (a1, g1, b1, g2)
                    right = (i2, h1, j2, h2)
                    key = (a1 + b1, T.gen_index(a1 + b1, left), T.gen_index(i2 + j2, right))
                    D = np.zeros((p * q, p * q), dtype=object)
                    Xo, Yo = exact(X).astype(object), exact(Y).astype(object)
                    for x, y in zip(*np.nonzero(Xo)):
                        for u, v in zip(*np.nonzero(Yo)):
                            D[crt_index(x, u, p, q), crt_index(y, v, p, q)] += sign * Xo[x, y] * Yo[u, v]
                    _acc(out, key, D)
            maps[n].append(_prune(out))
    Delta = Diagonal(T, maps, method="product")
    if not Delta.verify(T.top):
        raise AssertionError("product diagonal fails verification")
    return Delta


# --------------------------------------------------------------------------
# on-disk cache of verified diagonals of W(m)


def _encode_elem(e: Elem) -> list:
    return [[a, g, h, [[str(int(v)) for v in row] for row in D]] for (a, g, h), D in sorted(e.items())]


def _decode_elem(rows: list) -> Elem:
    return {(a, g, h): exact(np.array([[int(v) for v in row] for row in D], dtype=object)) for a, g, h, D in rows}


def save_diagonal(Delta: Diagonal, path: str) -> None:
    doc = {
        "schema": "bscat-cert/1",
        "statement_id": "diagonal",
        "parameters": {"m": str(Delta.base.m), "top": str(Delta.top)},
        "status": "VERIFIED" if Delta.verified_to >= Delta.top else "INCOMPLETE",
        "witness": {"maps": {str(n): [_encode_elem(e) for e in es] for n, es in Delta.maps.items()}},
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, sort_keys=True)


def load_diagonal(path: str, W: FreeComplex) -> Diagonal | None:
    """Read a cached diagonal and re-verify it; None if absent or invalid."""
    if not os.path.exists(path):
        return None
    with open(path) as fh:
        doc = json.load(fh)
    if doc.get("schema") != "bscat-cert/1" or int(doc["parameters"]["m"]) != W.m:
        return None
    maps = {int(n): [_decode_elem(e) for e in es] for n, es in doc["witness"]["maps"].items()}
    Delta = Diagonal(W, {n: maps[n] for n in sorted(maps) if n <= W.top})
    if not Delta.verify():
        return None
    return Delta


def cached_diagonal(m: int, top: int, cache_dir: str | None = None, homotopy: str = "solved") -> Diagonal:
    """Diagonal of W(m) through degree ``top``, read from or written to ``cache_dir``."""
    W = periodic_resolution(m, top, homotopy=homotopy)
    if cache_dir:
        path = os.path.join(cache_dir, f"diagonal_m{m}_top{top}_{homotopy}.json")
        got = load_diagonal(path, W)
        if got is not None and got.top >= top:
            return got
        Delta = diagonal(W, top)
        os.makedirs(cache_dir, exist_ok=True)
        save_diagonal(Delta, path)
        return Delta
    return diagonal(W, top)
