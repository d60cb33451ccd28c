"""Cochains, chains and (co)homology with Z[Z_m]-module coefficients.

A cochain of degree ``n`` is an equivariant map ``C_n -> M``; it is stored by
its values on the free generators, generator-major: the value on generator
``g`` occupies ``values[g * rank(M) : (g + 1) * rank(M)]``.  The coboundary
is ``(delta f)(e) = f(d e)`` with no extra sign.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .complexes import ChainMap, Diagonal, FreeComplex, PreconditionError
from .exactla import (
    AbelianPresentation,
    InputError,
    LatticeSolver,
    exact,
    lincomb,
    matmul,
    solve_integer,
    subquotient,
)
from .groupring import (
    CyclicRingElement,
    GModule,
    ModuleHom,
    SESModules,
    crt_index,
    crt_module,
    trivial_module,
)

KOSZUL = "koszul"
PLAIN = "plain"
SIGN_CONVENTIONS = (KOSZUL, PLAIN)


@dataclass
class Cochain:
    complex: FreeComplex
    degree: int
    module: GModule
    values: np.ndarray

    def __post_init__(self):
        self.values = exact(self.values).reshape(-1)
        n = self.degree
        r = self.complex.ranks[n] if 0 <= n <= self.complex.top else 0
        if self.values.shape[0] != r * self.module.rank:
            raise InputError(
                f"cochain needs {r * self.module.rank} values, got {self.values.shape[0]}"
            )

    @property
    def ngens(self) -> int:
        n = self.degree
        return self.complex.ranks[n] if 0 <= n <= self.complex.top else 0

    def value(self, g: int) -> np.ndarray:
        R = self.module.rank
        return self.values[g * R : (g + 1) * R]

    def _like(self, values) -> "Cochain":
        return Cochain(self.complex, self.degree, self.module, values)

    def _check(self, other: "Cochain") -> None:
        if other.complex is not self.complex or other.degree != self.degree:
            raise InputError("cochains live on different complexes or degrees")
        if not self.module.same_structure(other.module):
            raise InputError("cochains have different coefficient modules")

    def __add__(self, other: "Cochain") -> "Cochain":
        self._check(other)
        return self._like(lincomb([(1, self.values), (1, other.values)], self.values.shape))

    def __sub__(self, other: "Cochain") -> "Cochain":
        self._check(other)
        return self._like(lincomb([(1, self.values), (-1, other.values)], self.values.shape))

    def __neg__(self) -> "Cochain":
        return self._like(lincomb([(-1, self.values)], self.values.shape))

    def scale(self, k: int) -> "Cochain":
        return self._like(lincomb([(k, self.values)], self.values.shape))

    def is_zero(self) -> bool:
        return not np.any(self.values)

    def equals(self, other: "Cochain") -> bool:
        self._check(other)
        return np.array_equal(self.values, other.values)


def zero_cochain(C: FreeComplex, n: int, M: GModule) -> Cochain:
    r = C.ranks[n] if 0 <= n <= C.top else 0
    return Cochain(C, n, M, np.zeros(r * M.rank, dtype=np.int64))


def unit_cochain(C: FreeComplex) -> Cochain:
    """The generator ``1`` of H^0(C; Z): every degree-0 generator maps to 1."""
    return Cochain(C, 0, trivial_module(C.m), np.ones(C.ranks[0], dtype=np.int64))


# --------------------------------------------------------------------------
# differentials


def _ring(C: FreeComplex, n: int, a: int, b: int) -> CyclicRingElement:
    return CyclicRingElement(C.m, tuple(int(x) for x in C.diff[n][a, b]))


def cochain_differential(C: FreeComplex, M: GModule, n: int) -> np.ndarray:
    """Matrix of ``delta: Hom(C_n, M) -> Hom(C_(n+1), M)``."""
    if M.m != C.m:
        raise InputError("module and complex have different moduli")
    if n < -1 or n >= C.top:
        if n == C.top:
            return np.zeros((0, C.ranks[n] * M.rank), dtype=np.int64)
        raise InputError(f"degree {n} out of range for a complex of top {C.top}")
    R = M.rank
    if n == -1:
        return np.zeros((C.ranks[0] * R, 0), dtype=np.int64)
    rows, cols = C.ranks[n + 1], C.ranks[n]
    blocks = {}
    obj = False
    for b in range(rows):
        for a in range(cols):
            r = _ring(C, n + 1, a, b)
            if not r.is_zero():
                A = M.action_matrix(r)
                obj |= A.dtype == object
                blocks[(b, a)] = A
    out = np.zeros((rows * R, cols * R), dtype=object if obj else np.int64)
    for (b, a), A in blocks.items():
        out[b * R : (b + 1) * R, a * R : (a + 1) * R] = A
    return out


def coboundary(c: Cochain) -> Cochain:
    """``delta c`` computed generator by generator (no dense matrix)."""
    C, M, n = c.complex, c.module, c.degree
    if n >= C.top:
        return zero_cochain(C, n + 1, M)
    R = M.rank
    vals = []
    for b in range(C.ranks[n + 1]):
        terms = []
        for a in range(C.ranks[n]):
            r = _ring(C, n + 1, a, b)
            if not r.is_zero():
                terms.append((1, M.act(r, c.value(a))))
        vals.append(lincomb(terms, (R,)) if terms else np.zeros(R, dtype=np.int64))
    return Cochain(C, n + 1, M, np.concatenate(vals) if vals else np.zeros(0, dtype=np.int64))


def is_cocycle(c: Cochain) -> bool:
    return coboundary(c).is_zero()


def boundary_matrix(C: FreeComplex, M: GModule, n: int) -> np.ndarray:
    """Matrix of ``d: C_n x_G M -> C_(n-1) x_G M``."""
    if M.m != C.m:
        raise InputError("module and complex have different moduli")
    R = M.rank
    if n <= 0 or n > C.top:
        lo = C.ranks[n - 1] if 0 <= n - 1 <= C.top else 0
        hi = C.ranks[n] if 0 <= n <= C.top else 0
        return np.zeros((lo * R, hi * R), dtype=np.int64)
    rows, cols = C.ranks[n - 1], C.ranks[n]
    out = np.zeros((rows * R, cols * R), dtype=np.int64)
    for a in range(rows):
        for b in range(cols):
            r = _ring(C, n, a, b)
            if not r.is_zero():
                # e x r v = e r x v moves across as the involution
                out[a * R : (a + 1) * R, b * R : (b + 1) * R] = M.action_matrix(r.bar())
    return out


def cohomology_group(C: FreeComplex, M: GModule, n: int) -> AbelianPresentation:
    if not 0 <= n <= C.top:
        raise InputError(f"degree {n} out of range")
    return subquotient(cochain_differential(C, M, n - 1), cochain_differential(C, M, n))


def homology_group(C: FreeComplex, M: GModule, n: int) -> AbelianPresentation:
    if not 0 <= n <= C.top:
        raise InputError(f"degree {n} out of range")
    return subquotient(boundary_matrix(C, M, n + 1), boundary_matrix(C, M, n))


# --------------------------------------------------------------------------
# classes


@dataclass
class CohClass:
    """A cocycle together with the group it represents a class in."""

    representative: Cochain
    _group: AbelianPresentation | None = field(default=None, repr=False)

    def __post_init__(self):
        if not is_cocycle(self.representative):
            raise InputError("representative is not a cocycle")

    @property
    def degree(self) -> int:
        return self.representative.degree

    @property
    def module(self) -> GModule:
        return self.representative.module

    @property
    def group(self) -> AbelianPresentation:
        if self._group is None:
            c = self.representative
            self._group = cohomology_group(c.complex, c.module, c.degree)
        return self._group

    @property
    def coordinates(self) -> tuple[int, ...]:
        return self.group.class_coordinates(self.representative.values)

    def is_zero(self) -> bool:
        return is_coboundary(self.representative) is not None

    def order(self):
        from .exactla import element_order

        G = self.group
        return element_order(G, G.ambient(self.representative.values))


def is_coboundary(c: Cochain, solver: LatticeSolver | None = None) -> Cochain | None:
    """A cochain ``x`` with ``delta x = c`` exactly, or None if there is none."""
    if not is_cocycle(c):
        raise InputError("input is not a cocycle")
    C, M, n = c.complex, c.module, c.degree
    if c.is_zero():
        return zero_cochain(C, n - 1, M)
    if n == 0:
        return None
    if solver is None:
        solver = LatticeSolver(cochain_differential(C, M, n - 1))
    x = solver.solve(c.values)
    if x is None:
        return None
    w = Cochain(C, n - 1, M, x)
    if not coboundary(w).equals(c):
        raise AssertionError("coboundary witness failed re-verification")
    return w


def cohomologous(u: Cochain, v: Cochain) -> Cochain | None:
    """A witness ``x`` with ``delta x = u - v``, or None."""
    return is_coboundary(u - v)


# --------------------------------------------------------------------------
# products


def _orbit(M: GModule, v: np.ndarray) -> np.ndarray:
    # columns t^x v for x = 0..m-1
    cols = [exact(v)]
    for _ in range(M.m - 1):
        cols.append(M.apply(cols[-1]))
    return np.stack(cols, axis=1)


def cup(u: Cochain, v: Cochain, Delta: Diagonal, convention: str = KOSZUL) -> Cochain:
    """``(u cup v)(c) = (u x v)(Delta c)`` with coefficients ``M_u x M_v``.

    Under the Koszul convention ``(u x v)(a x b) = (-1)^(|v||a|) u(a) x v(b)``;
    the plain convention drops that sign.
    """
    if convention not in SIGN_CONVENTIONS:
        raise InputError(f"unknown sign convention {convention!r}")
    C = u.complex
    if v.complex is not C or Delta.base is not C:
        raise InputError("cup needs cochains on the base complex of the diagonal")
    i, j = u.degree, v.degree
    n = i + j
    Mu, Mv = u.module, v.module
    from .groupring import tensor

    Mout = tensor(Mu, Mv)
    if n > C.top:
        return zero_cochain(C, n, Mout)
    if n > Delta.verified_to:
        raise PreconditionError(f"diagonal verified only to degree {Delta.verified_to}")
    sign = -1 if (convention == KOSZUL and (i * j) % 2) else 1
    Us = [_orbit(Mu, u.value(g)) for g in range(C.ranks[i])]
    Vs = [_orbit(Mv, v.value(h)) for h in range(C.ranks[j])]
    vals = []
    for c in range(C.ranks[n]):
        acc = []
        for (a, g, h), D in Delta.maps[n][c].items():
            if a != i:
                continue
            prod = matmul(matmul(Us[g], D), Vs[h].T)
            acc.append((sign, prod.reshape(-1)))
        vals.append(lincomb(acc, (Mout.rank,)) if acc else np.zeros(Mout.rank, dtype=np.int64))
    return Cochain(C, n, Mout, np.concatenate(vals))


def cup_power(u: Cochain, k: int, Delta: Diagonal, convention: str = KOSZUL) -> Cochain:
    """``u^k``, left-associated; ``u^0`` is the unit."""
    if k < 0:
        raise InputError("power must be nonnegative")
    if k == 0:
        return unit_cochain(u.complex)
    out = u
    for _ in range(k - 1):
        out = cup(out, u, Delta, convention)
    return out


def cross(u: Cochain, v: Cochain, T: FreeComplex, convention: str = KOSZUL) -> Cochain:
    """``(u x v)(a x b) = (-1)^(|v||a|) u(a) x v(b)`` on the tensor complex ``T``."""
    C, D = u.complex, v.complex
    p, q = C.m, D.m
    if T.m != p * q:
        raise InputError("tensor complex has the wrong modulus")
    i, j = u.degree, v.degree
    n = i + j
    M = crt_module(p, q, u.module, v.module)
    if n > T.top:
        return zero_cochain(T, n, M)
    sign = -1 if (convention == KOSZUL and (i * j) % 2) else 1
    vals = []
    for (a, g, b, h) in T.gens[n]:
        if a == i and b == j:
            vals.append(sign * np.kron(u.value(g).astype(object), v.value(h).astype(object)))
        else:
            vals.append(np.zeros(M.rank, dtype=np.int64))
    return Cochain(T, n, M, exact(np.concatenate(vals)) if vals else np.zeros(0, dtype=np.int64))


# --------------------------------------------------------------------------
# functoriality


def pullback(f: ChainMap, u: Cochain) -> Cochain:
    """``f^* u = u o f`` on the source complex of ``f``."""
    if u.complex is not f.target and u.complex.gens != f.target.gens:
        raise InputError("cochain does not live on the target of the chain map")
    n = u.degree
    S, M = f.source, u.module
    if n > S.top:
        raise InputError("degree beyond the source complex")
    vals = []
    for g in range(S.ranks[n]):
        terms = []
        for g2 in range(f.target.ranks[n]):
            c = f.maps[n][g2, g]
            if np.any(c):
                terms.append((1, M.act(CyclicRingElement(S.m, tuple(int(x) for x in c)), u.value(g2))))
        vals.append(lincomb(terms, (M.rank,)) if terms else np.zeros(M.rank, dtype=np.int64))
    return Cochain(S, n, M, np.concatenate(vals))


def pushforward(h: ModuleHom, u: Cochain) -> Cochain:
    """Apply a coefficient homomorphism value by value."""
    if not h.source.same_structure(u.module):
        raise InputError("homomorphism source is not the coefficient module")
    vals = [h.apply(u.value(g)) for g in range(u.ngens)]
    data = np.concatenate(vals) if vals else np.zeros(0, dtype=np.int64)
    return Cochain(u.complex, u.degree, h.target, data)


def homology_pushforward(f: ChainMap, z: np.ndarray, M: GModule, n: int) -> np.ndarray:
    """Image under ``f`` of the chain ``z`` in ``C_n x_G M``."""
    S, T = f.source, f.target
    R = M.rank
    z = exact(z).reshape(-1)
    out = []
    for g2 in range(T.ranks[n]):
        terms = []
        for g in range(S.ranks[n]):
            c = f.maps[n][g2, g]
            if np.any(c):
                r = CyclicRingElement(S.m, tuple(int(x) for x in c)).bar()
                terms.append((1, M.act(r, z[g * R : (g + 1) * R])))
        out.append(lincomb(terms, (R,)) if terms else np.zeros(R, dtype=np.int64))
    return np.concatenate(out) if out else np.zeros(0, dtype=np.int64)


def connecting(S: SESModules, u: Cochain) -> Cochain:
    """The zig-zag ``H^n(C; quotient) -> H^(n+1)(C; sub)``."""
    if not S.is_exact():
        raise InputError("sequence is not exact")
    if not S.proj.target.same_structure(u.module):
        raise InputError("cochain does not take values in the quotient module")
    if not is_cocycle(u):
        raise InputError("input is not a cocycle")
    C, n = u.complex, u.degree
    B = S.proj.source
    lifts = []
    projector = LatticeSolver(S.proj.matrix)
    for g in range(u.ngens):
        x = projector.solve(u.value(g))
        if x is None:
            raise AssertionError("lift through the surjection failed")
        lifts.append(x)
    lifted = Cochain(C, n, B, np.concatenate(lifts) if lifts else np.zeros(0, dtype=np.int64))
    db = coboundary(lifted)
    incl = LatticeSolver(S.incl.matrix)
    out = []
    for g in range(db.ngens):
        y = incl.solve(db.value(g))
        if y is None:
            raise AssertionError("coboundary of the lift leaves the submodule")
        out.append(y)
    A = S.incl.source
    return Cochain(C, n + 1, A, np.concatenate(out) if out else np.zeros(0, dtype=np.int64))


def crt_point(p: int, q: int, a: int, b: int) -> int:
    return crt_index(a, b, p, q)
