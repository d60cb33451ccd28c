"""The group ring Z[Z_m] and its integrally free modules.

A module is a free abelian group of finite rank with the action of the
generator ``t`` given by an integer matrix.  Tensor products keep their
factors separate so that high tensor powers (ranks in the tens of thousands)
can act on vectors without ever materializing the ``rank x rank`` matrix.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property, reduce
from typing import Sequence

import numpy as np

from .exactla import (
    AbelianPresentation,
    InputError,
    LatticeSolver,
    exact,
    identity,
    invariant_factors,
    kernel_basis,
    lincomb,
    matmul,
    subquotient,
)


def _check_modulus(m: int) -> None:
    if int(m) < 2:
        raise InputError(f"modulus must be at least 2, got {m}")


def crt_index(a: int, b: int, p: int, q: int) -> int:
    """The residue ``x mod pq`` with ``x = a mod p`` and ``x = b mod q``."""
    return next(x for x in range(p * q) if x % p == a % p and x % q == b % q)


# --------------------------------------------------------------------------
# ring elements


@dataclass(frozen=True)
class CyclicRingElement:
    """``sum_i coeffs[i] t^i`` in Z[Z_m]."""

    m: int
    coeffs: tuple[int, ...]

    def __post_init__(self):
        _check_modulus(self.m)
        c = tuple(int(x) for x in self.coeffs)
        if len(c) != self.m:
            raise InputError(f"expected {self.m} coefficients, got {len(c)}")
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def from_terms(cls, m: int, terms: dict[int, int]) -> "CyclicRingElement":
        c = [0] * m
        for k, v in terms.items():
            c[k % m] += int(v)
        return cls(m, tuple(c))

    @classmethod
    def zero(cls, m: int) -> "CyclicRingElement":
        return cls(m, (0,) * m)

    @classmethod
    def one(cls, m: int) -> "CyclicRingElement":
        return cls.t(m, 0)

    @classmethod
    def t(cls, m: int, k: int = 1) -> "CyclicRingElement":
        return cls.from_terms(m, {k: 1})

    @classmethod
    def norm(cls, m: int) -> "CyclicRingElement":
        """The norm element ``N = 1 + t + ... + t^(m-1)``."""
        return cls(m, (1,) * m)

    def _same(self, other: "CyclicRingElement") -> None:
        if other.m != self.m:
            raise InputError(f"modulus mismatch: {self.m} vs {other.m}")

    def __add__(self, other):
        self._same(other)
        return CyclicRingElement(self.m, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other):
        self._same(other)
        return CyclicRingElement(self.m, tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self):
        return CyclicRingElement(self.m, tuple(-a for a in self.coeffs))

    def __mul__(self, other):
        if isinstance(other, int):
            return CyclicRingElement(self.m, tuple(other * a for a in self.coeffs))
        self._same(other)
        m = self.m
        out = [0] * m
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    if b:
                        out[(i + j) % m] += a * b
        return CyclicRingElement(m, tuple(out))

    __rmul__ = __mul__

    def augmentation(self) -> int:
        return sum(self.coeffs)

    def bar(self) -> "CyclicRingElement":
        """The involution ``t^i -> t^(-i)``."""
        return CyclicRingElement.from_terms(self.m, {-i: c for i, c in enumerate(self.coeffs)})

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def terms(self):
        return [(i, c) for i, c in enumerate(self.coeffs) if c]

    def __str__(self) -> str:
        if self.is_zero():
            return "0"
        parts = []
        for i, c in self.terms():
            mono = "1" if i == 0 else ("t" if i == 1 else f"t^{i}")
            if mono == "1":
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{c}{mono}")
        return " + ".join(parts).replace("+ -", "- ")


def ring_mul(x: CyclicRingElement, y: CyclicRingElement) -> CyclicRingElement:
    return x * y


# --------------------------------------------------------------------------
# modules


def _mat_power(T: np.ndarray, k: int) -> np.ndarray:
    out = identity(T.shape[0])
    for _ in range(k):
        out = matmul(T, out)
    return out


def _apply_factors(factors: Sequence[np.ndarray], ranks: Sequence[int], x: np.ndarray) -> np.ndarray:
    # (F_1 x ... x F_k) applied to the columns of x, one tensor axis at a time
    x = exact(x)
    vec = x.ndim == 1
    if vec:
        x = x.reshape(-1, 1)
    ncols = x.shape[1]
    if len(factors) == 1:
        out = matmul(factors[0], x)
        return out.reshape(-1) if vec else out
    y = x.reshape(*ranks, ncols)
    for axis, F in enumerate(factors):
        if np.array_equal(F, identity(F.shape[0])):
            continue
        moved = np.moveaxis(y, axis, 0)
        shape = moved.shape
        flat = matmul(F, moved.reshape(shape[0], -1))
        y = np.moveaxis(flat.reshape((F.shape[0],) + shape[1:]), 0, axis)
    out = exact(np.ascontiguousarray(y).reshape(-1, ncols))
    return out.reshape(-1) if vec else out


class GModule:
    """A Z[Z_m]-module, free over Z, with ``t`` acting by ``T``.

    ``factors`` holds small action matrices whose Kronecker product (left
    factor major) is ``T``.  Plain modules have a single factor.
    """

    def __init__(self, m: int, factors: Sequence[np.ndarray], label: tuple):
        _check_modulus(m)
        self.m = int(m)
        self.factors = tuple(exact(F, ndim=2) for F in factors)
        self.factor_ranks = tuple(F.shape[0] for F in self.factors)
        self.rank = math.prod(self.factor_ranks)
        self.label = label
        self._powers: dict[int, list[np.ndarray]] = {}
        for F in self.factors:
            if F.shape[0] != F.shape[1]:
                raise InputError("action matrix must be square")
            if not np.array_equal(_mat_power(F, self.m), identity(F.shape[0])):
                raise InputError(f"action does not satisfy T^{self.m} = 1 on {self.name}")

    @property
    def name(self) -> str:
        return _label_name(self.label)

    def __repr__(self) -> str:
        return f"GModule({self.name}, m={self.m}, rank={self.rank})"

    @cached_property
    def T(self) -> np.ndarray:
        return reduce(np.kron, self.factors) if self.factors else identity(1)

    def apply(self, x, power: int = 1) -> np.ndarray:
        """``t^power`` applied to a vector or to the columns of a matrix."""
        power %= self.m
        fs = self._powers.get(power)
        if fs is None:
            fs = self._powers[power] = [_mat_power(F, power) for F in self.factors]
        return _apply_factors(fs, self.factor_ranks, x)

    def act(self, r: CyclicRingElement, x) -> np.ndarray:
        """The ring element ``r`` applied to ``x``."""
        if r.m != self.m:
            raise InputError(f"ring element over Z_{r.m} acting on a Z_{self.m}-module")
        x = exact(x)
        return lincomb([(c, self.apply(x, k)) for k, c in r.terms()], x.shape)

    def action_matrix(self, r: CyclicRingElement) -> np.ndarray:
        """Dense matrix of ``r``; only sensible for modest ranks."""
        return self.act(r, identity(self.rank))

    def same_structure(self, other: "GModule") -> bool:
        return self.m == other.m and self.factor_ranks == other.factor_ranks and all(
            np.array_equal(a, b) for a, b in zip(self.factors, other.factors)
        )


def _label_name(label) -> str:
    kind = label[0]
    if kind in ("Z", "Z(m)", "I(m)"):
        return {"Z": "Z", "Z(m)": f"Z({label[1]})", "I(m)": f"I({label[1]})"}[kind]
    if kind == "tensor":
        return "(" + " x ".join(_label_name(c) for c in label[1:]) + ")"
    if kind == "sum":
        return "(" + " + ".join(_label_name(c) for c in label[1:]) + ")"
    if kind == "restricted":
        return f"{_label_name(label[1])}|Z_{label[2]}"
    return str(label)


def trivial_module(m: int) -> GModule:
    return GModule(m, [identity(1)], ("Z", m))


def regular_module(m: int) -> GModule:
    _check_modulus(m)
    T = np.zeros((m, m), dtype=np.int64)
    for i in range(m):
        T[(i + 1) % m, i] = 1
    return GModule(m, [T], ("Z(m)", m))


def aug_ideal(m: int) -> GModule:
    """I(m) with basis ``b_i = t^i - 1`` for ``i = 1..m-1``."""
    _check_modulus(m)
    r = m - 1
    T = np.zeros((r, r), dtype=np.int64)
    for i in range(1, m):
        # t b_i = b_{i+1} - b_1, with b_m = 0
        if i + 1 < m:
            T[i, i - 1] += 1
        T[0, i - 1] -= 1
    return GModule(m, [T], ("I(m)", m))


def tensor(A: GModule, B: GModule) -> GModule:
    if A.m != B.m:
        raise InputError(f"modulus mismatch: {A.m} vs {B.m}")
    return GModule(A.m, A.factors + B.factors, ("tensor", A.label, B.label))


def tensor_power(M: GModule, k: int) -> GModule:
    if k < 0:
        raise InputError("tensor power must be nonnegative")
    if k == 0:
        return trivial_module(M.m)
    out = M
    for _ in range(k - 1):
        out = tensor(out, M)
    return out


def tensor_all(mods: Sequence[GModule]) -> GModule:
    if not mods:
        raise InputError("empty tensor product")
    return reduce(tensor, mods)


def direct_sum(A: GModule, B: GModule) -> GModule:
    if A.m != B.m:
        raise InputError(f"modulus mismatch: {A.m} vs {B.m}")
    T = np.zeros((A.rank + B.rank,) * 2, dtype=np.int64)
    T = T.astype(object) if A.T.dtype == object or B.T.dtype == object else T
    T[: A.rank, : A.rank] = A.T
    T[A.rank :, A.rank :] = B.T
    return GModule(A.m, [T], ("sum", A.label, B.label))


def restrict(A: GModule, m: int) -> GModule:
    """``A`` viewed over Z_m through the surjection Z_m -> Z_(A.m)."""
    if m % A.m:
        raise InputError(f"Z_{m} does not surject onto Z_{A.m}")
    return GModule(m, A.factors, ("restricted", A.label, m))


def crt_module(p: int, q: int, A: GModule, B: GModule) -> GModule:
    """``A x B`` over Z_pq, the generator acting by ``T_A x T_B``."""
    if math.gcd(p, q) != 1:
        raise InputError(f"gcd({p}, {q}) != 1")
    if A.m != p or B.m != q:
        raise InputError("module moduli do not match (p, q)")
    return tensor(restrict(A, p * q), restrict(B, p * q))


# --------------------------------------------------------------------------
# homomorphisms


class ModuleHom:
    """An equivariant map, stored densely or as a Kronecker product."""

    def __init__(self, source: GModule, target: GModule, matrix=None, factors=None, check: bool = True):
        if source.m != target.m:
            raise InputError("source and target have different moduli")
        self.source = source
        self.target = target
        if (matrix is None) == (factors is None):
            raise InputError("give exactly one of matrix or factors")
        self._matrix = None if matrix is None else exact(matrix, ndim=2)
        self.factors = None if factors is None else tuple(exact(F, ndim=2) for F in factors)
        if self._matrix is not None and self._matrix.shape != (target.rank, source.rank):
            raise InputError(
                f"matrix shape {self._matrix.shape} does not match {target.rank}x{source.rank}"
            )
        if check and not self.is_equivariant():
            raise InputError("map is not equivariant")

    @property
    def matrix(self) -> np.ndarray:
        if self._matrix is None:
            self._matrix = reduce(np.kron, self.factors)
        return self._matrix

    def is_equivariant(self) -> bool:
        if self.factors is not None and len(self.factors) == len(self.source.factors) == len(
            self.target.factors
        ):
            return all(
                np.array_equal(matmul(F, Ts), matmul(Tt, F))
                for F, Ts, Tt in zip(self.factors, self.source.factors, self.target.factors)
            )
        M = self.matrix
        return np.array_equal(matmul(M, self.source.T), matmul(self.target.T, M))

    def apply(self, x) -> np.ndarray:
        if self.factors is not None:
            in_ranks = [F.shape[1] for F in self.factors]
            return _apply_factors(self.factors, in_ranks, x)
        return matmul(self.matrix, x)

    def compose(self, other: "ModuleHom") -> "ModuleHom":
        """``self o other``."""
        return ModuleHom(other.source, self.target, matrix=matmul(self.matrix, other.matrix))


def identity_hom(M: GModule) -> ModuleHom:
    return ModuleHom(M, M, factors=[identity(r) for r in M.factor_ranks], check=False)


def tensor_hom(f: ModuleHom, g: ModuleHom) -> ModuleHom:
    ff = f.factors if f.factors is not None else (f.matrix,)
    gf = g.factors if g.factors is not None else (g.matrix,)
    src, tgt = tensor(f.source, g.source), tensor(f.target, g.target)
    if len(ff) + len(gf) == len(src.factors) == len(tgt.factors):
        return ModuleHom(src, tgt, factors=list(ff) + list(gf))
    return ModuleHom(src, tgt, matrix=np.kron(f.matrix, g.matrix))


def restrict_hom(f: ModuleHom, m: int) -> ModuleHom:
    src, tgt = restrict(f.source, m), restrict(f.target, m)
    if f.factors is not None:
        return ModuleHom(src, tgt, factors=f.factors)
    return ModuleHom(src, tgt, matrix=f.matrix)


def canonical_unit_iso(M: GModule) -> ModuleHom:
    """``Z x M -> M``."""
    return ModuleHom(tensor(trivial_module(M.m), M), M, matrix=identity(M.rank))


def aug_inclusion(m: int) -> ModuleHom:
    """I(m) -> Z(m), ``b_i -> t^i - 1``."""
    A = np.zeros((m, m - 1), dtype=np.int64)
    for i in range(1, m):
        A[i, i - 1] = 1
        A[0, i - 1] = -1
    return ModuleHom(aug_ideal(m), regular_module(m), matrix=A)


def augmentation_hom(m: int) -> ModuleHom:
    return ModuleHom(regular_module(m), trivial_module(m), matrix=np.ones((1, m), dtype=np.int64))


def aug_coordinates(x) -> np.ndarray:
    """I(m)-coordinates of an augmentation-zero vector of Z(m)."""
    x = exact(x).reshape(-1)
    if int(x.astype(object).sum()) != 0:
        raise InputError("element does not lie in the augmentation ideal")
    return x[1:].copy()


def crt_iso(p: int, q: int) -> ModuleHom:
    """``Z(p) x Z(q) -> Z(pq)`` (over Z_pq), ``t_p^a x t_q^b -> t^x`` with x the CRT lift."""
    src = crt_module(p, q, regular_module(p), regular_module(q))
    P = np.zeros((p * q, p * q), dtype=np.int64)
    for a in range(p):
        for b in range(q):
            P[crt_index(a, b, p, q), a * q + b] = 1
    return ModuleHom(src, regular_module(p * q), matrix=P)


def _gcd_check(p: int, q: int) -> None:
    _check_modulus(p)
    _check_modulus(q)
    if math.gcd(p, q) != 1:
        raise InputError(f"gcd({p}, {q}) != 1")


def phi_source(p: int, q: int) -> GModule:
    """``I(p) x Z(q) + Z(p) x I(q)`` over Z_pq."""
    return direct_sum(
        crt_module(p, q, aug_ideal(p), regular_module(q)),
        crt_module(p, q, regular_module(p), aug_ideal(q)),
    )


def phi_matrix_regular(p: int, q: int) -> np.ndarray:
    """Matrix of the summed inclusions into Z(pq), regular coordinates."""
    left = np.kron(aug_inclusion(p).matrix, identity(q))
    right = np.kron(identity(p), aug_inclusion(q).matrix)
    return matmul(crt_iso(p, q).matrix, np.hstack([left, right]))


def phi_hom(p: int, q: int) -> ModuleHom:
    """The map ``I(p) x Z(q) + Z(p) x I(q) -> Z(pq)`` summing the two inclusions."""
    _gcd_check(p, q)
    M = phi_matrix_regular(p, q)
    hom = ModuleHom(phi_source(p, q), regular_module(p * q), matrix=M)
    if np.any(matmul(np.ones((1, p * q), dtype=np.int64), M)):
        raise AssertionError("phi does not land in the augmentation ideal")
    return hom


def phi_to_aug(p: int, q: int) -> ModuleHom:
    """``phi`` with target I(pq), in the ``t^i - 1`` basis."""
    _gcd_check(p, q)
    M = phi_matrix_regular(p, q)
    return ModuleHom(phi_source(p, q), aug_ideal(p * q), matrix=M[1:])


def phi_summand(p: int, q: int, which: int) -> ModuleHom:
    """Restriction of :func:`phi_to_aug` to summand 0 (``I(p) x Z(q)``) or 1."""
    full = phi_matrix_regular(p, q)[1:]
    r0 = (p - 1) * q
    if which == 0:
        src = crt_module(p, q, aug_ideal(p), regular_module(q))
        return ModuleHom(src, aug_ideal(p * q), matrix=full[:, :r0])
    src = crt_module(p, q, regular_module(p), aug_ideal(q))
    return ModuleHom(src, aug_ideal(p * q), matrix=full[:, r0:])


def shuffle_auto(factors: Sequence[GModule], permutation: Sequence[int]) -> ModuleHom:
    """``x_0 x ... x x_(k-1) -> x_perm[0] x ... x x_perm[k-1]``."""
    k = len(factors)
    perm = [int(i) for i in permutation]
    if sorted(perm) != list(range(k)):
        raise InputError(f"{permutation} is not a permutation of 0..{k - 1}")
    ms = {M.m for M in factors}
    if len(ms) != 1:
        raise InputError("factors must share a modulus")
    src = tensor_all(list(factors))
    tgt = tensor_all([factors[i] for i in perm])
    ranks = [M.rank for M in factors]
    idx = np.arange(src.rank).reshape(ranks)
    # target coordinate j holds source coordinate idx.transpose(perm).flat[j]
    order = np.transpose(idx, perm).reshape(-1)
    P = np.zeros((tgt.rank, src.rank), dtype=np.int64)
    P[np.arange(tgt.rank), order] = 1
    return ModuleHom(src, tgt, matrix=P)


def permute_tensor_vector(x, ranks: Sequence[int], permutation: Sequence[int]) -> np.ndarray:
    """Apply the shuffle of :func:`shuffle_auto` to a vector without building P."""
    x = exact(x).reshape(ranks)
    return np.ascontiguousarray(np.transpose(x, list(permutation))).reshape(-1)


# --------------------------------------------------------------------------
# invariants, coinvariants, short exact sequences


def invariants(M: GModule) -> AbelianPresentation:
    A = exact(M.T.astype(object) - identity(M.rank).astype(object))
    return subquotient(np.zeros((M.rank, 0), dtype=np.int64), A)


def coinvariants(M: GModule) -> AbelianPresentation:
    A = exact(M.T.astype(object) - identity(M.rank).astype(object))
    return subquotient(A, np.zeros((0, M.rank), dtype=np.int64))


@dataclass
class SESModules:
    """``0 -> A --i--> B --j--> C -> 0``."""

    incl: ModuleHom
    proj: ModuleHom

    def exactness(self) -> dict[str, bool]:
        i, j = self.incl.matrix, self.proj.matrix
        injective = kernel_basis(i).shape[1] == 0
        # cokernel of j is trivial
        surjective = invariant_factors(j) == () if j.size else j.shape[0] == 0
        composite = not np.any(matmul(j, i)) if i.size and j.size else True
        K = kernel_basis(j) if j.shape[0] else identity(j.shape[1])
        if K.shape[1] == 0:
            middle = composite
        else:
            middle = composite and LatticeSolver(i).solve_many(K) is not None
        return {"injective": injective, "middle": middle, "surjective": surjective}

    def is_exact(self) -> bool:
        return all(self.exactness().values())


def ses_iq(m: int) -> SESModules:
    """``0 -> I(m) -> Z(m) -> Z -> 0``."""
    _check_modulus(m)
    return SESModules(aug_inclusion(m), augmentation_hom(m))


def ses_bottom_row(p: int, q: int) -> SESModules:
    """``0 -> I(p)xZ(q) + Z(p)xI(q) -> Z(pq) + Z(pq) -> Z(q) + Z(p) -> 0``."""
    _gcd_check(p, q)
    n = p * q
    C = crt_iso(p, q).matrix
    left = np.kron(aug_inclusion(p).matrix, identity(q))
    right = np.kron(identity(p), aug_inclusion(q).matrix)
    r0, r1 = left.shape[1], right.shape[1]
    i = np.zeros((2 * n, r0 + r1), dtype=np.int64)
    i[:n, :r0] = matmul(C, left)
    i[n:, r0:] = matmul(C, right)
    mid = direct_sum(regular_module(n), regular_module(n))
    incl = ModuleHom(phi_source(p, q), mid, matrix=i)
    # alpha: eps_p x 1 on the first copy, 1 x eps_q on the second
    a = np.zeros((q + p, 2 * n), dtype=np.int64)
    for x in range(n):
        a[x % q, x] = 1
        a[q + x % p, n + x] = 1
    tgt = direct_sum(restrict(regular_module(q), n), restrict(regular_module(p), n))
    proj = ModuleHom(mid, tgt, matrix=a)
    return SESModules(incl, proj)
