"""Number theory of lens spaces and the LS-category bounds table."""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field

import numpy as np

from .exactla import InputError, exact, identity, lincomb, matmul, nullspace_mod_p, smith, to_ints


def bezout(p: int, q: int) -> tuple[int, int]:
    """``(k, l)`` with ``k p + l q = 1``, ``|k|`` minimal and ties broken by ``k > 0``."""
    p, q = int(p), int(q)
    if p < 1 or q < 1:
        raise InputError("p and q must be positive")
    if math.gcd(p, q) != 1:
        raise InputError(f"gcd({p}, {q}) != 1")
    if q == 1:
        return 0, 1
    k0 = pow(p, -1, q)
    best = min((k0, k0 - q), key=lambda k: (abs(k), k < 0))
    l = (1 - best * p) // q
    assert best * p + l * q == 1
    return best, l


@dataclass(frozen=True)
class LensSpec:
    """``L^n_p(l_1, ..., l_k)`` with ``n = 2k - 1``."""

    p: int
    ell: tuple[int, ...]

    def __post_init__(self):
        if self.p < 2:
            raise InputError("p must be at least 2")
        if not self.ell:
            raise InputError("need at least one rotation parameter")
        for x in self.ell:
            if math.gcd(x, self.p) != 1:
                raise InputError(f"rotation parameter {x} is not prime to {self.p}")
        object.__setattr__(self, "ell", tuple(int(x) % self.p for x in self.ell))

    @property
    def k(self) -> int:
        return len(self.ell)

    @property
    def n(self) -> int:
        return 2 * self.k - 1

    @classmethod
    def parse(cls, text: str) -> "LensSpec":
        m = re.fullmatch(r"\s*L\s*\(\s*(\d+)\s*;\s*([-\d\s,]+)\)\s*", text)
        if not m:
            raise InputError(f"cannot parse lens space {text!r}; expected 'L(p; l1,...,lk)'")
        ell = tuple(int(x) for x in m.group(2).split(",") if x.strip())
        return cls(int(m.group(1)), ell)

    def __str__(self) -> str:
        return f"L({self.p}; {','.join(map(str, self.ell))})"


def olum_equivalent(a: LensSpec, b: LensSpec) -> tuple[int, int] | None:
    """A pair ``(x, sign)`` with ``prod l_i = sign * x^k * prod l'_i (mod p)``, or None.

    A solution exists exactly when the two lens spaces are homotopy equivalent.
    """
    if a.p != b.p or a.k != b.k:
        raise InputError("lens spaces must share p and dimension")
    p, k = a.p, a.k
    pa = math.prod(a.ell) % p
    pb = math.prod(b.ell) % p
    for x in range(1, p):
        if math.gcd(x, p) != 1:
            continue
        for sign in (1, -1):
            if (pa - sign * pow(x, k, p) * pb) % p == 0:
                return x, sign
    return None


def emss_report(spec: LensSpec) -> dict:
    """Residues ``l_1^(2j) + ... + l_k^(2j) mod p`` for ``j = 1..[(k-1)/2]``."""
    p, k = spec.p, spec.k
    residues = {j: sum(pow(x, 2 * j, p) for x in spec.ell) % p for j in range(1, (k - 1) // 2 + 1)}
    return {"p_at_least_k": p >= k, "residues": residues,
            "parallelizable": p >= k and all(r == 0 for r in residues.values())}


def emss_parallelizable(spec: LensSpec) -> bool:
    return emss_report(spec)["parallelizable"]


# --------------------------------------------------------------------------
# cup-length lower bounds

DEFAULT_MENU = ("Z", "I")


@dataclass
class CupCandidate:
    """A product of pulled-back classes ``label`` of the given length."""

    label: str
    length: int
    factors: list
    module_rank: int


def invariant_functional(F) -> tuple[np.ndarray, int]:
    """A row ``psi`` with ``psi (F - 1) = 0 (mod d)`` spanning the coinvariant functionals.

    ``d = 0`` means the identity holds exactly.  The row generates the
    largest cyclic summand of the coinvariants (a free summand if present).
    """
    F = exact(F, ndim=2)
    A = exact(F.astype(object) - identity(F.shape[0]).astype(object))
    if not np.any(A):
        psi = np.zeros(F.shape[0], dtype=np.int64)
        psi[0] = 1
        return psi, 0
    snf = smith(A)
    diag = snf.diagonal + [0] * (F.shape[0] - len(snf.diagonal))
    best = None
    for i, d in enumerate(diag):
        if d == 1:
            continue
        key = (d == 0, d)
        if best is None or key > best[0]:
            best = (key, i, d)
    if best is None:
        raise InputError("coinvariants are trivial")
    _, i, d = best
    return exact(snf.U_inv[i]), d


def _combined_modulus(ds) -> int:
    nz = [d for d in ds if d]
    return math.gcd(*nz) if nz else 0


def tensor_functional_value(psis, ranks, x) -> int:
    """``(psi_1 x ... x psi_k)(x)`` by contracting one tensor axis at a time."""
    y = exact(x).astype(object).reshape(ranks)
    for psi in psis:
        y = np.tensordot(exact(psi).astype(object), y, axes=(0, 0))
    return int(y)


@dataclass
class InvariantFunctional:
    """``Psi: M -> Z/d`` with ``Psi(t x) = Psi(x)``; a tensor of rows or one dense row."""

    modulus: int
    factors: list | None = None
    row: np.ndarray | None = None

    def value(self, M, x) -> int:
        if self.factors is not None:
            return tensor_functional_value(self.factors, M.factor_ranks, x)
        return int(matmul(exact(self.row).reshape(1, -1), exact(x).reshape(-1, 1))[0, 0])

    def _ok(self, v: int) -> bool:
        d = self.modulus
        return v % d == 0 if d else v == 0

    def is_invariant(self, M) -> bool:
        if self.factors is not None:
            for F, psi in zip(M.factors, self.factors):
                A = exact(F.astype(object) - identity(F.shape[0]).astype(object))
                if not all(self._ok(v) for v in to_ints(matmul(exact(psi).reshape(1, -1), A))):
                    return False
            return True
        from .groupring import _apply_factors

        # psi T computed as T^T psi with transposed factors
        tT = _apply_factors([exact(F).T.copy() for F in M.factors], M.factor_ranks, exact(self.row))
        diff = exact(tT.astype(object) - exact(self.row).astype(object))
        return all(self._ok(v) for v in to_ints(diff))

    def to_witness(self) -> dict:
        if self.factors is not None:
            return {"kind": "tensor", "modulus": self.modulus, "factors": list(self.factors)}
        return {"kind": "dense", "modulus": self.modulus, "row": self.row}

    @classmethod
    def from_witness(cls, w: dict) -> "InvariantFunctional":
        d = int(w["modulus"])
        if w["kind"] == "tensor":
            return cls(d, factors=[exact([int(v) for v in f]) for f in w["factors"]])
        return cls(d, row=exact(np.array([int(v) for v in w["row"]], dtype=object)))


DENSE_FUNCTIONAL_LIMIT = 1500


def detecting_functional(M, x, primes) -> InvariantFunctional | None:
    """An invariant functional that is nonzero on ``x``, or None if none was found."""
    psis, ds = zip(*(invariant_functional(F) for F in M.factors))
    f = InvariantFunctional(_combined_modulus(ds), factors=list(psis))
    v = f.value(M, x)
    if f.is_invariant(M) and not f._ok(v):
        return f
    if M.rank > DENSE_FUNCTIONAL_LIMIT:
        return None
    B = exact(M.T.astype(object) - identity(M.rank).astype(object))
    for p in primes:
        K = nullspace_mod_p(B.T, p)
        for j in range(K.shape[1]):
            g = InvariantFunctional(p, row=K[:, j].copy())
            if not g._ok(g.value(M, x)):
                return g
    return None


def functional_checks(c, f: InvariantFunctional, weights) -> tuple[list, int]:
    """Identities certifying ``c`` is not a coboundary, via ``sum_b w_b Psi(c(e_b))``."""
    C, M, n = c.complex, c.module, c.degree
    d = f.modulus
    out = [("functional is invariant under t", f.is_invariant(M))]
    kills = True
    if n >= 1:
        for a in range(C.ranks[n - 1]):
            s = sum(int(weights[b]) * int(C.diff[n][a, b].astype(object).sum()) for b in range(C.ranks[n]))
            kills &= f._ok(s)
    out.append(("weighted functional vanishes on coboundaries", kills))
    val = sum(int(w) * f.value(M, c.value(b)) for b, w in enumerate(weights))
    out.append(("functional is nonzero on the product", not f._ok(val)))
    return out, val


def _prime_factors(m: int) -> list[int]:
    out, d = [], 2
    while d * d <= m:
        while m % d == 0:
            if d not in out:
                out.append(d)
            m //= d
        d += 1
    if m > 1 and m not in out:
        out.append(m)
    return out


def _lens_setup(n, p, q, cache_dir):
    from .complexes import cached_diagonal, lens_complex, product_diagonal, tensor_complex

    Dp = cached_diagonal(p, n + 1, cache_dir)
    Lp = lens_complex(p, n)
    if q is None:
        return Lp, None, Lp, Dp.restrict(Lp)
    Dq = cached_diagonal(q, n + 1, cache_dir)
    Lq = lens_complex(q, n)
    L = tensor_complex(Lp, Lq)
    return Lp, Lq, L, product_diagonal(Dp.restrict(Lp), Dq.restrict(Lq), base=L)


def _candidates(n, p, q, menu, Lp, Lq, L):
    from .berstein import cayley_representative
    from .cohomology import Cochain, cross, unit_cochain
    from .groupring import trivial_module

    def top_class(C):
        return Cochain(C, n, trivial_module(C.m), np.ones(1, dtype=np.int64))

    out = []
    if q is None:
        if "I" in menu:
            b = cayley_representative(Lp)
            for j in range(n, 0, -1):
                out.append(CupCandidate(f"beta_{p}^{j}", j, [b] * j, (p - 1) ** j))
        if "Z" in menu and n % 2 == 1:
            out.append(CupCandidate(f"z_{p}", 1, [top_class(Lp)], 1))
        return sorted(out, key=lambda c: -c.length)
    bp = cross(cayley_representative(Lp), unit_cochain(Lq), L)
    bq = cross(unit_cochain(Lp), cayley_representative(Lq), L)
    if "Z" in menu and "I" in menu and n % 2 == 1:
        zp = cross(top_class(Lp), unit_cochain(Lq), L)
        zq = cross(unit_cochain(Lp), top_class(Lq), L)
        out.append(CupCandidate(f"z_{p} x beta_{q}^{n}", n + 1, [zp] + [bq] * n, (q - 1) ** n))
        out.append(CupCandidate(f"beta_{p}^{n} x z_{q}", n + 1, [bp] * n + [zq], (p - 1) ** n))
    if "I" in menu:
        for j in range(n, 0, -1):
            out.append(CupCandidate(f"beta_{p}^{j} x 1", j, [bp] * j, (p - 1) ** j))
            out.append(CupCandidate(f"1 x beta_{q}^{j}", j, [bq] * j, (q - 1) ** j))
    if "Z" in menu and n % 2 == 1:
        out.append(CupCandidate(f"z_{p} x 1", 1, [cross(top_class(Lp), unit_cochain(Lq), L)], 1))
    return sorted(out, key=lambda c: (-c.length, c.module_rank))


def cup_length_lower(n: int, p: int, q: int | None = None, menu=DEFAULT_MENU, budget: int = 5000,
                     cache_dir: str | None = None, convention: str = "plain"):
    """Largest certified nonzero product of positive-degree classes found, with its certificate.

    Products are tried longest first; a candidate whose coefficient module is
    larger than ``budget`` is skipped and the result is flagged incomplete.
    """
    from . import certificates as cert
    from .berstein import left_product
    from .cohomology import cochain_differential, is_cocycle
    from .exactla import check_obstruction, cokernel_obstruction

    params = {"n": n, "p": p, "q": q if q is not None else "none", "menu": list(menu),
              "budget": budget, "convention": convention}
    if q is not None and math.gcd(p, q) != 1:
        raise InputError(f"gcd({p}, {q}) != 1")
    if budget <= 0 or not menu:
        c = cert.Certificate("cup-length", dict(params, lower=0), cert.INCOMPLETE)
        c.notes.append("empty search: nothing certified")
        return 0, c
    Lp, Lq, L, Delta = _lens_setup(n, p, q, cache_dir)
    skipped = []
    for cand in _candidates(n, p, q, menu, Lp, Lq, L):
        if cand.module_rank > budget:
            skipped.append(cand.label)
            continue
        prod = left_product(cand.factors, Delta, convention)
        if prod.is_zero():
            continue
        weights = _top_weights(L, prod.degree)
        if weights is not None:
            primes = _prime_factors(L.m)
            x = lincomb([(w, prod.value(b)) for b, w in enumerate(weights)], (prod.module.rank,))
            f = detecting_functional(prod.module, x, primes)
            if f is None:
                continue
            checks, val = functional_checks(prod, f, weights)
            detail = {"functional": f.to_witness(), "weights": weights, "value": val}
        else:
            # several cells in this degree: a cokernel functional of the previous differential
            if L.ranks[prod.degree - 1] * cand.module_rank > budget:
                skipped.append(cand.label)
                continue
            obs = cokernel_obstruction(cochain_differential(L, prod.module, prod.degree - 1), prod.values)
            if obs is None:
                continue
            phi, d = obs
            checks = [("cokernel functional kills coboundaries and not the product",
                       check_obstruction(cochain_differential(L, prod.module, prod.degree - 1),
                                         prod.values, phi, d))]
            detail = {"functional": {"kind": "cokernel", "modulus": d, "row": phi}}
        checks.insert(0, ("product is a cocycle", is_cocycle(prod)))
        if not all(ok for _, ok in checks):
            continue
        c = cert.Certificate("cup-length", dict(params, lower=cand.length, product=cand.label),
                             cert.VERIFIED)
        for desc, ok in checks:
            c.check(desc, ok)
        c.witness = dict({"degree": prod.degree, "product": prod.values,
                          "factor_degrees": [f.degree for f in cand.factors]}, **detail)
        if skipped:
            c.notes.append("skipped over budget: " + ", ".join(skipped))
        return cand.length, c
    c = cert.Certificate("cup-length", dict(params, lower=0), cert.INCOMPLETE)
    if skipped:
        c.notes.append("skipped over budget: " + ", ".join(skipped))
    return 0, c


def _top_weights(C, n):
    # a single cell in degree n: weight 1 on it
    if C.ranks[n] == 1:
        return [1]
    return None


# --------------------------------------------------------------------------
# fundamental classes and the bounds table


@dataclass
class PushforwardReport:
    """Image of the fundamental cycle in ``H_d(pi; Z)``."""

    degree: int
    group: object
    image: np.ndarray
    coordinates: tuple

    @property
    def is_zero(self) -> bool:
        return not any(self.coordinates)

    @property
    def generates(self) -> bool:
        inv = self.group.invariant_factors
        if len(inv) != 1:
            return False
        d = inv[0]
        c = self.coordinates[0]
        return (c in (1, -1)) if d == 0 else math.gcd(c, d) == 1


def fundamental_pushforward(n: int, p: int, q: int | None = None) -> PushforwardReport:
    """``u_*`` of the top cell of L^n_p (or of L^n_p x L^n_q) in group homology."""
    from .cohomology import homology_group, homology_pushforward
    from .complexes import classifying_chain_map, periodic_resolution, tensor_chain_map, tensor_complex, lens_complex
    from .groupring import trivial_module

    if n < 1 or n % 2 == 0:
        raise InputError(f"lens spaces have odd dimension, got n = {n}")
    if q is None:
        W = periodic_resolution(p, n + 1, homotopy=None)
        f = classifying_chain_map(p, n, n + 1, target=W)
        d = n
    else:
        if math.gcd(p, q) != 1:
            raise InputError(f"gcd({p}, {q}) != 1")
        d = 2 * n
        Wp = periodic_resolution(p, d + 1, homotopy=None)
        Wq = periodic_resolution(q, d + 1, homotopy=None)
        W = tensor_complex(Wp, Wq, top=d + 1)
        fp = classifying_chain_map(p, n, d + 1, target=Wp)
        fq = classifying_chain_map(q, n, d + 1, target=Wq)
        f = tensor_chain_map(fp, fq, tensor_complex(lens_complex(p, n), lens_complex(q, n)), W)
    Z = trivial_module(W.m)
    z = np.ones(f.source.ranks[d], dtype=np.int64)
    G = homology_group(W, Z, d)
    img = homology_pushforward(f, z, Z, d)
    return PushforwardReport(d, G, img, G.class_coordinates(img))


@dataclass
class UpperBound:
    value: int
    reason: str
    applies: bool
    computed: bool


@dataclass
class BoundsReport:
    n: int
    p: int
    q: int
    lower: int
    lower_certificate: object
    uppers: list = field(default_factory=list)
    pushforward: PushforwardReport | None = None

    @property
    def best_upper(self) -> UpperBound:
        return min((u for u in self.uppers if u.applies), key=lambda u: (u.value, not u.computed))

    @property
    def conclusion(self) -> int | None:
        return self.lower if self.lower == self.best_upper.value else None

    def table(self) -> str:
        rows = [f"cat(L^{self.n}_{self.p} x L^{self.n}_{self.q})",
                f"  lower  {self.lower}  computed cup-length ({self.lower_certificate.parameters.get('product', '-')})"]
        for u in self.uppers:
            flag = "computed" if u.computed else "cited"
            mark = "applies" if u.applies else "n/a"
            rows.append(f"  upper  {u.value}  {u.reason} [{flag}, {mark}]")
        c = self.conclusion
        best = self.best_upper
        if c is not None:
            rows.append(f"  conclusion: cat = {c} (upper bound {'computed' if best.computed else 'cited'})")
        else:
            rows.append(f"  conclusion: {self.lower} <= cat <= {best.value}")
        return "\n".join(rows)


def _is_prime(x: int) -> bool:
    return x >= 2 and all(x % d for d in range(2, math.isqrt(x) + 1))


class InconsistentBounds(AssertionError):
    """A computed lower bound exceeds an applicable upper bound."""


def bounds_report(n: int, p: int, q: int, budget: int = 5000, cache_dir: str | None = None) -> BoundsReport:
    if math.gcd(p, q) != 1:
        raise InputError(f"gcd({p}, {q}) != 1")
    if n < 3 or n % 2 == 0 or p < 2 or q < 2:
        # for n = 1 the fundamental group is Z, not Z_p
        raise InputError("need odd n >= 3 and p, q >= 2")
    lower, c = cup_length_lower(n, p, q, budget=budget, cache_dir=cache_dir)
    push = fundamental_pushforward(n, p, q)
    k = (n + 1) // 2
    uppers = [
        UpperBound(2 * n, "dimension", True, True),
        UpperBound(2 * n - 1, "inessential product: fundamental class dies in H_2n(Z_pq; Z)",
                   push.is_zero, True),
        UpperBound(2 * n - 2, "cited: p and q odd", p % 2 == 1 and q % 2 == 1 and n % 2 == 1, False),
        UpperBound(n + 1, f"cited: p, q prime and at least k = {k}",
                   n % 2 == 1 and _is_prime(p) and _is_prime(q) and min(p, q) >= k, False),
    ]
    rep = BoundsReport(n, p, q, lower, c, uppers, push)
    if lower > rep.best_upper.value:
        raise InconsistentBounds(f"lower bound {lower} exceeds upper bound {rep.best_upper.value}")
    return rep


def bounds_certificate(rep: BoundsReport):
    from . import certificates as cert

    c = cert.Certificate("bounds", {"n": rep.n, "p": rep.p, "q": rep.q}, cert.INCOMPLETE)
    c.check("cup-length certificate verified", rep.lower_certificate.status == cert.VERIFIED)
    c.check("lower bound does not exceed any applicable upper bound",
            all(rep.lower <= u.value for u in rep.uppers if u.applies))
    c.witness = {
        "lower": rep.lower,
        "lower_certificate": rep.lower_certificate.to_dict(),
        "pushforward_image": rep.pushforward.image,
        "pushforward_group": list(rep.pushforward.group.invariant_factors),
        "uppers": [{"value": u.value, "reason": u.reason, "applies": u.applies, "computed": u.computed}
                   for u in rep.uppers],
        "conclusion": rep.conclusion if rep.conclusion is not None else "open",
    }
    c.status = cert.VERIFIED if c.all_passed else cert.INCOMPLETE
    return c


# --------------------------------------------------------------------------
# certificates for the arithmetic statements


def essential_certificate(n: int, p: int, q: int | None = None):
    from . import certificates as cert

    push = fundamental_pushforward(n, p, q)
    params = {"n": n, "p": p, "q": q if q is not None else "none"}
    c = cert.Certificate("essential", params, cert.VERIFIED)
    if q is None:
        c.check("u_*[L] generates H_n(Z_p; Z)", push.generates)
    else:
        c.check("H_2n(Z_pq; Z) is the zero group", not push.group.invariant_factors)
    c.witness = {"image": push.image, "group": list(push.group.invariant_factors),
                 "coordinates": list(push.coordinates)}
    c.status = cert.VERIFIED if c.all_passed else cert.REFUTED
    return c


def bezout_certificate(p: int, q: int):
    from . import certificates as cert

    k, l = bezout(p, q)
    c = cert.Certificate("bezout", {"p": p, "q": q}, cert.VERIFIED)
    c.witness = {"k": k, "l": l}
    c.check("k p + l q = 1", k * p + l * q == 1)
    return c


def olum_certificate(a: LensSpec, b: LensSpec):
    from . import certificates as cert

    w = olum_equivalent(a, b)
    c = cert.Certificate("olum", {"a": str(a), "b": str(b)}, cert.VERIFIED)
    if w is None:
        c.witness = {"equivalent": False}
        c.check("no a0 in Z_p solves the congruence", True)
    else:
        x, sign = w
        c.witness = {"equivalent": True, "a0": x, "sign": sign}
        c.check("prod l = sign a0^k prod l' (mod p)",
                (math.prod(a.ell) - sign * x ** a.k * math.prod(b.ell)) % a.p == 0)
    return c


def emss_certificate(spec: LensSpec):
    from . import certificates as cert

    rep = emss_report(spec)
    c = cert.Certificate("emss", {"spec": str(spec)}, cert.VERIFIED)
    c.witness = {"p_at_least_k": rep["p_at_least_k"], "residues": rep["residues"],
                 "parallelizable": rep["parallelizable"]}
    c.check("criterion evaluated", True)
    return c
