"""The Berstein-Schwarz class and the vanishing of its top power on lens products.

``beta_m`` lives in H^1(Z_m; I(m)).  On the periodic resolution it is
represented by the cocycle sending the degree-1 generator to ``t - 1``; the
same class arises as the connecting image of ``1`` for
``0 -> I(m) -> Z(m) -> Z -> 0``.

For coprime ``p, q`` the class of Z_pq factors through
``phi: I(p) x Z(q) + Z(p) x I(q) -> I(pq)`` as the image of the pair
``(beta_p x l t_q, k t_p x beta_q)`` with ``k p + l q = 1``
(:func:`decompose`).  :func:`vanish_structured` turns that factorization into
an explicit coboundary witness for ``u*(beta_pq^(n+1))`` on
``L^n_p x L^n_q``; :func:`vanish_bruteforce` solves the same equation
directly and serves as the independent oracle.
"""
from __future__ import annotations

import hashlib
import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from . import certificates as cert
from .cohomology import (
    KOSZUL,
    PLAIN,
    SIGN_CONVENTIONS,
    CohClass,
    Cochain,
    coboundary,
    cochain_differential,
    cohomology_group,
    connecting,
    cross,
    cup,
    cup_power,
    is_coboundary,
    is_cocycle,
    pullback,
    pushforward,
    unit_cochain,
    zero_cochain,
)
from .complexes import (
    Diagonal,
    FreeComplex,
    PreconditionError,
    cached_diagonal,
    classifying_chain_map,
    lens_complex,
    periodic_resolution,
    product_diagonal,
    tensor_chain_map,
    tensor_complex,
)
from .exactla import (
    InputError,
    LatticeSolver,
    cokernel_obstruction,
    element_order,
    exact,
    is_divisible,
    lincomb,
    to_ints,
)
from .groupring import (
    CyclicRingElement,
    GModule,
    ModuleHom,
    aug_coordinates,
    aug_ideal,
    crt_index,
    crt_module,
    permute_tensor_vector,
    phi_source,
    phi_summand,
    phi_to_aug,
    regular_module,
    ses_bottom_row,
    ses_iq,
    tensor_power,
)
from .lensarith import bezout

DEFAULT_BUDGET = 5000


class BudgetExceeded(RuntimeError):
    """A brute-force instance is larger than the configured column budget."""

    def __init__(self, needed: int, budget: int, report: str):
        super().__init__(f"needs {needed} columns, budget is {budget}: {report}")
        self.needed = needed
        self.budget = budget
        self.report = report


# --------------------------------------------------------------------------
# the class itself


def cayley_representative(C: FreeComplex) -> Cochain:
    """Each degree-1 generator ``e`` goes to ``d e`` read in I(m).

    On a complex with a single degree-0 cell this is the cocycle taking an
    edge ``[a, b]`` to ``b - a``.
    """
    if C.ranks[0] != 1:
        raise InputError("Cayley representative needs a single degree-0 generator")
    if C.top < 1:
        raise InputError("complex has no degree-1 cells")
    vals = [aug_coordinates(C.diff[1][0, g]) for g in range(C.ranks[1])]
    return Cochain(C, 1, aug_ideal(C.m), np.concatenate(vals))


def bs_cayley(m: int, top: int = 2, W: FreeComplex | None = None) -> CohClass:
    W = periodic_resolution(m, top, homotopy=None) if W is None else W
    return CohClass(cayley_representative(W))


def bs_delta(m: int, top: int = 2, W: FreeComplex | None = None) -> CohClass:
    W = periodic_resolution(m, top, homotopy=None) if W is None else W
    return CohClass(connecting(ses_iq(m), unit_cochain(W)))


def bs_equal(m: int, top: int = 2) -> cert.Certificate:
    """Machine check that the two definitions give one class."""
    W = periodic_resolution(m, top, homotopy=None)
    a, b = bs_cayley(m, W=W), bs_delta(m, W=W)
    c = cert.Certificate("bs-equal", {"m": m, "top": top}, cert.INCOMPLETE)
    w = is_coboundary(a.representative - b.representative)
    c.check("connecting image is a cocycle", is_cocycle(b.representative))
    if w is None:
        c.status = cert.REFUTED
        c.check("Cayley - connecting is a coboundary", False)
        return c
    c.check("delta(w) = Cayley - connecting", coboundary(w).equals(a.representative - b.representative))
    c.witness = {"cayley": a.representative.values, "delta": b.representative.values, "w": w.values}
    c.status = cert.VERIFIED if c.all_passed else cert.REFUTED
    return c


def bs_order(m: int) -> int:
    """Order of ``beta_m`` in H^1(Z_m; I(m))."""
    b = bs_cayley(m, 2)
    return int(b.order())


def order_certificate(m: int, qs=None) -> cert.Certificate:
    """Order of ``beta_m`` plus q-divisibility witnesses for coprime q <= 10."""
    qs = [q for q in range(2, 11) if math.gcd(q, m) == 1] if qs is None else list(qs)
    b = bs_cayley(m, 2)
    G = b.group
    x = G.ambient(b.representative.values)
    order = element_order(G, x)
    c = cert.Certificate("order-p", {"m": m, "q": qs}, cert.INCOMPLETE)
    W = b.representative.complex
    M = b.module
    # m beta = delta(m - N) with m - N read in I(m)
    w0 = np.full(m, -1, dtype=np.int64)
    w0[0] += m
    w = Cochain(W, 0, M, aug_coordinates(w0))
    c.check("m * beta = delta(m - N)", coboundary(w).equals(b.representative.scale(m)))
    lower = all(is_coboundary(b.representative.scale(d)) is None for d in range(1, m) if m % d == 0)
    c.check("d * beta is not a coboundary for proper divisors d of m", lower)
    # a functional phi with phi(delta) = 0 mod m and phi(beta) a unit mod m bounds the order below
    obs = cokernel_obstruction(cochain_differential(W, M, 0), b.representative.values)
    phi, d = obs if obs is not None else (np.zeros(M.rank, dtype=np.int64), 1)
    val = int(exact(phi).astype(object) @ exact(b.representative.values).astype(object))
    c.check("functional: phi(delta) = 0 mod m and phi(beta) is a unit mod m", d == m and math.gcd(val, m) == 1)
    c.check("SNF order equals m", order == m)
    div = {}
    for q in qs:
        y = is_divisible(G, x, q)
        if y is None:
            c.check(f"beta is {q}-divisible", False)
            continue
        eta = Cochain(W, 1, M, matmul_basis(G, y))
        res = b.representative - eta.scale(q)
        v = is_coboundary(res)
        ok = v is not None and coboundary(v).equals(res)
        c.check(f"beta = {q} eta + delta v", ok)
        if ok:
            div[str(q)] = {"eta": eta.values, "v": v.values}
    c.witness = {"beta": b.representative.values, "m_minus_norm": w.values, "divisibility": div,
                 "functional": phi, "modulus": d}
    c.parameters["order"] = order
    c.status = cert.VERIFIED if c.all_passed else cert.REFUTED
    return c


def matmul_basis(G, y) -> np.ndarray:
    from .exactla import matmul

    if G.cycle_basis is None:
        return exact(y)
    return matmul(G.cycle_basis, exact(y))


def bs_power(m: int, k: int, top: int | None = None, Delta: Diagonal | None = None,
             convention: str = KOSZUL) -> CohClass:
    """``beta_m^k`` (left-associated) on W(m) truncated at ``top >= k + 1``."""
    if k < 1:
        raise InputError("power must be at least 1")
    top = k + 1 if top is None else top
    if top < k:
        raise PreconditionError(f"top {top} < k {k}")
    if Delta is None:
        Delta = cached_diagonal(m, top)
    if Delta.verified_to < k:
        raise PreconditionError(f"diagonal verified only to degree {Delta.verified_to}")
    W = Delta.base
    b = cayley_representative(W)
    return CohClass(cup_power(b, k, Delta, convention))


def power_certificate(m: int, k: int, Delta: Diagonal | None = None,
                      convention: str = KOSZUL) -> cert.Certificate:
    """Nonvanishing of ``beta_m^k`` by an explicit cokernel functional."""
    cls = bs_power(m, k, Delta=Delta, convention=convention)
    c = cls.representative
    W = c.complex
    dprev = cochain_differential(W, c.module, k - 1)
    c_ = cert.Certificate("bs-power", {"m": m, "k": k, "convention": convention}, cert.INCOMPLETE)
    c_.check("beta^k is a cocycle", is_cocycle(c))
    witness = is_coboundary(c, LatticeSolver(dprev))
    c_.check("no x with delta x = beta^k", witness is None)
    obs = cokernel_obstruction(dprev, c.values)
    if obs is not None:
        phi, d = obs
        c_.witness = {"cocycle": c.values, "functional": phi, "modulus": d}
        c_.check("functional kills coboundaries and not beta^k", True)
    else:
        c_.check("functional kills coboundaries and not beta^k", False)
    c_.status = cert.VERIFIED if c_.all_passed else cert.REFUTED
    return c_


# --------------------------------------------------------------------------
# decomposition over Z_pq


@dataclass
class BSDecomposition:
    p: int
    q: int
    k: int
    l: int
    complex: FreeComplex
    theta: Cochain
    theta_bar: Cochain
    pair_class: CohClass
    phi_witness: Cochain
    verified: bool
    checks: list = field(default_factory=list)

    @property
    def epsilon(self) -> int:
        """``(eps_p + eps_q)`` of ``theta`` on the generator."""
        return int(self.theta.values.astype(object).sum())


def _norm_vec(m: int, c: int) -> np.ndarray:
    return np.full(m, c, dtype=np.int64)


def pair_closed_form(T: FreeComplex, p: int, q: int, k: int, l: int) -> Cochain:
    """``beta_p x l t_q`` on p-edges and ``k t_p x beta_q`` on q-edges."""
    S = phi_source(p, q)
    r0 = (p - 1) * q
    vals = []
    for (i, _, j, _) in T.gens[1]:
        v = np.zeros(S.rank, dtype=np.int64)
        if i == 1:
            bp = np.zeros(p - 1, dtype=np.int64)
            bp[0] = 1
            v[:r0] = np.kron(bp, _norm_vec(q, l))
        else:
            bq = np.zeros(q - 1, dtype=np.int64)
            bq[0] = 1
            v[r0:] = np.kron(_norm_vec(p, k), bq)
        vals.append(v)
    return Cochain(T, 1, S, np.concatenate(vals))


def decompose(p: int, q: int) -> BSDecomposition:
    if math.gcd(p, q) != 1:
        raise InputError(f"gcd({p}, {q}) != 1")
    if p < 2 or q < 2:
        raise InputError("need p, q >= 2")
    k, l = bezout(p, q)
    T = tensor_complex(periodic_resolution(p, 2, None), periodic_resolution(q, 2, None), top=2)
    n = p * q
    S = ses_bottom_row(p, q)
    checks = []
    # theta(a x b) = (l t_q, k t_p) in Z(q) + Z(p)
    th = np.concatenate([_norm_vec(q, l), _norm_vec(p, k)])
    theta = Cochain(T, 0, S.proj.target, th)
    checks.append(("theta is a cocycle", is_cocycle(theta)))
    eps = int(th.astype(object).sum())
    checks.append(("(eps_p + eps_q) theta = k p + l q = 1", eps == 1 == k * p + l * q))
    # theta_bar(a x b) = (a x l t_q, k t_p x b), the CRT image in Z(pq) + Z(pq)
    tb = np.zeros(2 * n, dtype=np.int64)
    for y in range(q):
        tb[crt_index(0, y, p, q)] += l
    for x in range(p):
        tb[n + crt_index(x, 0, p, q)] += k
    theta_bar = Cochain(T, 0, S.proj.source, tb)
    checks.append(("theta_bar lifts theta", np.array_equal(S.proj.apply(tb), th)))
    dtb = coboundary(theta_bar)
    incl = LatticeSolver(S.incl.matrix)
    vals = []
    for g in range(dtb.ngens):
        y = incl.solve(dtb.value(g))
        if y is None:
            raise AssertionError("delta(theta_bar) leaves the submodule")
        vals.append(y)
    pair = Cochain(T, 1, S.incl.source, np.concatenate(vals))
    closed = pair_closed_form(T, p, q, k, l)
    checks.append(("delta(theta_bar) equals the closed form on every degree-1 generator", pair.equals(closed)))
    zig = connecting(S, theta)
    checks.append(("zig-zag through any lift gives the same class", is_coboundary(zig - pair) is not None))
    pair_class = CohClass(pair)
    image = pushforward(phi_to_aug(p, q), pair)
    beta = cayley_representative(T)
    w = is_coboundary(image - beta)
    checks.append(("phi_*(pair) - beta_pq is a coboundary", w is not None))
    if w is None:
        w = zero_cochain(T, 0, beta.module)
    else:
        checks.append(("delta(w) = phi_*(pair) - beta_pq", coboundary(w).equals(image - beta)))
    return BSDecomposition(p, q, k, l, T, theta, theta_bar, pair_class, w,
                           all(ok for _, ok in checks), checks)


def decompose_certificate(p: int, q: int) -> cert.Certificate:
    D = decompose(p, q)
    c = cert.Certificate("decompose", {"p": p, "q": q, "k": D.k, "l": D.l}, cert.INCOMPLETE)
    for desc, ok in D.checks:
        c.check(desc, ok)
    c.witness = {
        "theta": D.theta.values,
        "theta_bar": D.theta_bar.values,
        "pair": D.pair_class.representative.values,
        "w": D.phi_witness.values,
    }
    c.status = cert.VERIFIED if D.verified else cert.REFUTED
    return c


# --------------------------------------------------------------------------
# vanishing of u*(beta^(n+1)) on L^n_p x L^n_q


def slot_sign(convention: str, degrees, s: int) -> int:
    """Sign with ``L(.., delta w, ..) = sign * delta L(.., w, ..)`` (slot ``s``, 0-based).

    ``L`` is the left-associated product; all other factors are cocycles and
    ``degrees`` lists their degrees (the slot's own entry is ignored).
    """
    if convention == PLAIN:
        e = sum(degrees[:s])
    elif convention == KOSZUL:
        e = sum(degrees[s + 1 :])
    else:
        raise InputError(f"unknown sign convention {convention!r}")
    return -1 if e % 2 else 1


def left_product(factors, Delta: Diagonal, convention: str) -> Cochain:
    out = factors[0]
    for f in factors[1:]:
        out = cup(out, f, Delta, convention)
    return out


@dataclass
class LensProduct:
    """``L^n_p x L^n_q`` with the product diagonal and the pulled-back classes."""

    n: int
    p: int
    q: int
    Lp: FreeComplex
    Lq: FreeComplex
    L: FreeComplex
    Delta: Diagonal
    Dp: Diagonal
    Dq: Diagonal

    @classmethod
    def build(cls, n: int, p: int, q: int, cache_dir: str | None = None) -> "LensProduct":
        if math.gcd(p, q) != 1:
            raise InputError(f"gcd({p}, {q}) != 1")
        if n < 1 or p < 2 or q < 2:
            raise InputError("need n >= 1 and p, q >= 2")
        top = n + 1
        Wp = cached_diagonal(p, top, cache_dir)
        Wq = cached_diagonal(q, top, cache_dir)
        Lp, Lq = lens_complex(p, n), lens_complex(q, n)
        Dp, Dq = Wp.restrict(Lp), Wq.restrict(Lq)
        L = tensor_complex(Lp, Lq)
        Delta = product_diagonal(Dp, Dq, base=L)
        out = cls(n, p, q, Lp, Lq, L, Delta, Wp, Wq)
        return out

    def beta_pq(self) -> Cochain:
        """``u*(beta_pq)``: the Cayley cocycle of W(p) x W(q) pulled back along u."""
        p, q = self.p, self.q
        Wp, Wq = self.Dp.base, self.Dq.base
        TW = tensor_complex(Wp.truncate(1), Wq.truncate(1), top=1)
        fp = classifying_chain_map(p, self.n, Wp.top, target=Wp)
        fq = classifying_chain_map(q, self.n, Wq.top, target=Wq)
        L1 = tensor_complex(self.Lp.truncate(1), self.Lq.truncate(1), top=1)
        u = tensor_chain_map(_trunc_map(fp, 1), _trunc_map(fq, 1), L1, TW)
        x1 = pullback(u, cayley_representative(TW))
        # L1 and L share generator labels in degree 1
        return Cochain(self.L, 1, x1.module, x1.values)

    def beta_factor(self, which: int) -> Cochain:
        """``i^* beta`` on the lens factor ``which`` (0 for p, 1 for q)."""
        D = self.Dp if which == 0 else self.Dq
        C = self.Lp if which == 0 else self.Lq
        f = classifying_chain_map(C.m, self.n, D.base.top, target=D.base)
        b = pullback(f, cayley_representative(D.base))
        return Cochain(C, 1, b.module, b.values)


def _trunc_map(f, n: int):
    from .complexes import ChainMap

    return ChainMap(f.source.truncate(n), f.target.truncate(n), {k: f.maps[k] for k in range(n + 1)})


def _digest(v) -> str:
    return hashlib.sha256(",".join(str(int(x)) for x in exact(v).reshape(-1)).encode()).hexdigest()


def _word_name(w) -> str:
    return "".join("A" if x == 0 else "B" for x in w)


@dataclass
class StructuredData:
    """Intermediate cochains of the structured route (kept for tests and the CLI)."""

    X: Cochain
    Y: Cochain
    z: Cochain
    A: Cochain
    B: Cochain
    eta: Cochain
    wA: Cochain
    v: Cochain
    target: Cochain
    witness: Cochain
    monomials: dict


def _shuffle_check(n: int, p: int, q: int, l: int, Wp: Diagonal, Wq: Diagonal, convention: str):
    """On W(p) x W(q): the shuffle carries (beta_p x l t_q)^(n+1) to beta_p^(n+1) x (l t_q)^(n+1)."""
    TW = tensor_complex(Wp.base, Wq.base, top=n + 1)
    DW = product_diagonal(Wp, Wq, base=TW)
    bp = cayley_representative(Wp.base)
    lt = Cochain(Wq.base, 0, regular_module(q), _norm_vec(q, l))
    A = cross(bp, lt, TW, convention)
    lhs = cup_power(A, n + 1, DW, convention)
    rhs = cross(cup_power(bp, n + 1, Wp, convention), cup_power(lt, n + 1, Wq, convention), TW, convention)
    ranks = [p - 1, q] * (n + 1)
    perm = list(range(0, 2 * (n + 1), 2)) + list(range(1, 2 * (n + 1), 2))
    moved = [permute_tensor_vector(lhs.value(g), ranks, perm) for g in range(lhs.ngens)]
    ok = np.array_equal(exact(np.concatenate(moved)), rhs.values)
    # the only nonzero component sits on the (n+1, 0) cell, absent from L^n_p
    support = {TW.gens[n + 1][g] for g in range(rhs.ngens) if np.any(rhs.value(g))}
    only_top = all(i == n + 1 for (i, _, _, _) in support)
    return ok, only_top


def structured_data(n: int, p: int, q: int, convention: str = PLAIN, cache_dir: str | None = None,
                    checks: list | None = None) -> StructuredData:
    if convention not in SIGN_CONVENTIONS:
        raise InputError(f"unknown sign convention {convention!r}")
    checks = [] if checks is None else checks
    k, l = bezout(p, q)
    P = LensProduct.build(n, p, q, cache_dir)
    L, Delta = P.L, P.Delta
    N = n + 1

    X = P.beta_pq()
    bp, bq = P.beta_factor(0), P.beta_factor(1)
    A = cross(bp, Cochain(P.Lq, 0, regular_module(q), _norm_vec(q, l)), L, convention)
    B = cross(Cochain(P.Lp, 0, regular_module(p), _norm_vec(p, k)), bq, L, convention)
    phiA, phiB = phi_summand(p, q, 0), phi_summand(p, q, 1)
    Y = pushforward(phiA, A) + pushforward(phiB, B)
    checks.append(("A, B and u*(beta_pq) are cocycles", all(map(is_cocycle, (A, B, X)))))

    # y = 1 x l t_q + k t_p x 1 in Z(pq) has augmentation 1; z = y - 1 lies in I(pq)
    yv = np.zeros(p * q, dtype=np.int64)
    for b in range(q):
        yv[crt_index(0, b, p, q)] += l
    for a in range(p):
        yv[crt_index(a, 0, p, q)] += k
    yv[0] -= 1
    z = Cochain(L, 0, aug_ideal(p * q), aug_coordinates(yv))
    checks.append(("delta(z) = phi(A + B) - u*(beta_pq)", coboundary(z).equals(Y - X)))

    # divisibility: i_p^* beta_p = q eta + delta w_A and q beta_q = delta v
    Gp = cohomology_group(P.Lp, bp.module, 1)
    y = is_divisible(Gp, Gp.ambient(bp.values), q)
    if y is None:
        raise AssertionError(f"beta_{p} is not {q}-divisible on L^{n}_{p}")
    eta = Cochain(P.Lp, 1, bp.module, matmul_basis(Gp, y))
    wA = is_coboundary(bp - eta.scale(q))
    v = is_coboundary(bq.scale(q))
    if wA is None or v is None:
        raise AssertionError("divisibility witnesses are missing")
    checks.append(("i_p^* beta_p = q eta + delta w_A", (eta.scale(q) + coboundary(wA)).equals(bp)))
    checks.append(("q i_q^* beta_q = delta v", coboundary(v).equals(bq.scale(q))))
    ltq = Cochain(P.Lq, 0, regular_module(q), _norm_vec(q, l))
    ktp = Cochain(P.Lp, 0, regular_module(p), _norm_vec(p, k))
    A1 = cross(eta, ltq, L, convention)
    wA1 = cross(wA, ltq, L, convention)
    wB = cross(ktp, v, L, convention)
    checks.append(("A = q (eta x l t_q) + delta(w_A x l t_q)", (A1.scale(q) + coboundary(wA1)).equals(A)))
    checks.append(("q B = delta(k t_p x v)", coboundary(wB).equals(B.scale(q))))

    ok, only_top = _shuffle_check(n, p, q, l, P.Dp, P.Dq, convention)
    checks.append(("shuffle carries (beta_p x l t_q)^(n+1) to beta_p^(n+1) x (l t_q)^(n+1) on W(p) x W(q)", ok))
    checks.append((f"that product is supported on ({N}, 0) cells, absent from L^{n}_{p}", only_top))

    target_mod = tensor_power(aug_ideal(p * q), N)
    monomials = {}
    total_x = zero_cochain(L, n, target_mod)
    sumY = zero_cochain(L, N, target_mod)
    degs = [1] * N
    for word in itertools.product((0, 1), repeat=N):
        F = [A if x == 0 else B for x in word]
        c = left_product(F, Delta, convention)
        name = _word_name(word)
        if 0 not in word or 1 not in word:
            okw = c.is_zero()
            checks.append((f"pure monomial {name} is the zero cochain", okw))
            x_w = zero_cochain(L, n, c.module)
        else:
            i = word.index(0)
            j = word.index(1)
            G1 = list(F)
            G1[i] = wA1
            G2 = list(F)
            G2[i], G2[j] = A1, wB
            x_w = (left_product(G1, Delta, convention).scale(slot_sign(convention, degs, i))
                   + left_product(G2, Delta, convention).scale(slot_sign(convention, degs, j)))
            okw = coboundary(x_w).equals(c)
            checks.append((f"mixed monomial {name}: delta x = monomial", okw))
        hom = ModuleHom(c.module, target_mod,
                        factors=[(phiA if x == 0 else phiB).matrix for x in word], check=False)
        sumY = sumY + pushforward(hom, c)
        total_x = total_x + pushforward(hom, x_w)
        monomials[name] = {"zero": bool(c.is_zero()), "digest": _digest(x_w.values)}

    Yp = cup_power(Y, N, Delta, convention)
    checks.append(("sum of phi-images of monomials equals phi(A + B)^(n+1)", sumY.equals(Yp)))
    # X^N - Y^N = sum_s L(Y^(s-1), X - Y, X^(N-s)) and X - Y = -delta z
    for s in range(N):
        G = [Y] * s + [z] + [X] * (N - s - 1)
        total_x = total_x - left_product(G, Delta, convention).scale(slot_sign(convention, degs, s))
    target = cup_power(X, N, Delta, convention)
    checks.append(("delta(x) = u*(beta_pq)^(n+1)", coboundary(total_x).equals(target)))
    return StructuredData(X, Y, z, A, B, eta, wA, v, target, total_x, monomials)


def _vanish_params(n, p, q, convention, method):
    return {"n": n, "p": p, "q": q, "convention": convention, "method": method}


def vanish_structured(n: int, p: int, q: int, convention: str = PLAIN,
                      cache_dir: str | None = None) -> cert.Certificate:
    c = cert.Certificate("ber-nul", _vanish_params(n, p, q, convention, "structured"), cert.INCOMPLETE)
    checks = []
    data = structured_data(n, p, q, convention, cache_dir, checks)
    for desc, ok in checks:
        c.check(desc, ok)
    k, l = bezout(p, q)
    c.parameters.update({"k": k, "l": l})
    c.witness = {
        "x": data.witness.values,
        "eta": data.eta.values,
        "w_A": data.wA.values,
        "v": data.v.values,
        "monomials": data.monomials,
    }
    c.notes.append(
        "pure powers vanish as cochains on the lens product (a stronger fact than vanishing in cohomology)"
    )
    c.status = cert.VERIFIED if c.all_passed else cert.REFUTED
    c.parameters["conclusion"] = "VANISHES" if c.all_passed else "UNDECIDED"
    return c


def bruteforce_size(n: int, p: int, q: int) -> int:
    """Columns of ``delta_n`` with coefficients I(pq)^(n+1) on L^n_p x L^n_q."""
    R = (p * q - 1) ** (n + 1)
    cells = sum(1 for i in range(n + 1) if 0 <= n - i <= n)
    return cells * R


def vanish_bruteforce(n: int, p: int, q: int, budget: int = DEFAULT_BUDGET, convention: str = PLAIN,
                      cache_dir: str | None = None) -> cert.Certificate:
    needed = bruteforce_size(n, p, q)
    if needed > budget:
        raise BudgetExceeded(
            needed, budget,
            f"delta_{n} on L^{n}_{p} x L^{n}_{q} with I({p * q})^(x{n + 1}) coefficients has {needed} columns",
        )
    P = LensProduct.build(n, p, q, cache_dir)
    X = P.beta_pq()
    target = cup_power(X, n + 1, P.Delta, convention)
    c = cert.Certificate("ber-nul", _vanish_params(n, p, q, convention, "bruteforce"), cert.INCOMPLETE)
    c.check("u*(beta_pq)^(n+1) is a cocycle", is_cocycle(target))
    if target.is_zero():
        x = zero_cochain(P.L, n, target.module)
    else:
        x = is_coboundary(target)
    if x is None:
        c.check("delta x = u*(beta_pq)^(n+1) has an integral solution", False)
        c.status = cert.REFUTED
        c.parameters["conclusion"] = "NONZERO"
        obs = cokernel_obstruction(cochain_differential(P.L, target.module, n), target.values)
        if obs is not None:
            c.witness = {"target": target.values, "functional": obs[0], "modulus": obs[1]}
        return c
    c.check("delta x = u*(beta_pq)^(n+1)", coboundary(x).equals(target))
    c.witness = {"x": x.values}
    c.status = cert.VERIFIED if c.all_passed else cert.REFUTED
    c.parameters["conclusion"] = "VANISHES" if c.all_passed else "UNDECIDED"
    return c


def vanish_target(n: int, p: int, q: int, convention: str = PLAIN, cache_dir: str | None = None) -> Cochain:
    """``u*(beta_pq)^(n+1)`` recomputed from the parameters alone."""
    P = LensProduct.build(n, p, q, cache_dir)
    return cup_power(P.beta_pq(), n + 1, P.Delta, convention)
