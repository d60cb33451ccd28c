"""Re-validate a certificate from its stored witness.

Only cheap identities are replayed: coboundary equations, functional
evaluations and congruences.  Searches (integer solving, SNF, the monomial
expansion) are never re-run; objects that are pure functions of the
parameters (resolutions, diagonals, the target cocycle) are rebuilt.
"""
from __future__ import annotations

import math

import numpy as np

from . import certificates as cert
from .exactla import InputError, exact, matmul, to_ints


def _vec(x) -> np.ndarray:
    return cert.int_vector(x)


def _int(x) -> int:
    return int(x)


class Replay:
    def __init__(self):
        self.results: list[tuple[str, bool]] = []

    def check(self, desc: str, ok) -> bool:
        self.results.append((desc, bool(ok)))
        return bool(ok)

    @property
    def ok(self) -> bool:
        return bool(self.results) and all(ok for _, ok in self.results)


def recheck(doc: dict) -> tuple[str, list[tuple[str, bool]]]:
    """``(VERIFIED | MISMATCH, replayed identities)`` for a certificate document."""
    cert.validate_schema(doc)
    r = Replay()
    r.check("witness digest matches", cert.digest(doc["witness"]) == doc["digest"])
    fn = _REPLAYERS.get(doc["statement_id"])
    if fn is None:
        raise cert.SchemaError(f"no replay rule for statement {doc['statement_id']!r}")
    if doc["status"] != cert.VERIFIED:
        r.check(f"certificate status is {doc['status']}", False)
        return cert.MISMATCH, r.results
    try:
        fn(doc["parameters"], doc["witness"], r)
    except (InputError, KeyError, ValueError, TypeError, IndexError) as exc:
        r.check(f"witness is well formed ({type(exc).__name__}: {exc})", False)
    return (cert.VERIFIED if r.ok else cert.MISMATCH), r.results


# --------------------------------------------------------------------------


def _order(P, W, r):
    from .berstein import cayley_representative
    from .cohomology import Cochain, coboundary, cochain_differential, is_cocycle
    from .complexes import periodic_resolution

    m = _int(P["m"])
    C = periodic_resolution(m, 2, homotopy=None)
    beta = cayley_representative(C)
    r.check("stored beta is the Cayley cocycle", np.array_equal(_vec(W["beta"]), beta.values))
    w = Cochain(C, 0, beta.module, _vec(W["m_minus_norm"]))
    r.check("m beta = delta(m - N)", coboundary(w).equals(beta.scale(m)))
    phi, d = _vec(W["functional"]), _int(W["modulus"])
    row = to_ints(matmul(phi.reshape(1, -1), cochain_differential(C, beta.module, 0)))
    val = int(matmul(phi.reshape(1, -1), beta.values.reshape(-1, 1))[0, 0])
    r.check("phi(delta) = 0 mod m", d == m and all(v % m == 0 for v in row))
    r.check("phi(beta) is a unit mod m", math.gcd(val, m) == 1)
    for q in P["q"]:
        q = _int(q)
        ent = W["divisibility"].get(str(q))
        if ent is None:
            r.check(f"{q}-divisibility witness present", False)
            continue
        eta = Cochain(C, 1, beta.module, _vec(ent["eta"]))
        v = Cochain(C, 0, beta.module, _vec(ent["v"]))
        r.check(f"eta_{q} is a cocycle", is_cocycle(eta))
        r.check(f"beta = {q} eta + delta v", (eta.scale(q) + coboundary(v)).equals(beta))


def _bs_equal(P, W, r):
    from .berstein import cayley_representative
    from .cohomology import Cochain, coboundary, connecting, unit_cochain
    from .complexes import periodic_resolution
    from .groupring import ses_iq

    m, top = _int(P["m"]), _int(P["top"])
    C = periodic_resolution(m, top, homotopy=None)
    a = cayley_representative(C)
    b = Cochain(C, 1, a.module, _vec(W["delta"]))
    r.check("stored Cayley cocycle", np.array_equal(_vec(W["cayley"]), a.values))
    r.check("stored connecting image", b.equals(connecting(ses_iq(m), unit_cochain(C))))
    w = Cochain(C, 0, a.module, _vec(W["w"]))
    r.check("delta w = Cayley - connecting", coboundary(w).equals(a - b))


def _bs_power(P, W, r):
    from .berstein import bs_power
    from .cohomology import cochain_differential

    m, k = _int(P["m"]), _int(P["k"])
    c = bs_power(m, k, convention=P.get("convention", "koszul")).representative
    r.check("stored cocycle equals beta^k", np.array_equal(_vec(W["cocycle"]), c.values))
    phi, d = _vec(W["functional"]), _int(W["modulus"])
    row = to_ints(matmul(phi.reshape(1, -1), cochain_differential(c.complex, c.module, k - 1)))
    val = int(matmul(phi.reshape(1, -1), c.values.reshape(-1, 1))[0, 0])
    if d == 0:
        r.check("phi kills coboundaries and not beta^k", all(v == 0 for v in row) and val != 0)
    else:
        r.check("phi kills coboundaries and not beta^k",
                d > 1 and all(v % d == 0 for v in row) and val % d != 0)


def _decompose(P, W, r):
    from .berstein import cayley_representative, pair_closed_form
    from .cohomology import Cochain, coboundary, pushforward
    from .complexes import periodic_resolution, tensor_complex
    from .groupring import phi_to_aug, ses_bottom_row
    from .lensarith import bezout

    p, q = _int(P["p"]), _int(P["q"])
    k, l = _int(P["k"]), _int(P["l"])
    r.check("k p + l q = 1", k * p + l * q == 1 and (k, l) == bezout(p, q))
    T = tensor_complex(periodic_resolution(p, 2, None), periodic_resolution(q, 2, None), top=2)
    S = ses_bottom_row(p, q)
    th, tb = _vec(W["theta"]), _vec(W["theta_bar"])
    r.check("(eps_p + eps_q) theta = 1", int(th.astype(object).sum()) == 1)
    r.check("theta_bar lifts theta", np.array_equal(S.proj.apply(tb), th))
    theta_bar = Cochain(T, 0, S.proj.source, tb)
    pair = Cochain(T, 1, S.incl.source, _vec(W["pair"]))
    dtb = coboundary(theta_bar)
    inc = np.concatenate([S.incl.apply(pair.value(g)) for g in range(pair.ngens)])
    r.check("delta(theta_bar) = incl(pair)", np.array_equal(dtb.values, inc))
    r.check("pair equals the closed form", pair.equals(pair_closed_form(T, p, q, k, l)))
    w = Cochain(T, 0, phi_to_aug(p, q).target, _vec(W["w"]))
    image = pushforward(phi_to_aug(p, q), pair)
    r.check("delta w = phi_*(pair) - beta_pq", coboundary(w).equals(image - cayley_representative(T)))


def _ber_nul(P, W, r):
    from .berstein import LensProduct, vanish_target
    from .cohomology import Cochain, coboundary

    n, p, q = _int(P["n"]), _int(P["p"]), _int(P["q"])
    conv = P["convention"]
    if P["method"] == "both":
        for name in ("structured", "bruteforce"):
            sub = W[name]
            r.check(f"{name} route has method {name}", sub["parameters"]["method"] == name)
            status, results = recheck(sub)
            for desc, ok in results:
                r.check(f"{name}: {desc}", ok)
        r.check("routes agree", W["structured"]["parameters"]["conclusion"]
                == W["bruteforce"]["parameters"]["conclusion"] == P["conclusion"])
        r.check("x is the brute-force witness", W["x"] == W["bruteforce"]["witness"]["x"])
        return
    c = vanish_target(n, p, q, conv)
    x = Cochain(c.complex, n, c.module, _vec(W["x"]))
    r.check("delta x = u*(beta_pq)^(n+1)", coboundary(x).equals(c))
    if P["method"] == "structured":
        Pr = LensProduct.build(n, p, q)
        bp, bq = Pr.beta_factor(0), Pr.beta_factor(1)
        eta = Cochain(Pr.Lp, 1, bp.module, _vec(W["eta"]))
        wA = Cochain(Pr.Lp, 0, bp.module, _vec(W["w_A"]))
        v = Cochain(Pr.Lq, 0, bq.module, _vec(W["v"]))
        r.check("i_p^* beta_p = q eta + delta w_A", (eta.scale(q) + coboundary(wA)).equals(bp))
        r.check("q i_q^* beta_q = delta v", coboundary(v).equals(bq.scale(q)))
        r.check("every monomial recorded", len(W["monomials"]) == 2 ** (n + 1))


def _cup_length(P, W, r):
    from .cohomology import cochain_differential
    from .exactla import check_obstruction
    from .lensarith import InvariantFunctional, _candidates, _lens_setup, functional_checks
    from .berstein import left_product

    n, p = _int(P["n"]), _int(P["p"])
    q = None if P["q"] == "none" else _int(P["q"])
    Lp, Lq, L, Delta = _lens_setup(n, p, q, None)
    cand = [c for c in _candidates(n, p, q, P["menu"], Lp, Lq, L) if c.label == P["product"]]
    if not r.check("product label names a candidate", len(cand) == 1):
        return
    r.check("product length equals the lower bound", cand[0].length == _int(P["lower"]))
    prod = left_product(cand[0].factors, Delta, P["convention"])
    r.check("stored product equals the recomputed product", np.array_equal(_vec(W["product"]), prod.values))
    if W["functional"]["kind"] == "cokernel":
        A = cochain_differential(prod.complex, prod.module, prod.degree - 1)
        phi = _vec(W["functional"]["row"])
        r.check("cokernel functional kills coboundaries and not the product",
                check_obstruction(A, prod.values, phi, _int(W["functional"]["modulus"])))
        return
    f = InvariantFunctional.from_witness(W["functional"])
    checks, val = functional_checks(prod, f, [_int(w) for w in W["weights"]])
    for desc, ok in checks:
        r.check(desc, ok)
    r.check("stored functional value", val == _int(W["value"]))


def _bounds(P, W, r):
    from .lensarith import _is_prime, fundamental_pushforward

    n, p, q = _int(P["n"]), _int(P["p"]), _int(P["q"])
    sub, results = recheck(W["lower_certificate"])
    for desc, ok in results:
        r.check("lower bound: " + desc, ok)
    lower = _int(W["lower"])
    r.check("lower bound matches its certificate", lower == _int(W["lower_certificate"]["parameters"]["lower"]))
    push = fundamental_pushforward(n, p, q)
    r.check("pushforward image", np.array_equal(push.image, _vec(W["pushforward_image"])))
    k = (n + 1) // 2
    expect = {
        2 * n: True,
        2 * n - 1: push.is_zero,
        2 * n - 2: p % 2 == 1 and q % 2 == 1 and n % 2 == 1,
        n + 1: n % 2 == 1 and _is_prime(p) and _is_prime(q) and min(p, q) >= k,
    }
    seen = {}
    for u in W["uppers"]:
        v = _int(u["value"])
        seen.setdefault(v, []).append(bool(u["applies"]))
    ok = all(any(a == expect[v] for a in seen.get(v, [])) for v in expect)
    r.check("applicability predicates re-evaluated", ok)
    app = [_int(u["value"]) for u in W["uppers"] if u["applies"]]
    r.check("lower <= every applicable upper", all(lower <= v for v in app))
    concl = W["conclusion"]
    r.check("conclusion", (concl == "open") == (lower != min(app)) and (concl == "open" or _int(concl) == lower))


def _essential(P, W, r):
    from .lensarith import fundamental_pushforward

    n, p = _int(P["n"]), _int(P["p"])
    q = None if P["q"] == "none" else _int(P["q"])
    push = fundamental_pushforward(n, p, q)
    r.check("pushforward image", np.array_equal(push.image, _vec(W["image"])))
    r.check("group", [int(d) for d in W["group"]] == list(push.group.invariant_factors))
    r.check("coordinates", [int(c) for c in W["coordinates"]] == list(push.coordinates))


def _bezout(P, W, r):
    p, q = _int(P["p"]), _int(P["q"])
    k, l = _int(W["k"]), _int(W["l"])
    r.check("k p + l q = 1", k * p + l * q == 1)


def _olum(P, W, r):
    from .lensarith import LensSpec, olum_equivalent

    a, b = LensSpec.parse(P["a"]), LensSpec.parse(P["b"])
    if W["equivalent"] is False:
        # the search space is Z_p x {+1, -1}; replaying it is a congruence check per element
        r.check("no a0 in Z_p solves the congruence", olum_equivalent(a, b) is None)
        return
    x, sign = _int(W["a0"]), _int(W["sign"])
    pa, pb = math.prod(a.ell), math.prod(b.ell)
    r.check("prod l = sign a0^k prod l' (mod p)", a.p == b.p and (pa - sign * x ** a.k * pb) % a.p == 0)


def _emss(P, W, r):
    from .lensarith import LensSpec, emss_report

    spec = LensSpec.parse(P["spec"])
    rep = emss_report(spec)
    r.check("p >= k", rep["p_at_least_k"] == W["p_at_least_k"])
    r.check("residues", {str(j): str(v) for j, v in rep["residues"].items()} == W["residues"])
    r.check("verdict", rep["parallelizable"] == W["parallelizable"])


_REPLAYERS = {
    "order-p": _order,
    "bs-equal": _bs_equal,
    "bs-power": _bs_power,
    "decompose": _decompose,
    "ber-nul": _ber_nul,
    "cup-length": _cup_length,
    "bounds": _bounds,
    "essential": _essential,
    "bezout": _bezout,
    "olum": _olum,
    "emss": _emss,
}
