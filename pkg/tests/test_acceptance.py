"""Acceptance criteria, one test each.

Every test prints a ``criterion N: PASS|FAIL`` line with its wall time, so
``pytest tests/test_acceptance.py -v -s`` reads as a checklist.
"""
import contextlib
import math
import time

import numpy as np
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from bscat import certificates as cert
from bscat.berstein import (
    bs_order,
    bs_power,
    cayley_representative,
    decompose,
    decompose_certificate,
    order_certificate,
    pair_closed_form,
    power_certificate,
    structured_data,
    vanish_bruteforce,
    vanish_structured,
    vanish_target,
)
from bscat.cohomology import (
    KOSZUL,
    PLAIN,
    SIGN_CONVENTIONS,
    Cochain,
    coboundary,
    cohomologous,
    cohomology_group,
    cup,
    cup_power,
    homology_group,
    is_coboundary,
    is_cocycle,
)
from bscat.complexes import diagonal, lens_complex, periodic_resolution, tensor_complex
from bscat.exactla import matmul, smith
from bscat.groupring import aug_ideal, trivial_module
from bscat.lensarith import (
    LensSpec,
    bounds_certificate,
    bounds_report,
    cup_length_lower,
    emss_certificate,
    emss_parallelizable,
    essential_certificate,
    fundamental_pushforward,
    olum_equivalent,
)
from bscat.replay import recheck


@contextlib.contextmanager
def criterion(n, title, capsys, limit=None):
    t0 = time.perf_counter()
    status = "FAIL"
    try:
        yield
        elapsed = time.perf_counter() - t0
        if limit is not None:
            assert elapsed < limit, f"took {elapsed:.1f} s, limit {limit} s"
        status = "PASS"
    finally:
        elapsed = time.perf_counter() - t0
        with capsys.disabled():
            print(f"\ncriterion {n}: {status} ({elapsed:.2f} s) {title}")


def timed(fn, *args, **kw):
    t0 = time.perf_counter()
    out = fn(*args, **kw)
    return out, time.perf_counter() - t0


def rechecks(c):
    import json

    status, results = recheck(json.loads(c.to_json()))
    return status == cert.VERIFIED


def test_criterion_1_order_p(capsys):
    with criterion(1, "bs_order(p) = p with q-divisibility witnesses", capsys):
        for p in (2, 3, 5, 7):
            (order, t1) = timed(bs_order, p)
            c, t2 = timed(order_certificate, p)
            assert order == p
            assert c.status == cert.VERIFIED and c.parameters["order"] == p
            assert sorted(int(q) for q in c.witness["divisibility"]) == [
                q for q in range(2, 11) if math.gcd(q, p) == 1]
            assert t1 < 1 and t2 < 1, (p, t1, t2)


def test_criterion_2_powers_nonzero(capsys):
    with criterion(2, "beta_m^k is nonzero for m in {2,3,4,6}", capsys, limit=60):
        for m in (2, 3, 4, 6):
            for k in range(1, (4 if m == 6 else 6) + 1):
                cls = bs_power(m, k)
                assert is_coboundary(cls.representative) is None, (m, k)
                assert any(cls.coordinates), (m, k)
                assert power_certificate(m, k).status == cert.VERIFIED


def test_criterion_3_decomposition(capsys):
    with criterion(3, "decompose(p, q) for (2,3), (2,5), (3,5)", capsys):
        for p, q in ((2, 3), (2, 5), (3, 5)):
            (D, t) = timed(decompose, p, q)
            assert D.verified, [d for d, ok in D.checks if not ok]
            assert D.epsilon == 1
            assert D.pair_class.representative.equals(pair_closed_form(D.complex, p, q, D.k, D.l))
            assert t < 10, (p, q, t)
            c = decompose_certificate(p, q)
            assert c.status == cert.VERIFIED and rechecks(c)


def test_criterion_4_vanishing(capsys, cache_dir):
    with criterion(4, "twisted product vanishes on L^3_2 x L^3_3 and L^3_3 x L^3_5", capsys):
        s, ts = timed(vanish_structured, 3, 2, 3, PLAIN, cache_dir)
        b, tb = timed(vanish_bruteforce, 3, 2, 3, cache_dir=cache_dir)
        assert s.status == cert.VERIFIED and b.status == cert.VERIFIED
        assert s.parameters["conclusion"] == b.parameters["conclusion"] == "VANISHES"
        target = vanish_target(3, 2, 3, PLAIN, cache_dir)
        x_s = Cochain(target.complex, 3, target.module, s.witness["x"])
        x_b = Cochain(target.complex, 3, target.module, b.witness["x"])
        assert coboundary(x_s).equals(target) and coboundary(x_b).equals(target)
        assert is_cocycle(x_s - x_b)
        s2, ts2 = timed(vanish_structured, 3, 3, 5, PLAIN, cache_dir)
        assert s2.status == cert.VERIFIED
        assert ts < 60 and ts2 < 60 and tb < 600, (ts, ts2, tb)


def test_criterion_5_essential(capsys):
    with criterion(5, "lens spaces essential, product inessential", capsys):
        for p in (2, 3, 5):
            rep = fundamental_pushforward(3, p)
            assert rep.group.invariant_factors == (p,)
            assert rep.generates
            assert essential_certificate(3, p).status == cert.VERIFIED
        rep = fundamental_pushforward(3, 2, 3)
        assert rep.degree == 6 and rep.group.invariant_factors == () and rep.is_zero
        W6 = periodic_resolution(6, 7, homotopy=None)
        assert homology_group(W6, trivial_module(6), 6).invariant_factors == ()


def test_criterion_6_cup_length(capsys, cache_dir):
    with criterion(6, "cup-length lower bound and cat = 4", capsys):
        s, c = cup_length_lower(3, 2, 3, cache_dir=cache_dir)
        assert s >= 4 and c.status == cert.VERIFIED and rechecks(c)
        s1, c1 = cup_length_lower(3, 2, cache_dir=cache_dir)
        assert s1 == 3 and rechecks(c1)
        rep = bounds_report(3, 2, 3, cache_dir=cache_dir)
        assert rep.conclusion == 4
        assert rechecks(bounds_certificate(rep))


def _cohomology_closed_form(m, n):
    if n == 0:
        return (0,)
    return (m,) if n % 2 == 0 else ()


def _kunneth(A, B, k):
    out = [math.gcd(a, b) for i in range(k + 1) for a in A.get(i, ()) for b in B.get(k - i, ())]
    out += [math.gcd(a, b) for i in range(k + 2) for a in A.get(i, ()) for b in B.get(k + 1 - i, ())
            if a and b]
    return sorted(d for d in out if d != 1)


def _primary(factors):
    parts = []
    for d in factors:
        if d == 0:
            parts.append(0)
            continue
        parts += [p**e for p, e in sympy.factorint(d).items()]
    return sorted(parts)


def test_criterion_7_oracle_suites(capsys):
    with criterion(7, "closed form, Kunneth, SNF properties, Leibniz and dd = 0", capsys):
        # (a)
        for m in range(2, 7):
            W = periodic_resolution(m, 9, homotopy=None)
            for n in range(9):
                assert cohomology_group(W, trivial_module(m), n).invariant_factors == \
                    _cohomology_closed_form(m, n)
        # (b)
        A = {i: cohomology_group(lens_complex(2, 3), trivial_module(2), i).invariant_factors for i in range(4)}
        B = {i: cohomology_group(lens_complex(3, 3), trivial_module(3), i).invariant_factors for i in range(4)}
        L = tensor_complex(lens_complex(2, 3), lens_complex(3, 3))
        for k in range(7):
            direct = cohomology_group(L, trivial_module(6), k).invariant_factors
            assert _primary(direct) == _primary(_kunneth(A, B, k)), k

        # (c)
        @settings(max_examples=1000, deadline=None, database=None)
        @given(st.integers(1, 5).flatmap(lambda r: st.integers(1, 5).flatmap(
            lambda c: st.lists(st.lists(st.integers(-9, 9), min_size=c, max_size=c), min_size=r, max_size=r))))
        def snf(rows):
            D = smith(np.array(rows, dtype=np.int64))
            assert np.array_equal(matmul(matmul(D.U, D.S), D.V), np.array(rows))
            assert abs(sympy.Matrix(D.U.tolist()).det()) == 1
            assert abs(sympy.Matrix(D.V.tolist()).det()) == 1
            nz = [x for x in D.diagonal if x]
            assert D.diagonal[: len(nz)] == nz and all(x > 0 for x in nz)
            assert all(b % a == 0 for a, b in zip(nz, nz[1:]))

        snf()

        # (d)
        deltas = [diagonal(periodic_resolution(m, 6)) for m in (2, 3, 4)]
        deltas.append(diagonal(tensor_complex(periodic_resolution(2, 5), periodic_resolution(3, 5), top=5)))
        rng = np.random.default_rng(2024)
        for Delta in deltas:
            C = Delta.base
            mods = [trivial_module(C.m), aug_ideal(C.m)]
            for _ in range(30):
                i = int(rng.integers(0, 4))
                j = int(rng.integers(0, C.top - i))
                M1, M2 = mods[rng.integers(2)], mods[rng.integers(2)]
                u = Cochain(C, i, M1, rng.integers(-3, 4, C.ranks[i] * M1.rank))
                v = Cochain(C, j, M2, rng.integers(-3, 4, C.ranks[j] * M2.rank))
                assert coboundary(coboundary(u)).is_zero()
                for conv in SIGN_CONVENTIONS:
                    du = cup(coboundary(u), v, Delta, conv)
                    dv = cup(u, coboundary(v), Delta, conv)
                    rhs = du.scale((-1) ** j) + dv if conv == KOSZUL else du + dv.scale((-1) ** i)
                    assert coboundary(cup(u, v, Delta, conv)).equals(rhs)


def test_criterion_8_diagonals(capsys):
    with criterion(8, "diagonal self-verification and independent lifts", capsys):
        bases = {m: periodic_resolution(m, 8) for m in (2, 3, 6)}
        bases["2x3"] = tensor_complex(periodic_resolution(2, 8), periodic_resolution(3, 8), top=8)
        for key, W in bases.items():
            D = diagonal(W)
            assert D.verified_to == 8, key
            for n in range(1, 9):
                assert not D.chain_map_defect(n, 0), (key, n)
            for n in range(9):
                left, right = D.counit_defect(n, 0)
                assert not np.any(left) and not np.any(right), (key, n)
        for m in (2, 3, 6):
            D1 = diagonal(periodic_resolution(m, 8, homotopy="solved"))
            D2 = diagonal(periodic_resolution(m, 8, homotopy="reverse"))
            assert any(not np.array_equal(D1.maps[2][0][k], D2.maps[2][0].get(k, 0)) for k in D1.maps[2][0]) \
                or D1.maps[2][0].keys() != D2.maps[2][0].keys()
            W = D1.base
            # coefficients live in I(m)^k, so keep (m - 1)^k dense-sized
            for k in (k for k in range(1, 8) if (m - 1) ** k <= 1000):
                a = cup_power(cayley_representative(W), k, D1, PLAIN)
                b = cup_power(cayley_representative(D2.base), k, D2, PLAIN)
                b = Cochain(W, k, b.module, b.values)
                assert cohomologous(a, b) is not None, (m, k)


def test_criterion_9_lens_arithmetic(capsys):
    with criterion(9, "Olum and EMSS reproductions", capsys):
        assert olum_equivalent(LensSpec(5, (1, 1)), LensSpec(5, (1, 2))) is None
        assert olum_equivalent(LensSpec(7, (1, 1)), LensSpec(7, (1, 2))) is not None
        for p in (2, 3, 5, 7, 11, 13):
            for l in range(1, p):
                if math.gcd(l, p) == 1:
                    assert emss_parallelizable(LensSpec(p, (1, l)))
        assert emss_parallelizable(LensSpec(3, (1, 1, 1)))
        assert not emss_parallelizable(LensSpec(5, (1, 1, 1)))
        assert emss_certificate(LensSpec(5, (1, 1, 1))).status == cert.VERIFIED


def test_criterion_10_certificates(capsys, cache_dir):
    import copy
    import json

    with criterion(10, "certificate recheck and single-bit corruption", capsys):
        certs = [
            order_certificate(5),
            power_certificate(4, 3),
            decompose_certificate(2, 5),
            vanish_structured(3, 2, 3, cache_dir=cache_dir),
            cup_length_lower(3, 2, 3, cache_dir=cache_dir)[1],
            essential_certificate(3, 3),
            emss_certificate(LensSpec(3, (1, 1, 1))),
        ]
        for c in certs:
            assert c.status == cert.VERIFIED
            doc = json.loads(c.to_json())
            assert recheck(doc)[0] == cert.VERIFIED, c.statement_id
            bad = copy.deepcopy(doc)
            node, key = _first_int_leaf(bad["witness"])
            node[key] = str(int(node[key]) ^ 1)
            assert recheck(bad)[0] == cert.MISMATCH, c.statement_id


def _first_int_leaf(obj):
    items = obj.items() if isinstance(obj, dict) else enumerate(obj)
    for k, v in items:
        if isinstance(v, str) and v.lstrip("-").isdigit():
            return obj, k
        if isinstance(v, (dict, list)):
            found = _first_int_leaf(v)
            if found:
                return found
    return None
