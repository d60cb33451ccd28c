import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from bscat import certificates as cert
from bscat.exactla import InputError
from bscat.groupring import aug_ideal, tensor_power
from bscat.lensarith import (
    DEFAULT_MENU,
    InvariantFunctional,
    LensSpec,
    bezout,
    bezout_certificate,
    bounds_certificate,
    bounds_report,
    cup_length_lower,
    detecting_functional,
    emss_parallelizable,
    emss_report,
    essential_certificate,
    fundamental_pushforward,
    olum_equivalent,
)


def brute_bezout(p, q):
    if q == 1:
        return 0, 1
    best = None
    for k in range(-q, q + 1):
        if (k * p - 1) % q == 0:
            key = (abs(k), k < 0)
            if best is None or key < best[0]:
                best = (key, k)
    k = best[1]
    return k, (1 - k * p) // q


@settings(max_examples=1000, deadline=None)
@given(st.integers(1, 400), st.integers(1, 400))
def test_bezout_random_pairs(p, q):
    assume(math.gcd(p, q) == 1)
    k, l = bezout(p, q)
    assert k * p + l * q == 1
    assert (k, l) == brute_bezout(p, q)


def test_bezout_fixed_values():
    assert bezout(2, 3) == (-1, 1)
    assert bezout(3, 5) == (2, -1)
    assert bezout(1, 7) == (1, 0)
    assert bezout(5, 1) == (0, 1)
    with pytest.raises(InputError):
        bezout(4, 6)
    with pytest.raises(InputError):
        bezout(0, 3)
    assert bezout_certificate(7, 10).status == cert.VERIFIED


def test_lens_spec_parse_and_format():
    L = LensSpec.parse("L(7; 1, 2)")
    assert L.p == 7 and L.ell == (1, 2) and L.n == 3
    assert str(L) == "L(7; 1,2)"
    assert LensSpec.parse("L(5;-1,1,1)").ell == (4, 1, 1)
    for bad in ["L(6; 2, 1)", "L(7)", "X(7; 1)", "L(1; 1)"]:
        with pytest.raises(InputError):
            LensSpec.parse(bad)


def units(p):
    return [x for x in range(1, p) if math.gcd(x, p) == 1]


def specs():
    return st.integers(2, 11).flatmap(
        lambda p: st.integers(1, 3).flatmap(
            lambda k: st.tuples(
                st.just(p),
                st.lists(st.sampled_from(units(p)), min_size=k, max_size=k),
                st.lists(st.sampled_from(units(p)), min_size=k, max_size=k),
                st.lists(st.sampled_from(units(p)), min_size=k, max_size=k),
            )
        )
    )


def eq(a, b):
    return olum_equivalent(a, b) is not None


@settings(max_examples=500, deadline=None)
@given(specs())
def test_olum_is_an_equivalence_relation(args):
    p, a, b, c = args
    A, B, C = LensSpec(p, tuple(a)), LensSpec(p, tuple(b)), LensSpec(p, tuple(c))
    assert eq(A, A)
    assert eq(A, B) == eq(B, A)
    if eq(A, B) and eq(B, C):
        assert eq(A, C)


@settings(max_examples=300, deadline=None)
@given(specs(), st.data())
def test_olum_invariances(args, data):
    p, a, _, _ = args
    A = LensSpec(p, tuple(a))
    perm = data.draw(st.permutations(a))
    signs = data.draw(st.lists(st.sampled_from([1, -1]), min_size=len(a), max_size=len(a)))
    u = data.draw(st.sampled_from(units(p)))
    assert eq(A, LensSpec(p, tuple(perm)))
    assert eq(A, LensSpec(p, tuple(s * x for s, x in zip(signs, a))))
    assert eq(A, LensSpec(p, tuple(u * x for x in a)))


def test_olum_witness():
    a, b = LensSpec(7, (1, 1)), LensSpec(7, (1, 2))
    x, sign = olum_equivalent(a, b)
    assert (1 - sign * x**2 * 2) % 7 == 0
    assert olum_equivalent(LensSpec(5, (1, 1)), LensSpec(5, (1, 2))) is None
    with pytest.raises(InputError):
        olum_equivalent(LensSpec(5, (1, 1)), LensSpec(7, (1, 1)))


def test_olum_class_counts():
    # L(p; 1, l) up to homotopy: l modulo +-squares, so two classes when -1 is a square mod p
    for p in (5, 7, 11, 13):
        reps = []
        for l in range(1, p):
            S = LensSpec(p, (1, l))
            if not any(eq(S, R) for R in reps):
                reps.append(S)
        assert len(reps) == (2 if p % 4 == 1 else 1)


@settings(max_examples=300, deadline=None)
@given(specs(), st.data())
def test_emss_invariances(args, data):
    p, a, _, _ = args
    A = LensSpec(p, tuple(a))
    perm = data.draw(st.permutations(a))
    signs = data.draw(st.lists(st.sampled_from([1, -1]), min_size=len(a), max_size=len(a)))
    assert emss_parallelizable(A) == emss_parallelizable(LensSpec(p, tuple(perm)))
    assert emss_parallelizable(A) == emss_parallelizable(LensSpec(p, tuple(s * x for s, x in zip(signs, a))))


@pytest.mark.parametrize("p", [2, 3, 5, 7, 11, 13])
def test_emss_three_dimensional_always_parallelizable(p):
    for l in units(p):
        assert emss_parallelizable(LensSpec(p, (1, l)))


def test_emss_five_dimensional_values():
    assert emss_parallelizable(LensSpec(3, (1, 1, 1)))
    assert not emss_parallelizable(LensSpec(5, (1, 1, 1)))
    assert emss_report(LensSpec(5, (1, 1, 1)))["residues"] == {1: 3}
    assert not emss_report(LensSpec(2, (1, 1, 1)))["p_at_least_k"]


def test_cup_length_single_lens_space(cache_dir):
    s, c = cup_length_lower(3, 2, cache_dir=cache_dir)
    assert s == 3
    assert c.status == cert.VERIFIED
    s, c = cup_length_lower(3, 3, cache_dir=cache_dir)
    assert s == 3


def test_cup_length_product(cache_dir):
    s, c = cup_length_lower(3, 2, 3, cache_dir=cache_dir)
    assert s >= 4
    assert c.status == cert.VERIFIED
    assert c.witness["degree"] == 6
    assert sum(c.witness["factor_degrees"]) == 6
    assert c.parameters["menu"] == list(DEFAULT_MENU)


def test_cup_length_empty_search():
    s, c = cup_length_lower(3, 2, 3, budget=0)
    assert s == 0 and c.status == cert.INCOMPLETE
    s, c = cup_length_lower(3, 2, 3, menu=())
    assert s == 0


def test_cup_length_budget_skips_large_candidates(cache_dir):
    s, c = cup_length_lower(3, 3, 5, budget=5, cache_dir=cache_dir)
    assert 1 <= s < 4
    assert c.status == cert.VERIFIED
    assert any("skipped" in n for n in c.notes)
    s, c = cup_length_lower(3, 3, 5, budget=10, cache_dir=cache_dir)
    assert s == 4


def test_cup_length_in_a_degree_with_several_cells(cache_dir):
    s, c = cup_length_lower(3, 2, 3, menu=("I",), cache_dir=cache_dir)
    assert s == 3
    assert c.witness["degree"] == 3
    assert c.witness["functional"]["kind"] == "cokernel"


def test_detecting_functional_is_invariant():
    M = tensor_power(aug_ideal(3), 2)
    rng = np.random.default_rng(1)
    for _ in range(20):
        x = rng.integers(-3, 4, M.rank)
        f = detecting_functional(M, x, [3])
        if f is None:
            continue
        assert f.is_invariant(M)
        assert f.value(M, x) % f.modulus != 0
        g = InvariantFunctional.from_witness(f.to_witness())
        assert g.value(M, x) == f.value(M, x)


@pytest.mark.parametrize("p", [2, 3, 5])
def test_lens_spaces_are_essential(p):
    rep = fundamental_pushforward(3, p)
    assert rep.group.invariant_factors == (p,)
    assert rep.generates
    assert essential_certificate(3, p).status == cert.VERIFIED


def test_product_is_inessential():
    rep = fundamental_pushforward(3, 2, 3)
    assert rep.degree == 6
    assert rep.group.invariant_factors == ()
    assert rep.is_zero
    with pytest.raises(InputError):
        fundamental_pushforward(2, 3)


def test_bounds_report(cache_dir):
    rep = bounds_report(3, 2, 3, cache_dir=cache_dir)
    assert rep.lower == 4
    assert rep.best_upper.value == 4
    assert rep.conclusion == 4
    assert "cat = 4" in rep.table()
    assert bounds_certificate(rep).status == cert.VERIFIED
    with pytest.raises(InputError):
        bounds_report(1, 2, 3)
    with pytest.raises(InputError):
        bounds_report(3, 2, 4)
