import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bscat import certificates as cert
from bscat.berstein import (
    BudgetExceeded,
    LensProduct,
    bruteforce_size,
    bs_cayley,
    bs_delta,
    bs_equal,
    bs_order,
    bs_power,
    cayley_representative,
    decompose,
    decompose_certificate,
    left_product,
    order_certificate,
    pair_closed_form,
    power_certificate,
    slot_sign,
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
    cup_power,
    is_coboundary,
    is_cocycle,
)
from bscat.complexes import cached_diagonal, periodic_resolution
from bscat.exactla import InputError
from bscat.groupring import aug_ideal, trivial_module


def test_cayley_representative_values():
    W = periodic_resolution(4, 2, homotopy=None)
    b = cayley_representative(W)
    # the degree-1 generator goes to t - 1, which is b_1
    assert list(b.values) == [1, 0, 0]
    assert is_cocycle(b)


@pytest.mark.parametrize("m", [2, 3, 4, 5, 6, 7, 10])
def test_bs_order(m):
    assert bs_order(m) == m


@pytest.mark.parametrize("m", [2, 3, 6])
def test_two_definitions_agree(m):
    c = bs_equal(m)
    assert c.status == cert.VERIFIED
    W = periodic_resolution(m, 2, homotopy=None)
    a, b = bs_cayley(m, W=W), bs_delta(m, W=W)
    assert a.group.invariant_factors == (m,)
    assert math.gcd(a.coordinates[0], m) == 1 and math.gcd(b.coordinates[0], m) == 1


@pytest.mark.parametrize("m", [2, 3, 5, 7])
def test_order_certificate(m):
    c = order_certificate(m)
    assert c.status == cert.VERIFIED
    assert c.parameters["order"] == m
    coprime = [q for q in range(2, 11) if math.gcd(q, m) == 1]
    assert sorted(int(q) for q in c.witness["divisibility"]) == coprime
    assert c.witness["modulus"] == m


def test_order_certificate_noncoprime_q_is_refuted():
    c = order_certificate(4, qs=[2])
    assert c.status == cert.REFUTED


@pytest.mark.parametrize("m,k", [(2, 1), (2, 3), (3, 2), (4, 4), (6, 2)])
def test_power_certificate(m, k):
    c = power_certificate(m, k)
    assert c.status == cert.VERIFIED
    cls = bs_power(m, k)
    assert any(cls.coordinates)


@pytest.mark.parametrize("convention", SIGN_CONVENTIONS)
def test_power_classes_have_order_m(convention):
    for k in range(1, 5):
        assert bs_power(3, k, convention=convention).order() == 3


def test_bs_power_rejects_bad_power():
    with pytest.raises(InputError):
        bs_power(3, 0)


def test_bezout_data_in_decompose():
    D = decompose(3, 5)
    assert (D.k, D.l) == (2, -1)
    assert D.epsilon == 1


@pytest.mark.parametrize("p,q", [(2, 3), (2, 5), (3, 5), (3, 4), (5, 7)])
def test_decompose(p, q):
    D = decompose(p, q)
    assert D.verified, [d for d, ok in D.checks if not ok]
    assert D.epsilon == 1
    assert D.pair_class.representative.equals(pair_closed_form(D.complex, p, q, D.k, D.l))
    assert decompose_certificate(p, q).status == cert.VERIFIED


def test_decompose_rejects_common_factor():
    with pytest.raises(InputError):
        decompose(2, 4)


def test_slot_sign_values():
    assert slot_sign(PLAIN, [1, 1, 1], 0) == 1
    assert slot_sign(PLAIN, [1, 1, 1], 1) == -1
    assert slot_sign(PLAIN, [1, 1, 1], 2) == 1
    assert slot_sign(KOSZUL, [1, 1, 1], 0) == 1
    assert slot_sign(KOSZUL, [1, 1, 1], 1) == -1
    assert slot_sign(KOSZUL, [2, 1, 1], 2) == 1
    with pytest.raises(InputError):
        slot_sign("other", [1], 0)


DELTA3 = cached_diagonal(3, 7)


@settings(max_examples=100, deadline=None)
@given(st.sampled_from(SIGN_CONVENTIONS), st.lists(st.sampled_from([1, 2]), min_size=1, max_size=4), st.data())
def test_slot_sign_moves_delta_through_a_product(convention, degrees, data):
    W = DELTA3.base
    beta = cayley_representative(W)
    x = Cochain(W, 2, trivial_module(3), [1])
    if sum(degrees) > W.top - 1:
        degrees = degrees[:1]
    s = data.draw(st.integers(0, len(degrees) - 1))
    factors = [beta if d == 1 else x for d in degrees]
    M = factors[s].module
    r = W.ranks[degrees[s] - 1] * M.rank
    w = Cochain(W, degrees[s] - 1, M, np.array(data.draw(st.lists(st.integers(-3, 3), min_size=r, max_size=r))))
    F1 = list(factors)
    F1[s] = coboundary(w)
    F2 = list(factors)
    F2[s] = w
    lhs = left_product(F1, DELTA3, convention)
    rhs = coboundary(left_product(F2, DELTA3, convention)).scale(slot_sign(convention, degrees, s))
    assert lhs.equals(rhs)


@pytest.mark.parametrize("p,q", [(2, 3), (3, 4)])
def test_lens_product_classes(p, q, cache_dir):
    P = LensProduct.build(1, p, q, cache_dir)
    assert P.L.top == 2
    assert is_cocycle(P.beta_pq())
    assert is_cocycle(P.beta_factor(0)) and is_cocycle(P.beta_factor(1))
    assert P.Delta.verified_to == 2


def test_lens_product_rejects_bad_input():
    with pytest.raises(InputError):
        LensProduct.build(3, 2, 4)
    with pytest.raises(InputError):
        LensProduct.build(0, 2, 3)


@pytest.mark.parametrize("n,p,q", [(1, 2, 3), (1, 3, 4), (1, 2, 5), (3, 2, 3)])
@pytest.mark.parametrize("convention", SIGN_CONVENTIONS)
def test_vanish_structured(n, p, q, convention, cache_dir):
    c = vanish_structured(n, p, q, convention, cache_dir)
    assert c.status == cert.VERIFIED, [d for d, ok in c.checks if not ok]
    assert c.parameters["conclusion"] == "VANISHES"
    mixed = [w for w in c.witness["monomials"] if "A" in w and "B" in w]
    assert len(mixed) == 2 ** (n + 1) - 2


def test_structured_and_bruteforce_agree(cache_dir):
    data = structured_data(3, 2, 3, PLAIN, cache_dir)
    brute = vanish_bruteforce(3, 2, 3, cache_dir=cache_dir)
    assert brute.status == cert.VERIFIED
    target = vanish_target(3, 2, 3, PLAIN, cache_dir)
    assert not target.is_zero()
    assert np.array_equal(data.target.values, target.values)
    x_s = Cochain(target.complex, 3, target.module, data.witness.values)
    x_b = Cochain(target.complex, 3, target.module, brute.witness["x"])
    assert coboundary(x_b).equals(target)
    assert coboundary(x_s).equals(target)
    assert is_cocycle(x_s - x_b)


def test_structured_intermediate_identities(cache_dir):
    d = structured_data(1, 2, 3, PLAIN, cache_dir)
    assert coboundary(d.z).equals(d.Y - d.X)
    bp = LensProduct.build(1, 2, 3, cache_dir).beta_factor(0)
    assert np.array_equal((d.eta.scale(3) + coboundary(d.wA)).values, bp.values)


def test_bruteforce_budget():
    assert bruteforce_size(3, 2, 3) == 2500
    assert bruteforce_size(3, 3, 5) == 4 * 14**4
    with pytest.raises(BudgetExceeded) as info:
        vanish_bruteforce(3, 3, 5)
    assert info.value.needed == 4 * 14**4
    assert info.value.budget == 5000


def test_unknown_convention():
    with pytest.raises(InputError):
        structured_data(1, 2, 3, "other")


def test_beta_power_on_lens_space_is_nonzero_below_the_top(cache_dir):
    # on L^3_3 the class beta^3 survives in the top degree
    P = LensProduct.build(3, 2, 3, cache_dir)
    b = P.beta_factor(1)
    b3 = cup_power(b, 3, P.Dq.restrict(P.Lq))
    assert b3.module.rank == aug_ideal(3).rank ** 3
    assert is_coboundary(b3) is None
