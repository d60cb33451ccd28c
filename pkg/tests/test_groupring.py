import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from sympy import Poly, symbols

from bscat.exactla import InputError, invariant_factors, kernel_basis, matmul
from bscat.groupring import (
    CyclicRingElement,
    aug_ideal,
    aug_inclusion,
    coinvariants,
    crt_index,
    crt_iso,
    crt_module,
    invariants,
    permute_tensor_vector,
    phi_hom,
    phi_summand,
    phi_to_aug,
    regular_module,
    ses_bottom_row,
    ses_iq,
    shuffle_auto,
    tensor,
    tensor_power,
    trivial_module,
)


def elements(m):
    return st.lists(st.integers(-6, 6), min_size=m, max_size=m).map(lambda c: CyclicRingElement(m, tuple(c)))


X = symbols("x")


def poly_product(a, b):
    # multiply in Z[x]/(x^m - 1) with sympy as an independent route
    m = a.m
    pa = Poly(list(reversed(a.coeffs)), X)
    pb = Poly(list(reversed(b.coeffs)), X)
    r = (pa * pb).rem(Poly(X**m - 1, X))
    coeffs = list(reversed(r.all_coeffs()))
    return tuple(int(c) for c in coeffs) + (0,) * (m - len(coeffs))


@settings(max_examples=200, deadline=None)
@given(st.integers(2, 7).flatmap(lambda m: st.tuples(elements(m), elements(m), elements(m))))
def test_ring_axioms(abc):
    a, b, c = abc
    assert (a * b).coeffs == poly_product(a, b)
    assert a * b == b * a
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert (a * b).augmentation() == a.augmentation() * b.augmentation()
    assert (a * b).bar() == a.bar() * b.bar()


@pytest.mark.parametrize("m", [2, 3, 4, 5, 6])
def test_norm_annihilates_t_minus_1(m):
    N = CyclicRingElement.norm(m)
    t1 = CyclicRingElement.t(m) - CyclicRingElement.one(m)
    assert (N * t1).is_zero()
    assert N * N == N * m


def test_ring_str():
    assert str(CyclicRingElement(4, (1, -1, 0, 2))) == "1 - t + 2t^3"
    assert str(CyclicRingElement.zero(3)) == "0"


@pytest.mark.parametrize("m", [2, 3, 4, 6])
def test_aug_ideal_action_matches_regular(m):
    I, Z = aug_ideal(m), regular_module(m)
    inc = aug_inclusion(m)
    assert inc.is_equivariant()
    assert np.array_equal(matmul(inc.matrix, I.T), matmul(Z.T, inc.matrix))
    assert np.array_equal(matmul(np.ones((1, m), dtype=np.int64), inc.matrix), np.zeros((1, m - 1)))


@pytest.mark.parametrize("m", [2, 3, 4, 5, 6])
def test_invariants_and_coinvariants(m):
    assert invariants(regular_module(m)).invariant_factors == (0,)
    assert coinvariants(regular_module(m)).invariant_factors == (0,)
    assert invariants(aug_ideal(m)).invariant_factors == ()
    # I / I^2 is cyclic of order m
    assert coinvariants(aug_ideal(m)).invariant_factors == (m,)
    assert invariants(trivial_module(m)).invariant_factors == (0,)


def test_module_rejects_bad_action():
    from bscat.groupring import GModule

    with pytest.raises(InputError):
        GModule(3, [np.array([[0, 1], [1, 0]])], ("bad",))


@settings(max_examples=100, deadline=None)
@given(st.integers(2, 4), st.integers(1, 3), st.data())
def test_tensor_apply_matches_kron(m, k, data):
    M = tensor_power(aug_ideal(m), k)
    x = np.array(data.draw(st.lists(st.integers(-4, 4), min_size=M.rank, max_size=M.rank)))
    power = data.draw(st.integers(0, m))
    T = np.linalg.matrix_power(M.T, power)
    assert np.array_equal(M.apply(x, power), T @ x)


@settings(max_examples=50, deadline=None)
@given(st.integers(2, 3), st.integers(2, 4), st.data())
def test_permute_tensor_vector_matches_shuffle(m, k, data):
    mods = [aug_ideal(m) if data.draw(st.booleans()) else regular_module(m) for _ in range(k)]
    perm = data.draw(st.permutations(range(k)))
    S = shuffle_auto(mods, perm)
    x = np.array(data.draw(st.lists(st.integers(-3, 3), min_size=S.source.rank, max_size=S.source.rank)))
    assert np.array_equal(S.apply(x), permute_tensor_vector(x, [M.rank for M in mods], perm))


@given(st.sampled_from([(2, 3), (3, 5), (2, 5), (4, 9), (5, 7)]), st.data())
def test_crt_index(pq, data):
    p, q = pq
    a = data.draw(st.integers(0, p - 1))
    b = data.draw(st.integers(0, q - 1))
    x = crt_index(a, b, p, q)
    assert 0 <= x < p * q and x % p == a and x % q == b


@pytest.mark.parametrize("p,q", [(2, 3), (3, 5), (2, 5)])
def test_crt_iso_equivariant_and_invertible(p, q):
    C = crt_iso(p, q)
    assert C.is_equivariant()
    assert abs(round(np.linalg.det(C.matrix.astype(float)))) == 1


@pytest.mark.parametrize("p,q", [(2, 3), (3, 5), (2, 5)])
def test_phi_is_onto_the_augmentation_ideal(p, q):
    phi_hom(p, q)
    f = phi_to_aug(p, q)
    assert f.is_equivariant()
    assert invariant_factors(f.matrix) == ()
    # kernel rank (p-1)q + p(q-1) - (pq-1)
    assert kernel_basis(f.matrix).shape[1] == (p - 1) * (q - 1)
    s0, s1 = phi_summand(p, q, 0), phi_summand(p, q, 1)
    assert np.array_equal(np.hstack([s0.matrix, s1.matrix]), f.matrix)


@pytest.mark.parametrize("m", [2, 3, 6])
def test_ses_iq_exact(m):
    assert ses_iq(m).is_exact()


@pytest.mark.parametrize("p,q", [(2, 3), (3, 5), (2, 5), (3, 4)])
def test_ses_bottom_row_exact(p, q):
    S = ses_bottom_row(p, q)
    assert S.incl.is_equivariant() and S.proj.is_equivariant()
    assert S.exactness() == {"injective": True, "middle": True, "surjective": True}


def test_crt_module_rejects_common_factor():
    with pytest.raises(InputError):
        crt_module(2, 4, aug_ideal(2), aug_ideal(4))


def test_tensor_rank_and_name():
    M = tensor(aug_ideal(3), regular_module(3))
    assert M.rank == 6
    assert M.name == "(I(3) x Z(3))"
    assert math.prod(tensor_power(aug_ideal(6), 4).factor_ranks) == 625
