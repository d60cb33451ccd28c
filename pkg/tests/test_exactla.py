import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from sympy import GF, Matrix, ZZ
from sympy.polys.matrices import DomainMatrix
from sympy.matrices.normalforms import smith_normal_form

from bscat.exactla import (
    InputError,
    LatticeSolver,
    check_obstruction,
    cokernel_obstruction,
    cyclic_group,
    element_order,
    exact,
    is_divisible,
    kernel_basis,
    matmul,
    nullspace_mod_p,
    smith,
    solve_integer,
    subquotient,
)


def small_matrices(max_dim=5, bound=9):
    return st.integers(1, max_dim).flatmap(
        lambda r: st.integers(1, max_dim).flatmap(
            lambda c: st.lists(
                st.lists(st.integers(-bound, bound), min_size=c, max_size=c), min_size=r, max_size=r
            )
        )
    )


def det(M):
    return int(Matrix(np.asarray(M, dtype=object).tolist()).det())


@settings(max_examples=1000, deadline=None)
@given(small_matrices())
def test_smith_properties(rows):
    A = np.array(rows, dtype=np.int64)
    D = smith(A)
    assert D.check()
    assert np.array_equal(matmul(matmul(D.U, D.S), D.V), A)
    assert abs(det(D.U)) == 1 and abs(det(D.V)) == 1
    assert np.array_equal(matmul(D.U, D.U_inv), np.eye(A.shape[0], dtype=np.int64))
    assert np.array_equal(matmul(D.V, D.V_inv), np.eye(A.shape[1], dtype=np.int64))
    off = D.S.copy()
    np.fill_diagonal(off, 0)
    assert not np.any(off)
    d = D.diagonal
    assert all(x >= 0 for x in d)
    nz = [x for x in d if x]
    assert d[: len(nz)] == nz
    assert all(b % a == 0 for a, b in zip(nz, nz[1:]))


@settings(max_examples=200, deadline=None)
@given(small_matrices(max_dim=4, bound=20))
def test_smith_matches_sympy(rows):
    A = np.array(rows, dtype=np.int64)
    S = smith_normal_form(Matrix(rows), domain=ZZ)
    expect = [abs(int(S[i, i])) for i in range(min(S.shape))]
    assert smith(A).diagonal == expect


def test_smith_known_example():
    assert smith([[2, 4, 4], [-6, 6, 12], [10, -4, -16]]).diagonal == [2, 6, 12]


def test_smith_large_entries_promote_to_object():
    big = 2**70
    A = np.array([[big, 0], [0, 3 * big]], dtype=object)
    D = smith(A)
    assert D.check()
    assert D.diagonal == [big, 3 * big]


@settings(max_examples=200, deadline=None)
@given(small_matrices(max_dim=6, bound=5), st.data())
def test_solve_integer_roundtrip(rows, data):
    A = np.array(rows, dtype=np.int64)
    x = np.array(data.draw(st.lists(st.integers(-5, 5), min_size=A.shape[1], max_size=A.shape[1])))
    b = matmul(A, x)
    y = solve_integer(A, b)
    assert y is not None
    assert np.array_equal(matmul(A, y), b)


def test_solve_integer_detects_rational_only_solution():
    assert solve_integer([[2, 0], [0, 3]], [1, 3]) is None
    assert solve_integer([[2, 4]], [6]) is not None


@settings(max_examples=200, deadline=None)
@given(small_matrices(max_dim=6, bound=4))
def test_kernel_basis_is_saturated(rows):
    A = np.array(rows, dtype=np.int64)
    K = kernel_basis(A)
    assert not np.any(matmul(A, K))
    rank = smith(A).rank
    assert K.shape[1] == A.shape[1] - rank
    if K.shape[1]:
        # a saturated lattice has trivial cokernel torsion
        assert all(d == 1 for d in smith(K).diagonal)


def test_kernel_basis_backends_agree():
    rng = np.random.default_rng(3)
    A = rng.integers(-2, 3, (30, 40)) * (rng.random((30, 40)) < 0.2)
    K1 = LatticeSolver(A, backend="python").kernel_basis()
    from bscat.kernels import available_backends

    for b in available_backends():
        K2 = LatticeSolver(A, backend=b).kernel_basis()
        assert np.array_equal(K1, K2)


def test_subquotient_cyclic():
    # Z --2--> Z --0--> Z has middle homology Z_2
    G = subquotient([[2]], [[0]])
    assert G.invariant_factors == (2,)
    assert G.coordinates([1]) == (1,)
    assert G.is_zero([2])


def test_subquotient_rejects_non_complex():
    with pytest.raises(InputError):
        subquotient([[1]], [[1]])


def test_element_order_and_divisibility():
    G = cyclic_group(12)
    assert element_order(G, [3]) == 4
    assert element_order(G, [5]) == 12
    y = is_divisible(G, [1], 5)
    assert y is not None and (5 * int(y[0]) - 1) % 12 == 0
    assert is_divisible(G, [1], 2) is None


@settings(max_examples=200, deadline=None)
@given(small_matrices(max_dim=4, bound=6), st.lists(st.integers(-6, 6), min_size=4, max_size=4))
def test_cokernel_obstruction_is_exact(rows, c):
    A = np.array(rows, dtype=np.int64)
    c = np.array(c[: A.shape[0]] + [0] * max(0, A.shape[0] - len(c)), dtype=np.int64)
    obs = cokernel_obstruction(A, c)
    in_span = solve_integer(A, c) is not None
    assert (obs is None) == in_span
    if obs is not None:
        assert check_obstruction(A, c, *obs)


@pytest.mark.parametrize("p", [2, 3, 5, 7])
def test_nullspace_mod_p(p):
    rng = np.random.default_rng(p)
    A = rng.integers(-9, 10, (7, 11))
    N = nullspace_mod_p(A, p)
    assert not np.any(matmul(A, N) % p)
    # dimension from an independent rank over F_p
    Ap = Matrix([[int(v) % p for v in row] for row in A.tolist()])
    r = DomainMatrix.from_Matrix(Ap).convert_to(GF(p)).rank()
    assert N.shape[1] == A.shape[1] - r


def test_nullspace_rejects_composite():
    with pytest.raises(InputError):
        nullspace_mod_p([[1]], 6)


def test_exact_dtype_policy():
    assert exact([1, 2]).dtype == np.int64
    assert exact(np.array([2**70], dtype=object)).dtype == object
    assert exact(np.array([5], dtype=object)).dtype == np.int64
    assert math.prod(exact([[1, 2]], ndim=2).shape) == 2
