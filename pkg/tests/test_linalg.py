import random

import pytest
from hypothesis import given, settings, strategies as st
from sympy import Matrix, ZZ
from sympy.matrices.normalforms import smith_normal_form as sympy_snf

from rostchow.linalg import (
    echelon_basis, in_row_lattice, invariant_factors, matmul, p_valuation, rank_mod_p,
    smith_normal_form, solve_in_basis,
)

small_matrices = st.integers(1, 4).flatmap(
    lambda m: st.integers(1, 4).flatmap(
        lambda n: st.lists(st.lists(st.integers(-12, 12), min_size=n, max_size=n), min_size=m, max_size=m)))


def sympy_invariants(A):
    D = sympy_snf(Matrix(A), domain=ZZ)
    return sorted(abs(D[i, i]) for i in range(min(D.shape)) if D[i, i])


def det(M):
    return Matrix(M).det()


@settings(max_examples=150, deadline=None)
@given(small_matrices)
def test_smith_form_is_a_factorisation(A):
    U, D, V = smith_normal_form(A)
    assert matmul(matmul(U, A), V) == D
    assert abs(det(U)) == 1 and abs(det(V)) == 1
    diag = [D[i][i] for i in range(min(len(D), len(D[0])))]
    assert all(D[i][j] == 0 for i in range(len(D)) for j in range(len(D[0])) if i != j)
    nz = [d for d in diag if d]
    assert all(d > 0 for d in nz)
    assert all(b % a == 0 for a, b in zip(nz, nz[1:]))
    assert diag[:len(nz)] == nz


@settings(max_examples=150, deadline=None)
@given(small_matrices)
def test_invariants_match_sympy(A):
    assert sorted(invariant_factors(A)) == sympy_invariants(A)


def test_known_invariants():
    assert invariant_factors([[2, 4, 4], [-6, 6, 12], [10, -4, -16]]) == [2, 6, 12]
    assert invariant_factors([[0, 0]]) == []
    assert invariant_factors([], ncols=3) == []


def test_lattice_membership_integral_and_p_local():
    rows = [[2, 0], [0, 3]]
    assert in_row_lattice(rows, [4, 3])
    assert not in_row_lattice(rows, [1, 0])
    # 1/3 is a 2-local unit
    assert in_row_lattice(rows, [0, 1], p=2)
    assert not in_row_lattice(rows, [0, 1], p=3)
    assert not in_row_lattice(rows, [1, 1], p=2)
    assert in_row_lattice([], [0, 0]) and not in_row_lattice([], [0, 1])


def test_membership_against_rational_solve():
    # full row rank: the rational solution is unique, membership means it is integral
    rng = random.Random(7)
    seen = {True: 0, False: 0}
    for _ in range(200):
        rows = [[rng.randint(-3, 3) for _ in range(3)] for _ in range(2)]
        if Matrix(rows).rank() < 2:
            continue
        a = [rng.randint(-3, 3) for _ in range(2)]
        x = [sum(a[i] * rows[i][j] for i in range(2)) for j in range(3)]
        if rng.random() < 0.5:
            x[rng.randrange(3)] += rng.choice([-1, 1])
        sol = Matrix(rows).T.gauss_jordan_solve(Matrix(x))[0] if Matrix.hstack(Matrix(rows).T, Matrix(x)).rank() == 2 else None
        expected = sol is not None and all(v.is_integer for v in sol)
        assert in_row_lattice(rows, x) == expected
        seen[expected] += 1
    assert seen[True] and seen[False]


def test_echelon_and_solve():
    basis, piv = echelon_basis([[2, 4, 0], [1, 2, 1], [3, 6, 1]], 3)
    assert len(basis) == 2 and piv == sorted(piv)
    z = solve_in_basis(basis, piv, [1, 2, 1])
    assert z is not None
    assert solve_in_basis(basis, piv, [0, 1, 0]) is None


@pytest.mark.parametrize("n,p,v", [(8, 2, 3), (12, 2, 2), (9, 3, 2), (7, 5, 0), (-25, 5, 2)])
def test_valuation(n, p, v):
    assert p_valuation(n, p) == v


def test_valuation_zero_and_fraction():
    from fractions import Fraction
    assert p_valuation(0, 2) == float("inf")
    assert p_valuation(Fraction(3, 4), 2) == -2


def test_rank_mod_p():
    assert rank_mod_p([[2, 4], [1, 2]], 2) == 1
    assert rank_mod_p([[2, 4], [1, 3]], 2) == 1
    assert rank_mod_p([[1, 0], [0, 3]], 3) == 1
    assert rank_mod_p([], 5) == 0
