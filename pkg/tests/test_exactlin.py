from fractions import Fraction
from itertools import product

import pytest
import sympy
from hypothesis import given, settings, strategies as st
from sympy.matrices.normalforms import smith_normal_form as sympy_snf

from ssk3primes import exactlin as el

small_int = st.integers(-12, 12)


def matrices(max_rows=4, max_cols=4):
    return st.integers(1, max_rows).flatmap(
        lambda r: st.integers(1, max_cols).flatmap(
            lambda c: st.lists(st.lists(small_int, min_size=c, max_size=c), min_size=r, max_size=r)))


def diag_entries(D):
    return [D[i][i] for i in range(min(len(D), len(D[0])))]


@pytest.mark.parametrize("M, expected", [
    ([[2, 0], [0, 2]], [2, 2]),
    ([[4, 4], [4, -8]], [4, 12]),
    ([[2, 6], [6, -6]], [2, 24]),
])
def test_snf_examples(M, expected):
    D, U, V = el.smith_normal_form(M)
    assert diag_entries(D) == expected
    assert el.matmul(el.matmul(U, M), V) == D


@settings(max_examples=150, deadline=None)
@given(matrices())
def test_snf_contract_and_sympy_agreement(M):
    D, U, V = el.smith_normal_form(M)
    assert el.matmul(el.matmul(U, M), V) == D
    assert abs(el.det(U)) == 1 and abs(el.det(V)) == 1
    d = diag_entries(D)
    assert all(D[i][j] == 0 for i in range(len(D)) for j in range(len(D[0])) if i != j)
    assert all(x >= 0 for x in d)
    for a, b in zip(d, d[1:]):
        assert (b == 0) or (a != 0 and b % a == 0)
    ref = sympy_snf(sympy.Matrix(M), domain=sympy.ZZ)
    ref_d = sorted(abs(int(ref[i, i])) for i in range(min(ref.shape)))
    assert sorted(d) == ref_d


@settings(max_examples=80, deadline=None)
@given(st.integers(1, 5).flatmap(lambda n: st.lists(st.lists(small_int, min_size=n, max_size=n),
                                                     min_size=n, max_size=n)))
def test_det_inverse_against_sympy(M):
    d = el.det(M)
    assert d == int(sympy.Matrix(M).det())
    if d:
        inv = el.inverse(M)
        n = len(M)
        assert el.matmul(M, inv) == [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
        D, _, _ = el.smith_normal_form(M)
        assert abs(d) == abs(sympy.prod(diag_entries(D)))


def test_discriminant_group_examples():
    assert el.discriminant_group([[-2]]) == ([2], [[Fraction(1, 2)]])
    assert el.discriminant_group([[4, 4], [4, -8]])[0] == [4, 12]
    assert el.discriminant_group([[-2, 1], [1, -2]])[0] == [3]
    with pytest.raises(ValueError, match="degenerate lattice"):
        el.discriminant_group([[2, 2], [2, 2]])


@pytest.mark.parametrize("G", [[[4, 4], [4, -8]], [[-2, 1], [1, -2]], [[2, 6], [6, -6]],
                               [[-4, 1, 0], [1, -2, 1], [0, 1, -6]]])
def test_discriminant_generators_lie_in_dual(G):
    orders, gens = el.discriminant_group(G)
    assert sympy.prod(orders) == abs(el.det(G))
    for g, d in zip(gens, orders):
        for i in range(len(G)):
            assert el.bilinear(G, g, [int(i == j) for j in range(len(G))]).denominator == 1
        assert all((d * x).denominator == 1 for x in g)


def _naive_short(G, bound, box):
    n = len(G)
    return sorted(v for v in product(range(-box, box + 1), repeat=n)
                  if any(v) and el.vec_norm(G, v) <= bound)


def test_short_vector_examples():
    assert sorted(el.short_vectors([[2]], 2)) == [(-1,), (1,)]
    assert len(el.short_vectors([[2, -1], [-1, 2]], 2)) == 6
    d4 = [[2, -1, 0, 0], [-1, 2, -1, -1], [0, -1, 2, 0], [0, -1, 0, 2]]
    assert len(el.short_vectors(d4, 2)) == 24
    with pytest.raises(ValueError):
        el.short_vectors([[-2]], 2)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 3).flatmap(lambda n: st.lists(st.lists(st.integers(-2, 2), min_size=n, max_size=n),
                                                     min_size=n, max_size=n)),
       st.integers(1, 6))
def test_short_vectors_match_box_oracle(A, bound):
    n = len(A)
    # A^T A + I is positive definite; vectors of norm <= 6 have entries bounded by 6
    G = [[sum(A[k][i] * A[k][j] for k in range(n)) + int(i == j) for j in range(n)] for i in range(n)]
    got = sorted(el.short_vectors(G, bound))
    assert got == _naive_short(G, bound, 6)
    assert set(got) == {tuple(-x for x in v) for v in got}


def test_coset_min_examples():
    a11 = [[2 * int(i == j) - int(abs(i - j) == 1) for j in range(11)] for i in range(11)]
    inv = el.inverse(a11)
    glue3 = [3 * inv[i][0] for i in range(11)]
    assert el.coset_min_norm_bruteforce(a11, glue3, 6) == Fraction(9, 4)
    assert el.coset_min_norm_bruteforce(a11, [0] * 11, 6) == 0
    assert el.coset_min_norm_bruteforce([[2]], [Fraction(1, 2)], Fraction(1, 4)) is None


def test_lattice_basis_and_kernel():
    B = el.lattice_basis([[2, 0], [0, 2], [1, 1]], 2)
    assert abs(el.det(B)) == 2
    K = el.integer_kernel([[1, 2, 3]])
    assert len(K[0]) == 2
    for j in range(2):
        assert sum(c * K[i][j] for i, c in enumerate([1, 2, 3])) == 0
