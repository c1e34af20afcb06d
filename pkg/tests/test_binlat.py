import pytest
from hypothesis import assume, given, settings, strategies as st

from ssk3primes.binlat import (BinaryEvenLattice, BinaryForm, class_index, cycle, enumerate_classes,
                               form_to_lattice, lattice_to_form, reduce)
from ssk3primes.fqf import FiniteQuadraticForm, find_isometry
from fractions import Fraction

from oracles import binary_classes_bruteforce

S_PLUS, S_MINUS = BinaryEvenLattice(2, 6, -6), BinaryEvenLattice(-2, 6, 6)
T_PLUS, T_MINUS = BinaryEvenLattice(4, 4, -8), BinaryEvenLattice(-4, 4, 8)
U_PLUS, U_MINUS = BinaryEvenLattice(2, 2, -4), BinaryEvenLattice(-2, 2, 4)


def test_dictionary():
    assert lattice_to_form(S_PLUS) == BinaryForm(1, 6, -3)
    assert lattice_to_form(T_PLUS) == BinaryForm(2, 4, -4)
    assert lattice_to_form(U_PLUS) == BinaryForm(1, 2, -2)
    assert BinaryForm(1, 6, -3).disc == 48 and U_PLUS.d == 12
    assert form_to_lattice(BinaryForm(2, 4, -4)) == T_PLUS
    with pytest.raises(ValueError):
        BinaryEvenLattice(2, 1, 0)  # d = 1
    with pytest.raises(ValueError):
        BinaryEvenLattice(2, 0, 2)  # definite
    with pytest.raises(ValueError):
        BinaryEvenLattice(1, 3, 2)


def test_reduction_examples():
    assert BinaryForm(1, 2, -2).is_reduced()
    assert any(abs(f.a) == 1 for f in cycle(BinaryForm(1, 6, -3)))
    with pytest.raises(ValueError):
        reduce(BinaryForm(1, 7, 0))  # d = 49


def test_class_lists_for_48_and_12():
    c48 = enumerate_classes(48)
    assert len(c48) == 4
    assert {class_index(L.to_form()) for L in c48} == {class_index(L.to_form())
                                                        for L in (S_PLUS, S_MINUS, T_PLUS, T_MINUS)}
    assert len({class_index(L.to_form()) for L in (S_PLUS, S_MINUS, T_PLUS, T_MINUS)}) == 4
    c12 = enumerate_classes(12)
    assert len(c12) == 2
    assert {class_index(U_PLUS.to_form()), class_index(U_MINUS.to_form())} == {0, 1}
    assert len(enumerate_classes(5)) == 1


def test_disc_forms():
    target = FiniteQuadraticForm.diagonal([4, 4, 3], [Fraction(1, 4), Fraction(5, 4), Fraction(2, 3)])
    assert find_isometry(T_PLUS.disc_form(), target) is not None
    assert find_isometry(T_MINUS.disc_form(), -target) is not None
    assert S_PLUS.disc_form().invariant_factors() == [2, 24]  # Z/2 x Z/8 x Z/3
    assert U_PLUS.disc_form().order == 12


@pytest.mark.parametrize("d", [d for d in range(2, 121) if int(d ** 0.5) ** 2 != d])
def test_classes_match_bruteforce(d):
    count, label = binary_classes_bruteforce(d)
    reps = enumerate_classes(d)
    assert len(reps) == count
    assert len({label[(L.to_form().a, L.to_form().b, L.to_form().c)] for L in reps}) == count
    for L in reps:
        assert L.det == -d and L.g11 % 2 == 0 and L.g22 % 2 == 0
        assert L.disc_form().order == d


forms = st.tuples(st.integers(-15, 15), st.integers(-15, 15), st.integers(-15, 15)).map(lambda t: BinaryForm(*t))


def _ok(f):
    d = f.disc
    return d > 0 and int(d ** 0.5) ** 2 != d and f.a != 0 and f.c != 0


@settings(max_examples=200, deadline=None)
@given(forms, st.integers(-3, 3))
def test_reduction_invariant_under_gl2(f, k):
    assume(_ok(f))
    g = reduce(f)
    assert g.is_reduced() and g.disc == f.disc
    cyc = cycle(f)
    assert len(cyc) % 2 == 0
    h = cyc[0]
    for _ in range(len(cyc)):
        h = h.rho()
    assert h == cyc[0]
    # x -> x + k y, swap, y -> -y keep the isometry class
    moved = BinaryForm(f.a, f.b + 2 * k * f.a, f.a * k * k + f.b * k + f.c)
    i = class_index(f)
    assert class_index(moved) == i
    assert class_index(BinaryForm(f.c, f.b, f.a)) == i
    assert class_index(f.improper()) == i
