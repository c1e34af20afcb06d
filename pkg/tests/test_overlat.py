import random

import pytest

from ssk3primes.dynkin import enumerate_types, iter_types, parse
from ssk3primes.fqf import Subgroup, find_isometry
from ssk3primes.overlat import (GlueSearch, enumerate_admissible, quotient_order_bound,
                                root_preserving)

from conftest import V
from oracles import overlattice_classes


def test_root_preserving_examples(example_type):
    orders = example_type.moduli
    assert root_preserving(example_type, Subgroup(orders, []))
    assert not root_preserving(example_type, Subgroup(orders, [V[4]]))
    H3 = Subgroup(orders, [V[2]])
    assert set(H3.elements()) == {(0, 0, 0, 0), V[2], V[5], V[7]}
    assert root_preserving(example_type, H3)
    assert [example_type.glue_min_norm(V[i]) for i in (2, 5, 7)] == [4, 4, 4]


def test_worked_example(example_type):
    res = enumerate_admissible(example_type)
    assert res.complete
    assert sorted(q.d for q in res.quotients) == [12, 48]
    F = example_type.disc_form()
    for q in res.quotients:
        H = F.subgroup(q.H_generators)
        expected = {48: [V[1]], 12: [V[2]]}[q.d]
        assert find_isometry(q.form, F.quotient_form(F.subgroup(expected))) is not None
        assert H.order == {48: 2, 12: 4}[q.d]


def test_a20():
    res = enumerate_admissible(parse("A20"))
    assert [(q.d, q.H_order) for q in res.quotients] == [(21, 1)]


def test_square_disc_rejected():
    for t in ("10A2", "20A1"):
        with pytest.raises(ValueError, match="early-exit"):
            enumerate_admissible(parse(t))


def test_quotient_order_bound():
    assert quotient_order_bound(parse("D7+A11+2A1")) == 2
    assert quotient_order_bound(parse("A20")) == 1
    assert quotient_order_bound(parse("D4+A2+14A1")) == 2 ** 7  # 2-rank 16
    assert quotient_order_bound(parse("5A4")) == 25  # 5-rank 5


def test_truncation_is_reported():
    res = enumerate_admissible(parse("A3+17A1"), budget=3)
    assert not res.complete and res.status == "truncated" and res.nodes == 3


def test_glue_tables_agree_with_form():
    rng = random.Random(3)
    for t in ("D7+A11+2A1", "E6+D6+A5+A3", "D4+D5+A7+2A2", "E7+A5+A4+2A2"):
        R = parse(t)
        gs = GlueSearch(R)
        for i in rng.sample(range(gs.N), min(gs.N, 300)):
            x = gs.element(i)
            assert gs.index(x) == i
            assert gs.qn[i] == gs.form.qn(x)
            assert gs.norm[i] == R.glue_min_norm(x) * gs.e


SAMPLE_20 = ["D7+A11+2A1", "A20", "E6+D6+A5+A3", "D4+A4+A3+A2+3A1+A3", "E7+A7+2A3", "D5+A9+A4+A2",
             "2D4+A5+A4+A3", "A11+A5+A2+A1+A1", "E6+A7+A5+A2", "D6+A6+2A4"]


@pytest.mark.parametrize("t", SAMPLE_20)
def test_returned_quotients_satisfy_invariants(t):
    R = parse(t)
    F = R.disc_form()
    res = enumerate_admissible(R, allow_square_disc=True)
    for q in res.quotients:
        H = F.subgroup(q.H_generators)
        assert H.order == q.H_order
        assert all(F.qn(h) == 0 for h in H.elements())
        assert all(R.glue_min_norm(h) >= 4 for h in H.elements() if any(h))
        assert q.form.length() <= 2
        assert q.d * q.H_order ** 2 == R.disc
        # any symmetry of L(R) maps H to an equally admissible subgroup
        for M in R.aut_generators():
            img = [tuple(sum(M[i][j] * g[j] for j in range(len(g))) % R.moduli[i] for i in range(len(g)))
                   for g in q.H_generators]
            H2 = F.subgroup(img)
            assert root_preserving(R, H2) == root_preserving(R, H)
            assert find_isometry(F.quotient_form(H2), q.form) is not None
    forms = [q.neg_form for q in res.quotients]
    for i in range(len(forms)):
        for j in range(i):
            assert forms[i].order != forms[j].order or find_isometry(forms[i], forms[j]) is None


def _unreduced_classes(R):
    """All isotropic root-preserving subgroups, no symmetry, then quotient classes."""
    F = R.disc_form()
    iso = [x for x in F.isotropic_vectors() if any(x) and R.glue_min_norm(x) != 2]
    seen = {F.subgroup([])}
    todo = [F.subgroup([])]
    out = []
    while todo:
        H = todo.pop()
        Q = F.quotient_form(H)
        if Q.length() <= 2:
            neg = -Q
            if not any(f.order == neg.order and find_isometry(f, neg) is not None for f in out):
                out.append(neg)
        perp = F.orthogonal_complement(H)
        for x in iso:
            if x in perp and x not in H:
                H2 = F.subgroup(list(H.generators()) + [x])
                if H2 not in seen and root_preserving(R, H2):
                    seen.add(H2)
                    todo.append(H2)
    return out


def _small_rank20(limit, count, seed):
    rng = random.Random(seed)
    pool = [R for R in enumerate_types(20) if R.disc <= limit]
    return rng.sample(pool, count)


# types with two or more quotient classes, and types with many equal components
RICH_20 = ["E7+D5+A5+A3", "E7+A9+2A2", "E6+A13+A1", "E6+A11+3A1", "E6+A9+A5", "E6+2A7", "D16+A4", "D9+A11",
           "D7+A11+2A1", "D6+D5+A5+A3+A1", "D6+A11+A3", "D6+A9+2A2+A1", "D5+A11+A4", "D5+A11+2A2",
           "D5+A9+A3+A2+A1", "D4+A14+A2", "D4+A11+A5", "A17+A3", "A17+A2+A1", "A15+A5", "A15+A4+A1",
           "A15+A3+A2", "A15+2A2+A1", "A14+A3+A2+A1", "A13+A5+2A1", "A13+A4+A2+A1", "A13+2A3+A1",
           "A11+A7+2A1", "A11+A6+A3", "A11+A5+A4", "A11+A4+A3+A2", "A11+A4+A3+2A1", "A11+A3+2A2+2A1",
           "2A9+A2", "A9+A7+A3+A1", "A9+A6+A5", "A9+2A5+A1", "A9+A5+2A3", "2A8+A4", "2A8+A3+A1", "2A7+A6",
           "2A7+A5+A1", "2A7+A4+A2", "A7+2A5+A3", "4A5", "2A7+2A3", "4D5", "2D6+2A4", "2A9+2A1",
           "A11+3A3", "2A5+2A4+A2", "3A6+A2", "2D8+A4"]


@pytest.mark.parametrize("R", _small_rank20(3000, 25, 7) + [parse(t) for t in RICH_20], ids=str)
def test_symmetry_reduction_against_unreduced_search(R):
    res = enumerate_admissible(R, allow_square_disc=True)
    ref = _unreduced_classes(R)
    assert len(ref) == len(res.quotients)
    for f in ref:
        assert sum(q.d == f.order and find_isometry(q.neg_form, f) is not None for q in res.quotients) == 1


@pytest.mark.parametrize("R", [R for R in iter_types(6)], ids=str)
def test_small_types_against_overlattice_oracle(R):
    res = enumerate_admissible(R, allow_square_disc=True)
    ref = overlattice_classes(R)
    assert len(ref) == len(res.quotients)
    for d, f in ref:
        assert any(q.d == d and find_isometry(q.neg_form, f) is not None for q in res.quotients)
