"""Doctrine structure on power doctrines over finite sets.

Adjunction laws for the quantifiers, the equivalence-relation test and the
inj/surj factorization are hypothesis properties checked against direct
computation on tables; the capability checks run on fixed fragments.
"""

import itertools

import pytest
from hypothesis import given, strategies as st

from eqcomp import doctrine as D, lattice
from eqcomp.corpus import PowerDoctrine, SubDoctrine
from eqcomp.kernel import FinSet, Fragment, Mor

P2 = PowerDoctrine(lattice.boolean())
PH = PowerDoctrine(lattice.h3())
DOCTRINES = [P2, PH]
C = FinSet()


def preds(P, n):
    return st.tuples(*[st.sampled_from(list(P.H.elements()))] * n)


@st.composite
def doctrine_and_sizes(draw):
    P = draw(st.sampled_from(DOCTRINES))
    return P, draw(st.integers(1, 2)), draw(st.integers(1, 2))


@given(doctrine_and_sizes(), st.data())
def test_exists_is_left_adjoint_to_weakening(pab, data):
    P, a, b = pab
    alpha = data.draw(preds(P, a * b))
    beta = data.draw(preds(P, a))
    pr = C.proj(a, b, 0)
    Fa, Fab = P.fiber(a), P.fiber(a * b)
    assert Fa.le(P.exists_pr(a, b, alpha), beta) == Fab.le(alpha, P.reindex(pr, beta))


@given(doctrine_and_sizes(), st.data())
def test_forall_is_right_adjoint_to_weakening(pab, data):
    P, a, b = pab
    alpha = data.draw(preds(P, a * b))
    beta = data.draw(preds(P, a))
    pr = C.proj(a, b, 0)
    Fa, Fab = P.fiber(a), P.fiber(a * b)
    assert Fa.le(beta, P.forall_pr(a, b, alpha)) == Fab.le(P.reindex(pr, beta), alpha)


@given(st.sampled_from(DOCTRINES), st.data())
def test_reindexing_preserves_meets(P, data):
    f = Mor(2, 3, tuple(data.draw(st.lists(st.integers(0, 2), min_size=2, max_size=2))))
    x, y = data.draw(preds(P, 3)), data.draw(preds(P, 3))
    assert P.reindex(f, P.fiber(3).meet(x, y)) == P.fiber(2).meet(P.reindex(f, x), P.reindex(f, y))


def _is_equivalence_table(H, n, rho):
    top = H.top
    return (
        all(rho[i * n + i] == top for i in range(n))
        and all(rho[i * n + j] == rho[j * n + i] for i in range(n) for j in range(n))
        and all(
            H.le(H.meet(rho[i * n + j], rho[j * n + k]), rho[i * n + k])
            for i in range(n)
            for j in range(n)
            for k in range(n)
        )
    )


@given(st.sampled_from(DOCTRINES), st.data())
def test_equivalence_test_matches_tables(P, data):
    rho = data.draw(preds(P, 9))
    assert D.is_equivalence(P, 3, rho) == _is_equivalence_table(P.H, 3, rho)


def test_equivalence_relation_counts():
    # independent count by brute force over all tables
    for P in DOCTRINES:
        for n in range(4):
            brute = sum(
                _is_equivalence_table(P.H, n, rho) for rho in itertools.product(P.H.elements(), repeat=n * n)
            )
            assert len(D.equivalence_relations(P, n)) == brute
    assert [len(D.equivalence_relations(PH, n)) for n in range(4)] == [1, 1, 3, 12]
    assert [len(D.equivalence_relations(P2, n)) for n in range(4)] == [1, 1, 2, 5]


@given(st.sampled_from(DOCTRINES), st.lists(st.integers(0, 2), min_size=0, max_size=3))
def test_factorization_is_surj_then_inj(P, table):
    f = Mor(len(table), 3, tuple(table))
    e, m = D.factorize(P, f)
    assert C.compose(m, e) == f
    assert D.is_surjP(P, e) and D.is_injP(P, m)


def test_inj_and_surj_are_injective_and_surjective_functions():
    for f in C.hom(2, 2) + C.hom(1, 2) + C.hom(2, 1):
        assert D.is_injP(P2, f) == (len(set(f.data)) == len(f.data))
        assert D.is_surjP(P2, f) == (set(f.data) == set(range(f.dst)))


BOOLEAN_HOLDS = [
    "primary",
    "elementary",
    "existential",
    "universal",
    "implicational",
    "disjunctive",
    "first_order",
    "strong_classifier",
    "power_objects",
    "comprehension_full",
    "comprehensive_diagonals",
    "RUC",
    "RC",
    "boolean",
]


@pytest.mark.parametrize("prop", BOOLEAN_HOLDS)
def test_boolean_power_doctrine(prop):
    assert D.verify(P2, prop, Fragment(cap=2)).holds


@pytest.mark.parametrize("prop", ["elementary", "existential", "first_order", "power_objects", "comprehension_strong"])
def test_chain_power_doctrine_holds(prop):
    assert D.verify(PH, prop, Fragment(cap=2)).holds


def test_chain_comprehension_is_not_full():
    r = D.verify(PH, "comprehension_full", Fragment(cap=2))
    assert r.fails
    cex = r.counterexample
    # same comprehension, yet alpha is not below the other predicate
    assert PH.comprehension(cex["object"], cex["alpha"]) == PH.comprehension(cex["object"], cex["other"])
    assert not PH.fiber(cex["object"]).le(cex["alpha"], cex["other"])


def test_chain_is_not_boolean():
    r = D.verify(PH, "boolean", Fragment(cap=1))
    assert r.fails
    h = PH.H.index("h")
    assert r.counterexample["alpha"] == (h,)
    assert r.counterexample["alpha_or_not_alpha"] == (h,)


def test_missing_capability_is_reported():
    L = lattice.InfSemilattice(["0", "1"], [[1, 1], [0, 1]])
    S = SubDoctrine(L)
    r = D.verify(S, "power_objects", Fragment())
    assert r.fails


def test_unknown_property():
    with pytest.raises(ValueError):
        D.verify(P2, "nonsense")
