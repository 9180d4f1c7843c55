"""Topologies on power doctrines, closed subdoctrines and adjoint retractions.

Double negation is compared with the pointwise operation on the truth
values.  The canonical topology comes from the retraction onto weak
subobjects and is lifted to the quotient completions.
"""

import itertools

import pytest
from hypothesis import given, strategies as st

from eqcomp import doctrine as D, lattice
from eqcomp import topology as T
from eqcomp.completions import EqcObject, eqc
from eqcomp.corpus import PowerDoctrine
from eqcomp.kernel import Fragment

P2 = PowerDoctrine(lattice.boolean())
PH = PowerDoctrine(lattice.h3())
FRAG = Fragment(cap=2)


@pytest.mark.parametrize("P", [P2, PH], ids=["two", "chain"])
@pytest.mark.parametrize("make", [T.identity_topology, T.top_topology, T.double_negation])
def test_standard_topologies(P, make):
    assert make(P).check(FRAG)["topology"].holds


PAIRS = st.tuples(st.sampled_from([0, 1, 2]), st.sampled_from([0, 1, 2]))


@given(PAIRS, PAIRS)
def test_double_negation_is_pointwise(alpha, beta):
    H = PH.H
    j = T.double_negation(PH)
    assert j(2, alpha) == tuple(H.neg(H.neg(v)) for v in alpha)
    F = PH.fiber(2)
    assert F.le(alpha, j(2, alpha))
    assert j(2, j(2, alpha)) == j(2, alpha)
    assert j(2, F.meet(alpha, beta)) == F.meet(j(2, alpha), j(2, beta))


def test_non_idempotent_table_is_rejected():
    # on one point: 0 -> h -> 1 is extensive and monotone but not idempotent
    table = {n: {} for n in range(3)}
    step = {0: 1, 1: 2, 2: 2}
    for n in range(3):
        for alpha in itertools.product(range(3), repeat=n):
            table[n][alpha] = tuple(step[v] for v in alpha)
    j = T.from_tables(PH, table, name="step")
    report = j.check(FRAG)
    assert report["idempotent"].fails
    with pytest.raises(T.TopologyError):
        j.validate(FRAG)


def test_closed_chain_predicates_form_a_boolean_doctrine():
    Pj = T.closed_subdoctrine(PH, T.double_negation(PH), FRAG)
    assert [Pj.fiber(n).size() for n in range(3)] == [1, 2, 4]
    for prop in ["elementary", "existential", "universal", "implicational", "boolean", "power_objects"]:
        assert D.verify(Pj, prop, FRAG).holds, prop
    assert D.verify(Pj, "weak_classifier", FRAG).holds
    assert D.verify(Pj, "strong_classifier", FRAG).fails


def test_boolean_and_double_negation_agree():
    for P in (P2, PH):
        reports = T.check_boolean_double_negation(P, FRAG)
        assert reports["agree"].holds


def test_two_is_a_retract_of_weak_subobjects():
    ar = T.weak_subobject_retraction(P2)
    assert ar.check(FRAG)["adjoint_retraction"].holds
    assert ar.check_closed_iso(FRAG).holds


def test_chain_is_not_a_retract_of_weak_subobjects():
    ar = T.weak_subobject_retraction(PH)
    r = ar.check(FRAG)["adjoint_retraction"]
    assert r.fails


def test_canonical_topology_is_a_topology():
    j = T.canonical_topology(P2)
    assert j.check(FRAG)["topology"].holds


def test_lifted_retraction_is_reflective():
    ar = T.canonical_topology(P2).retraction
    reports = T.check_lifted_adjunction(ar, FRAG)
    assert all(r.holds for r in reports.values()), {k: r.counterexample for k, r in reports.items()}
    assert all(r.holds for r in T.check_separated(ar, FRAG).values())


def test_separated_objects_under_double_negation():
    Q = eqc(PH)
    j = T.extend_to_eqc(T.double_negation(PH), Q)
    seps = {x.rel: T.is_separated(Q, x, j) for x in Q.base.objects(FRAG) if x.base == 2}
    # the h-valued relation is not closed; the crisp ones are
    assert seps == {(2, 0, 0, 2): True, (2, 1, 1, 2): False, (2, 2, 2, 2): True}
    assert T.is_separated(Q, EqcObject(2, (2, 2, 2, 2)), j)
