"""Colimits, exponentials, closures and reflections in the quotient completion.

The equivalence closure is checked against a max-min transitive closure
computed straight from the tables.  Universal properties go through the
brute-force oracle; every seeded wrong witness must be rejected.
"""

import itertools

import pytest
from hypothesis import given, settings, strategies as st

from eqcomp import doctrine as D, lattice, oracle as O
from eqcomp import constructions as K
from eqcomp.completions import EqcObject, eqc
from eqcomp.corpus import PowerDoctrine
from eqcomp.kernel import Fragment

P2 = PowerDoctrine(lattice.boolean())
PH = PowerDoctrine(lattice.h3())
Q2, QH = eqc(P2), eqc(PH)
FRAG = Fragment(cap=2)


def max_min_closure(n, rho, top):
    """Least reflexive, symmetric, max-min transitive table above rho (truth values form a chain)."""
    r = [max(rho[i * n + j], rho[j * n + i]) for i in range(n) for j in range(n)]
    for i in range(n):
        r[i * n + i] = top
    changed = True
    while changed:
        changed = False
        for i, j, k in itertools.product(range(n), repeat=3):
            v = min(r[i * n + j], r[j * n + k])
            if v > r[i * n + k]:
                r[i * n + k] = v
                changed = True
    return tuple(r)


@given(st.sampled_from([P2, PH]), st.data())
def test_closure_is_max_min_closure(P, data):
    rho = data.draw(st.tuples(*[st.sampled_from(list(P.H.elements()))] * 9))
    assert K.equiv_closure(P, 3, rho) == max_min_closure(3, rho, P.H.top)


@settings(max_examples=20, deadline=None)
@given(st.sampled_from([P2, PH]), st.data())
def test_closure_strategies_agree(P, data):
    rho = data.draw(st.tuples(*[st.sampled_from(list(P.H.elements()))] * 4))
    assert K.equiv_closure(P, 2, rho, "fixpoint") == K.equiv_closure(P, 2, rho, "tripos")


def test_closure_passes_its_check():
    for rho in PH.fiber(4).elements():
        assert K.check_closure(PH, 2, rho, K.equiv_closure(PH, 2, rho)).holds
    big = Fragment(budget=20000)
    for rho in [(0,) * 9, (0, 1, 0, 0, 0, 2, 0, 0, 0), (2, 1, 0, 1, 2, 0, 0, 0, 2)]:
        assert K.check_closure(PH, 3, rho, K.equiv_closure(PH, 3, rho), big).holds


@pytest.mark.parametrize("Q", [Q2, QH], ids=["two", "chain"])
def test_coproducts(Q):
    assert K.check_coproducts(Q, FRAG).holds


def test_coequalizers_are_universal():
    B = Q2.base
    objs = B.objects(FRAG)
    n = 0
    for x, y in itertools.product(objs, repeat=2):
        for f, g in itertools.product(B.hom(x, y), repeat=2):
            assert O.check_universal(B, K.coequalizer_eqc(B, f, g), FRAG).holds
            n += 1
    assert n == 34


@pytest.mark.parametrize("Q", [Q2, QH], ids=["two", "chain"])
def test_classifier_and_power_objects(Q):
    assert D.verify(Q, "strong_classifier", FRAG).holds
    assert D.verify(Q, "power_objects", FRAG).holds


def test_slice_exponentials_sample():
    B = QH.base
    objs = B.objects(Fragment(cap=1))
    target = objs[-1]
    arrows = [f for x in objs for f in B.hom(x, target)]
    for f, g in itertools.product(arrows, repeat=2):
        data = K.slice_exponential(B, f, g)
        assert K.check_slice_exponential(B, data.exponential, Fragment(cap=1)).holds
        assert K.check_slice_iso(B, f, data.f_iso) and K.check_slice_iso(B, g, data.g_iso)


def test_quasitopos_two():
    reports = K.check_quasitopos(Q2, FRAG)
    assert all(r.holds for r in reports.values()), {k: r.counterexample for k, r in reports.items()}


def test_coarse_reflection_two():
    reports = K.check_coarse_reflection(Q2, FRAG)
    assert all(r.holds for r in reports.values())
    comps = K.check_coarse_comparisons(Q2, FRAG)
    assert comps["coarse_vs_functional"].holds and comps["base_vs_coarse"].holds


def test_coarse_objects_of_chain_are_not_just_sets():
    comps = K.check_coarse_comparisons(QH, FRAG)
    assert comps["coarse_vs_functional"].holds
    assert comps["base_vs_coarse"].fails


def test_projective_core_two():
    core = K.projective_core(Q2, FRAG)
    assert core.verdict.holds
    assert all(p.rel == P2.delta(p.base) for p in core.candidates)


def test_distributivity_map_is_iso():
    B = Q2.base
    x, y, z = B.objects(FRAG)[1:4]
    d = K.distributivity_map(B.C, x.base, y.base, z.base)
    assert B.C.is_iso(d) is not None


# ---------------------------------------------------------------- seeded mutants


@pytest.mark.parametrize("seed", range(3))
def test_bad_pairing_rejected(seed):
    C = P2.base
    r = O.check_universal(C, K.mutant_pairing(C, 2, 2, seed), FRAG)
    assert r.fails and r.counterexample["reason"]


@pytest.mark.parametrize("Q", [Q2, QH], ids=["two", "chain"])
def test_bad_lambda_rejected(Q):
    r = D.verify(K.mutant_lambda(Q), "strong_classifier", FRAG)
    assert r.fails


@pytest.mark.parametrize("Q", [Q2, QH], ids=["two", "chain"])
def test_bad_coproduct_rejected(Q):
    B = Q.base
    objs = B.objects(FRAG)
    pairs = itertools.product(objs[1:3], repeat=2)
    results = [O.check_universal(B, K.mutant_coproduct(B, x, y), FRAG) for x, y in pairs]
    assert any(r.fails for r in results)


@pytest.mark.parametrize("P", [P2, PH], ids=["two", "chain"])
def test_bad_closure_rejected_whenever_it_differs(P):
    differing = 0
    for rho in P.fiber(9).elements():
        bad = K.mutant_closure(P, 3, rho)
        if bad != K.equiv_closure(P, 3, rho):
            differing += 1
            assert K.check_closure(P, 3, rho, bad).fails
    assert differing > 0


def test_bad_closure_invisible_on_two_points():
    # on two points the reflexive-symmetric hull is already transitive
    for rho in PH.fiber(4).elements():
        assert K.mutant_closure(PH, 2, rho) == K.equiv_closure(PH, 2, rho)


def test_eqc_objects_are_hashable_and_ordered_by_base():
    objs = QH.base.objects(FRAG)
    assert [o.base for o in objs] == [0, 1, 2, 2, 2]
    assert len(set(objs)) == len(objs)
    assert EqcObject(2, (2, 1, 1, 2)) in objs
