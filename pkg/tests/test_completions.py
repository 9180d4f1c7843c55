"""Quotient, intensional, collapse, comprehension and functional completions.

Hom-set sizes of the quotient completion are compared with a direct count of
relation-preserving functions modulo the target relation.  The fast
canonicalization paths are checked against the enumerating definitions.
"""

import itertools

import pytest
from hypothesis import given, settings, strategies as st

from eqcomp import doctrine as D, lattice, oracle as O
from eqcomp.completions import (
    EqcObject,
    collapse_of_intensional,
    comprehension_completion,
    embed_nabla,
    eqc,
    extensional_collapse,
    functional_completion,
    graph_functor,
    intensional_qc,
    quotients_of_collapse,
)
from eqcomp.corpus import PowerDoctrine
from eqcomp.kernel import Fragment, Mor, TypeMismatch, check_category_laws

P2 = PowerDoctrine(lattice.boolean())
PH = PowerDoctrine(lattice.h3())
FRAG = Fragment(cap=2)


def _classes(H, x, y):
    """Relation-preserving functions x → y, counted up to y-equality at every point."""
    n, m = x.base, y.base
    rho, sigma = x.rel, y.rel
    good = [
        f
        for f in itertools.product(range(m), repeat=n)
        if all(H.le(rho[a * n + b], sigma[f[a] * m + f[b]]) for a in range(n) for b in range(n))
    ]
    reps = []
    for f in good:
        if not any(all(sigma[f[a] * m + g[a]] == H.top for a in range(n)) for g in reps):
            reps.append(f)
    return len(good), len(reps)


@pytest.mark.parametrize("P", [P2, PH], ids=["two", "chain"])
def test_hom_sizes_match_direct_count(P):
    Q, I = eqc(P), intensional_qc(P)
    objs = Q.base.objects(FRAG)
    assert len(objs) == {2: 4, 3: 5}[P.H.size()]
    for x in objs:
        for y in objs:
            raw, classes = _classes(P.H, x, y)
            assert len(Q.base.hom(x, y)) == classes
            assert len(I.base.hom(x, y)) == raw


def test_chain_hom_table():
    B = eqc(PH).base
    objs = B.objects(FRAG)
    table = [[len(B.hom(x, y)) for y in objs] for x in objs]
    assert table == [[1, 1, 1, 1, 1], [0, 1, 2, 2, 1], [0, 1, 4, 4, 1], [0, 1, 2, 4, 1], [0, 1, 2, 2, 1]]


@pytest.mark.parametrize("P", [P2, PH], ids=["two", "chain"])
def test_completion_is_a_category(P):
    assert check_category_laws(eqc(P).base, Fragment(cap=2)).holds


def test_arrow_must_preserve_relations():
    B = eqc(PH).base
    x = EqcObject(2, (2, 1, 1, 2))
    y = EqcObject(2, (2, 0, 0, 2))
    with pytest.raises(TypeMismatch):
        B.arrow(x, y, Mor(2, 2, (0, 1)))


@pytest.mark.parametrize("prop", ["quotients_effective", "quotients_stable", "quotients_descent", "elementary"])
def test_quotients_in_completion(prop):
    assert D.verify(eqc(PH), prop, FRAG).holds


def test_chain_quotients_not_effective_before_completion():
    assert D.verify(PH, "quotients_effective", FRAG).fails


def test_quotient_arrow_recovers_relation():
    Q = eqc(PH)
    x = EqcObject(2, PH.delta(2))
    sigma = (2, 1, 1, 2)
    q = Q.quotient(x, sigma)
    C = PH.base
    assert PH.reindex(C.times(q.data, q.data), sigma) == sigma


@pytest.mark.parametrize("P", [P2, PH], ids=["two", "chain"])
def test_collapse_fast_path_matches_definition(P):
    I = intensional_qc(P)
    for inner in (P, I):
        E = extensional_collapse(inner)
        B = E.base
        for a in inner.base.objects(Fragment(cap=2)):
            for b in inner.base.objects(Fragment(cap=2)):
                hs = inner.base.hom(a, b)
                for f, g in itertools.product(hs, repeat=2):
                    assert (B.canon(f) == B.canon(g)) == B.equal(a, b, f, g)


@pytest.mark.parametrize("P", [P2, PH], ids=["two", "chain"])
def test_decomposition_equivalences(P):
    Q = eqc(P)
    assert O.check_equivalence(collapse_of_intensional(P, Q), FRAG)["equivalence"].holds
    assert O.check_equivalence(quotients_of_collapse(P, Q), FRAG)["equivalence"].holds


def test_nabla_is_a_doctrine_morphism():
    m = embed_nabla(PH)
    assert m.check(Fragment(cap=2)).holds


def test_comprehension_completion_makes_comprehension_full():
    Cc = comprehension_completion(PH)
    assert D.verify(Cc, "comprehension_full", Fragment(cap=1)).holds
    assert D.verify(Cc, "comprehension_strong", Fragment(cap=1)).holds


def test_functional_completion_graph_is_a_functor():
    F = functional_completion(P2)
    assert O.check_functor(graph_functor(F), Fragment(cap=2)).holds


@settings(max_examples=30, deadline=None)
@given(st.data())
def test_composition_respects_classes(data):
    B = eqc(PH).base
    objs = B.objects(FRAG)
    x, y, z = (data.draw(st.sampled_from(objs)) for _ in range(3))
    fs, gs = B.hom(x, y), B.hom(y, z)
    if not fs or not gs:
        return
    f, g = data.draw(st.sampled_from(fs)), data.draw(st.sampled_from(gs))
    # composing any representatives lands in the class of the composite
    raw = PH.base.compose(g.data, f.data)
    assert B.arrow(x, z, raw) == B.compose(g, f)
