"""Corpus doctrines and the directly built categories of H-valued sets.

Object counts of the H-set categories are compared with counts taken straight
from the defining conditions, and the image-based fibers of weak subobjects
over finite sets agree with the generic factorization order.
"""

import itertools

import pytest
from hypothesis import given, settings, strategies as st

from eqcomp import doctrine as D, lattice, oracle as O
from eqcomp.completions import comprehension_completion, eqc
from eqcomp.corpus import (
    CorpusSpec,
    FuzCategory,
    PowerDoctrine,
    PresentedDoctrine,
    SeparatedHSets,
    SubDoctrine,
    UMCategory,
    WeakSubobjects,
    build,
    fuz_to_comprehension,
    separated_to_eqc,
    um_to_eqc,
)
from eqcomp.kernel import FinSet, Fragment, Mor, ValidationError, check_category_laws, poset_category

H = lattice.h3()
FRAG = Fragment(cap=2)


def _tables(n):
    return itertools.product(H.elements(), repeat=n * n)


def _sym_trans(n, d):
    return all(d[i * n + j] == d[j * n + i] for i in range(n) for j in range(n)) and all(
        H.le(H.meet(d[i * n + j], d[j * n + k]), d[i * n + k]) for i in range(n) for j in range(n) for k in range(n)
    )


def test_um_object_count():
    want = sum(
        1
        for n in range(3)
        for d in _tables(n)
        if _sym_trans(n, d) and all((d[i * n + j] == H.top) == (i == j) for i in range(n) for j in range(n))
    )
    assert len(UMCategory(H).objects(FRAG)) == want


def test_separated_object_count():
    def separated(n, d):
        return all(i == j or not (d[i * n + j] == d[i * n + i] == d[j * n + j]) for i in range(n) for j in range(n))

    want = sum(1 for n in range(3) for d in _tables(n) if _sym_trans(n, d) and separated(n, d))
    assert len(SeparatedHSets(H).objects(FRAG)) == want == 15


def test_fuz_object_count():
    assert len(FuzCategory(H).objects(FRAG)) == 1 + 3 + 9


@pytest.mark.parametrize("make", [FuzCategory, UMCategory, SeparatedHSets])
def test_hset_categories_are_categories(make):
    assert check_category_laws(make(H), Fragment(cap=1)).holds


def test_fuzzy_set_comparisons_are_equivalences():
    P = PowerDoctrine(H)
    Cc = comprehension_completion(P)
    assert O.check_equivalence(um_to_eqc(UMCategory(H), eqc(P)), FRAG)["equivalence"].holds
    assert O.check_equivalence(fuz_to_comprehension(FuzCategory(H), Cc), FRAG)["equivalence"].holds
    assert O.check_equivalence(separated_to_eqc(SeparatedHSets(H), eqc(Cc)), FRAG)["equivalence"].holds


def _generic_psi():
    Psi = WeakSubobjects(FinSet())
    Psi._finset = False  # force the factorization search
    return Psi


@settings(max_examples=40, deadline=None)
@given(st.data())
def test_image_fibers_agree_with_factorization_order(data):
    fast, slow = WeakSubobjects(FinSet()).fiber(2), _generic_psi().fiber(2)
    img = {frozenset(v.data): v for v in fast.elements()}
    assert {frozenset(v.data) for v in slow.elements()} == set(img)
    xs = list(slow.elements())
    x, y = data.draw(st.sampled_from(xs)), data.draw(st.sampled_from(xs))
    fx, fy = img[frozenset(x.data)], img[frozenset(y.data)]
    assert fast.le(fx, fy) == slow.le(x, y)
    assert set(fast.meet(fx, fy).data) == set(slow.meet(x, y).data)
    assert set(fast.join(fx, fy).data) == set(slow.join(x, y).data)
    assert set(fast.imp(fx, fy).data) == set(slow.imp(x, y).data)


def test_weak_subobjects_over_finset():
    Psi = WeakSubobjects(FinSet())
    assert Psi.fiber(2).size() == 4
    for prop in ["elementary", "existential", "universal"]:
        assert D.verify(Psi, prop, Fragment(cap=2)).holds, prop


def test_subobjects_of_a_frame():
    S = SubDoctrine(H)
    assert D.verify(S, "primary", Fragment()).holds


def test_presented_doctrine_requires_every_fiber():
    C = poset_category(lattice.boolean())
    with pytest.raises(ValidationError, match="no fiber"):
        PresentedDoctrine("half", C, {"1": lattice.boolean()}, {})


def test_presented_doctrine_over_a_point():
    C = poset_category(lattice.chain(["*"]))
    B = lattice.boolean()
    P = PresentedDoctrine("point", C, {"*": B}, {}, {"*": "1"}, existential=True, universal=True)
    assert D.verify(P, "primary", Fragment()).holds
    assert D.verify(P, "existential", Fragment()).holds


def test_build_families():
    assert isinstance(build(CorpusSpec("powerdoctrine", "H3")), PowerDoctrine)
    assert isinstance(build(CorpusSpec("fuz", "2")), FuzCategory)
    with pytest.raises(ValidationError):
        build(CorpusSpec("nothing"))
    with pytest.raises(ValidationError):
        build(CorpusSpec("powerdoctrine", lattice.m3(), params={"require_frame": True}))


def test_predicate_helper():
    P = PowerDoctrine(H)
    assert P.pred("1", "h") == (2, 1)
    assert P.comprehension(2, P.pred("1", "h")) == P.comprehension(2, P.pred("1", "0")) == Mor(1, 2, (0,))
