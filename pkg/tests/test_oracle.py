"""The brute-force oracles must accept correct witnesses and reject wrong ones."""

import pytest

from eqcomp import lattice, oracle as O
from eqcomp.kernel import FinSet, Fragment, Functor, Mor, StructureWitness

C = FinSet()
FRAG = Fragment(cap=2)


def test_galois_connection_between_chains():
    H = lattice.h3()
    # x ∧ h ≤ y  iff  x ≤ h ⇒ y
    h = H.index("h")
    r = O.check_adjunction(lambda x: H.meet(x, h), lambda y: H.imp(h, y), H, H)
    assert r.holds


def test_non_adjoint_pair_is_rejected():
    H = lattice.h3()
    r = O.check_adjunction(lambda x: x, lambda y: H.top, H, H)
    assert r.fails
    assert r.counterexample["law"] == "galois"


def test_large_adjunction_uses_unit_and_counit():
    L = lattice.powerset_lattice(2)
    r = O.check_adjunction(lambda x: x, lambda y: y, L, L, pairwise_limit=1)
    assert r.holds


def test_product_with_swapped_legs_is_rejected():
    w = C.product(2, 1)
    bad = StructureWitness("product", w.carrier, w.legs, lambda f, g: Mor(f.src, w.carrier, tuple(1 - v for v in w.mediate(f, g).data)))
    assert O.check_universal(C, bad, FRAG).fails


def test_terminal_and_initial():
    assert O.check_universal(C, C.terminal(), FRAG).holds
    assert O.check_universal(C, C.initial(), FRAG).holds


def test_find_iso_and_classes():
    assert O.find_iso(C, 2, 2) is not None
    assert O.find_iso(C, 1, 2) is None
    assert [len(c) for c in O.iso_classes(C, FRAG)] == [1, 1, 1]


def test_constant_functor_is_not_faithful():
    F = Functor(C, C, lambda a: 1, lambda f: Mor(1, 1, (0,)), name="const")
    assert O.check_functor(F, FRAG).holds
    reports = O.check_equivalence(F, FRAG)
    assert reports["faithful"].fails
    assert reports["essentially_surjective"].fails


def test_identity_functor_is_an_equivalence():
    F = Functor(C, C, lambda a: a, lambda f: f, name="id")
    assert all(r.holds for r in O.check_equivalence(F, FRAG).values())


def test_broken_functor_is_rejected():
    F = Functor(C, C, lambda a: a, lambda f: Mor(f.src, f.dst, tuple(0 for _ in f.data)) if f.dst else f, name="zero")
    r = O.check_functor(F, FRAG)
    assert r.fails


@pytest.mark.parametrize("a,b", [(1, 2), (2, 2)])
def test_commutes(a, b):
    w = C.product(a, b)
    f, g = C.hom(1, a)[0], C.hom(1, b)[-1]
    h = w.mediate(f, g)
    assert O.commutes(C, (w.legs[0], h), (f,))
