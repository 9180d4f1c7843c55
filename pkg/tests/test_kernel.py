"""Finite categories: FinSet, presented categories and their chosen structure.

Category laws and universal properties are checked exhaustively on small
fragments; composition of random functions is a hypothesis property.
"""

import pytest
from hypothesis import given, strategies as st

from eqcomp import lattice, oracle as O
from eqcomp.kernel import (
    FinSet,
    Fragment,
    Mor,
    PresentedCategory,
    PropertyReport,
    ValidationError,
    check_category_laws,
    poset_category,
    to_jsonable,
)

C = FinSet()


@st.composite
def three_composable(draw):
    a, b, c, d = (draw(st.integers(0, 3)) for _ in range(4))
    b = max(b, 1) if a else b
    c = max(c, 1) if b else c
    d = max(d, 1) if c else d

    def fn(n, m):
        return Mor(n, m, tuple(draw(st.lists(st.integers(0, m - 1), min_size=n, max_size=n)) if m else ()))

    return fn(a, b), fn(b, c), fn(c, d)


@given(three_composable())
def test_finset_composition_is_associative(fgh):
    f, g, h = fgh
    assert C.compose(h, C.compose(g, f)) == C.compose(C.compose(h, g), f)
    assert C.compose(f, C.identity(f.src)) == f == C.compose(C.identity(f.dst), f)


def test_finset_laws_on_fragment():
    assert check_category_laws(C, Fragment(cap=2)).holds


def test_finset_hom_sizes():
    assert [len(C.hom(a, b)) for a in range(3) for b in range(3)] == [1, 1, 1, 0, 1, 2, 0, 1, 4]


@pytest.mark.parametrize("a,b", [(0, 2), (1, 2), (2, 2), (2, 1)])
def test_finset_products_are_universal(a, b):
    assert O.check_universal(C, C.product(a, b), Fragment(cap=2)).holds


def test_finset_pullbacks_and_coproducts_are_universal():
    frag = Fragment(cap=2)
    f, g = Mor(2, 2, (0, 0)), Mor(1, 2, (0,))
    assert O.check_universal(C, C.pullback(f, g), frag).holds
    assert O.check_universal(C, C.coproduct(1, 2), frag).holds


def test_finset_iso():
    assert C.is_iso(Mor(2, 2, (1, 0))) == Mor(2, 2, (1, 0))
    assert C.is_iso(Mor(2, 2, (0, 0))) is None


def _two_object():
    # 0 carries an idempotent e; 1 is terminal
    arrows = {"i0": ("0", "0"), "i1": ("1", "1"), "u": ("0", "1"), "e": ("0", "0")}
    ids = {"0": "i0", "1": "i1"}
    comp = {
        ("i0", "i0"): "i0",
        ("i1", "i1"): "i1",
        ("u", "i0"): "u",
        ("i1", "u"): "u",
        ("u", "e"): "u",
        ("e", "i0"): "e",
        ("i0", "e"): "e",
        ("e", "e"): "e",
    }
    return PresentedCategory("two", ["0", "1"], arrows, ids, comp, "1")


def test_presented_category_loads():
    P = _two_object()
    assert check_category_laws(P, Fragment()).holds
    assert [f.data for f in P.hom("0", "0")] == ["i0", "e"]


def test_presented_category_rejects_non_associative_table():
    # (a∘a)∘a = b∘a = b but a∘(a∘a) = a∘b = a
    arrows = {"i": ("x", "x"), "a": ("x", "x"), "b": ("x", "x")}
    comp = {("i", "i"): "i", ("i", "a"): "a", ("a", "i"): "a", ("i", "b"): "b", ("b", "i"): "b"}
    comp.update({("a", "a"): "b", ("a", "b"): "a", ("b", "a"): "b", ("b", "b"): "b"})
    with pytest.raises(ValidationError, match=r"not associative on the triple \(\w, \w, \w\)"):
        PresentedCategory("bad", ["x"], arrows, {"x": "i"}, comp, "x")


def test_empty_category_is_rejected():
    with pytest.raises(ValidationError, match="empty"):
        PresentedCategory("none", [], {}, {}, {}, None)


def test_poset_category_products_are_meets():
    P = poset_category(lattice.h3())
    assert check_category_laws(P, Fragment()).holds
    assert P.product("h", "1").carrier == "h"
    assert O.check_universal(P, P.product("h", "1"), Fragment()).holds


def test_failing_report_needs_counterexample():
    with pytest.raises(ValueError):
        PropertyReport("x", "fails")


def test_to_jsonable_unwraps_arrows():
    assert to_jsonable(Mor(1, 2, (1,))) == {"src": 1, "dst": 2, "data": [1]}
