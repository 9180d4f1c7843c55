"""Laws of the finite lattices used as truth values.

Heyting and frame laws are checked by hypothesis over the named lattices and
over random chains; the tabulated operations must agree with the order table.
"""

import pytest
from hypothesis import given, strategies as st

from eqcomp import lattice
from eqcomp.kernel import CategoryError

FRAMES = [lattice.boolean(), lattice.h3(), lattice.powerset_lattice(2), lattice.chain(["a", "b", "c", "d"])]


def elems(L):
    return st.sampled_from(list(L.elements()))


@st.composite
def lattice_and_three(draw):
    L = draw(st.sampled_from(FRAMES))
    return L, draw(elems(L)), draw(elems(L)), draw(elems(L))


@given(lattice_and_three())
def test_meet_is_greatest_lower_bound(data):
    L, x, y, z = data
    m = L.meet(x, y)
    assert L.le(m, x) and L.le(m, y)
    assert L.le(z, m) == (L.le(z, x) and L.le(z, y))


@given(lattice_and_three())
def test_join_is_least_upper_bound(data):
    L, x, y, z = data
    j = L.join(x, y)
    assert L.le(x, j) and L.le(y, j)
    assert L.le(j, z) == (L.le(x, z) and L.le(y, z))


@given(lattice_and_three())
def test_implication_is_right_adjoint_to_meet(data):
    L, x, y, z = data
    assert L.le(L.meet(z, x), y) == L.le(z, L.imp(x, y))


@given(lattice_and_three())
def test_meet_distributes_over_join(data):
    L, x, y, z = data
    assert L.meet(x, L.join(y, z)) == L.join(L.meet(x, y), L.meet(x, z))


def test_named_lattices_are_frames():
    for L in FRAMES:
        assert L.check_frame().holds, L.name
        assert L.check_heyting().holds, L.name


def test_diamond_is_not_a_frame():
    r = lattice.m3().check_frame()
    assert r.fails
    assert r.counterexample


def test_chain_middle_is_not_complemented():
    H = lattice.h3()
    h = H.index("h")
    assert H.neg(h) == H.index("0")
    assert H.join(h, H.neg(h)) == h


def test_boolean_excluded_middle():
    B = lattice.boolean()
    for x in B.elements():
        assert B.join(x, B.neg(x)) == B.top


def test_from_order_takes_transitive_closure():
    L = lattice.InfSemilattice.from_order(["0", "a", "1"], [("0", "a"), ("a", "1")])
    assert L.le(L.index("0"), L.index("1"))
    assert L.top == L.index("1")


def test_from_order_rejects_unknown_element():
    with pytest.raises(CategoryError):
        lattice.InfSemilattice.from_order(["0", "1"], [("0", "x")])


def test_missing_top_is_rejected():
    # two incomparable maximal elements
    with pytest.raises(CategoryError):
        lattice.InfSemilattice(["a", "b"], [[1, 0], [0, 1]])


def test_power_fiber_is_pointwise():
    H = lattice.h3()
    F = lattice.PowerFiber(H, 2)
    assert F.size() == 9
    assert F.meet((2, 1), (1, 2)) == (1, 1)
    assert F.join((0, 1), (1, 0)) == (1, 1)
    assert F.imp((2, 1), (1, 1)) == (1, 2)
