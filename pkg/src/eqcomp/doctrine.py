"""Doctrines: indexed inf-semilattices over a base category.

A ``Doctrine`` hands out a fiber for every object and reindexes along arrows.
Logical structure is layered as optional capabilities; a method whose
capability is absent raises ``MissingCapability``.  The derived adjoints
along arbitrary arrows (``exists_along`` and ``forall_along``) are computed
from equality and the adjoints along projections, and ``verify`` checks the
advertised structure on a fragment by enumeration.
"""

from __future__ import annotations

import itertools
from typing import Callable

from . import oracle
from .kernel import (
    Category,
    TypeMismatch,
    Fragment,
    MissingCapability,
    Mor,
    PropertyReport,
    Tally,
    combine,
)

CAPABILITIES = (
    "elementary",
    "existential",
    "universal",
    "implicational",
    "disjunctive",
    "comprehension",
    "classifier",
    "power_objects",
    "quotients",
)


class Doctrine:
    """Base class; subclasses fill in the fibers and whichever capabilities they have."""

    name = "doctrine"
    base: Category
    capabilities: frozenset = frozenset()

    def fiber(self, a):
        raise NotImplementedError

    def reindex(self, f: Mor, alpha):
        raise NotImplementedError

    def has(self, cap: str) -> bool:
        return cap in self.capabilities

    def require(self, cap: str):
        if cap not in self.capabilities:
            raise MissingCapability(cap, self.name)

    # -- elementary
    def delta(self, a):
        raise MissingCapability("elementary", self.name)

    # -- adjoints along product projections; leg 0 quantifies out the second factor
    def exists_pr(self, a, b, alpha, leg: int = 0):
        raise MissingCapability("existential", self.name)

    def forall_pr(self, a, b, alpha, leg: int = 0):
        raise MissingCapability("universal", self.name)

    # -- comprehension
    def comprehension(self, a, alpha) -> Mor:
        raise MissingCapability("comprehension", self.name)

    def comprehension_lift(self, a, alpha, g: Mor) -> Mor:
        """An arrow h with {|alpha|}∘h = g (found by search unless overridden)."""
        m = self.comprehension(a, alpha)
        C = self.base
        for h in C.hom(g.src, m.src):
            if C.compose(m, h) == g:
                return h
        raise oracle.NoMediator(f"{g!r} does not factor through the comprehension of {alpha!r}")

    # -- weak predicate classifier and weak power objects
    def classifier(self):
        raise MissingCapability("classifier", self.name)

    def classify(self, a, phi) -> Mor:
        raise MissingCapability("classifier", self.name)

    def power(self, a):
        raise MissingCapability("power_objects", self.name)

    def power_classify(self, a, b, phi) -> Mor:
        raise MissingCapability("power_objects", self.name)

    # -- quotients of equivalence relations
    def quotient(self, a, rho) -> Mor:
        raise MissingCapability("quotients", self.name)

    def __repr__(self):
        return f"<{type(self).__name__} {self.name}>"


# ---------------------------------------------------------------- helpers


def top(P: Doctrine, a):
    return P.fiber(a).top


def rel_object(P: Doctrine, a):
    """The carrier A×A on which relations over A live."""
    return P.base.product(a, a).carrier


def pull(P: Doctrine, arrows, alpha):
    """Reindex alpha along the tuple ⟨arrows⟩."""
    return P.reindex(P.base.tuple_arrow(arrows), alpha)


def exists_e(P: Doctrine, x, a, alpha):
    """E along e=⟨pr1,pr2,pr2⟩: X×A → X×A×A, from equality on A."""
    C = P.base
    xaa, (p1, p2, p3) = C.power_product([x, a, a])
    F = P.fiber(xaa)
    return F.meet(pull(P, [p1, p2], alpha), pull(P, [p2, p3], P.delta(a)))


def e_arrow(C: Category, x, a) -> Mor:
    w = C.product(x, a)
    return C.tuple_arrow([w.legs[0], w.legs[1], w.legs[1]])


def exists_along(P: Doctrine, f: Mor, alpha):
    """E_f(α) = E_pr2[P_{f×id}(δ_B) ∧ P_pr1(α)]."""
    if not P.has("elementary"):
        raise MissingCapability("elementary", P.name)
    if not P.has("existential"):
        raise MissingCapability("existential", P.name)
    C = P.base
    a, b = f.src, f.dst
    w = C.product(a, b)
    F = P.fiber(w.carrier)
    graph = P.reindex(C.times(f, C.identity(b)), P.delta(b))
    return P.exists_pr(a, b, F.meet(graph, P.reindex(w.legs[0], alpha)), leg=1)


def forall_along(P: Doctrine, f: Mor, alpha):
    """A_f(α) = A_pr2[P_{f×id}(δ_B) ⇒ P_pr1(α)]."""
    for cap in ("elementary", "universal", "implicational"):
        if not P.has(cap):
            raise MissingCapability(cap, P.name)
    C = P.base
    a, b = f.src, f.dst
    w = C.product(a, b)
    F = P.fiber(w.carrier)
    graph = P.reindex(C.times(f, C.identity(b)), P.delta(b))
    return P.forall_pr(a, b, F.imp(graph, P.reindex(w.legs[0], alpha)), leg=1)


def delta(P: Doctrine, a):
    return P.delta(a)


def comprehension(P: Doctrine, a, alpha) -> Mor:
    return P.comprehension(a, alpha)


def is_injP(P: Doctrine, f: Mor) -> bool:
    C = P.base
    return P.reindex(C.times(f, f), P.delta(f.dst)) == P.delta(f.src)


def is_surjP(P: Doctrine, f: Mor) -> bool:
    return exists_along(P, f, top(P, f.src)) == top(P, f.dst)


def factorize(P: Doctrine, f: Mor) -> tuple[Mor, Mor]:
    """f = m∘e with m the comprehension of E_f(⊤) and e the induced arrow."""
    image = exists_along(P, f, top(P, f.src))
    m = P.comprehension(f.dst, image)
    e = P.comprehension_lift(f.dst, image, f)
    return e, m


def equivalence_failure(P: Doctrine, a, rho) -> str | None:
    """Which clause of the equivalence-relation definition fails, if any."""
    C = P.base
    F2 = P.fiber(rel_object(P, a))
    if not F2.le(P.delta(a), rho):
        return "reflexive"
    if P.reindex(C.swap(a, a), rho) != rho:
        return "symmetric"
    aaa, (p1, p2, p3) = C.power_product([a, a, a])
    F3 = P.fiber(aaa)
    lhs = F3.meet(pull(P, [p1, p2], rho), pull(P, [p2, p3], rho))
    if not F3.le(lhs, pull(P, [p1, p3], rho)):
        return "transitive"
    return None


def is_equivalence(P: Doctrine, a, rho) -> bool:
    return equivalence_failure(P, a, rho) is None


def equivalence_relations(P: Doctrine, a) -> list:
    return [r for r in P.fiber(rel_object(P, a)).elements() if is_equivalence(P, a, r)]


def is_descent_datum(P: Doctrine, a, rho, alpha) -> bool:
    """P_pr1(α) ∧ ρ ≤ P_pr2(α)."""
    w = P.base.product(a, a)
    F = P.fiber(w.carrier)
    return F.le(F.meet(P.reindex(w.legs[0], alpha), rho), P.reindex(w.legs[1], alpha))


def is_boolean_fiber(F) -> bool:
    return all(F.join(x, F.neg(x)) == F.top for x in F.elements())


# ---------------------------------------------------------------- verification


def _small(F, budget: int):
    """Elements of F as a list, or None when the fiber exceeds the budget."""
    if F.size() > budget:
        return None
    return list(F.elements())


def _homs(C: Category, a, b, budget: int):
    if C.hom_size(a, b) > budget:
        return None
    return C.hom(a, b)


def check_primary(P: Doctrine, frag: Fragment) -> PropertyReport:
    t = Tally("primary")
    C = P.base
    objs = C.objects(frag)
    elems = {a: _small(P.fiber(a), frag.budget) for a in objs}
    homs = {(a, b): _homs(C, a, b, frag.budget) for a in objs for b in objs}
    for a in objs:
        if elems[a] is None:
            t.skip()
            continue
        ida = C.identity(a)
        for x in elems[a]:
            if P.reindex(ida, x) != x:
                t.fail(law="identity", object=a, alpha=x)
                return t.report()
        t.ok()
    for (a, b), fs in homs.items():
        if fs is None or elems[b] is None:
            t.skip()
            continue
        Fa, Fb = P.fiber(a), P.fiber(b)
        for f in fs:
            if P.reindex(f, Fb.top) != Fa.top:
                t.fail(law="top", f=f)
                return t.report()
            img = {x: P.reindex(f, x) for x in elems[b]}
            for x in elems[b]:
                for y in elems[b]:
                    if img[Fb.meet(x, y)] != Fa.meet(img[x], img[y]):
                        t.fail(law="meet", f=f, alpha=x, beta=y)
                        return t.report()
            t.ok()
    for a in objs:
        for b in objs:
            for c in objs:
                fs, gs = homs[a, b], homs[b, c]
                if fs is None or gs is None or elems[c] is None:
                    t.skip()
                    continue
                for f in fs:
                    for g in gs:
                        gf = C.compose(g, f)
                        for z in elems[c]:
                            if P.reindex(gf, z) != P.reindex(f, P.reindex(g, z)):
                                t.fail(law="functoriality", f=f, g=g, alpha=z)
                                return t.report()
                t.ok()
    return t.report()


def check_elementary(P: Doctrine, frag: Fragment) -> PropertyReport:
    t = Tally("elementary")
    if not P.has("elementary"):
        t.fail(reason="no fibered equality advertised")
        return t.report()
    C = P.base
    objs = C.objects(frag)
    for a in objs:
        aa = rel_object(P, a)
        F = P.fiber(aa)
        d = P.delta(a)
        if not F.contains(d):
            t.fail(reason="delta outside its fiber", object=a)
            return t.report()
        if P.reindex(C.diagonal(a), d) != top(P, a):
            t.fail(reason="delta not reflexive", object=a)
            return t.report()
        t.ok()
    for x in objs:
        for a in objs:
            xa = C.product(x, a).carrier
            xaa = C.power_product([x, a, a])[0]
            dom, cod = P.fiber(xa), P.fiber(xaa)
            if dom.size() > frag.budget or cod.size() > frag.budget:
                t.skip()
                continue
            e = e_arrow(C, x, a)
            r = oracle.check_adjunction(
                lambda al: exists_e(P, x, a, al), lambda be: P.reindex(e, be), dom, cod, name="E_e ⊣ P_e"
            )
            if r.fails:
                t.fail(X=x, A=a, **r.counterexample)
                return t.report()
            t.ok()
    return t.report()


def _projection_pairs(C: Category, objs):
    for x in objs:
        for a in objs:
            yield x, a


def check_existential(P: Doctrine, frag: Fragment) -> PropertyReport:
    t = Tally("existential")
    if not P.has("existential"):
        t.fail(reason="no existential quantifiers advertised")
        return t.report()
    C = P.base
    objs = C.objects(frag)
    for x, a in _projection_pairs(C, objs):
        w = C.product(x, a)
        Fxa = P.fiber(w.carrier)
        if Fxa.size() > frag.budget:
            t.skip()
            continue
        for leg in (0, 1):
            base_obj = (x, a)[leg]
            Fb = P.fiber(base_obj)
            pr = w.legs[leg]
            r = oracle.check_adjunction(
                lambda al: P.exists_pr(x, a, al, leg), lambda be: P.reindex(pr, be), Fxa, Fb, name="E_pr ⊣ P_pr"
            )
            if r.fails:
                t.fail(X=x, A=a, leg=leg, **r.counterexample)
                return t.report()
            # Frobenius: E_pr(P_pr α ∧ β) = α ∧ E_pr β
            bs = list(Fxa.elements())
            for al in Fb.elements():
                pa = P.reindex(pr, al)
                for be in bs:
                    lhs = P.exists_pr(x, a, Fxa.meet(pa, be), leg)
                    rhs = Fb.meet(al, P.exists_pr(x, a, be, leg))
                    if lhs != rhs:
                        t.fail(law="frobenius", X=x, A=a, leg=leg, alpha=al, beta=be)
                        return t.report()
            t.ok()
        # Beck-Chevalley along f×id (leg 0) and id×f (leg 1)
        for y in objs:
            for leg in (0, 1):
                src = (x, a)[leg]
                other = (x, a)[1 - leg]
                for f in _homs(C, y, src, frag.budget) or []:
                    if leg == 0:
                        w2 = C.product(y, other)
                        fid = C.times(f, C.identity(other))
                        bc_obj = (y, other)
                    else:
                        w2 = C.product(other, y)
                        fid = C.times(C.identity(other), f)
                        bc_obj = (other, y)
                    if P.fiber(w2.carrier).size() > frag.budget:
                        t.skip()
                        continue
                    for be in Fxa.elements():
                        lhs = P.exists_pr(*bc_obj, P.reindex(fid, be), leg)
                        rhs = P.reindex(f, P.exists_pr(x, a, be, leg))
                        if lhs != rhs:
                            t.fail(law="beck-chevalley", X=x, A=a, leg=leg, f=f, beta=be)
                            return t.report()
                    t.ok()
    return t.report()


def check_universal(P: Doctrine, frag: Fragment) -> PropertyReport:
    t = Tally("universal")
    if not P.has("universal"):
        t.fail(reason="no universal quantifiers advertised")
        return t.report()
    C = P.base
    objs = C.objects(frag)
    for x, a in _projection_pairs(C, objs):
        w = C.product(x, a)
        Fxa = P.fiber(w.carrier)
        if Fxa.size() > frag.budget:
            t.skip()
            continue
        for leg in (0, 1):
            Fb = P.fiber((x, a)[leg])
            pr = w.legs[leg]
            r = oracle.check_adjunction(
                lambda al: P.reindex(pr, al), lambda be: P.forall_pr(x, a, be, leg), Fb, Fxa, name="P_pr ⊣ A_pr"
            )
            if r.fails:
                t.fail(X=x, A=a, leg=leg, **r.counterexample)
                return t.report()
            t.ok()
        for y in objs:
            for f in _homs(C, y, x, frag.budget) or []:
                w2 = C.product(y, a)
                if P.fiber(w2.carrier).size() > frag.budget:
                    t.skip()
                    continue
                fid = C.times(f, C.identity(a))
                for be in Fxa.elements():
                    if P.forall_pr(y, a, P.reindex(fid, be), 0) != P.reindex(f, P.forall_pr(x, a, be, 0)):
                        t.fail(law="beck-chevalley", X=x, A=a, f=f, beta=be)
                        return t.report()
                t.ok()
    return t.report()


def check_implicational(P: Doctrine, frag: Fragment) -> PropertyReport:
    t = Tally("implicational")
    if not P.has("implicational"):
        t.fail(reason="no implication advertised")
        return t.report()
    C = P.base
    objs = C.objects(frag)
    cube = round(frag.budget ** (1 / 3)) + 1
    for a in objs:
        F = P.fiber(a)
        xs = _small(F, cube)
        if xs is None:
            t.skip()
            continue
        for x, y, z in itertools.product(xs, repeat=3):
            if F.le(F.meet(x, y), z) != F.le(x, F.imp(y, z)):
                t.fail(law="heyting", object=a, x=x, y=y, z=z)
                return t.report()
        t.ok()
    for a in objs:
        for b in objs:
            Fb = P.fiber(b)
            ys = _small(Fb, frag.budget)
            fs = _homs(C, a, b, frag.budget)
            if ys is None or fs is None or len(ys) ** 2 > frag.budget * 16:
                t.skip()
                continue
            Fa = P.fiber(a)
            for f in fs:
                for x in ys:
                    for y in ys:
                        if P.reindex(f, Fb.imp(x, y)) != Fa.imp(P.reindex(f, x), P.reindex(f, y)):
                            t.fail(law="stability", f=f, x=x, y=y)
                            return t.report()
            t.ok()
    return t.report()


def check_disjunctive(P: Doctrine, frag: Fragment) -> PropertyReport:
    t = Tally("disjunctive")
    if not P.has("disjunctive"):
        t.fail(reason="no joins advertised")
        return t.report()
    C = P.base
    objs = C.objects(frag)
    cube = round(frag.budget ** (1 / 3)) + 1
    for a in objs:
        F = P.fiber(a)
        xs = _small(F, cube)
        if xs is None:
            t.skip()
            continue
        if F.bottom is None or any(not F.le(F.bottom, x) for x in xs):
            t.fail(law="bottom", object=a)
            return t.report()
        for x, y, z in itertools.product(xs, repeat=3):
            j = F.join(x, y)
            if not (F.le(x, j) and F.le(y, j)) or (F.le(x, z) and F.le(y, z) and not F.le(j, z)):
                t.fail(law="join", object=a, x=x, y=y, z=z)
                return t.report()
            if F.meet(x, F.join(y, z)) != F.join(F.meet(x, y), F.meet(x, z)):
                t.fail(law="distributive", object=a, x=x, y=y, z=z)
                return t.report()
        t.ok()
    for a in objs:
        for b in objs:
            Fa, Fb = P.fiber(a), P.fiber(b)
            ys = _small(Fb, frag.budget)
            fs = _homs(C, a, b, frag.budget)
            if ys is None or fs is None or len(ys) ** 2 > frag.budget * 16:
                t.skip()
                continue
            for f in fs:
                if P.reindex(f, Fb.bottom) != Fa.bottom:
                    t.fail(law="bottom stability", f=f)
                    return t.report()
                for x in ys:
                    for y in ys:
                        if P.reindex(f, Fb.join(x, y)) != Fa.join(P.reindex(f, x), P.reindex(f, y)):
                            t.fail(law="join stability", f=f, x=x, y=y)
                            return t.report()
            t.ok()
    return t.report()


def check_first_order(P: Doctrine, frag: Fragment) -> PropertyReport:
    parts = [
        check_elementary(P, frag),
        check_existential(P, frag),
        check_universal(P, frag),
        check_implicational(P, frag),
        check_disjunctive(P, frag),
    ]
    return combine("first_order", parts)


def check_weak_classifier(P: Doctrine, frag: Fragment, strong: bool = False) -> PropertyReport:
    name = "strong_classifier" if strong else "weak_classifier"
    t = Tally(name)
    if not P.has("classifier"):
        t.fail(reason="no classifier advertised")
        return t.report()
    C = P.base
    omega, member = P.classifier()
    for a in C.objects(frag):
        xs = _small(P.fiber(a), frag.budget)
        if xs is None:
            t.skip()
            continue
        chis = _homs(C, a, omega, frag.budget) if strong else None
        if strong and chis is None:
            t.skip()
            continue
        for phi in xs:
            try:
                chi = P.classify(a, phi)
            except TypeMismatch as e:
                t.fail(reason="classifying arrow is not an arrow", object=a, phi=phi, error=str(e))
                return t.report()
            if P.reindex(chi, member) != phi:
                t.fail(reason="classifying arrow does not classify", object=a, phi=phi, chi=chi)
                return t.report()
            if strong:
                hits = [c for c in chis if P.reindex(c, member) == phi]
                if len(hits) != 1:
                    t.fail(reason="classifying arrow not unique", object=a, phi=phi, arrows=hits)
                    return t.report()
        t.ok()
    return t.report()


def check_power_objects(P: Doctrine, frag: Fragment) -> PropertyReport:
    t = Tally("power_objects")
    if not P.has("power_objects"):
        t.fail(reason="no power objects advertised")
        return t.report()
    C = P.base
    objs = C.objects(frag)
    for a in objs:
        pa, member = P.power(a)
        for b in objs:
            w = C.product(a, b)
            xs = _small(P.fiber(w.carrier), frag.budget)
            if xs is None:
                t.skip()
                continue
            for phi in xs:
                chi = P.power_classify(a, b, phi)
                if chi.src != b or chi.dst != pa:
                    t.fail(reason="classifying arrow has the wrong type", A=a, B=b, phi=phi)
                    return t.report()
                if P.reindex(C.times(C.identity(a), chi), member) != phi:
                    t.fail(reason="power object does not classify", A=a, B=b, phi=phi, chi=chi)
                    return t.report()
            t.ok()
    return t.report()


def check_comprehension(P: Doctrine, frag: Fragment, level: str = "weak") -> PropertyReport:
    t = Tally(f"comprehension_{level}")
    if not P.has("comprehension"):
        t.fail(reason="no comprehension advertised")
        return t.report()
    C = P.base
    objs = C.objects(frag)
    for a in objs:
        xs = _small(P.fiber(a), frag.budget)
        if xs is None:
            t.skip()
            continue
        for al in xs:
            m = P.comprehension(a, al)
            if m.dst != a or P.reindex(m, al) != top(P, m.src):
                t.fail(reason="comprehension arrow does not force its predicate", object=a, alpha=al, m=m)
                return t.report()
            if level == "full":
                back = exists_along(P, m, top(P, m.src))
                if back != al:
                    t.fail(reason="not full", object=a, alpha=al, other=back, m=m)
                    return t.report()
                continue
            for y in objs:
                gs = _homs(C, y, a, frag.budget)
                hs = _homs(C, y, m.src, frag.budget)
                if gs is None or hs is None:
                    t.skip()
                    continue
                for g in gs:
                    if P.reindex(g, al) != top(P, y):
                        continue
                    lifts = [h for h in hs if C.compose(m, h) == g]
                    if not lifts:
                        t.fail(reason="no factorization", object=a, alpha=al, g=g)
                        return t.report()
                    if level == "strong" and len(lifts) > 1:
                        t.fail(reason="factorization not unique", object=a, alpha=al, g=g, lifts=lifts)
                        return t.report()
        t.ok()
    return t.report()


def check_comprehensive_diagonals(P: Doctrine, frag: Fragment) -> PropertyReport:
    t = Tally("comprehensive_diagonals")
    C = P.base
    objs = C.objects(frag)
    for a in objs:
        for b in objs:
            fs = _homs(C, a, b, int(frag.budget**0.5) + 1)
            if fs is None:
                t.skip()
                continue
            d = P.delta(b)
            ta = top(P, a)
            for f in fs:
                for g in fs:
                    same = P.reindex(C.pair(f, g), d) == ta
                    if same != (f == g):
                        t.fail(A=a, B=b, f=f, g=g, delta_equal=same)
                        return t.report()
            t.ok()
    return t.report()


def is_total(P: Doctrine, a, b, F) -> bool:
    return P.exists_pr(a, b, F, 0) == top(P, a)


def is_single_valued(P: Doctrine, a, b, F) -> bool:
    C = P.base
    abb, (p1, p2, p3) = C.power_product([a, b, b])
    G = P.fiber(abb)
    lhs = G.meet(pull(P, [p1, p2], F), pull(P, [p1, p3], F))
    return G.le(lhs, pull(P, [p2, p3], P.delta(b)))


def check_ruc(P: Doctrine, frag: Fragment) -> PropertyReport:
    t = Tally("RUC")
    C = P.base
    objs = C.objects(frag)
    for a in objs:
        for b in objs:
            w = C.product(a, b)
            rels = _small(P.fiber(w.carrier), frag.budget)
            fs = _homs(C, a, b, frag.budget)
            if rels is None or fs is None:
                t.skip()
                continue
            graphs = {P.reindex(C.times(f, C.identity(b)), P.delta(b)): f for f in fs}
            for F in rels:
                if not is_total(P, a, b, F) or not is_single_valued(P, a, b, F):
                    continue
                if F not in graphs:
                    t.fail(A=a, B=b, relation=F, reason="total single-valued relation not tracked by an arrow")
                    return t.report()
            t.ok()
    return t.report()


def check_rc(P: Doctrine, frag: Fragment) -> PropertyReport:
    t = Tally("RC")
    C = P.base
    objs = C.objects(frag)
    for a in objs:
        for b in objs:
            w = C.product(a, b)
            rels = _small(P.fiber(w.carrier), frag.budget)
            fs = _homs(C, a, b, frag.budget)
            if rels is None or fs is None:
                t.skip()
                continue
            ida = C.identity(a)
            for F in rels:
                if not is_total(P, a, b, F):
                    continue
                ex = P.exists_pr(a, b, F, 0)
                if not any(P.reindex(C.pair(ida, f), F) == ex for f in fs):
                    t.fail(A=a, B=b, relation=F, reason="total relation has no choice arrow")
                    return t.report()
            t.ok()
    return t.report()


def check_boolean(P: Doctrine, frag: Fragment) -> PropertyReport:
    t = Tally("boolean")
    for a in P.base.objects(frag):
        F = P.fiber(a)
        xs = _small(F, frag.budget)
        if xs is None:
            t.skip()
            continue
        for x in xs:
            if F.join(x, F.neg(x)) != F.top:
                t.fail(object=a, alpha=x, alpha_or_not_alpha=F.join(x, F.neg(x)))
                return t.report()
        t.ok()
    return t.report()


def _quotient_instances(P: Doctrine, frag: Fragment):
    for a in P.base.objects(frag):
        rels = _small(P.fiber(rel_object(P, a)), frag.budget)
        if rels is None:
            yield a, None
            continue
        for rho in rels:
            if is_equivalence(P, a, rho):
                yield a, rho


def _is_quotient_of(P: Doctrine, q: Mor, rho, frag: Fragment, tally: Tally, **ctx) -> bool:
    """Universal property of q as a quotient of rho, over fragment test objects."""
    C = P.base
    a = q.src
    F = P.fiber(rel_object(P, a))
    if not F.le(rho, P.reindex(C.times(q, q), P.delta(q.dst))):
        tally.fail(reason="quotient arrow does not identify the relation", q=q, rho=rho, **ctx)
        return False
    for y in C.objects(frag):
        fs = _homs(C, a, y, frag.budget)
        hs = _homs(C, q.dst, y, frag.budget)
        if fs is None or hs is None:
            tally.skip()
            continue
        dy = P.delta(y)
        for f in fs:
            if not F.le(rho, P.reindex(C.times(f, f), dy)):
                continue
            meds = [h for h in hs if C.compose(h, q) == f]
            if len(meds) != 1:
                tally.fail(reason="quotient mediator count", q=q, rho=rho, f=f, mediators=meds, **ctx)
                return False
    return True


def check_quotients(P: Doctrine, frag: Fragment, kind: str = "effective") -> PropertyReport:
    t = Tally(f"quotients_{kind}")
    if not P.has("quotients"):
        t.fail(reason="no quotients advertised")
        return t.report()
    C = P.base
    for a, rho in _quotient_instances(P, frag):
        if rho is None:
            t.skip()
            continue
        q = P.quotient(a, rho)
        if kind == "effective":
            if not _is_quotient_of(P, q, rho, frag, t, object=a):
                return t.report()
            eff = P.reindex(C.times(q, q), P.delta(q.dst))
            if eff != rho:
                t.fail(reason="not effective", object=a, rho=rho, q=q, kernel=eff)
                return t.report()
            t.ok()
        elif kind == "stable":
            for y in C.objects(frag):
                fs = _homs(C, y, q.dst, frag.budget)
                if fs is None:
                    t.skip()
                    continue
                for f in fs:
                    pb = C.pullback(q, f)
                    p, h = pb.legs
                    # pairs (a, y) identified when ρ relates the a's and the y's agree
                    rel = P.fiber(rel_object(P, pb.carrier)).meet(
                        P.reindex(C.times(p, p), rho), P.reindex(C.times(h, h), P.delta(f.src))
                    )
                    if not _is_quotient_of(P, h, rel, frag, t, object=a, along=f):
                        return t.report()
                    t.ok()
        elif kind == "descent":
            dq = P.reindex(C.times(q, q), P.delta(q.dst))
            eff = _effective_descent(P, q, dq, frag)
            if eff is None:
                t.skip()
                continue
            if not eff:
                t.fail(reason="not of effective descent", object=a, rho=rho, q=q, surjP=is_surjP(P, q))
                return t.report()
            t.ok()
        else:
            raise ValueError(kind)
    return t.report()


def _effective_descent(P: Doctrine, f: Mor, kernel, frag: Fragment):
    """Whether P_f: P(B) → Des(P_{f×f}δ_B) is a bijection (None if too big)."""
    src = _small(P.fiber(f.src), frag.budget)
    tgt = _small(P.fiber(f.dst), frag.budget)
    if src is None or tgt is None:
        return None
    images = {P.reindex(f, b) for b in tgt}
    if len(images) != len(tgt):
        return False
    des = {x for x in src if is_descent_datum(P, f.src, kernel, x)}
    return images == des


def is_effective_descent(P: Doctrine, f: Mor, frag: Fragment = Fragment()) -> bool | None:
    kernel = P.reindex(P.base.times(f, f), P.delta(f.dst))
    return _effective_descent(P, f, kernel, frag)


PROPERTIES: dict[str, Callable[[Doctrine, Fragment], PropertyReport]] = {
    "primary": check_primary,
    "elementary": check_elementary,
    "existential": check_existential,
    "universal": check_universal,
    "implicational": check_implicational,
    "disjunctive": check_disjunctive,
    "first_order": check_first_order,
    "weak_classifier": lambda P, fr: check_weak_classifier(P, fr, strong=False),
    "strong_classifier": lambda P, fr: check_weak_classifier(P, fr, strong=True),
    "power_objects": check_power_objects,
    "tripos": lambda P, fr: combine("tripos", [check_first_order(P, fr), check_power_objects(P, fr)]),
    "comprehension_weak": lambda P, fr: check_comprehension(P, fr, "weak"),
    "comprehension_strong": lambda P, fr: check_comprehension(P, fr, "strong"),
    "comprehension_full": lambda P, fr: check_comprehension(P, fr, "full"),
    "comprehensive_diagonals": check_comprehensive_diagonals,
    "RUC": check_ruc,
    "RC": check_rc,
    "boolean": check_boolean,
    "quotients_effective": lambda P, fr: check_quotients(P, fr, "effective"),
    "quotients_stable": lambda P, fr: check_quotients(P, fr, "stable"),
    "quotients_descent": lambda P, fr: check_quotients(P, fr, "descent"),
}


def verify(P: Doctrine, prop: str, frag: Fragment = Fragment()) -> PropertyReport:
    """Check one named property of P on a fragment."""
    try:
        check = PROPERTIES[prop]
    except KeyError:
        raise ValueError(f"unknown property {prop!r}; known: {sorted(PROPERTIES)}") from None
    try:
        report = check(P, frag)
    except MissingCapability as exc:
        return PropertyReport(prop, "fails", {"missing_capability": exc.capability})
    report.name = prop
    return report


def verify_all(P: Doctrine, props, frag: Fragment = Fragment()) -> dict[str, PropertyReport]:
    return {p: verify(P, p, frag) for p in props}

