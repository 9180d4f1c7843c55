"""Brute-force verifiers.

Every check here enumerates from kernel primitives only (hom-sets,
composition, fiber order); none of them calls the construction under test
except through the witness it is handed.  They are the ground truth for the
derived values asserted in the test suite.
"""

from __future__ import annotations

import itertools
from typing import Callable

from .kernel import (
    Category,
    CategoryError,
    Fragment,
    Functor,
    Mor,
    PropertyReport,
    StructureWitness,
    Tally,
    combine,
)


class NoMediator(CategoryError):
    pass


# ---------------------------------------------------------------- adjunctions


def check_adjunction(
    left: Callable,
    right: Callable,
    dom,
    cod,
    name: str = "adjunction",
    pairwise_limit: int = 1 << 16,
) -> PropertyReport:
    """left ⊣ right between two finite posets (fibers).

    Small instances are checked literally (L x ≤ y ⇔ x ≤ R y for every pair);
    larger ones through the equivalent unit/counit form together with
    monotonicity of both maps on covering pairs.
    """
    t = Tally(name)
    xs = list(dom.elements())
    ys = list(cod.elements())
    lx = {x: left(x) for x in xs}
    ry = {y: right(y) for y in ys}
    for x, v in lx.items():
        if not cod.contains(v):
            t.fail(law="left lands outside the codomain", x=x, image=v)
            return t.report()
    for y, v in ry.items():
        if not dom.contains(v):
            t.fail(law="right lands outside the domain", y=y, image=v)
            return t.report()
    if len(xs) * len(ys) <= pairwise_limit:
        for x in xs:
            for y in ys:
                if cod.le(lx[x], y) != dom.le(x, ry[y]):
                    t.fail(law="galois", x=x, y=y, left_x=lx[x], right_y=ry[y])
                    return t.report()
        t.ok(len(xs) * len(ys))
        return t.report()
    for x in xs:
        if not dom.le(x, right(lx[x])):
            t.fail(law="unit", x=x)
            return t.report()
        for x2 in dom.upper_covers(x):
            if not cod.le(lx[x], lx[x2]):
                t.fail(law="left monotone", x=x, x2=x2)
                return t.report()
    for y in ys:
        if not cod.le(left(ry[y]), y):
            t.fail(law="counit", y=y)
            return t.report()
        for y2 in cod.upper_covers(y):
            if not dom.le(ry[y], ry[y2]):
                t.fail(law="right monotone", y=y, y2=y2)
                return t.report()
    t.ok(len(xs) + len(ys))
    return t.report()


def check_functor_adjunction(
    L: Functor, R: Functor, unit: Callable, counit: Callable, frag_l: Fragment, frag_r: Fragment
) -> PropertyReport:
    """L ⊣ R through the hom-set bijection induced by the unit.

    For every X on the left and Y on the right, post-composing with R and
    pre-composing the unit gives a map hom(LX, Y) → hom(X, RY); the check is
    that it is a bijection.  The counit is checked for the triangle identity.
    """
    t = Tally("adjunction")
    A, B = L.src, L.dst
    for x in A.objects(frag_l):
        eta = unit(x)
        for y in B.objects(frag_r):
            lhs = B.hom(L(x), y)
            rhs = A.hom(x, R(y))
            image = {}
            for g in lhs:
                f = A.compose(R(g), eta)
                if f in image:
                    t.fail(law="not injective", X=x, Y=y, g1=image[f], g2=g)
                    return t.report()
                image[f] = g
            if len(image) != len(rhs):
                missing = next(f for f in rhs if f not in image)
                t.fail(law="not surjective", X=x, Y=y, f=missing)
                return t.report()
            t.ok()
        eps = counit(L(x))
        if B.compose(eps, L(eta)) != B.identity(L(x)):
            t.fail(law="triangle", X=x)
            return t.report()
    return t.report()


# ---------------------------------------------------------------- universal properties


def _unique(C: Category, x, carrier, legs, targets):
    return [h for h in C.hom(x, carrier) if all(C.compose(l, h) == t for l, t in zip(legs, targets))]


def _co_unique(C: Category, y, carrier, legs, targets):
    return [h for h in C.hom(carrier, y) if all(C.compose(h, l) == t for l, t in zip(legs, targets))]


def check_universal(C: Category, w: StructureWitness, frag: Fragment, weak: bool | None = None) -> PropertyReport:
    """Existence and (unless weak) uniqueness of mediators over all fragment cones."""
    weak = w.weak if weak is None else weak
    t = Tally(f"universal[{w.kind}]")
    objs = C.objects(frag)

    def mediate(*args):
        try:
            return w.mediate(*args)
        except CategoryError as exc:
            return exc

    def judge(meds, got, **cone):
        if isinstance(got, Exception) or got not in meds:
            t.fail(reason="mediator does not commute", mediator=None if isinstance(got, Exception) else got, **cone)
            return False
        if not weak and len(meds) != 1:
            t.fail(reason="mediator not unique", mediators=meds, **cone)
            return False
        t.ok()
        return True

    if w.kind == "terminal":
        for x in objs:
            homs = C.hom(x, w.carrier)
            if not judge(homs, mediate(x), test=x):
                return t.report()
    elif w.kind == "initial":
        for y in objs:
            homs = C.hom(w.carrier, y)
            if not judge(homs, mediate(y), test=y):
                return t.report()
    elif w.kind == "product":
        p1, p2 = w.legs
        for x in objs:
            if C.hom_size(x, p1.dst) * C.hom_size(x, p2.dst) > frag.budget:
                t.skip()
                continue
            for f in C.hom(x, p1.dst):
                for g in C.hom(x, p2.dst):
                    meds = _unique(C, x, w.carrier, w.legs, (f, g))
                    if not judge(meds, mediate(f, g), f=f, g=g):
                        return t.report()
    elif w.kind == "pullback":
        f, g = w.diagram
        for x in objs:
            for h in C.hom(x, f.src):
                for k in C.hom(x, g.src):
                    if C.compose(f, h) != C.compose(g, k):
                        continue
                    meds = _unique(C, x, w.carrier, w.legs, (h, k))
                    if not judge(meds, mediate(h, k), h=h, k=k):
                        return t.report()
    elif w.kind == "coproduct":
        i1, i2 = w.legs
        for y in objs:
            for f in C.hom(i1.src, y):
                for g in C.hom(i2.src, y):
                    meds = _co_unique(C, y, w.carrier, w.legs, (f, g))
                    if not judge(meds, mediate(f, g), f=f, g=g):
                        return t.report()
    elif w.kind == "equalizer":
        f, g = w.diagram
        (e,) = w.legs
        for x in objs:
            for h in C.hom(x, f.src):
                if C.compose(f, h) != C.compose(g, h):
                    continue
                meds = _unique(C, x, w.carrier, (e,), (h,))
                if not judge(meds, mediate(h), h=h):
                    return t.report()
    elif w.kind == "coequalizer":
        f, g = w.diagram
        (q,) = w.legs
        for y in objs:
            for h in C.hom(f.dst, y):
                if C.compose(h, f) != C.compose(h, g):
                    continue
                meds = _co_unique(C, y, w.carrier, (q,), (h,))
                if not judge(meds, mediate(h), h=h):
                    return t.report()
    else:
        raise ValueError(f"no cone enumerator for {w.kind}")
    return t.report()


def commutes(C: Category, *paths) -> bool:
    """Whether all given composable paths (tuples of arrows, outermost first) agree."""
    values = [C.compose(*p) for p in paths]
    return all(v == values[0] for v in values)


# ---------------------------------------------------------------- equivalences


def find_iso(C: Category, a, b) -> tuple[Mor, Mor] | None:
    for f in C.hom(a, b):
        for g in C.hom(b, a):
            if C.compose(g, f) == C.identity(a) and C.compose(f, g) == C.identity(b):
                return f, g
    return None


def check_functor(F: Functor, frag: Fragment) -> PropertyReport:
    t = Tally("functor")
    A, B = F.src, F.dst
    objs = A.objects(frag)
    for a in objs:
        if F(A.identity(a)) != B.identity(F(a)):
            t.fail(law="identity", object=a)
            return t.report()
        for b in objs:
            for f in A.hom(a, b):
                Ff = F(f)
                if Ff.src != F(a) or Ff.dst != F(b):
                    t.fail(law="endpoints", f=f)
                    return t.report()
                for c in objs:
                    for g in A.hom(b, c):
                        if F(A.compose(g, f)) != B.compose(F(g), Ff):
                            t.fail(law="composition", f=f, g=g)
                            return t.report()
        t.ok()
    return t.report()


def check_equivalence(F: Functor, frag: Fragment, target_frag: Fragment | None = None) -> dict[str, PropertyReport]:
    """Full, faithful and essentially surjective on the fragment.

    Essential surjectivity is fragment-relative: every target object in
    ``target_frag`` must be isomorphic to the image of some source object.
    """
    target_frag = target_frag or frag
    A, B = F.src, F.dst
    src_objs = A.objects(frag)
    full, faithful, ess = Tally("full"), Tally("faithful"), Tally("essentially_surjective")
    for a in src_objs:
        for b in src_objs:
            images = {}
            for f in A.hom(a, b):
                Ff = F(f)
                if Ff in images and images[Ff] != f:
                    faithful.fail(f=f, g=images[Ff], image=Ff)
                images[Ff] = f
            faithful.ok()
            for g in B.hom(F(a), F(b)):
                if g not in images:
                    full.fail(source=a, target=b, arrow=g)
                    break
            else:
                full.ok()
    images = [F(a) for a in src_objs]
    for y in B.objects(target_frag):
        if y in images:
            ess.ok()
            continue
        if any(find_iso(B, x, y) is not None for x in images):
            ess.ok()
        else:
            ess.fail(object=y)
    reports = {
        "functor": check_functor(F, frag),
        "full": full.report(),
        "faithful": faithful.report(),
        "essentially_surjective": ess.report(),
    }
    reports["equivalence"] = combine("equivalence", list(reports.values()))
    return reports


def iso_classes(C: Category, frag: Fragment) -> list[list]:
    """Partition the fragment objects into isomorphism classes."""
    classes: list[list] = []
    for x in C.objects(frag):
        for cls in classes:
            if find_iso(C, cls[0], x) is not None:
                cls.append(x)
                break
        else:
            classes.append([x])
    return classes


def galois_pairs(dom, cod) -> itertools.product:
    return itertools.product(list(dom.elements()), list(cod.elements()))
