"""Topologies on doctrines and what they induce.

A topology j is a family of fiber maps that is natural, extensive,
idempotent and preserves meets.  Its fixed points form the doctrine of
j-closed elements.  An adjoint-retraction pair P ⊲ R (l ⊣ r with l∘r = id)
gives the topology r∘l on R, and every doctrine with full weak
comprehensions sits in such a pair with the weak subobjects of its base;
the resulting topology is the canonical one.
"""

from __future__ import annotations

from . import doctrine as D
from . import oracle as O
from .completions import EqcDoctrine, EqcObject, eqc
from .corpus import WeakSubobjects
from .doctrine import Doctrine, exists_along, rel_object, top
from .kernel import (
    Category,
    Fragment,
    Functor,
    MissingCapability,
    Mor,
    PropertyReport,
    Tally,
    ValidationError,
    combine,
)


class TopologyError(ValidationError):
    """A topology law fails; ``witness`` says where."""

    def __init__(self, report: PropertyReport):
        super().__init__(f"{report.name} fails: {report.counterexample}")
        self.report = report
        self.witness = report.counterexample


class Topology:
    """Fiber maps j_A on a doctrine, tabulated per object on first use.

    ``j(a, alpha)`` may be any callable.  When a fragment is given the laws
    are checked at once and a ``TopologyError`` is raised on failure.
    """

    def __init__(self, P: Doctrine, j, name: str = "j", frag: Fragment | None = None):
        self.P = P
        self._j = j
        self.name = name
        self._tables: dict = {}
        if frag is not None:
            self.validate(frag)

    def __call__(self, a, alpha):
        t = self._tables.setdefault(a, {})
        v = t.get(alpha)
        if v is None:
            v = t[alpha] = self._j(a, alpha)
        return v

    def __repr__(self):
        return f"<Topology {self.name} on {self.P.name}>"

    def table(self, a) -> dict:
        return {x: self(a, x) for x in self.P.fiber(a).elements()}

    def closed(self, a, alpha) -> bool:
        return self(a, alpha) == alpha

    def check(self, frag: Fragment) -> dict[str, PropertyReport]:
        P, C = self.P, self.P.base
        objs = C.objects(frag)
        ext, idem, mono, meets, nat = (
            Tally("extensive"),
            Tally("idempotent"),
            Tally("monotone"),
            Tally("meets"),
            Tally("natural"),
        )
        elems = {}
        for a in objs:
            F = P.fiber(a)
            if F.size() > frag.budget:
                for t in (ext, idem, mono, meets):
                    t.skip()
                continue
            xs = elems[a] = list(F.elements())
            for x in xs:
                jx = self(a, x)
                if not F.contains(jx):
                    ext.fail(law="leaves the fiber", object=a, alpha=x, image=jx)
                elif not F.le(x, jx):
                    ext.fail(object=a, alpha=x, image=jx)
                else:
                    ext.ok()
                if F.contains(jx) and self(a, jx) != jx:
                    idem.fail(object=a, alpha=x, once=jx, twice=self(a, jx))
                else:
                    idem.ok()
                for y in F.upper_covers(x):
                    if not F.le(jx, self(a, y)):
                        mono.fail(object=a, alpha=x, beta=y)
                    else:
                        mono.ok()
            if len(xs) ** 2 <= frag.budget:
                for x in xs:
                    for y in xs:
                        if self(a, F.meet(x, y)) != F.meet(self(a, x), self(a, y)):
                            meets.fail(object=a, alpha=x, beta=y)
                        else:
                            meets.ok()
            else:
                meets.skip()
        for a in objs:
            for b in objs:
                if b not in elems or C.hom_size(a, b) > frag.budget:
                    nat.skip()
                    continue
                for f in C.hom(a, b):
                    for y in elems[b]:
                        lhs, rhs = self(a, P.reindex(f, y)), P.reindex(f, self(b, y))
                        if lhs != rhs:
                            nat.fail(arrow=f, beta=y, closure_then_pull=rhs, pull_then_closure=lhs)
                            break
                    else:
                        nat.ok()
        reports = {t.name: t.report() for t in (nat, ext, idem, mono, meets)}
        reports["topology"] = combine("topology", list(reports.values()))
        return reports

    def validate(self, frag: Fragment) -> "Topology":
        r = self.check(frag)["topology"]
        if r.fails:
            raise TopologyError(r)
        return self


def from_tables(P: Doctrine, tables: dict, name: str = "j", frag: Fragment | None = None) -> Topology:
    """A topology given by per-object element tables; objects not listed raise KeyError."""

    def j(a, alpha):
        return tables[a][alpha]

    return Topology(P, j, name, frag)


def identity_topology(P: Doctrine) -> Topology:
    return Topology(P, lambda a, alpha: alpha, "id")


def top_topology(P: Doctrine) -> Topology:
    return Topology(P, lambda a, alpha: P.fiber(a).top, "top")


def double_negation(P: Doctrine) -> Topology:
    P.require("implicational")

    def j(a, alpha):
        F = P.fiber(a)
        if F.bottom is None:
            raise MissingCapability("bottom", f"{P.name}({a!r})")
        return F.neg(F.neg(alpha))

    return Topology(P, j, "notnot")


# ---------------------------------------------------------------- closed elements


class ClosedFiber:
    """The j-closed elements of a fiber.  Meets and implication are inherited,
    joins and the bottom are closures of the ones below."""

    def __init__(self, parent, close):
        self.parent = parent
        self.close = close
        self.top = parent.top
        self.bottom = close(parent.bottom) if parent.bottom is not None else None
        self._cache: list | None = None

    def __repr__(self):
        return f"ClosedFiber({self.parent!r})"

    def elements(self):
        if self._cache is None:
            self._cache = [x for x in self.parent.elements() if self.close(x) == x]
        return iter(self._cache)

    def size(self) -> int:
        return sum(1 for _ in self.elements())

    def contains(self, x) -> bool:
        return self.parent.contains(x) and self.close(x) == x

    @property
    def has_join(self) -> bool:
        return self.parent.has_join

    @property
    def has_imp(self) -> bool:
        return self.parent.has_imp

    def le(self, x, y):
        return self.parent.le(x, y)

    def meet(self, x, y):
        return self.parent.meet(x, y)

    def join(self, x, y):
        return self.close(self.parent.join(x, y))

    def imp(self, x, y):
        return self.parent.imp(x, y)

    def neg(self, x):
        return self.imp(x, self.bottom)

    def upper_covers(self, x) -> list:
        above = [y for y in self.elements() if y != x and self.le(x, y)]
        return [y for y in above if not any(z != y and self.le(z, y) for z in above)]


class ClosedDoctrine(Doctrine):
    """P_j: fibers of j-closed elements, reindexed as in P.

    Left adjoints, equality and joins are closures of the ones of P; right
    adjoints and implication are inherited; membership is closed as well.
    """

    def __init__(self, P: Doctrine, j: Topology):
        self.P, self.j = P, j
        self.base = P.base
        self.name = f"{P.name}_{j.name}"
        keep = {"elementary", "existential", "universal", "implicational", "disjunctive", "classifier", "power_objects"}
        self.capabilities = frozenset(P.capabilities & keep)
        self._fibers: dict = {}

    def fiber(self, a):
        F = self._fibers.get(a)
        if F is None:
            F = self._fibers[a] = ClosedFiber(self.P.fiber(a), lambda x, a=a: self.j(a, x))
        return F

    def reindex(self, f: Mor, alpha):
        return self.P.reindex(f, alpha)

    def delta(self, a):
        return self.j(rel_object(self.P, a), self.P.delta(a))

    def exists_pr(self, a, b, alpha, leg: int = 0):
        return self.j((a, b)[leg], self.P.exists_pr(a, b, alpha, leg))

    def forall_pr(self, a, b, alpha, leg: int = 0):
        return self.P.forall_pr(a, b, alpha, leg)

    def classifier(self):
        omega, member = self.P.classifier()
        return omega, self.j(omega, member)

    def classify(self, a, phi) -> Mor:
        return self.P.classify(a, phi)

    def power(self, a):
        pa, member = self.P.power(a)
        return pa, self.j(self.base.product(a, pa).carrier, member)

    def power_classify(self, a, b, phi) -> Mor:
        return self.P.power_classify(a, b, phi)


def closed_subdoctrine(P: Doctrine, j: Topology, frag: Fragment | None = None) -> ClosedDoctrine:
    if frag is not None:
        j.validate(frag)
    return ClosedDoctrine(P, j)


# ---------------------------------------------------------------- adjoint retractions


class AdjointRetraction:
    """P ⊲ R: fiber maps l: R(A) → P(A) and r: P(A) → R(A), natural in A,
    with l ⊣ r and l∘r = id."""

    def __init__(self, P: Doctrine, R: Doctrine, l, r, name: str = "retraction"):
        if P.base is not R.base:
            raise ValidationError("an adjoint retraction needs a common base")
        self.P, self.R, self.l, self.r = P, R, l, r
        self.name = name

    def check(self, frag: Fragment) -> dict[str, PropertyReport]:
        P, R, C = self.P, self.R, self.P.base
        objs = C.objects(frag)
        adj, ret, nat = [], Tally("retraction"), Tally("natural")
        for a in objs:
            FP, FR = P.fiber(a), R.fiber(a)
            if FP.size() > frag.budget or FR.size() > frag.budget:
                ret.skip()
                continue
            adj.append(
                O.check_adjunction(lambda b, a=a: self.l(a, b), lambda x, a=a: self.r(a, x), FR, FP, name="l_adj_r")
            )
            for x in FP.elements():
                back = self.l(a, self.r(a, x))
                if back != x:
                    ret.fail(object=a, alpha=x, lr_alpha=back)
                    break
            else:
                ret.ok()
        for a in objs:
            for b in objs:
                if C.hom_size(a, b) > frag.budget or P.fiber(b).size() > frag.budget:
                    nat.skip()
                    continue
                for f in C.hom(a, b):
                    for y in R.fiber(b).elements():
                        if self.l(a, R.reindex(f, y)) != P.reindex(f, self.l(b, y)):
                            nat.fail(map="l", arrow=f, beta=y)
                            break
                    for x in P.fiber(b).elements():
                        if self.r(a, P.reindex(f, x)) != R.reindex(f, self.r(b, x)):
                            nat.fail(map="r", arrow=f, alpha=x)
                            break
                    nat.ok()
        reports = {"adjunction": combine("adjunction", adj), "retraction": ret.report(), "natural": nat.report()}
        reports["adjoint_retraction"] = combine("adjoint_retraction", list(reports.values()))
        return reports

    def topology(self) -> Topology:
        """r∘l on R."""
        return Topology(self.R, lambda a, b: self.r(a, self.l(a, b)), f"rl[{self.name}]")

    def check_closed_iso(self, frag: Fragment) -> PropertyReport:
        """r is an order isomorphism from P(A) onto the r∘l-closed elements of R(A)."""
        t = Tally("closed_iso")
        j = self.topology()
        for a in self.P.base.objects(frag):
            FP = self.P.fiber(a)
            closed = ClosedFiber(self.R.fiber(a), lambda b, a=a: j(a, b))
            if FP.size() > frag.budget or closed.parent.size() > frag.budget:
                t.skip()
                continue
            images = {self.r(a, x): x for x in FP.elements()}
            targets = set(closed.elements())
            if set(images) != targets or len(images) != FP.size():
                t.fail(object=a, images=sorted(map(repr, images)), closed=sorted(map(repr, targets)))
                continue
            if any(FP.le(x, y) != closed.le(self.r(a, x), self.r(a, y)) for x in FP.elements() for y in FP.elements()):
                t.fail(object=a, reason="order not reflected")
                continue
            t.ok()
        return t.report()


def retraction_from_topology(R: Doctrine, j: Topology) -> AdjointRetraction:
    """R_j ⊲ R with l = j and r the inclusion."""
    return AdjointRetraction(closed_subdoctrine(R, j), R, lambda a, b: j(a, b), lambda a, x: x, name=f"incl[{j.name}]")


def weak_subobject_retraction(P: Doctrine, Psi: WeakSubobjects | None = None, domain_cap: int = 2) -> AdjointRetraction:
    """P ⊲ Ψ with l[f] = E_f(⊤) and r(α) = [{|α|}]; the laws hold exactly when
    P has full weak comprehensions."""
    for cap in ("elementary", "existential", "comprehension"):
        P.require(cap)
    Psi = Psi or WeakSubobjects(P.base, domain_cap)

    def l(a, v: Mor):
        return exists_along(P, v, top(P, v.src))

    def r(a, alpha):
        return Psi.canon(P.comprehension(a, alpha))

    return AdjointRetraction(P, Psi, l, r, name=f"{P.name}<{Psi.name}")


def canonical_topology(P: Doctrine, Psi: WeakSubobjects | None = None, domain_cap: int = 2) -> Topology:
    """j_P[f] = [{|E_f ⊤|}] on the weak subobjects of the base."""
    ar = weak_subobject_retraction(P, Psi, domain_cap)
    j = ar.topology()
    j.name = f"j[{P.name}]"
    j.retraction = ar
    return j


# ---------------------------------------------------------------- the completion


def extend_to_eqc(j: Topology, Q: EqcDoctrine | None = None) -> Topology:
    """j restricted to descent data: j_(A,ρ)(α) = j_A(α).  A closure that leaves
    the descent data raises ``ValidationError``."""
    Q = Q or eqc(j.P)
    if Q.P is not j.P:
        raise ValidationError("the completion is not over the topology's doctrine")
    P = j.P

    def jq(x: EqcObject, alpha):
        v = j(x.base, alpha)
        if not D.is_descent_datum(P, x.base, x.rel, v):
            raise ValidationError(f"closure of {alpha!r} leaves the descent data of {x!r}")
        return v

    return Topology(Q, jq, f"eqc({j.name})")


def is_separated(Q: Doctrine, x, j: Topology) -> bool:
    """j_{X×X}(δ_X) = δ_X."""
    d = Q.delta(x)
    return j(rel_object(Q, x), d) == d


# ---------------------------------------------------------------- lifting to completions


def lift_adjoint_retraction(ar: AdjointRetraction) -> tuple[Functor, Functor]:
    """L: Q_R → Q_P and R: Q_P → Q_R, both the identity on representatives."""
    QP, QR = eqc(ar.P), eqc(ar.R)
    BP, BR = QP.base, QR.base

    def lo(x: EqcObject):
        return EqcObject(x.base, ar.l(rel_object(ar.R, x.base), x.rel))

    def ro(x: EqcObject):
        return EqcObject(x.base, ar.r(rel_object(ar.P, x.base), x.rel))

    L = Functor(BR, BP, lo, lambda f: BP.arrow(lo(f.src), lo(f.dst), f.data), name="L")
    R = Functor(BP, BR, ro, lambda f: BR.arrow(ro(f.src), ro(f.dst), f.data), name="R")
    return L, R


def check_lifted_adjunction(ar: AdjointRetraction, frag: Fragment) -> dict[str, PropertyReport]:
    """L ⊣ R with unit [id]: (A,ρ) → (A, r l ρ) and R full and faithful."""
    L, R = lift_adjoint_retraction(ar)
    BR, BP = L.src, L.dst

    def unit(x):
        return BR.arrow(x, R(L(x)), BR.C.identity(x.base))

    def counit(y):
        return BP.arrow(L(R(y)), y, BP.C.identity(y.base))

    out = {
        "L_functor": O.check_functor(L, frag),
        "R_functor": O.check_functor(R, frag),
        "adjunction": O.check_functor_adjunction(L, R, unit, counit, frag, frag),
    }
    eq = O.check_equivalence(R, frag)
    out["R_full"], out["R_faithful"] = eq["full"], eq["faithful"]
    out["reflective"] = combine("reflective", list(out.values()))
    return out


class _Separated(Category):
    """The full subcategory of a completion on the separated fragment objects."""

    def __init__(self, B: Category, objs):
        self.B, self._objs = B, list(objs)
        self.name = f"sep({B.name})"

    def objects(self, frag):
        return list(self._objs)

    def hom(self, a, b):
        return self.B.hom(a, b)

    def hom_size(self, a, b):
        return self.B.hom_size(a, b)

    def identity(self, a):
        return self.B.identity(a)

    def _compose(self, g, f):
        return self.B.compose(g, f)


def check_separated(ar: AdjointRetraction, frag: Fragment) -> dict[str, PropertyReport]:
    """The separated objects of Q_R for the extension of r∘l form a category
    equivalent to Q_P through R."""
    QR = eqc(ar.R)
    jq = extend_to_eqc(ar.topology(), QR)
    sep = [x for x in QR.base.objects(frag) if is_separated(QR, x, jq)]
    S = _Separated(QR.base, sep)
    _, R = lift_adjoint_retraction(ar)
    image = Tally("lands_in_separated")
    for y in R.src.objects(frag):
        if R(y) in sep:
            image.ok()
        else:
            image.fail(object=y, image=R(y))
    Rs = Functor(R.src, S, R.on_obj, R.on_arr, name="R|sep")
    out = {"lands_in_separated": image.report()}
    if image.failed:
        out["equivalence"] = PropertyReport("equivalence", "not-checked", None, note="R leaves the separated objects")
    else:
        out["equivalence"] = O.check_equivalence(Rs, frag)["equivalence"]
    out["separated"] = combine("separated", list(out.values()))
    return out


def check_boolean_double_negation(P: Doctrine, frag: Fragment, domain_cap: int = 2) -> dict[str, PropertyReport]:
    """P boolean against P being the ¬¬-closed weak subobjects of its base.

    The right side holds when the retraction P ⊲ Ψ exists and its topology is
    ¬¬ on the fragment.  The two verdicts should agree.
    """
    boolean = D.verify(P, "boolean", frag)
    ar = weak_subobject_retraction(P, domain_cap=domain_cap)
    laws = ar.check(frag)["adjoint_retraction"]
    t = Tally("notnot_closed")
    if laws.fails:
        t.fail(reason="no retraction onto weak subobjects", **(laws.counterexample or {}))
    else:
        j, nn = ar.topology(), double_negation(ar.R)
        for a in P.base.objects(frag):
            for v in ar.R.fiber(a).elements():
                if j(a, v) != nn(a, v):
                    t.fail(object=a, variation=v, canonical=j(a, v), notnot=nn(a, v))
                    break
            else:
                t.ok()
    notnot = t.report()
    agree = PropertyReport("agree", "holds" if boolean.holds == notnot.holds else "fails",
                           None if boolean.holds == notnot.holds else {"boolean": boolean.status, "notnot": notnot.status})
    return {"boolean": boolean, "notnot_closed": notnot, "agree": agree}
