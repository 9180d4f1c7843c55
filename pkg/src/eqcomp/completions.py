"""Free completions of an elementary doctrine.

* ``eqc(P)``: objects are pairs (A, ρ) with ρ a P-equivalence relation on A,
  arrows are classes of base arrows preserving the relations, fibers are
  descent data.
* ``intensional_qc(P)``: the same objects with plain base arrows.
* ``extensional_collapse(P)``: base arrows identified when they are equal
  in the sense of the doctrine.
* ``comprehension_completion(P)``: objects (A, α), fibers the down-set of α.
* ``functional_completion(P)``: arrows are total single-valued relations.

Arrows of a quotiented category are stored by a canonical representative:
the first one in hom-enumeration order.  Doctrines may provide a
``canonical_arrow(f, sigma, guard)`` hook computing it directly.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Callable

from . import doctrine as D
from .doctrine import Doctrine, exists_along, is_descent_datum, rel_object
from .kernel import (
    Category,
    Fragment,
    Functor,
    MissingCapability,
    Mor,
    PropertyReport,
    SliceExponential,
    StructureWitness,
    Tally,
    TypeMismatch,
    Unsupported,
)
from .lattice import DownFiber, SubFiber


def _require_elementary(P: Doctrine):
    if not P.has("elementary"):
        raise MissingCapability("elementary", P.name)


# ---------------------------------------------------------------- eqc


@dataclass(frozen=True)
class EqcObject:
    base: Any
    rel: Any

    def __repr__(self):
        return f"({self.base!r}, {self.rel!r})"


class EqcCategory(Category):
    """Base category of the quotient completion (or, with ``quotient=False``,
    of the intensional quotient completion)."""

    def __init__(self, P: Doctrine, quotient: bool = True):
        self.P = P
        self.C = P.base
        self.quotient = quotient
        self.name = f"{'eqc' if quotient else 'iqc'}({P.name})"
        self._objs: dict = {}
        self._homs: dict = {}
        self._classes: dict = {}
        self._hook = getattr(P, "canonical_arrow", None) if quotient else None

    # -- objects and arrows

    def objects(self, frag: Fragment) -> list:
        out = []
        for a in self.C.objects(frag):
            key = (a, frag.budget)
            if key not in self._objs:
                rels = D._small(self.P.fiber(rel_object(self.P, a)), frag.budget)
                eqs = [] if rels is None else [r for r in rels if D.is_equivalence(self.P, a, r)]
                self._objs[key] = [EqcObject(a, r) for r in eqs]
            out.extend(self._objs[key])
        out += [o for o in frag.objects if o not in out]
        return out

    def preserves(self, x: EqcObject, y: EqcObject, f: Mor) -> bool:
        """ρ ≤ P_{f×f}(σ)."""
        F = self.P.fiber(rel_object(self.P, x.base))
        return F.le(x.rel, self.P.reindex(self.C.times(f, f), y.rel))

    def equal(self, x: EqcObject, y: EqcObject, f: Mor, g: Mor) -> bool:
        """⊤ = P_⟨f,g⟩(σ): the two base arrows represent the same class."""
        return self.P.reindex(self.C.pair(f, g), y.rel) == self.P.fiber(x.base).top

    def canon(self, x: EqcObject, y: EqcObject, f: Mor) -> Mor:
        if not self.quotient:
            return f
        if self._hook is not None:
            g = self._hook(f, y.rel)
            if g is not None:
                return g
        classes = self._classes.get((x, y))
        if classes is None:
            classes = self._classes[x, y] = {}
            reps: list[Mor] = []
            for g in self.C.hom(x.base, y.base):
                if not self.preserves(x, y, g):
                    continue
                for r in reps:
                    if self.equal(x, y, g, r):
                        classes[g] = r
                        break
                else:
                    reps.append(g)
                    classes[g] = g
        rep = classes.get(f)
        if rep is None:
            raise TypeMismatch(f"{f!r} does not preserve the relations of {x!r} and {y!r}")
        return rep

    def arrow(self, x: EqcObject, y: EqcObject, f: Mor) -> Mor:
        if f.src != x.base or f.dst != y.base:
            raise TypeMismatch(f"{f!r} is not an arrow {x.base!r} → {y.base!r}")
        if not self.preserves(x, y, f):
            raise TypeMismatch(f"{f!r} does not preserve the relations of {x!r} and {y!r}")
        return Mor(x, y, self.canon(x, y, f))

    def hom(self, x: EqcObject, y: EqcObject) -> list[Mor]:
        key = (x, y)
        out = self._homs.get(key)
        if out is None:
            seen: dict = {}
            for f in self.C.hom(x.base, y.base):
                if self.preserves(x, y, f):
                    c = self.canon(x, y, f)
                    seen.setdefault(c, None)
            out = self._homs[key] = [Mor(x, y, c) for c in seen]
        return list(out)

    def hom_size(self, x, y) -> int:
        return self.C.hom_size(x.base, y.base)

    def identity(self, x) -> Mor:
        return Mor(x, x, self.canon(x, x, self.C.identity(x.base)))

    def is_iso(self, f: Mor) -> Mor | None:
        """Try the class of a base inverse of the representative before searching."""
        g = self.C.is_iso(f.data)
        if g is not None and self.preserves(f.dst, f.src, g):
            return Mor(f.dst, f.src, self.canon(f.dst, f.src, g))
        return super().is_iso(f)

    def _compose(self, g: Mor, f: Mor) -> Mor:
        return Mor(f.src, g.dst, self.canon(f.src, g.dst, self.C.compose(g.data, f.data)))

    # -- limits

    def terminal(self) -> StructureWitness:
        w = self.C.terminal()
        t = EqcObject(w.carrier, self.P.fiber(rel_object(self.P, w.carrier)).top)
        return StructureWitness("terminal", t, (), lambda x: self.arrow(x, t, w.mediate(x.base)))

    def box(self, x: EqcObject, y: EqcObject):
        """ρ⊠σ over (A×B)×(A×B)."""
        C, P = self.C, self.P
        pa, pb = C.product(x.base, y.base).legs
        ab = pa.src
        F = P.fiber(rel_object(P, ab))
        return F.meet(P.reindex(C.times(pa, pa), x.rel), P.reindex(C.times(pb, pb), y.rel))

    def product(self, x: EqcObject, y: EqcObject) -> StructureWitness:
        w = self.C.product(x.base, y.base)
        p = EqcObject(w.carrier, self.box(x, y))
        legs = (self.arrow(p, x, w.legs[0]), self.arrow(p, y, w.legs[1]))

        def mediate(f: Mor, g: Mor):
            return self.arrow(f.src, p, w.mediate(f.data, g.data))

        return StructureWitness("product", p, legs, mediate)

    def _restrict(self, x: EqcObject, m: Mor) -> EqcObject:
        return EqcObject(m.src, self.P.reindex(self.C.times(m, m), x.rel))

    def pullback(self, f: Mor, g: Mor) -> StructureWitness:
        """Comprehension of P_{f×g}(σ) inside the product, with the restricted relation."""
        self.P.require("comprehension")
        C, P = self.C, self.P
        x, y, z = f.src, g.src, f.dst
        prod = self.product(x, y)
        pa, pb = C.product(x.base, y.base).legs
        pred = P.reindex(C.pair(C.compose(f.data, pa), C.compose(g.data, pb)), z.rel)
        m = P.comprehension(prod.carrier.base, pred)
        carrier = self._restrict(prod.carrier, m)
        legs = (self.arrow(carrier, x, C.compose(pa, m)), self.arrow(carrier, y, C.compose(pb, m)))

        def mediate(h: Mor, k: Mor):
            lift = P.comprehension_lift(prod.carrier.base, pred, C.pair(h.data, k.data))
            return self.arrow(h.src, carrier, lift)

        return StructureWitness("pullback", carrier, legs, mediate, diagram=(f, g))

    def equalizer(self, f: Mor, g: Mor) -> StructureWitness:
        """Comprehension of P_⟨f,g⟩(σ)."""
        self.P.require("comprehension")
        C, P = self.C, self.P
        x = f.src
        pred = P.reindex(C.pair(f.data, g.data), f.dst.rel)
        m = P.comprehension(x.base, pred)
        carrier = self._restrict(x, m)
        e = self.arrow(carrier, x, m)

        def mediate(h: Mor):
            return self.arrow(h.src, carrier, P.comprehension_lift(x.base, pred, h.data))

        return StructureWitness("equalizer", carrier, (e,), mediate, diagram=(f, g))

    def initial(self) -> StructureWitness:
        w = self.C.initial()
        z = EqcObject(w.carrier, self.P.fiber(rel_object(self.P, w.carrier)).top)
        return StructureWitness("initial", z, (), lambda y: self.arrow(z, y, w.mediate(y.base)))

    def coproduct(self, x: EqcObject, y: EqcObject) -> StructureWitness:
        from .constructions import coproduct_eqc

        return coproduct_eqc(self, x, y)

    def coequalizer(self, f: Mor, g: Mor) -> StructureWitness:
        from .constructions import coequalizer_eqc

        return coequalizer_eqc(self, f, g)

    def slice_exponential(self, f: Mor, g: Mor) -> SliceExponential:
        from .constructions import slice_exponential

        return slice_exponential(self, f, g).exponential


class EqcDoctrine(Doctrine):
    """Descent data over (A, ρ); equality on (A, ρ) is ρ itself."""

    def __init__(self, P: Doctrine, quotient: bool = True):
        _require_elementary(P)
        self.P = P
        self.base = EqcCategory(P, quotient=quotient)
        self.name = f"{'Q' if quotient else 'Qi'}({P.name})"
        caps = {"elementary", "quotients"} | (
            set(P.capabilities)
            & {"existential", "universal", "implicational", "disjunctive", "comprehension", "classifier", "power_objects"}
        )
        self.capabilities = frozenset(caps)
        self._fibers: dict = {}

    def fiber(self, x: EqcObject):
        F = self._fibers.get(x)
        if F is None:
            P = self.P
            F = self._fibers[x] = SubFiber(
                P.fiber(x.base), lambda al, x=x: is_descent_datum(P, x.base, x.rel, al), name=f"Des{x!r}"
            )
        return F

    def reindex(self, f: Mor, alpha):
        return self.P.reindex(f.data, alpha)

    def delta(self, x: EqcObject):
        return x.rel

    def exists_pr(self, x, y, alpha, leg: int = 0):
        return self.P.exists_pr(x.base, y.base, alpha, leg)

    def forall_pr(self, x, y, alpha, leg: int = 0):
        return self.P.forall_pr(x.base, y.base, alpha, leg)

    def comprehension(self, x: EqcObject, alpha) -> Mor:
        m = self.P.comprehension(x.base, alpha)
        return self.base.arrow(self.base._restrict(x, m), x, m)

    def comprehension_lift(self, x: EqcObject, alpha, g: Mor) -> Mor:
        m = self.comprehension(x, alpha)
        h = self.P.comprehension_lift(x.base, alpha, g.data)
        return self.base.arrow(g.src, m.src, h)

    def quotient(self, x: EqcObject, sigma) -> Mor:
        """[id]: (A, ρ) → (A, σ) for an equivalence relation σ ≥ ρ."""
        if not self.fiber(rel_object(self, x)).contains(sigma) or not D.is_equivalence(self.P, x.base, sigma):
            raise TypeMismatch(f"{sigma!r} is not an equivalence relation on {x!r}")
        return self.base.arrow(x, EqcObject(x.base, sigma), self.base.C.identity(x.base))

    def classifier(self):
        from .constructions import classifier_eqc

        return classifier_eqc(self)

    def classify(self, x: EqcObject, phi) -> Mor:
        omega, _ = self.classifier()
        return self.base.arrow(x, omega, self.P.classify(x.base, phi))

    def power(self, x: EqcObject):
        from .constructions import power_eqc

        return power_eqc(self, x)

    def power_classify(self, x: EqcObject, y: EqcObject, phi) -> Mor:
        px, _ = self.power(x)
        return self.base.arrow(y, px, self.P.power_classify(x.base, y.base, phi))

    def collapse_arrow(self, f: Mor) -> Mor:
        """Representative of f under ρ ≤ P_{f×g}(σ).  With reflexivity and
        transitivity this is ⊤ = P_⟨f,g⟩(σ), the identification the quotient
        completion makes, so its representatives serve."""
        if self.base.quotient:
            return f
        if not hasattr(self, "_quotiented"):
            self._quotiented = EqcCategory(self.P, quotient=True)
        return Mor(f.src, f.dst, self._quotiented.canon(f.src, f.dst, f.data))


def eqc(P: Doctrine) -> EqcDoctrine:
    return EqcDoctrine(P, quotient=True)


def intensional_qc(P: Doctrine) -> EqcDoctrine:
    return EqcDoctrine(P, quotient=False)


# ---------------------------------------------------------------- extensional collapse


class CollapseCategory(Category):
    """Base arrows identified when δ_A ≤ P_{f×f'}(δ_B)."""

    def __init__(self, P: Doctrine):
        self.P = P
        self.C = P.base
        self.name = f"ext({self.C.name})"
        self._classes: dict = {}

    def objects(self, frag):
        return self.C.objects(frag)

    def equal(self, a, b, f: Mor, g: Mor) -> bool:
        F = self.P.fiber(rel_object(self.P, a))
        return F.le(self.P.delta(a), self.P.reindex(self.C.times(f, g), self.P.delta(b)))

    def canon(self, f: Mor) -> Mor:
        hook = getattr(self.P, "collapse_arrow", None)
        if hook is not None:
            g = hook(f)
            if g is not None:
                return g
        a, b = f.src, f.dst
        classes = self._classes.get((a, b))
        if classes is None:
            classes = self._classes[a, b] = {}
            reps: list[Mor] = []
            for g in self.C.hom(a, b):
                for r in reps:
                    if self.equal(a, b, g, r):
                        classes[g] = r
                        break
                else:
                    reps.append(g)
                    classes[g] = g
        return classes[f]

    def hom(self, a, b):
        seen: dict = {}
        for f in self.C.hom(a, b):
            seen.setdefault(self.canon(f), None)
        return list(seen)

    def hom_size(self, a, b):
        return self.C.hom_size(a, b)

    def identity(self, a):
        return self.canon(self.C.identity(a))

    def _compose(self, g, f):
        return self.canon(self.C.compose(g, f))

    def _wrap(self, w: StructureWitness) -> StructureWitness:
        legs = tuple(self.canon(l) for l in w.legs)
        return StructureWitness(w.kind, w.carrier, legs, lambda *a: self.canon(w.mediate(*a)), w.weak, w.diagram)

    def terminal(self):
        return self._wrap(self.C.terminal())

    def product(self, a, b):
        return self._wrap(self.C.product(a, b))

    def pullback(self, f, g):
        return self._wrap(self.C.pullback(f, g))


class CollapseDoctrine(Doctrine):
    def __init__(self, P: Doctrine):
        _require_elementary(P)
        self.P = P
        self.base = CollapseCategory(P)
        self.name = f"ext({P.name})"
        self.capabilities = P.capabilities

    def fiber(self, a):
        return self.P.fiber(a)

    def reindex(self, f, alpha):
        return self.P.reindex(f, alpha)

    def delta(self, a):
        return self.P.delta(a)

    def exists_pr(self, a, b, alpha, leg=0):
        return self.P.exists_pr(a, b, alpha, leg)

    def forall_pr(self, a, b, alpha, leg=0):
        return self.P.forall_pr(a, b, alpha, leg)

    def comprehension(self, a, alpha):
        return self.base.canon(self.P.comprehension(a, alpha))

    def comprehension_lift(self, a, alpha, g):
        return self.base.canon(self.P.comprehension_lift(a, alpha, g))

    def classifier(self):
        return self.P.classifier()

    def classify(self, a, phi):
        return self.base.canon(self.P.classify(a, phi))

    def power(self, a):
        return self.P.power(a)

    def power_classify(self, a, b, phi):
        return self.base.canon(self.P.power_classify(a, b, phi))

    def quotient(self, a, rho):
        return self.base.canon(self.P.quotient(a, rho))


def extensional_collapse(P: Doctrine) -> CollapseDoctrine:
    return CollapseDoctrine(P)


# ---------------------------------------------------------------- comprehension completion


@dataclass(frozen=True)
class CompObject:
    base: Any
    pred: Any

    def __repr__(self):
        return f"⟨{self.base!r} | {self.pred!r}⟩"


class CompCategory(Category):
    """Pairs (A, α); arrows are base arrows f with α ≤ P_f(β)."""

    def __init__(self, P: Doctrine):
        self.P = P
        self.C = P.base
        self.name = f"comp({self.C.name})"
        self._objs: dict = {}

    def objects(self, frag: Fragment) -> list:
        out = []
        for a in self.C.objects(frag):
            key = (a, frag.budget)
            if key not in self._objs:
                preds = D._small(self.P.fiber(a), frag.budget) or []
                self._objs[key] = [CompObject(a, al) for al in preds]
            out.extend(self._objs[key])
        out += [o for o in frag.objects if o not in out]
        return out

    def valid(self, x: CompObject, y: CompObject, f: Mor) -> bool:
        return self.P.fiber(x.base).le(x.pred, self.P.reindex(f, y.pred))

    def arrow(self, x: CompObject, y: CompObject, f: Mor) -> Mor:
        if f.src != x.base or f.dst != y.base or not self.valid(x, y, f):
            raise TypeMismatch(f"{f!r} is not an arrow {x!r} → {y!r}")
        return Mor(x, y, f)

    def hom(self, x, y):
        return [Mor(x, y, f) for f in self.C.hom(x.base, y.base) if self.valid(x, y, f)]

    def hom_size(self, x, y):
        return self.C.hom_size(x.base, y.base)

    def is_iso(self, f: Mor) -> Mor | None:
        """Inverses are base inverses, so only the base inverse needs checking."""
        g = self.C.is_iso(f.data)
        if g is None or not self.valid(f.dst, f.src, g):
            return None
        return Mor(f.dst, f.src, g)

    def identity(self, x):
        return Mor(x, x, self.C.identity(x.base))

    def _compose(self, g, f):
        return Mor(f.src, g.dst, self.C.compose(g.data, f.data))

    def _wrap_cone(self, carrier, legs, w: StructureWitness, kind, diagram=()):
        def mediate(*cone):
            return Mor(cone[0].src, carrier, w.mediate(*(c.data for c in cone)))

        return StructureWitness(kind, carrier, legs, mediate, diagram=diagram)

    def terminal(self):
        w = self.C.terminal()
        t = CompObject(w.carrier, self.P.fiber(w.carrier).top)
        return StructureWitness("terminal", t, (), lambda x: Mor(x, t, w.mediate(x.base)))

    def product(self, x, y):
        w = self.C.product(x.base, y.base)
        F = self.P.fiber(w.carrier)
        l, r = w.legs
        p = CompObject(w.carrier, F.meet(self.P.reindex(l, x.pred), self.P.reindex(r, y.pred)))
        return self._wrap_cone(p, (Mor(p, x, l), Mor(p, y, r)), w, "product")

    def pullback(self, f, g):
        w = self.C.pullback(f.data, g.data)
        F = self.P.fiber(w.carrier)
        l, r = w.legs
        p = CompObject(w.carrier, F.meet(self.P.reindex(l, f.src.pred), self.P.reindex(r, g.src.pred)))
        return self._wrap_cone(p, (Mor(p, f.src, l), Mor(p, g.src, r)), w, "pullback", diagram=(f, g))

    def initial(self):
        w = self.C.initial()
        z = CompObject(w.carrier, self.P.fiber(w.carrier).top)
        return StructureWitness("initial", z, (), lambda y: Mor(z, y, w.mediate(y.base)))

    def coproduct(self, x, y):
        """(A+B, E_{i_A}(α) ∨ E_{i_B}(β))."""
        w = self.C.coproduct(x.base, y.base)
        ia, ib = w.legs
        F = self.P.fiber(w.carrier)
        s = CompObject(w.carrier, F.join(exists_along(self.P, ia, x.pred), exists_along(self.P, ib, y.pred)))

        def mediate(f, g):
            return Mor(s, f.dst, w.mediate(f.data, g.data))

        return StructureWitness("coproduct", s, (Mor(x, s, ia), Mor(y, s, ib)), mediate)

    def slice_exponential(self, f: Mor, g: Mor) -> SliceExponential:
        """Built on the base slice exponential q': W' → A with evaluation ev' on Z'.

        W carries ω = P_q'(α) ∧ A_{t_W'}(P_{t_X}(ξ) ⇒ P_ev'(ξ')): a point of W'
        is as true as its base point and the truth of the function it encodes.
        """
        P, C = self.P, self.C
        for cap in ("universal", "implicational"):
            P.require(cap)
        se = C.slice_exponential(f.data, g.data)
        x, y, a = f.src, g.src, f.dst
        W = se.exp.src
        FZ = P.fiber(se.pb_x.src)
        body = FZ.imp(P.reindex(se.pb_x, x.pred), P.reindex(se.ev, y.pred))
        omega = P.fiber(W).meet(P.reindex(se.exp, a.pred), D.forall_along(P, se.pb_w, body))
        w_obj = CompObject(W, omega)
        q = Mor(w_obj, a, se.exp)
        pb = self.pullback(f, q)
        zx, zw = pb.legs
        ev = Mor(pb.carrier, y, se.ev)

        def transpose(h: Mor, m: Mor) -> Mor:
            u = se.transpose(h.data, m.data)
            return self.arrow(h.src, w_obj, u)

        return SliceExponential(f, g, q, zx, zw, ev, transpose)


class CompDoctrine(Doctrine):
    """Fibers are down-sets {φ ≤ α}; comprehension of φ is id: (A, φ) → (A, α)."""

    def __init__(self, P: Doctrine):
        _require_elementary(P)
        self.P = P
        self.base = CompCategory(P)
        self.name = f"C({P.name})"
        caps = {"elementary", "comprehension"} | (
            set(P.capabilities) & {"existential", "universal", "implicational", "disjunctive", "classifier", "power_objects"}
        )
        self.capabilities = frozenset(caps)

    def fiber(self, x: CompObject):
        return DownFiber(self.P.fiber(x.base), x.pred)

    def reindex(self, f: Mor, psi):
        return self.P.fiber(f.src.base).meet(self.P.reindex(f.data, psi), f.src.pred)

    def delta(self, x: CompObject):
        C, P = self.P.base, self.P
        w = C.product(x.base, x.base)
        return P.fiber(w.carrier).meet(P.delta(x.base), P.reindex(w.legs[0], x.pred))

    def exists_pr(self, x, y, alpha, leg=0):
        return self.P.exists_pr(x.base, y.base, alpha, leg)

    def forall_pr(self, x, y, alpha, leg=0):
        P, C = self.P, self.P.base
        w = C.product(x.base, y.base)
        F = P.fiber(w.carrier)
        ext = F.meet(P.reindex(w.legs[0], x.pred), P.reindex(w.legs[1], y.pred))
        target = (x, y)[leg]
        return P.fiber(target.base).meet(target.pred, P.forall_pr(x.base, y.base, F.imp(ext, alpha), leg))

    def comprehension(self, x: CompObject, phi) -> Mor:
        return Mor(CompObject(x.base, phi), x, self.P.base.identity(x.base))

    def comprehension_lift(self, x: CompObject, phi, g: Mor) -> Mor:
        target = CompObject(x.base, phi)
        if not self.base.valid(g.src, target, g.data):
            from .oracle import NoMediator

            raise NoMediator(f"{g!r} does not factor through the comprehension of {phi!r}")
        return Mor(g.src, target, g.data)

    def classifier(self):
        omega, member = self.P.classifier()
        return CompObject(omega, self.P.fiber(omega).top), member

    def classify(self, x: CompObject, phi) -> Mor:
        omega, _ = self.classifier()
        return Mor(x, omega, self.P.classify(x.base, phi))

    def power(self, x: CompObject):
        P, C = self.P, self.P.base
        pa, member = P.power(x.base)
        w = C.product(x.base, pa)
        return CompObject(pa, P.fiber(pa).top), P.fiber(w.carrier).meet(member, P.reindex(w.legs[0], x.pred))

    def power_classify(self, x: CompObject, y: CompObject, phi) -> Mor:
        px, _ = self.power(x)
        return Mor(y, px, self.P.power_classify(x.base, y.base, phi))

    def canonical_arrow(self, f: Mor, sigma, guard=None):
        hook = getattr(self.P, "canonical_arrow", None)
        if hook is None:
            return None
        g = f.src.pred if guard is None else guard
        return Mor(f.src, f.dst, hook(f.data, sigma, g))


def comprehension_completion(P: Doctrine) -> CompDoctrine:
    return CompDoctrine(P)


# ---------------------------------------------------------------- functional completion


class FunCategory(Category):
    """Objects of the base; arrows A → B are total single-valued relations in P(A×B)."""

    def __init__(self, P: Doctrine):
        for cap in ("elementary", "existential"):
            P.require(cap)
        self.P = P
        self.C = P.base
        self.name = f"F({P.name})"
        self._homs: dict = {}

    def objects(self, frag):
        return self.C.objects(frag)

    def graph(self, f: Mor) -> Mor:
        """The graph P_{f×id}(δ_B) of a base arrow."""
        C = self.C
        return Mor(f.src, f.dst, self.P.reindex(C.times(f, C.identity(f.dst)), self.P.delta(f.dst)))

    def is_function(self, a, b, F) -> bool:
        return D.is_total(self.P, a, b, F) and D.is_single_valued(self.P, a, b, F)

    def hom(self, a, b):
        key = (a, b)
        out = self._homs.get(key)
        if out is None:
            w = self.C.product(a, b)
            rels = D._small(self.P.fiber(w.carrier), 1 << 20)
            if rels is None:
                raise Unsupported(f"{self.name}: relation fiber over {a!r}×{b!r} is too large")
            out = self._homs[key] = [Mor(a, b, F) for F in rels if self.is_function(a, b, F)]
        return list(out)

    def hom_size(self, a, b):
        return self.P.fiber(self.C.product(a, b).carrier).size()

    def identity(self, a):
        return Mor(a, a, self.P.delta(a))

    def _compose(self, g: Mor, f: Mor) -> Mor:
        """E_b[F(a,b) ∧ G(b,c)] over (A×C)×B."""
        P, C = self.P, self.C
        a, b, c = f.src, f.dst, g.dst
        wac = C.product(a, c)
        pa, pc = wac.legs
        t = C.product(wac.carrier, b)
        l, k = t.legs
        F = P.fiber(t.carrier)
        body = F.meet(
            P.reindex(C.pair(C.compose(pa, l), k), f.data),
            P.reindex(C.pair(k, C.compose(pc, l)), g.data),
        )
        return Mor(a, c, P.exists_pr(wac.carrier, b, body, 0))

    def terminal(self):
        w = self.C.terminal()
        return StructureWitness("terminal", w.carrier, (), lambda x: self.graph(w.mediate(x)))

    def product(self, a, b):
        P, C = self.P, self.C
        w = C.product(a, b)
        p = w.carrier
        legs = (self.graph(w.legs[0]), self.graph(w.legs[1]))

        def mediate(f: Mor, g: Mor):
            x = f.src
            xp = C.product(x, p)
            l, r = xp.legs
            pa, pb = w.legs
            F = P.fiber(xp.carrier)
            rel = F.meet(
                P.reindex(C.pair(l, C.compose(pa, r)), f.data),
                P.reindex(C.pair(l, C.compose(pb, r)), g.data),
            )
            return Mor(x, p, rel)

        return StructureWitness("product", p, legs, mediate)


class FunDoctrine(Doctrine):
    """Same fibers as P; reindexing along F is α ↦ E_b[F(a,b) ∧ α(b)]."""

    def __init__(self, P: Doctrine):
        self.P = P
        self.base = FunCategory(P)
        self.name = f"F({P.name})"
        self.capabilities = frozenset(
            set(P.capabilities) & {"elementary", "existential", "universal", "implicational", "disjunctive"}
        )

    def fiber(self, a):
        return self.P.fiber(a)

    def reindex(self, f: Mor, alpha):
        P, C = self.P, self.P.base
        w = C.product(f.src, f.dst)
        body = P.fiber(w.carrier).meet(f.data, P.reindex(w.legs[1], alpha))
        return P.exists_pr(f.src, f.dst, body, 0)

    def delta(self, a):
        return self.P.delta(a)

    def exists_pr(self, a, b, alpha, leg=0):
        return self.P.exists_pr(a, b, alpha, leg)

    def forall_pr(self, a, b, alpha, leg=0):
        return self.P.forall_pr(a, b, alpha, leg)


def functional_completion(P: Doctrine) -> FunDoctrine:
    return FunDoctrine(P)


def graph_functor(F: FunDoctrine) -> Functor:
    """The base of P into the base of its functional completion."""
    B = F.base
    return Functor(F.P.base, B, lambda a: a, B.graph, name="graph")


# ---------------------------------------------------------------- morphisms and change of base


@dataclass
class DoctrineMorphism:
    """A base functor together with fiber maps b_A: P(A) → R(F A)."""

    src: Doctrine
    dst: Doctrine
    functor: Functor
    fiber_map: Callable
    name: str = "morphism"

    def check(self, frag: Fragment) -> PropertyReport:
        """Naturality, monotonicity and preservation of top and meets."""
        t = Tally(f"{self.name}.natural")
        P, R, F = self.src, self.dst, self.functor
        C = P.base
        objs = C.objects(frag)
        for a in objs:
            xs = D._small(P.fiber(a), frag.budget)
            if xs is None:
                t.skip()
                continue
            FA, RA = F(a), R.fiber(F(a))
            if self.fiber_map(a, P.fiber(a).top) != RA.top:
                t.fail(law="top", object=a)
                return t.report()
            for x in xs:
                for y in xs:
                    if self.fiber_map(a, P.fiber(a).meet(x, y)) != RA.meet(self.fiber_map(a, x), self.fiber_map(a, y)):
                        t.fail(law="meet", object=a, x=x, y=y)
                        return t.report()
            for b in objs:
                ys = D._small(P.fiber(b), frag.budget)
                fs = D._homs(C, a, b, frag.budget)
                if ys is None or fs is None:
                    t.skip()
                    continue
                for f in fs:
                    Ff = F(f)
                    for y in ys:
                        if self.fiber_map(a, P.reindex(f, y)) != R.reindex(Ff, self.fiber_map(b, y)):
                            t.fail(law="naturality", f=f, alpha=y, image=FA)
                            return t.report()
            t.ok()
        return t.report()

    def check_existential(self, frag: Fragment) -> PropertyReport:
        """b_A(E_pr α) = E_pr(b_{A×B} α) along first projections."""
        t = Tally(f"{self.name}.existential")
        P, R, F = self.src, self.dst, self.functor
        C = P.base
        objs = C.objects(frag)
        for a in objs:
            for b in objs:
                w = C.product(a, b)
                xs = D._small(P.fiber(w.carrier), frag.budget)
                if xs is None:
                    t.skip()
                    continue
                for al in xs:
                    lhs = self.fiber_map(a, P.exists_pr(a, b, al, 0))
                    rhs = R.exists_pr(F(a), F(b), self.fiber_map(w.carrier, al), 0)
                    if lhs != rhs:
                        t.fail(A=a, B=b, alpha=al, left=lhs, right=rhs)
                        return t.report()
                t.ok()
        return t.report()


class ChangeOfBase(Doctrine):
    """R∘F^op for a product-preserving functor F into the base of R."""

    def __init__(self, R: Doctrine, F: Functor, name: str | None = None):
        self.R = R
        self.F = F
        self.base = F.src
        self.name = name or f"{R.name}∘{F.name}"
        self.capabilities = frozenset(
            set(R.capabilities) & {"elementary", "existential", "universal", "implicational", "disjunctive"}
        )

    def fiber(self, a):
        return self.R.fiber(self.F(a))

    def reindex(self, f, alpha):
        return self.R.reindex(self.F(f), alpha)

    def delta(self, a):
        return self.R.delta(self.F(a))

    def exists_pr(self, a, b, alpha, leg=0):
        return self.R.exists_pr(self.F(a), self.F(b), alpha, leg)

    def forall_pr(self, a, b, alpha, leg=0):
        return self.R.forall_pr(self.F(a), self.F(b), alpha, leg)


def nabla(P: Doctrine, Q: EqcDoctrine) -> Functor:
    """A ↦ (A, δ_A), f ↦ [f]."""
    B = Q.base
    return Functor(P.base, B, lambda a: EqcObject(a, P.delta(a)), lambda f: B.arrow(EqcObject(f.src, P.delta(f.src)), EqcObject(f.dst, P.delta(f.dst)), f), name="nabla")


def embed_nabla(P: Doctrine, Q: EqcDoctrine | None = None) -> DoctrineMorphism:
    """P → eqc(P); the fiber maps are identities since Des_δ = P(A)."""
    Q = Q or eqc(P)
    return DoctrineMorphism(P, Q, nabla(P, Q), lambda a, alpha: alpha, name="nabla")


def same_doctrine_on(P: Doctrine, R: Doctrine, frag: Fragment) -> PropertyReport:
    """Same base objects, same fibers (as sets) and same reindexing on the fragment."""
    t = Tally("same_doctrine")
    C = P.base
    objs = C.objects(frag)
    for a in objs:
        xs = D._small(P.fiber(a), frag.budget)
        ys = D._small(R.fiber(a), frag.budget)
        if xs is None or ys is None:
            t.skip()
            continue
        if set(xs) != set(ys):
            t.fail(law="fiber", object=a, only_left=sorted(set(xs) - set(ys), key=repr)[:3])
            return t.report()
        for b in objs:
            fs = D._homs(C, a, b, frag.budget)
            if fs is None:
                t.skip()
                continue
            for f in fs:
                for y in D._small(P.fiber(b), frag.budget) or ():
                    if P.reindex(f, y) != R.reindex(f, y):
                        t.fail(law="reindex", f=f, alpha=y)
                        return t.report()
        t.ok()
    return t.report()


def collapse_of_intensional(P: Doctrine, Q: EqcDoctrine | None = None) -> Functor:
    """ext(iqc(P)) → eqc(P): identity on objects, a representative goes to its class."""
    Q = Q or eqc(P)
    src = extensional_collapse(intensional_qc(P)).base
    B = Q.base
    return Functor(src, B, lambda x: x, lambda f: B.arrow(f.src, f.dst, f.data), name="ext∘iqc→eqc")


def quotients_of_collapse(P: Doctrine, Q: EqcDoctrine | None = None) -> Functor:
    """eqc(ext(P)) → eqc(P): the collapse leaves fibers alone, so objects agree."""
    Q = Q or eqc(P)
    src = eqc(extensional_collapse(P)).base
    B = Q.base
    return Functor(src, B, lambda x: x, lambda f: B.arrow(f.src, f.dst, f.data), name="eqc∘ext→eqc")
