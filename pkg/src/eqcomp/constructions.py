"""Formula-level constructions on a doctrine and its quotient completion.

Equivalence closure, coproducts, the predicate classifier and power objects
of the completion, slice exponentials, coequalizers, the coarse reflection
and the projective core.  ``MUTANTS`` holds deliberately wrong variants used
to confirm that the oracles reject them.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Any, Callable

from . import doctrine as D
from . import oracle as O
from .completions import ChangeOfBase, EqcCategory, EqcDoctrine, EqcObject, eqc, functional_completion
from .doctrine import Doctrine, exists_along, forall_along, pull, rel_object
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
    combine,
    is_epi,
    is_mono,
)


# ---------------------------------------------------------------- equivalence closure


def _relational_square(P: Doctrine, a, rho):
    """E_{a'}[ρ(a,a') ∧ ρ(a',a'')] over A×A, quantifying over (A×A)×A."""
    C = P.base
    aa = C.product(a, a)
    p1, p2 = aa.legs
    t = C.product(aa.carrier, a)
    l, k = t.legs
    F = P.fiber(t.carrier)
    body = F.meet(P.reindex(C.pair(C.compose(p1, l), k), rho), P.reindex(C.pair(k, C.compose(p2, l)), rho))
    return P.exists_pr(aa.carrier, a, body, 0)


def _closure_fixpoint(P: Doctrine, a, rho):
    for cap in ("elementary", "existential", "disjunctive"):
        P.require(cap)
    C = P.base
    F = P.fiber(rel_object(P, a))
    d, sw = P.delta(a), C.swap(a, a)
    cur = rho
    while True:
        nxt = F.join(F.join(cur, d), F.join(P.reindex(sw, cur), _relational_square(P, a, cur)))
        if nxt == cur:
            return cur
        cur = nxt


@dataclass
class ClosurePredicates:
    """The predicates r, s, t, eq and the inclusion of ρ over the power object of A×A."""

    power: Any
    member: Any
    r: Any
    s: Any
    t: Any
    eq: Any
    incl: Any
    closure: Any


def closure_predicates(P: Doctrine, a, rho) -> ClosurePredicates:
    """The closure as the meet of all equivalence relations above ρ, written in the
    internal language and evaluated through the power object of A×A."""
    for cap in ("elementary", "universal", "implicational", "power_objects"):
        P.require(cap)
    C = P.base
    aa = C.product(a, a)
    p1, p2 = aa.legs
    pw, member = P.power(aa.carrier)  # member over (A×A)×𝒫(A×A)
    # r(U) = ∀a (a,a) ∈ U
    w1 = C.product(a, pw)
    body = P.reindex(C.pair(C.compose(C.diagonal(a), w1.legs[0]), w1.legs[1]), member)
    r = P.forall_pr(a, pw, body, 1)
    # s(U) = ∀a,a' (a,a') ∈ U ⇒ (a',a) ∈ U
    w2 = C.product(aa.carrier, pw)
    l2, u2 = w2.legs
    F2 = P.fiber(w2.carrier)
    s = P.forall_pr(
        aa.carrier, pw, F2.imp(member, P.reindex(C.pair(C.compose(C.swap(a, a), l2), u2), member)), 1
    )
    # t(U) = ∀a,a',a'' (a,a') ∈ U ∧ (a',a'') ∈ U ⇒ (a,a'') ∈ U
    aaa, (q1, q2, q3) = C.power_product([a, a, a])
    w3 = C.product(aaa, pw)
    l3, u3 = w3.legs
    F3 = P.fiber(w3.carrier)

    def mem(x, y):
        return P.reindex(C.pair(C.pair(C.compose(x, l3), C.compose(y, l3)), u3), member)

    t = P.forall_pr(aaa, pw, F3.imp(F3.meet(mem(q1, q2), mem(q2, q3)), mem(q1, q3)), 1)
    FP = P.fiber(pw)
    eq = FP.meet(r, FP.meet(s, t))
    # incl(U) = ∀a,a' ρ(a,a') ⇒ (a,a') ∈ U
    incl = P.forall_pr(aa.carrier, pw, F2.imp(P.reindex(l2, rho), member), 1)
    # ρ̄(a,a') = ∀U eq(U) ∧ incl(U) ⇒ (a,a') ∈ U
    closure = P.forall_pr(aa.carrier, pw, F2.imp(P.reindex(u2, FP.meet(eq, incl)), member), 0)
    return ClosurePredicates(pw, member, r, s, t, eq, incl, closure)


def equiv_closure(P: Doctrine, a, rho, strategy: str = "fixpoint"):
    """The least P-equivalence relation above ρ."""
    if strategy == "fixpoint":
        return _closure_fixpoint(P, a, rho)
    if strategy == "tripos":
        return closure_predicates(P, a, rho).closure
    raise ValueError(f"unknown closure strategy {strategy!r}")


def check_closure(P: Doctrine, a, rho, closed, frag: Fragment = Fragment()) -> PropertyReport:
    """``closed`` is an equivalence relation above ρ and below every other one."""
    t = Tally("equivalence_closure")
    F = P.fiber(rel_object(P, a))
    why = D.equivalence_failure(P, a, closed)
    if why is not None:
        t.fail(reason=f"not {why}", object=a, rho=rho, closure=closed)
        return t.report()
    if not F.le(rho, closed):
        t.fail(reason="not above the relation", object=a, rho=rho, closure=closed)
        return t.report()
    rels = D._small(F, frag.budget)
    if rels is None:
        t.skip()
        return t.report()
    for sigma in rels:
        if F.le(rho, sigma) and D.is_equivalence(P, a, sigma) and not F.le(closed, sigma):
            t.fail(reason="not least", object=a, rho=rho, closure=closed, smaller=sigma)
            return t.report()
    t.ok()
    return t.report()


# ---------------------------------------------------------------- coproducts


def coproduct_eqc(B: EqcCategory, x: EqcObject, y: EqcObject) -> StructureWitness:
    """(A+B, ρ⊞σ) with ρ⊞σ = E_{i_A×i_A}(ρ) ∨ E_{i_B×i_B}(σ)."""
    P, C = B.P, B.C
    for cap in ("existential", "disjunctive"):
        P.require(cap)
    w = C.coproduct(x.base, y.base)
    ia, ib = w.legs
    F = P.fiber(rel_object(P, w.carrier))
    rel = F.join(exists_along(P, C.times(ia, ia), x.rel), exists_along(P, C.times(ib, ib), y.rel))
    s = EqcObject(w.carrier, rel)
    legs = (B.arrow(x, s, ia), B.arrow(y, s, ib))

    def mediate(f: Mor, g: Mor):
        return B.arrow(s, f.dst, w.mediate(f.data, g.data))

    return StructureWitness("coproduct", s, legs, mediate)


def check_coproducts(Q: EqcDoctrine, frag: Fragment) -> PropertyReport:
    """Universal property, injections inj-P and jointly surj-P, disjointness, effectiveness
    of ⊞ and distributivity, on every pair (and triple) of fragment objects."""
    t = Tally("coproducts")
    B = Q.base
    objs = B.objects(frag)
    for x in objs:
        for y in objs:
            w = B.coproduct(x, y)
            up = O.check_universal(B, w, frag)
            if up.fails:
                t.fail(law="universal", x=x, y=y, detail=up.counterexample)
                return t.report()
            i1, i2 = w.legs
            s = w.carrier
            for i, src in ((i1, x), (i2, y)):
                if not D.is_injP(Q, i):
                    t.fail(law="injection not inj-P", injection=i)
                    return t.report()
                if Q.reindex(B.times(i, i), s.rel) != src.rel:
                    t.fail(law="not effective", injection=i)
                    return t.report()
            Fs = Q.fiber(s)
            cover = Fs.join(exists_along(Q, i1, Q.fiber(x).top), exists_along(Q, i2, Q.fiber(y).top))
            if cover != Fs.top:
                t.fail(law="injections not jointly surj-P", x=x, y=y)
                return t.report()
            Fxy = Q.fiber(B.product(x, y).carrier)
            if Q.reindex(B.pair(B.compose(i1, B.proj(x, y, 0)), B.compose(i2, B.proj(x, y, 1))), s.rel) != Fxy.bottom:
                t.fail(law="not disjoint", x=x, y=y)
                return t.report()
            t.ok()
    for x in objs:
        for y in objs:
            for z in objs:
                why = _distributivity_failure(B, x, y, z)
                if why is not None:
                    t.fail(law="not distributive", x=x, y=y, z=z, reason=why)
                    return t.report()
                t.ok()
    return t.report()


def _distributivity_failure(B: EqcCategory, x, y, z) -> str | None:
    """The base distributivity map and its base inverse must both be arrows of the
    completion and compose to identities there."""
    d0 = distributivity_map(B.C, x.base, y.base, z.base)
    inv0 = B.C.is_iso(d0)
    if inv0 is None:
        return "base map is not invertible"
    src = B.coproduct(B.product(x, y).carrier, B.product(x, z).carrier).carrier
    dst = B.product(x, B.coproduct(y, z).carrier).carrier
    if not (B.preserves(src, dst, d0) and B.preserves(dst, src, inv0)):
        return "base inverse does not respect the relations"
    m, n = B.arrow(src, dst, d0), B.arrow(dst, src, inv0)
    if B.compose(n, m) != B.identity(src) or B.compose(m, n) != B.identity(dst):
        return "classes are not inverse"
    return None


def distributivity_map(C: Category, x, y, z) -> Mor:
    """(X×Y)+(X×Z) → X×(Y+Z)."""
    s = C.coproduct(y, z)
    j1, j2 = s.legs
    xy, xz, xs = C.product(x, y), C.product(x, z), C.product(x, s.carrier)
    left = xs.mediate(xy.legs[0], C.compose(j1, xy.legs[1]))
    right = xs.mediate(xz.legs[0], C.compose(j2, xz.legs[1]))
    return C.coproduct(xy.carrier, xz.carrier).mediate(left, right)


# ---------------------------------------------------------------- classifier and power objects


def classifier_eqc(Q: EqcDoctrine):
    """(Ω, λ) with λ = P_pr1(∈) ↔ P_pr2(∈); membership is the weak classifier's ∈."""
    P = Q.P
    P.require("implicational")
    C = P.base
    omega, member = P.classifier()
    w = C.product(omega, omega)
    F = P.fiber(w.carrier)
    a, b = P.reindex(w.legs[0], member), P.reindex(w.legs[1], member)
    lam = F.meet(F.imp(a, b), F.imp(b, a))
    return EqcObject(omega, lam), member


def power_eqc(Q: EqcDoctrine, x: EqcObject):
    """(𝒫A, λ_A) with U ∈̂ a iff ∃a' ρ(a,a') ∧ a' ∈ U, and λ_A(U,V) = ∀a (a ∈̂ U ⇔ a ∈̂ V)."""
    P = Q.P
    for cap in ("existential", "universal", "implicational"):
        P.require(cap)
    C = P.base
    a = x.base
    pa, member = P.power(a)
    ap = C.product(a, pa)
    pA, pU = ap.legs
    t = C.product(ap.carrier, a)
    l, k = t.legs
    Ft = P.fiber(t.carrier)
    body = Ft.meet(P.reindex(C.pair(C.compose(pA, l), k), x.rel), P.reindex(C.pair(k, C.compose(pU, l)), member))
    hat = P.exists_pr(ap.carrier, a, body, 0)
    pp = C.product(pa, pa)
    s = C.product(a, pp.carrier)
    sa, sp = s.legs
    Fs = P.fiber(s.carrier)
    u = P.reindex(C.pair(sa, C.compose(pp.legs[0], sp)), hat)
    v = P.reindex(C.pair(sa, C.compose(pp.legs[1], sp)), hat)
    lam = P.forall_pr(a, pp.carrier, Fs.meet(Fs.imp(u, v), Fs.imp(v, u)), 1)
    return EqcObject(pa, lam), hat


# ---------------------------------------------------------------- coequalizers


def coequalizer_eqc(B: EqcCategory, f: Mor, g: Mor, strategy: str = "fixpoint") -> StructureWitness:
    """Close σ ∨ E_⟨f,g⟩(⊤) to an equivalence relation σ̄ and take [id]: (Y,σ) → (Y,σ̄)."""
    P, C = B.P, B.C
    y = f.dst
    F = P.fiber(rel_object(P, y.base))
    image = exists_along(P, C.pair(f.data, g.data), P.fiber(f.src.base).top)
    closed = equiv_closure(P, y.base, F.join(y.rel, image), strategy)
    target = EqcObject(y.base, closed)
    q = B.arrow(y, target, C.identity(y.base))

    def mediate(h: Mor):
        return B.arrow(target, h.dst, h.data)

    return StructureWitness("coequalizer", target, (q,), mediate, diagram=(f, g))


# ---------------------------------------------------------------- slice exponentials


@dataclass
class SliceExponentialData:
    """Everything built on the way to the exponential [g_ρ]^[f_ρ] over (A, ρ).

    ``f_iso`` and ``g_iso`` are the isomorphisms [f] ≅ [f_ρ] and [g] ≅ [g_ρ]
    of the slice (as pairs of mutually inverse arrows).
    """

    f_rho: Mor
    f_sigma: Mor
    g_rho: Mor
    g_sigma: Mor
    rel_f: Any
    rel_g: Any
    base: SliceExponential
    xi: Any
    theta: Any
    q: Mor
    e: Mor
    exponential: SliceExponential
    f_iso: tuple = ()
    g_iso: tuple = ()
    steps: dict = field(default_factory=dict)


def _split(B: EqcCategory, f: Mor):
    """f_ρ (as a class and as the raw base arrow), f^σ, the relation on X and the iso [f] ≅ [f_ρ]."""
    P, C = B.P, B.C
    src, a = f.src, f.dst
    ba = C.product(src.base, a.base)
    pb_, pa_ = ba.legs
    pred = P.reindex(C.times(f.data, C.identity(a.base)), a.rel)
    m = P.comprehension(ba.carrier, pred)
    fr, fs = C.compose(pa_, m), C.compose(pb_, m)
    FX = P.fiber(rel_object(P, m.src))
    rel = FX.meet(P.reindex(C.times(fr, fr), a.rel), P.reindex(C.times(fs, fs), src.rel))
    xobj = EqcObject(m.src, rel)
    k = P.comprehension_lift(ba.carrier, pred, C.pair(C.identity(src.base), f.data))
    iso = (B.arrow(src, xobj, k), B.arrow(xobj, src, fs))
    return B.arrow(xobj, a, fr), fr, fs, rel, xobj, pred, m, iso


def slice_exponential(B: EqcCategory, f: Mor, g: Mor) -> SliceExponentialData:
    """The exponential of [g] by [f] in the slice over (A, ρ), from a base slice exponential.

    ξ on W' keeps the points that encode relation-preserving functions, W is
    its comprehension, q = q'∘{|ξ|}, and θ relates two points of W when their
    base points are ρ-related and their functions agree up to the relations.
    Evaluation is given on the chosen pullback of [q] along [f_ρ].
    """
    P, C = B.P, B.C
    for cap in ("universal", "implicational", "comprehension"):
        P.require(cap)
    if f.dst != g.dst:
        raise TypeMismatch("slice exponential of arrows over different objects")
    a = f.dst
    # the base construction needs the actual legs, not the class representatives
    f_rho, fr, f_sig, rel_f, xobj, pred_f, m_f, f_iso = _split(B, f)
    g_rho, gr, g_sig, rel_g, x2obj, pred_g, _, g_iso = _split(B, g)
    X = xobj.base
    se = C.slice_exponential(fr, gr)
    q1, t1x, t1w, e1 = se.exp, se.pb_x, se.pb_w, se.ev
    W1, Z1 = q1.src, t1x.src
    # ξ = A_pr3(ξ1 ⇒ ξ2) over Z'×Z'×W'
    zz = C.product(Z1, Z1)
    s = C.product(zz.carrier, W1)
    l, p3 = s.legs
    p1, p2 = C.compose(zz.legs[0], l), C.compose(zz.legs[1], l)
    Fs = P.fiber(s.carrier)
    dW1 = P.delta(W1)
    xi1 = Fs.meet(pull(P, [C.compose(t1w, p1), p3], dW1), pull(P, [C.compose(t1w, p2), p3], dW1))
    xi2 = Fs.imp(
        pull(P, [C.compose(t1x, p1), C.compose(t1x, p2)], rel_f),
        pull(P, [C.compose(e1, p1), C.compose(e1, p2)], rel_g),
    )
    xi = P.forall_pr(zz.carrier, W1, Fs.imp(xi1, xi2), 1)
    c_xi = P.comprehension(W1, xi)
    W = c_xi.src
    q = C.compose(q1, c_xi)
    zpb = C.pullback(fr, q)
    t_x, t_w = zpb.legs
    Z = zpb.carrier
    w = C.pullback(fr, q1).mediate(t_x, C.compose(c_xi, t_w))
    e = C.compose(e1, w)
    # θ = P_{q×q}(ρ) ∧ ∀_⟨π3,π4⟩(θ1 ⇒ θ2) over Z×Z×W×W
    zz2 = C.product(Z, Z)
    ww = C.product(W, W)
    s2 = C.product(zz2.carrier, ww.carrier)
    l2, r2 = s2.legs
    pi1, pi2 = C.compose(zz2.legs[0], l2), C.compose(zz2.legs[1], l2)
    pi3, pi4 = C.compose(ww.legs[0], r2), C.compose(ww.legs[1], r2)
    Fs2 = P.fiber(s2.carrier)
    dW = P.delta(W)
    th1 = Fs2.meet(pull(P, [C.compose(t_w, pi1), pi3], dW), pull(P, [C.compose(t_w, pi2), pi4], dW))
    th2 = Fs2.imp(
        pull(P, [C.compose(t_x, pi1), C.compose(t_x, pi2)], rel_f),
        pull(P, [C.compose(e, pi1), C.compose(e, pi2)], rel_g),
    )
    FW = P.fiber(ww.carrier)
    theta = FW.meet(P.reindex(C.times(q, q), a.rel), P.forall_pr(zz2.carrier, ww.carrier, Fs2.imp(th1, th2), 1))
    wobj = EqcObject(W, theta)
    q_arrow = B.arrow(wobj, a, q)
    # evaluation on the chosen pullback (T, η) of [q] along [f_ρ]
    pbq = B.pullback(f_rho, q_arrow)
    T = pbq.carrier
    piX, piW = (leg.data for leg in pbq.legs)
    ba = C.product(f.src.base, a.base)
    k = P.comprehension_lift(ba.carrier, pred_f, C.compose(C.times(f_sig, q), C.pair(piX, piW)))
    j_ = zpb.mediate(k, piW)
    ev = B.arrow(T, x2obj, C.compose(e, j_))

    def transpose(h: Mor, m: Mor) -> Mor:
        """The arrow [μ]: (C, γ) → (W, θ) corresponding to m: f_ρ ×_A h → g_ρ."""
        hq = C.pullback(fr, h.data)
        lx, lc = hq.legs
        inside = P.comprehension_lift(
            C.product(X, h.src.base).carrier,
            _pullback_pred(B, f_rho, h),
            C.pair(lx, lc),
        )
        # m lies over A only up to ρ: move its A-component onto f_ρ∘l_X
        mq = C.compose(m.data, inside)
        over = C.pair(C.compose(g_sig, mq), C.compose(fr, lx))
        mq = P.comprehension_lift(C.product(g.src.base, a.base).carrier, pred_g, over)
        mu1 = se.transpose(h.data, mq)
        mu = P.comprehension_lift(W1, xi, mu1)
        return B.arrow(h.src, wobj, mu)

    expo = SliceExponential(f_rho, g_rho, q_arrow, pbq.legs[0], pbq.legs[1], ev, transpose)
    steps = {"W'": W1, "Z'": Z1, "W": W, "Z": Z, "T": T.base, "k": k, "j'": j_, "w": w}
    return SliceExponentialData(
        f_rho, f_sig, g_rho, g_sig, rel_f, rel_g, se, xi, theta, q_arrow, e, expo, f_iso, g_iso, steps
    )


def _pullback_pred(B: EqcCategory, f: Mor, g: Mor):
    """P_⟨f pr1, g pr2⟩(σ) over the product of the two domains."""
    P, C = B.P, B.C
    pa, pb = C.product(f.src.base, g.src.base).legs
    return P.reindex(C.pair(C.compose(f.data, pa), C.compose(g.data, pb)), f.dst.rel)


def check_slice_exponential(C: Category, se: SliceExponential, frag: Fragment) -> PropertyReport:
    """Every m: f ×_A h → g over A has exactly one transpose u: dom h → W over A
    with ev ∘ ⟨l_X, u∘l_C⟩ = m, and ``transpose`` returns it."""
    t = Tally("slice_exponential")
    f, g, q = se.f, se.g, se.exp
    a = f.dst
    pbq = C.pullback(f, q)
    if pbq.legs != (se.pb_x, se.pb_w):
        t.fail(reason="evaluation is not given on the chosen pullback")
        return t.report()
    for c in C.objects(frag):
        if C.hom_size(c, a) > frag.budget:
            t.skip()
            continue
        for h in C.hom(c, a):
            pbh = C.pullback(f, h)
            lx, lc = pbh.legs
            if C.hom_size(pbh.carrier, g.src) > frag.budget or C.hom_size(c, q.src) > frag.budget:
                t.skip()
                continue
            target = C.compose(f, lx)
            us = [u for u in C.hom(c, q.src) if C.compose(q, u) == h]
            evs = {u: C.compose(se.ev, pbq.mediate(lx, C.compose(u, lc))) for u in us}
            for m in C.hom(pbh.carrier, g.src):
                if C.compose(g, m) != target:
                    continue
                hits = [u for u in us if evs[u] == m]
                if len(hits) != 1:
                    t.fail(reason="transposes", h=h, m=m, transposes=hits)
                    return t.report()
                try:
                    got = se.transpose(h, m)
                except Exception as exc:  # noqa: BLE001 - any failure is a verdict
                    t.fail(reason="transpose raised", h=h, m=m, error=str(exc))
                    return t.report()
                if got != hits[0]:
                    t.fail(reason="wrong transpose", h=h, m=m, got=got, expected=hits[0])
                    return t.report()
                t.ok()
    return t.report()


def check_slice_iso(B: Category, f: Mor, iso: tuple) -> bool:
    """The pair (k, k') are inverse arrows over the common codomain."""
    k, kk = iso
    return (
        B.compose(kk, k) == B.identity(k.src)
        and B.compose(k, kk) == B.identity(k.dst)
    )


# ---------------------------------------------------------------- quasi-topos clauses


def check_quasitopos(
    Q: EqcDoctrine, frag: Fragment, exp_frag: Fragment | None = None, arrow_limit: int | None = None
) -> dict[str, PropertyReport]:
    """Finite limits, coproducts, slice exponentials and the strong-mono classifier
    of the quotient completion, on the fragment.

    Equalizers and slice exponentials are built for every pair of parallel
    arrows, or for pairs among the first ``arrow_limit`` of each list.
    """
    B = Q.base
    objs = B.objects(frag)
    exp_frag = exp_frag or frag
    limits = [O.check_universal(B, B.terminal(), frag)]
    for x in objs:
        for y in objs:
            limits.append(O.check_universal(B, B.product(x, y), frag))
            hs = B.hom(x, y)[:arrow_limit]
            for f in hs:
                for g in hs:
                    limits.append(O.check_universal(B, B.equalizer(f, g), frag))
    out = {"finite_limits": combine("finite_limits", limits)}
    out["coproducts"] = check_coproducts(Q, frag)
    exps = []
    for a in B.objects(exp_frag):
        arrows = [f for x in B.objects(exp_frag) for f in B.hom(x, a)][:arrow_limit]
        for f in arrows:
            for g in arrows:
                data = slice_exponential(B, f, g)
                exps.append(check_slice_exponential(B, data.exponential, exp_frag))
                iso_ok = check_slice_iso(B, f, data.f_iso) and check_slice_iso(B, g, data.g_iso)
                if not iso_ok:
                    exps.append(PropertyReport("slice_iso", "fails", {"f": f, "g": g}))
    out["slice_exponentials"] = combine("slice_exponentials", exps)
    out["classifier"] = D.verify(Q, "strong_classifier", frag)
    out["quasitopos"] = combine("quasitopos", list(out.values()))
    return out


# ---------------------------------------------------------------- coarse reflection


@dataclass
class CoarseReflection:
    obj: EqcObject
    singletons: EqcObject
    eta: Mor
    chi: Mor


def coarse_reflection(Q: EqcDoctrine, x: EqcObject) -> CoarseReflection:
    """Factor the classifying map χ of δ_X = ρ through the comprehension of its image."""
    px, _ = Q.power(x)
    chi = Q.power_classify(x, x, x.rel)
    image = exists_along(Q, chi, Q.fiber(x).top)
    m = Q.comprehension(px, image)
    eta = Q.comprehension_lift(px, image, chi)
    return CoarseReflection(x, m.src, eta, chi)


def is_coarse(Q: EqcDoctrine, x: EqcObject) -> bool:
    return Q.base.is_iso(coarse_reflection(Q, x).eta) is not None


def check_coarse_reflection(Q: EqcDoctrine, frag: Fragment) -> dict[str, PropertyReport]:
    """η_X monic and epic for every fragment object; S idempotent up to iso."""
    B = Q.base
    monic, idem = Tally("eta_monic_epic"), Tally("idempotent")
    for x in B.objects(frag):
        cr = coarse_reflection(Q, x)
        mono, epi = is_mono(B, cr.eta, frag), is_epi(B, cr.eta, frag)
        if mono.fails or epi.fails:
            monic.fail(object=x, mono=mono.status, epi=epi.status, eta=cr.eta)
        else:
            monic.ok()
        again = coarse_reflection(Q, cr.singletons)
        if O.find_iso(B, again.singletons, cr.singletons) is None or B.is_iso(again.eta) is None:
            idem.fail(object=x, singletons=cr.singletons)
        else:
            idem.ok()
    return {"eta_monic_epic": monic.report(), "idempotent": idem.report()}


class FullSubcategory(Category):
    """A full subcategory on a given list of objects (products taken in the ambient category)."""

    def __init__(self, C: Category, objs, name: str = "sub"):
        self.C = C
        self._objs = list(objs)
        self.name = name

    def objects(self, frag):
        return list(self._objs) + [o for o in frag.objects if o not in self._objs]

    def hom(self, a, b):
        return self.C.hom(a, b)

    def hom_size(self, a, b):
        return self.C.hom_size(a, b)

    def identity(self, a):
        return self.C.identity(a)

    def _compose(self, g, f):
        return self.C.compose(g, f)

    def terminal(self):
        return self.C.terminal()

    def product(self, a, b):
        return self.C.product(a, b)

    def pullback(self, f, g):
        return self.C.pullback(f, g)


def coarse_subcategory(Q: EqcDoctrine, frag: Fragment) -> FullSubcategory:
    B = Q.base
    return FullSubcategory(B, [x for x in B.objects(frag) if is_coarse(Q, x)], name=f"coarse({B.name})")


def check_coarse_comparisons(Q: EqcDoctrine, frag: Fragment) -> dict[str, PropertyReport]:
    """Coarse objects against the functional completion of Q (through graphs)
    and against the base of P (through (A, δ_A))."""
    B, P = Q.base, Q.P
    coarse = coarse_subcategory(Q, frag)
    Fq = functional_completion(Q)
    graphs = Functor(coarse, Fq.base, lambda x: x, Fq.base.graph, name="graph")
    out = {"coarse_vs_functional": O.check_equivalence(graphs, frag)["equivalence"]}

    def obj(a):
        return EqcObject(a, P.delta(a))

    incl = Functor(P.base, coarse, obj, lambda f: B.arrow(obj(f.src), obj(f.dst), f), name="delta")
    out["base_vs_coarse"] = O.check_equivalence(incl, frag)["equivalence"]
    return out


# ---------------------------------------------------------------- projective core


def is_q_projective(Q: EqcDoctrine, p: EqcObject, frag: Fragment) -> dict | None:
    """None if every arrow into a quotient (A,σ) lifts along [id]: (A,ρ) → (A,σ); else a witness."""
    B = Q.base
    objs = B.objects(frag)
    for x in objs:
        for y in objs:
            if y.base != x.base or x == y:
                continue
            F = Q.P.fiber(rel_object(Q.P, x.base))
            if not F.le(x.rel, y.rel):
                continue
            q = B.arrow(x, y, B.C.identity(x.base))
            lifts = {B.compose(q, g) for g in B.hom(p, x)}
            for f in B.hom(p, y):
                if f not in lifts:
                    return {"projective": p, "quotient": q, "arrow": f}
    return None


@dataclass
class ProjectiveCore:
    candidates: list
    reports: dict
    verdict: PropertyReport
    recompletion: Any = None


def projective_core(Q: EqcDoctrine, frag: Fragment, candidates: list | None = None) -> ProjectiveCore:
    """Check that the candidates (by default the (A, δ_A)) are q-projective, cover every
    fragment object by an arrow that is surj-P, are closed under products, and that
    the quotient completion of the restricted doctrine is equivalent to Q."""
    B, P = Q.base, Q.P
    objs = B.objects(frag)
    if candidates is None:
        candidates = [x for x in objs if x.rel == P.delta(x.base)]
    proj, cover, prods = Tally("q_projective"), Tally("enough_projectives"), Tally("product_closed")
    for p in candidates:
        w = is_q_projective(Q, p, frag)
        if w is None:
            proj.ok()
        else:
            proj.fail(**w)
    for x in objs:
        if any(D.is_surjP(Q, f) for p in candidates for f in B.hom(p, x)):
            cover.ok()
        else:
            cover.fail(object=x, reason="no surj-P arrow from a candidate")
    for p1 in candidates:
        for p2 in candidates:
            pr = B.product(p1, p2).carrier
            w = is_q_projective(Q, pr, frag)
            if w is None:
                prods.ok()
            else:
                prods.fail(left=p1, right=p2, **w)
    reports = {"q_projective": proj.report(), "enough_projectives": cover.report(), "product_closed": prods.report()}
    sub = FullSubcategory(B, candidates, name="projectives")
    inc = Functor(sub, B, lambda a: a, lambda f: f, name="incl")
    R = ChangeOfBase(Q, inc, name=f"{Q.name}|proj")
    R2 = eqc(R)

    def obj(z: EqcObject):
        return EqcObject(z.base.base, z.rel)

    def arr(f: Mor):
        return B.arrow(obj(f.src), obj(f.dst), f.data.data)

    E = Functor(R2.base, B, obj, arr, name="recomplete")
    eqv = O.check_equivalence(E, frag)
    reports["reconstruction"] = eqv["equivalence"]
    verdict = combine("projective_core", list(reports.values()))
    return ProjectiveCore(candidates, reports, verdict, R2)


# ---------------------------------------------------------------- seeded mutants


def _bad_pairing(C: Category, a, b, rng: random.Random) -> StructureWitness:
    w = C.product(a, b)
    sw = C.swap(a, b) if a == b else None

    def wrong(f, g):
        h = w.mediate(f, g)
        if sw is not None and C.compose(sw, h) != h:
            return C.compose(sw, h)
        hs = C.hom(f.src, w.carrier)
        if len(hs) < 2:
            return h
        return hs[(hs.index(h) + 1 + rng.randrange(len(hs) - 1)) % len(hs)]

    return StructureWitness("product", w.carrier, w.legs, wrong)


def mutant_pairing(C: Category, a, b, seed: int = 0) -> StructureWitness:
    """A product witness whose pairing answers a different arrow than the right one."""
    return _bad_pairing(C, a, b, random.Random(seed))


class _WrongClassifier(EqcDoctrine):
    def __init__(self, Q: EqcDoctrine, lam):
        self.__dict__.update(Q.__dict__)
        self._lam = lam

    def classifier(self):
        omega, member = classifier_eqc(self)
        return EqcObject(omega.base, self._lam), member


def mutant_lambda(Q: EqcDoctrine, seed: int = 0) -> EqcDoctrine:
    """The completion with λ replaced by equality on Ω, which breaks uniqueness of χ when
    Ω carries several values, or by the top relation otherwise."""
    P = Q.P
    omega, _ = P.classifier()
    lam = P.delta(omega)
    good, _ = classifier_eqc(Q)
    if lam == good.rel:
        lam = P.fiber(rel_object(P, omega)).top
    return _WrongClassifier(Q, lam)


def mutant_coproduct(B: EqcCategory, x: EqcObject, y: EqcObject, seed: int = 0) -> StructureWitness:
    """ρ⊞σ replaced by the top relation on A+B."""
    w = coproduct_eqc(B, x, y)
    top = B.P.fiber(rel_object(B.P, w.carrier.base)).top
    s = EqcObject(w.carrier.base, top)
    legs = tuple(Mor(l.src, s, B.canon(l.src, s, l.data)) for l in w.legs)

    def mediate(f, g):
        return Mor(s, f.dst, B.C.coproduct(x.base, y.base).mediate(f.data, g.data))

    return StructureWitness("coproduct", s, legs, mediate)


def mutant_closure(P: Doctrine, a, rho, seed: int = 0):
    """Reflexive-symmetric hull only: misses transitivity."""
    F = P.fiber(rel_object(P, a))
    return F.join(F.join(rho, P.delta(a)), P.reindex(P.base.swap(a, a), rho))


MUTANTS: dict[str, Callable] = {
    "bad_pairing": mutant_pairing,
    "bad_lambda": mutant_lambda,
    "bad_coproduct": mutant_coproduct,
    "bad_closure": mutant_closure,
}
