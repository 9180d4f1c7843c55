"""Finite and lazily enumerated categories with chosen structure.

Objects are plain hashable values (an ``int`` size for finite sets, a name for
presented categories, a record for derived categories).  Arrows are ``Mor``
records whose ``data`` field is the canonical payload, so arrow equality is
payload equality.
"""

from __future__ import annotations

import dataclasses
import itertools
from dataclasses import dataclass, field
from typing import Any, Callable, Hashable, Iterable, Sequence

ObjRef = Hashable


class CategoryError(Exception):
    """Base class for structural errors in the kernel."""


class TypeMismatch(CategoryError):
    pass


class Unsupported(CategoryError):
    pass


class CapExceeded(CategoryError):
    pass


class MissingCapability(CategoryError):
    def __init__(self, capability: str, where: str = ""):
        self.capability = capability
        msg = f"missing capability: {capability}"
        if where:
            msg += f" ({where})"
        super().__init__(msg)


class ValidationError(CategoryError):
    pass


@dataclass(frozen=True)
class Mor:
    src: Any
    dst: Any
    data: Any

    def __repr__(self):
        return f"Mor({self.src!r}->{self.dst!r}: {self.data!r})"


@dataclass(frozen=True)
class Fragment:
    """A finite window on a (possibly infinite) category.

    ``cap`` bounds object size, ``objects`` lists extra objects to include and
    ``budget`` bounds how many elements of a single fiber or hom-set a check
    may enumerate before it records the instance as skipped.
    """

    cap: int = 2
    objects: tuple = ()
    budget: int = 4096


@dataclass(frozen=True, eq=False)
class StructureWitness:
    kind: str
    carrier: Any
    legs: tuple
    mediate: Callable[..., Any] = field(repr=False)
    weak: bool = False
    diagram: tuple = ()


@dataclass(frozen=True, eq=False)
class SliceExponential:
    """A (weak) exponential g^f in the slice over A, for f: X→A and g: X'→A.

    ``exp`` is q: W→A; ``pb_x``/``pb_w`` are the legs of the chosen pullback
    Z of q along f, and ``ev``: Z→X' is the evaluation.  ``transpose(h, m)``
    takes h: C→A and m defined on the chosen pullback of h along f
    (``pullback(f, h)``) and returns u: C→W with q∘u = h.
    """

    f: Mor
    g: Mor
    exp: Mor
    pb_x: Mor
    pb_w: Mor
    ev: Mor
    transpose: Callable[[Mor, Mor], Mor] = field(repr=False)
    weak: bool = False


@dataclass(frozen=True, eq=False)
class Functor:
    """Object and arrow maps between two categories."""

    src: "Category"
    dst: "Category"
    on_obj: Callable[[Any], Any] = field(repr=False)
    on_arr: Callable[[Mor], Mor] = field(repr=False)
    name: str = "F"

    def __call__(self, x):
        return self.on_arr(x) if isinstance(x, Mor) else self.on_obj(x)


# ---------------------------------------------------------------- reports


def to_jsonable(x):
    """Recursively convert kernel values into JSON-friendly data."""
    if isinstance(x, Mor):
        return {"src": to_jsonable(x.src), "dst": to_jsonable(x.dst), "data": to_jsonable(x.data)}
    if dataclasses.is_dataclass(x) and not isinstance(x, type):
        return {f.name: to_jsonable(getattr(x, f.name)) for f in dataclasses.fields(x)}
    if isinstance(x, dict):
        return {str(k): to_jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [to_jsonable(v) for v in x]
    if isinstance(x, (frozenset, set)):
        return sorted((to_jsonable(v) for v in x), key=repr)
    if x is None or isinstance(x, (bool, int, float, str)):
        return x
    return repr(x)


@dataclass
class PropertyReport:
    """Verdict of a property check on a fragment.

    ``status`` is one of ``holds``, ``fails`` or ``not-checked``.  A failing
    report always carries a counterexample payload.
    """

    name: str
    status: str
    counterexample: dict | None = None
    checked: int = 0
    skipped: int = 0
    note: str = ""

    def __post_init__(self):
        if self.status not in ("holds", "fails", "not-checked"):
            raise ValueError(f"bad status {self.status!r}")
        if self.status == "fails" and self.counterexample is None:
            raise ValueError("a failing report needs a counterexample")

    @property
    def holds(self) -> bool:
        return self.status == "holds"

    @property
    def fails(self) -> bool:
        return self.status == "fails"

    def __bool__(self):
        return self.holds

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "status": self.status,
            "checked": self.checked,
            "skipped": self.skipped,
            "counterexample": to_jsonable(self.counterexample),
            "note": self.note,
        }


class Tally:
    """Accumulates instance counts for a check and remembers the first failure."""

    def __init__(self, name: str):
        self.name = name
        self.checked = 0
        self.skipped = 0
        self.failure: dict | None = None

    def ok(self, n: int = 1):
        self.checked += n

    def skip(self, n: int = 1):
        self.skipped += n

    def fail(self, **cex):
        self.checked += 1
        if self.failure is None:
            self.failure = cex

    @property
    def failed(self) -> bool:
        return self.failure is not None

    def report(self, note: str = "") -> PropertyReport:
        if self.failure is not None:
            return PropertyReport(self.name, "fails", self.failure, self.checked, self.skipped, note)
        if self.checked == 0 and self.skipped > 0:
            return PropertyReport(self.name, "not-checked", None, 0, self.skipped, note or "budget exhausted")
        return PropertyReport(self.name, "holds", None, self.checked, self.skipped, note)


def combine(name: str, reports: Iterable[PropertyReport]) -> PropertyReport:
    """Conjunction of reports; the first failure wins."""
    reports = list(reports)
    checked = sum(r.checked for r in reports)
    skipped = sum(r.skipped for r in reports)
    for r in reports:
        if r.fails:
            cex = {"part": r.name, **(r.counterexample or {})}
            return PropertyReport(name, "fails", cex, checked, skipped)
    if reports and all(r.status == "not-checked" for r in reports):
        return PropertyReport(name, "not-checked", None, checked, skipped)
    return PropertyReport(name, "holds", None, checked, skipped)


# ---------------------------------------------------------------- categories


class Category:
    """A category with chosen terminal object and binary products.

    Subclasses provide ``objects``, ``hom``, ``identity``, ``_compose``,
    ``terminal`` and ``product``; pullbacks, coproducts, an initial object and
    slice exponentials are optional.
    """

    name = "category"

    def objects(self, frag: Fragment) -> list:
        raise NotImplementedError

    def hom(self, a, b) -> list[Mor]:
        raise NotImplementedError

    def hom_size(self, a, b) -> int:
        return len(self.hom(a, b))

    def identity(self, a) -> Mor:
        raise NotImplementedError

    def _compose(self, g: Mor, f: Mor) -> Mor:
        raise NotImplementedError

    def terminal(self) -> StructureWitness:
        raise NotImplementedError

    def product(self, a, b) -> StructureWitness:
        raise NotImplementedError

    def pullback(self, f: Mor, g: Mor) -> StructureWitness:
        raise Unsupported(f"{self.name}: no chosen pullbacks")

    def coproduct(self, a, b) -> StructureWitness:
        raise Unsupported(f"{self.name}: no chosen coproducts")

    def initial(self) -> StructureWitness:
        raise Unsupported(f"{self.name}: no chosen initial object")

    def is_iso(self, f: Mor) -> Mor | None:
        """Return an inverse of ``f`` if one exists (search)."""
        for g in self.hom(f.dst, f.src):
            if self.compose(g, f) == self.identity(f.src) and self.compose(f, g) == self.identity(f.dst):
                return g
        return None

    # -- composition and derived arrows

    def compose(self, *arrows: Mor) -> Mor:
        """``compose(h, g, f)`` is h∘g∘f."""
        if not arrows:
            raise TypeError("compose needs at least one arrow")
        result = arrows[-1]
        for g in reversed(arrows[:-1]):
            if g.src != result.dst:
                raise TypeMismatch(f"cannot compose {g!r} after {result!r}")
            result = self._compose(g, result)
        return result

    def pair(self, f: Mor, g: Mor) -> Mor:
        if f.src != g.src:
            raise TypeMismatch(f"pairing needs a common source: {f!r}, {g!r}")
        return self.product(f.dst, g.dst).mediate(f, g)

    def proj(self, a, b, i: int) -> Mor:
        return self.product(a, b).legs[i]

    def times(self, f: Mor, g: Mor) -> Mor:
        w = self.product(f.src, g.src)
        return self.pair(self.compose(f, w.legs[0]), self.compose(g, w.legs[1]))

    def bang(self, a) -> Mor:
        return self.terminal().mediate(a)

    def diagonal(self, a) -> Mor:
        i = self.identity(a)
        return self.pair(i, i)

    def swap(self, a, b) -> Mor:
        w = self.product(a, b)
        return self.pair(w.legs[1], w.legs[0])

    def power_product(self, objs: Sequence) -> tuple[Any, list[Mor]]:
        """Left-nested product of ``objs`` with its projections."""
        objs = list(objs)
        if not objs:
            t = self.terminal().carrier
            return t, []
        carrier = objs[0]
        projs = [self.identity(carrier)]
        for o in objs[1:]:
            w = self.product(carrier, o)
            projs = [self.compose(p, w.legs[0]) for p in projs] + [w.legs[1]]
            carrier = w.carrier
        return carrier, projs

    def tuple_arrow(self, arrows: Sequence[Mor]) -> Mor:
        """Left-nested pairing ⟨f1, ..., fk⟩."""
        arrows = list(arrows)
        result = arrows[0]
        for g in arrows[1:]:
            result = self.pair(result, g)
        return result


def check_category_laws(C: Category, frag: Fragment) -> PropertyReport:
    """Identity and associativity laws on every composable triple of the fragment."""
    t = Tally("category_laws")
    objs = C.objects(frag)
    homs = {(a, b): C.hom(a, b) for a in objs for b in objs}
    for (a, b), fs in homs.items():
        for f in fs:
            if C.compose(C.identity(b), f) != f or C.compose(f, C.identity(a)) != f:
                t.fail(law="identity", f=f)
            else:
                t.ok()
    for a in objs:
        for b in objs:
            for c in objs:
                for d in objs:
                    for f in homs[a, b]:
                        for g in homs[b, c]:
                            gf = C.compose(g, f)
                            for h in homs[c, d]:
                                if C.compose(h, gf) != C.compose(C.compose(h, g), f):
                                    t.fail(law="associativity", f=f, g=g, h=h)
                                else:
                                    t.ok()
    return t.report()


def is_mono(C: Category, f: Mor, frag: Fragment) -> PropertyReport:
    """Left cancellability of ``f`` against all fragment test objects."""
    t = Tally("mono")
    for x in C.objects(frag):
        if C.hom_size(x, f.src) ** 2 > frag.budget ** 2:
            t.skip()
            continue
        hs = C.hom(x, f.src)
        seen: dict[Mor, Mor] = {}
        for h in hs:
            fh = C.compose(f, h)
            if fh in seen:
                t.fail(f=f, g=seen[fh], h=h)
                return t.report()
            seen[fh] = h
        t.ok()
    return t.report()


def is_epi(C: Category, f: Mor, frag: Fragment) -> PropertyReport:
    """Right cancellability of ``f`` against all fragment test objects."""
    t = Tally("epi")
    for y in C.objects(frag):
        if C.hom_size(f.dst, y) > frag.budget:
            t.skip()
            continue
        seen: dict[Mor, Mor] = {}
        for h in C.hom(f.dst, y):
            hf = C.compose(h, f)
            if hf in seen:
                t.fail(f=f, g=seen[hf], h=h)
                return t.report()
            seen[hf] = h
        t.ok()
    return t.report()


# ---------------------------------------------------------------- FinSet


class FinSet(Category):
    """Finite sets {0..n-1} as sizes; arrows are image tables.

    Products are lexicographic: the pair (i, j) of n×m is the element i*m + j.
    """

    name = "FinSet"

    def __init__(self):
        self._products: dict = {}
        self._exps: dict = {}

    def objects(self, frag: Fragment) -> list:
        objs = list(range(frag.cap + 1))
        objs += [o for o in frag.objects if o not in objs]
        return objs

    def check_object(self, a):
        if not isinstance(a, int) or a < 0:
            raise TypeMismatch(f"not a finite set size: {a!r}")

    def hom(self, a, b) -> list[Mor]:
        return [Mor(a, b, t) for t in itertools.product(range(b), repeat=a)]

    def hom_size(self, a, b) -> int:
        return b**a

    def identity(self, a) -> Mor:
        return Mor(a, a, tuple(range(a)))

    def _compose(self, g: Mor, f: Mor) -> Mor:
        gd = g.data
        return Mor(f.src, g.dst, tuple(gd[i] for i in f.data))

    def is_iso(self, f: Mor) -> Mor | None:
        if f.src != f.dst or sorted(f.data) != list(range(f.dst)):
            return None
        inv = [0] * f.src
        for i, v in enumerate(f.data):
            inv[v] = i
        return Mor(f.dst, f.src, tuple(inv))

    def arrow(self, src: int, dst: int, table: Sequence[int]) -> Mor:
        table = tuple(table)
        if len(table) != src or any(not 0 <= v < dst for v in table):
            raise TypeMismatch(f"table {table} is not a function {src}->{dst}")
        return Mor(src, dst, table)

    def terminal(self) -> StructureWitness:
        return StructureWitness("terminal", 1, (), lambda x: Mor(x, 1, (0,) * x))

    def initial(self) -> StructureWitness:
        return StructureWitness("initial", 0, (), lambda x: Mor(0, x, ()))

    def product(self, a, b) -> StructureWitness:
        key = (a, b)
        w = self._products.get(key)
        if w is None:
            n = a * b
            pr1 = Mor(n, a, tuple(i // b for i in range(n))) if b else Mor(0, a, ())
            pr2 = Mor(n, b, tuple(i % b for i in range(n))) if b else Mor(0, b, ())

            def mediate(f: Mor, g: Mor, _a=a, _b=b):
                if f.dst != _a or g.dst != _b or f.src != g.src:
                    raise TypeMismatch("cone does not match the product")
                return Mor(f.src, _a * _b, tuple(x * _b + y for x, y in zip(f.data, g.data)))

            w = StructureWitness("product", n, (pr1, pr2), mediate)
            self._products[key] = w
        return w

    def pullback(self, f: Mor, g: Mor) -> StructureWitness:
        if f.dst != g.dst:
            raise TypeMismatch("pullback of arrows with different codomains")
        pairs = [(i, j) for i in range(f.src) for j in range(g.src) if f.data[i] == g.data[j]]
        index = {p: k for k, p in enumerate(pairs)}
        n = len(pairs)
        l = Mor(n, f.src, tuple(p[0] for p in pairs))
        r = Mor(n, g.src, tuple(p[1] for p in pairs))

        def mediate(h: Mor, k: Mor):
            try:
                return Mor(h.src, n, tuple(index[x, y] for x, y in zip(h.data, k.data)))
            except KeyError:
                raise TypeMismatch("cone does not commute") from None

        return StructureWitness("pullback", n, (l, r), mediate, diagram=(f, g))

    def coproduct(self, a, b) -> StructureWitness:
        i1 = Mor(a, a + b, tuple(range(a)))
        i2 = Mor(b, a + b, tuple(range(a, a + b)))

        def mediate(f: Mor, g: Mor):
            if f.dst != g.dst:
                raise TypeMismatch("cocone legs disagree")
            return Mor(a + b, f.dst, tuple(f.data) + tuple(g.data))

        return StructureWitness("coproduct", a + b, (i1, i2), mediate)

    def exponential(self, a, b) -> StructureWitness:
        """Exponential b^a with evaluation (b^a)×a → b; functions indexed in hom order."""
        key = (a, b)
        w = self._exps.get(key)
        if w is None:
            funcs = list(itertools.product(range(b), repeat=a))
            index = {fn: k for k, fn in enumerate(funcs)}
            e = len(funcs)
            ev = Mor(e * a, b, tuple(funcs[i // a][i % a] for i in range(e * a))) if a else Mor(0, b, ())

            def mediate(h: Mor, x: int):
                """Transpose of h: x×a → b."""
                return Mor(x, e, tuple(index[tuple(h.data[i * a + j] for j in range(a))] for i in range(x)))

            w = StructureWitness("exponential", e, (ev,), mediate)
            self._exps[key] = w
        return w

    def slice_exponential(self, f: Mor, g: Mor) -> SliceExponential:
        """g^f over A: W = {(a, s) | s: f⁻¹(a) → g⁻¹(a)} with q(a, s) = a."""
        if f.dst != g.dst:
            raise TypeMismatch("slice exponential of arrows over different objects")
        a = f.dst
        fib_f = [[x for x in range(f.src) if f.data[x] == i] for i in range(a)]
        fib_g = [[y for y in range(g.src) if g.data[y] == i] for i in range(a)]
        points = []
        for i in range(a):
            for choice in itertools.product(fib_g[i], repeat=len(fib_f[i])):
                points.append((i, dict(zip(fib_f[i], choice))))
        index = {(i, tuple(sorted(s.items()))): k for k, (i, s) in enumerate(points)}
        n = len(points)
        q = Mor(n, a, tuple(i for i, _ in points))
        pb = self.pullback(f, q)
        zx, zw = pb.legs
        ev = Mor(pb.carrier, g.src, tuple(points[w][1][x] for x, w in zip(zx.data, zw.data)))

        def transpose(h: Mor, m: Mor) -> Mor:
            hp = self.pullback(f, h)
            lx, lc = hp.legs
            value = {(x, c): m.data[k] for k, (x, c) in enumerate(zip(lx.data, lc.data))}
            out = []
            for c in range(h.src):
                i = h.data[c]
                s = tuple((x, value[x, c]) for x in fib_f[i])
                out.append(index[i, s])
            return Mor(h.src, n, tuple(out))

        return SliceExponential(f, g, q, zx, zw, ev, transpose)


# ---------------------------------------------------------------- presented


class PresentedCategory(Category):
    """A finite category given by explicit tables.

    ``arrows`` maps arrow names to (src, dst); ``identities`` maps objects to
    arrow names; ``composition`` maps (g, f) to the name of g∘f for every
    composable pair.  Chosen products map object pairs to (carrier, pr1, pr2)
    and chosen pullbacks map arrow-name pairs to (carrier, left, right).
    """

    def __init__(
        self,
        name: str,
        objects: Sequence,
        arrows: dict,
        identities: dict,
        composition: dict,
        terminal,
        products: dict | None = None,
        pullbacks: dict | None = None,
        weak_pullbacks: bool = False,
    ):
        self.name = name
        self._objects = list(objects)
        self._arrows = dict(arrows)
        self._ids = dict(identities)
        self._comp = dict(composition)
        self._terminal = terminal
        self._products = dict(products or {})
        self._pullbacks = dict(pullbacks or {})
        self.weak_pullbacks = weak_pullbacks
        self._homs: dict = {}
        for n, (s, d) in self._arrows.items():
            self._homs.setdefault((s, d), []).append(Mor(s, d, n))
        self.validate()

    def validate(self):
        if not self._objects:
            raise ValidationError("empty category: no terminal object")
        objs = set(self._objects)
        for n, (s, d) in self._arrows.items():
            if s not in objs or d not in objs:
                raise ValidationError(f"arrow {n} has an undeclared endpoint")
        for o in self._objects:
            i = self._ids.get(o)
            if i is None or self._arrows.get(i) != (o, o):
                raise ValidationError(f"object {o} lacks an identity")
        names = list(self._arrows)
        for g in names:
            for f in names:
                if self._arrows[f][1] == self._arrows[g][0]:
                    h = self._comp.get((g, f))
                    if h is None:
                        raise ValidationError(f"composition {g}∘{f} undefined")
                    if self._arrows.get(h) != (self._arrows[f][0], self._arrows[g][1]):
                        raise ValidationError(f"composition {g}∘{f} = {h} has wrong endpoints")
        for f in names:
            s, d = self._arrows[f]
            if self._comp[self._ids[d], f] != f or self._comp[f, self._ids[s]] != f:
                raise ValidationError(f"identity law fails at {f}")
        for f in names:
            for g in names:
                if self._arrows[f][1] != self._arrows[g][0]:
                    continue
                for h in names:
                    if self._arrows[g][1] != self._arrows[h][0]:
                        continue
                    left = self._comp[h, self._comp[g, f]]
                    right = self._comp[self._comp[h, g], f]
                    if left != right:
                        raise ValidationError(f"composition is not associative on the triple ({h}, {g}, {f})")
        if self._terminal not in objs:
            raise ValidationError("no terminal object declared")
        for o in self._objects:
            if len(self._homs.get((o, self._terminal), [])) != 1:
                raise ValidationError(f"declared terminal {self._terminal} is not terminal for {o}")

    def objects(self, frag: Fragment) -> list:
        return list(self._objects)

    def hom(self, a, b) -> list[Mor]:
        return list(self._homs.get((a, b), []))

    def identity(self, a) -> Mor:
        return Mor(a, a, self._ids[a])

    def _compose(self, g: Mor, f: Mor) -> Mor:
        return Mor(f.src, g.dst, self._comp[g.data, f.data])

    def terminal(self) -> StructureWitness:
        t = self._terminal
        return StructureWitness("terminal", t, (), lambda x: self.hom(x, t)[0])

    def _search_mediator(self, x, carrier, legs, targets):
        for h in self.hom(x, carrier):
            if all(self.compose(l, h) == t for l, t in zip(legs, targets)):
                return h
        raise TypeMismatch("no mediating arrow for the cone")

    def product(self, a, b) -> StructureWitness:
        if (a, b) not in self._products:
            raise Unsupported(f"{self.name}: no chosen product for ({a}, {b})")
        p, n1, n2 = self._products[a, b]
        legs = (Mor(p, a, n1), Mor(p, b, n2))

        def mediate(f: Mor, g: Mor):
            return self._search_mediator(f.src, p, legs, (f, g))

        return StructureWitness("product", p, legs, mediate)

    def pullback(self, f: Mor, g: Mor) -> StructureWitness:
        key = (f.data, g.data)
        if key not in self._pullbacks:
            raise Unsupported(f"{self.name}: no chosen pullback for {key}")
        p, l, r = self._pullbacks[key]
        legs = (Mor(p, f.src, l), Mor(p, g.src, r))

        def mediate(h: Mor, k: Mor):
            return self._search_mediator(h.src, p, legs, (h, k))

        return StructureWitness("pullback", p, legs, mediate, weak=self.weak_pullbacks, diagram=(f, g))


def poset_category(L, name: str | None = None) -> PresentedCategory:
    """A meet-semilattice seen as a category: one arrow a→b iff a ≤ b.

    Products and pullbacks are meets and the terminal object is the top.
    """
    names = [L.names[i] for i in L.elements()]
    arrows, ids, comp = {}, {}, {}
    for i in L.elements():
        for j in L.elements():
            if L.le(i, j):
                arrows[f"{names[i]}<={names[j]}"] = (names[i], names[j])
        ids[names[i]] = f"{names[i]}<={names[i]}"
    for g, (b, c) in arrows.items():
        for f, (a, b2) in arrows.items():
            if b == b2:
                comp[g, f] = f"{a}<={c}"
    products, pullbacks = {}, {}
    for i in L.elements():
        for j in L.elements():
            m = names[L.meet(i, j)]
            products[names[i], names[j]] = (m, f"{m}<={names[i]}", f"{m}<={names[j]}")
    for f, (a, c) in arrows.items():
        for g, (b, c2) in arrows.items():
            if c == c2:
                m = names[L.meet(L.index(a), L.index(b))]
                pullbacks[f, g] = (m, f"{m}<={a}", f"{m}<={b}")
    return PresentedCategory(
        name or f"poset({L.name})",
        names,
        arrows,
        ids,
        comp,
        names[L.top],
        products=products,
        pullbacks=pullbacks,
    )
