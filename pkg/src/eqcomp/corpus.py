"""Built-in instances.

* ``PowerDoctrine(H)``: H-valued predicates on finite sets, ``A ↦ H^A``.
* ``SubDoctrine(L)``: subobjects in a finite meet-semilattice seen as a category.
* ``WeakSubobjects(C)``: arrows into A up to mutual factorization.
* ``PresentedDoctrine``: fibers and reindexing given by explicit tables.
* ``FuzCategory``, ``UMCategory`` and ``SeparatedHSets``: the fuzzy-set
  categories written out directly, used as independent comparison targets
  for the completions.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Any, Sequence

from . import lattice
from .doctrine import Doctrine
from .kernel import (
    Category,
    CategoryError,
    FinSet,
    Fragment,
    Functor,
    MissingCapability,
    Mor,
    PresentedCategory,
    StructureWitness,
    TypeMismatch,
    Unsupported,
    ValidationError,
    poset_category,
)
from .lattice import InfSemilattice, PowerFiber


# ---------------------------------------------------------------- P_H


class PowerDoctrine(Doctrine):
    """``A ↦ H^A`` over finite sets; predicates are tuples of H-indices.

    Quantifiers along projections are pointwise joins and meets, equality is
    the indicator of the diagonal, comprehension is the inclusion of the
    points where a predicate is top, Ω is the carrier of H with membership
    the identity, and the power object of A is H^A.
    """

    def __init__(self, H: InfSemilattice, base: FinSet | None = None, name: str | None = None):
        self.H = H
        self.base = base or FinSet()
        self.name = name or f"P_{H.name}"
        caps = {"elementary", "universal", "comprehension", "classifier", "power_objects", "quotients"}
        if H.has_join:
            caps |= {"existential"}
            if H.check_frame().holds:
                caps.add("disjunctive")
        if H.has_imp:
            caps.add("implicational")
        self.capabilities = frozenset(caps)
        self._fibers: dict[int, PowerFiber] = {}

    def pred(self, *names) -> tuple:
        """A predicate from element names, e.g. ``pred("1", "h")``."""
        return tuple(self.H.index(n) for n in names)

    def fiber(self, a):
        F = self._fibers.get(a)
        if F is None:
            F = self._fibers[a] = PowerFiber(self.H, a)
        return F

    def reindex(self, f: Mor, alpha):
        return tuple(alpha[i] for i in f.data)

    def collapse_arrow(self, f: Mor) -> Mor | None:
        """δ_A ≤ P_{f×g}(δ_B) forces f = g pointwise once ⊤ ≠ ⊥."""
        H = self.H
        return f if H.bottom is not None and H.bottom != H.top else None

    def delta(self, a):
        H = self.H
        if H.bottom is None and a > 1:
            raise MissingCapability("elementary", f"{self.name}: equality needs a bottom")
        return tuple(H.top if i // a == i % a else H.bottom for i in range(a * a))

    def exists_pr(self, a, b, alpha, leg: int = 0):
        if "existential" not in self.capabilities:
            raise MissingCapability("existential", self.name)
        F = self.H
        if leg == 0:
            return tuple(_fold(F.join, F.bottom, (alpha[i * b + j] for j in range(b))) for i in range(a))
        return tuple(_fold(F.join, F.bottom, (alpha[i * b + j] for i in range(a))) for j in range(b))

    def forall_pr(self, a, b, alpha, leg: int = 0):
        F = self.H
        if leg == 0:
            return tuple(_fold(F.meet, F.top, (alpha[i * b + j] for j in range(b))) for i in range(a))
        return tuple(_fold(F.meet, F.top, (alpha[i * b + j] for i in range(a))) for j in range(b))

    def comprehension(self, a, alpha) -> Mor:
        pts = tuple(i for i in range(a) if alpha[i] == self.H.top)
        return Mor(len(pts), a, pts)

    def comprehension_lift(self, a, alpha, g: Mor) -> Mor:
        m = self.comprehension(a, alpha)
        where = {v: k for k, v in enumerate(m.data)}
        try:
            return Mor(g.src, m.src, tuple(where[v] for v in g.data))
        except KeyError:
            from .oracle import NoMediator

            raise NoMediator(f"{g!r} leaves the comprehension of {alpha!r}") from None

    def classifier(self):
        n = self.H.size()
        return n, tuple(range(n))

    def classify(self, a, phi) -> Mor:
        return Mor(a, self.H.size(), tuple(phi))

    def power(self, a):
        """(H^A, ∈) with ∈ over A×H^A; functions are numbered in hom order."""
        n = self.H.size()
        pa = n**a
        funcs = list(itertools.product(range(n), repeat=a))
        member = tuple(funcs[i % pa][i // pa] for i in range(a * pa))
        return pa, member

    def power_classify(self, a, b, phi) -> Mor:
        n = self.H.size()
        out = []
        for y in range(b):
            code = 0
            for x in range(a):
                code = code * n + phi[x * b + y]
            out.append(code)
        return Mor(b, n**a, tuple(out))

    def quotient(self, a, rho) -> Mor:
        """The surjection onto the classes of {ρ = ⊤}, numbered by first element."""
        top = self.H.top
        label: dict[int, int] = {}
        table = []
        for i in range(a):
            for j in range(i):
                if rho[i * a + j] == top:
                    table.append(table[j])
                    break
            else:
                label[i] = len(label)
                table.append(label[i])
        return Mor(a, len(label), tuple(table))

    def canonical_arrow(self, f: Mor, sigma, guard=None) -> Mor:
        """Least g (in table order) with guard ≤ P_⟨f,g⟩(σ); guard defaults to top."""
        H = self.H
        b = f.dst
        out = []
        for i, v in enumerate(f.data):
            need = H.top if guard is None else guard[i]
            for w in range(b):
                if H.le(need, sigma[v * b + w]):
                    out.append(w)
                    break
            else:
                out.append(v)
        return Mor(f.src, b, tuple(out))


def _fold(op, unit, xs):
    out = unit
    for x in xs:
        out = op(out, x)
    return out


# ---------------------------------------------------------------- Sub over a poset


class SubDoctrine(Doctrine):
    """Subobjects in a finite meet-semilattice L viewed as a category.

    Every arrow is monic, so Sub(a) is the down-set of a; reindexing along
    b ≤ a is meet with b, equality on a is the top of Sub(a∧a) = Sub(a), and
    the left adjoint along a projection a∧b → a is the inclusion of down-sets.
    """

    def __init__(self, L: InfSemilattice, name: str | None = None):
        self.L = L
        self.base = poset_category(L)
        self.name = name or f"Sub({L.name})"
        caps = {"elementary", "existential", "comprehension"}
        if L.has_imp:
            caps |= {"universal", "implicational"}
        if L.has_join and L.check_frame().holds:
            caps.add("disjunctive")
        self.capabilities = frozenset(caps)

    def _idx(self, a):
        return self.L.index(a)

    def fiber(self, a):
        return lattice.DownFiber(self.L, self._idx(a))

    def reindex(self, f: Mor, alpha):
        return self.L.meet(alpha, self._idx(f.src))

    def delta(self, a):
        return self._idx(a)

    def exists_pr(self, a, b, alpha, leg: int = 0):
        return alpha

    def forall_pr(self, a, b, alpha, leg: int = 0):
        L = self.L
        target = self._idx((a, b)[leg])
        return L.meet(target, L.imp(L.meet(self._idx(a), self._idx(b)), alpha))

    def comprehension(self, a, alpha) -> Mor:
        name = self.L.names[alpha]
        return self.base.hom(name, a)[0]


# ---------------------------------------------------------------- tabulated fibers


class TabulatedFiber:
    """A finite poset of hashable values, with meets (and joins, implication
    when they exist) derived by search on the order table."""

    def __init__(self, values: Sequence, le, name: str = "fiber"):
        self.values = list(values)
        self.index = {v: i for i, v in enumerate(self.values)}
        n = len(self.values)
        table = [[bool(le(self.values[i], self.values[j])) for j in range(n)] for i in range(n)]
        self.L = InfSemilattice([str(i) for i in range(n)], table, name=name)
        self.top = self.values[self.L.top]
        self.bottom = self.values[self.L.bottom] if self.L.bottom is not None else None

    def __repr__(self):
        return f"TabulatedFiber({self.L.name}, {len(self.values)} elements)"

    def elements(self):
        return iter(self.values)

    def size(self) -> int:
        return len(self.values)

    def contains(self, x) -> bool:
        try:
            return x in self.index
        except TypeError:
            return False

    @property
    def has_join(self) -> bool:
        return self.L.has_join

    @property
    def has_imp(self) -> bool:
        return self.L.has_imp

    def le(self, x, y) -> bool:
        return self.L.le(self.index[x], self.index[y])

    def meet(self, x, y):
        return self.values[self.L.meet(self.index[x], self.index[y])]

    def join(self, x, y):
        return self.values[self.L.join(self.index[x], self.index[y])]

    def imp(self, x, y):
        return self.values[self.L.imp(self.index[x], self.index[y])]

    def neg(self, x):
        return self.imp(x, self.bottom)

    def upper_covers(self, x) -> list:
        return [self.values[i] for i in self.L.upper_covers(self.index[x])]


def least_above(F, test):
    """The least element y of F with test(y), or None."""
    ys = [y for y in F.elements() if test(y)]
    for y in ys:
        if all(F.le(y, z) for z in ys):
            return y
    return None


def greatest_below(F, test):
    ys = [y for y in F.elements() if test(y)]
    for y in ys:
        if all(F.le(z, y) for z in ys):
            return y
    return None


# ---------------------------------------------------------------- Ψ


class ImageFiber:
    """Subsets of a finite set, stored as image inclusions Mor(k, a, sorted image)."""

    def __init__(self, a: int):
        self.a = a
        self.top = Mor(a, a, tuple(range(a)))
        self.bottom = Mor(0, a, ())

    def __repr__(self):
        return f"ImageFiber({self.a})"

    def _mk(self, img) -> Mor:
        img = tuple(sorted(img))
        return Mor(len(img), self.a, img)

    def elements(self):
        for k in range(self.a + 1):
            for img in itertools.combinations(range(self.a), k):
                yield Mor(k, self.a, img)

    def size(self) -> int:
        return 2**self.a

    def contains(self, x) -> bool:
        return isinstance(x, Mor) and x.dst == self.a and x == self._mk(set(x.data))

    has_join = True
    has_imp = True

    def le(self, x, y) -> bool:
        return set(x.data) <= set(y.data)

    def meet(self, x, y):
        return self._mk(set(x.data) & set(y.data))

    def join(self, x, y):
        return self._mk(set(x.data) | set(y.data))

    def imp(self, x, y):
        return self._mk((set(range(self.a)) - set(x.data)) | set(y.data))

    def neg(self, x):
        return self.imp(x, self.bottom)

    def upper_covers(self, x) -> list:
        have = set(x.data)
        return [self._mk(have | {i}) for i in range(self.a) if i not in have]


class WeakSubobjects(Doctrine):
    """Ψ_C: arrows into A ordered by factorization, up to mutual factorization.

    Elements are canonical representatives.  Over ``FinSet`` the canonical
    representative of f is the inclusion of its image; over other categories
    it is the first arrow (by domain order, then hom order) among arrows out
    of objects of size at most ``domain_cap`` that factors both ways.  The
    meet of two variations is the composite of a (weak) pullback and the
    reindexing along f is the pullback leg.
    """

    def __init__(self, base: Category, domain_cap: int = 2, name: str | None = None):
        self.base = base
        self.domain_cap = domain_cap
        self.name = name or f"Psi({base.name})"
        self.capabilities = frozenset(
            {"elementary", "existential", "universal", "implicational", "disjunctive", "comprehension"}
        )
        self._fibers: dict = {}
        self._reindexed: dict = {}
        self._finset = isinstance(base, FinSet)

    def factors(self, f: Mor, g: Mor) -> bool:
        """Whether f = g∘h for some h."""
        if self._finset:
            return set(f.data) <= set(g.data)
        C = self.base
        return any(C.compose(g, h) == f for h in C.hom(f.src, g.src))

    def canon(self, f: Mor) -> Mor:
        if self._finset:
            img = tuple(sorted(set(f.data)))
            return Mor(len(img), f.dst, img)
        F = self.fiber(f.dst)
        for v in F.values:
            if self.factors(v, f) and self.factors(f, v):
                return v
        raise Unsupported(f"{self.name}: variation {f!r} has no representative under the domain cap")

    def _variations(self, a):
        C = self.base
        if self._finset:
            for k in range(a + 1):
                for img in itertools.combinations(range(a), k):
                    yield Mor(k, a, img)
            return
        seen: list[Mor] = []
        for x in C.objects(Fragment(cap=self.domain_cap)):
            for f in C.hom(x, a):
                if not any(self.factors(f, v) and self.factors(v, f) for v in seen):
                    seen.append(f)
                    yield f

    def fiber(self, a):
        F = self._fibers.get(a)
        if F is None and self._finset:
            F = self._fibers[a] = ImageFiber(a)
        elif F is None:
            F = self._fibers[a] = TabulatedFiber(list(self._variations(a)), self.factors, name=f"Psi({a})")
        return F

    def reindex(self, f: Mor, alpha):
        key = (f, alpha)
        out = self._reindexed.get(key)
        if out is None:
            w = self.base.pullback(alpha, f)
            out = self._reindexed[key] = self.canon(w.legs[1])
        return out

    def delta(self, a):
        return self.canon(self.base.diagonal(a))

    def exists_pr(self, a, b, alpha, leg: int = 0):
        pr = self.base.product(a, b).legs[leg]
        return self.canon(self.base.compose(pr, alpha))

    def forall_pr(self, a, b, alpha, leg: int = 0):
        C = self.base
        pr = C.product(a, b).legs[leg]
        F = self.fiber((a, b)[leg])
        G = self.fiber(C.product(a, b).carrier)
        y = greatest_below(F, lambda y: G.le(self.reindex(pr, y), alpha))
        if y is None:
            raise MissingCapability("universal", f"{self.name}: no right adjoint at {alpha!r}")
        return y

    def comprehension(self, a, alpha) -> Mor:
        return alpha


# ---------------------------------------------------------------- presented doctrines


class PresentedDoctrine(Doctrine):
    """A doctrine over a presented category given by explicit tables.

    ``fibers`` maps objects to ``InfSemilattice``; ``reindex_tables`` maps an
    arrow name to a dict from element names of the codomain fiber to element
    names of the domain fiber.  An optional ``deltas`` table gives equality.
    Adjoints along projections are found by search when declared.
    """

    def __init__(
        self,
        name: str,
        base: PresentedCategory,
        fibers: dict,
        reindex_tables: dict,
        deltas: dict | None = None,
        existential: bool = False,
        universal: bool = False,
    ):
        self.name = name
        self.base = base
        self._fibers = dict(fibers)
        self._tables = {k: dict(v) for k, v in reindex_tables.items()}
        self._deltas = dict(deltas or {})
        caps = set()
        if self._deltas:
            caps.add("elementary")
        if existential:
            caps.add("existential")
        if universal:
            caps.add("universal")
        if all(F.has_imp for F in self._fibers.values()):
            caps.add("implicational")
        self.capabilities = frozenset(caps)
        self.validate()

    def validate(self):
        for o in self.base.objects(Fragment()):
            if o not in self._fibers:
                raise ValidationError(f"{self.name}: object {o} has no fiber")
        for name, table in self._tables.items():
            f = self._arrow(name)
            src, dst = self._fibers[f.src], self._fibers[f.dst]
            for y in dst.elements():
                if dst.names[y] not in table:
                    raise ValidationError(f"{self.name}: reindexing along {name} misses {dst.names[y]}")
                if table[dst.names[y]] not in src.names:
                    raise ValidationError(f"{self.name}: reindexing along {name} leaves the fiber")
        for f in self._all_arrows():
            if f.data not in self._tables and f != self.base.identity(f.src):
                raise ValidationError(f"{self.name}: no reindexing table for {f.data}")

    def _all_arrows(self):
        objs = self.base.objects(Fragment())
        for a in objs:
            for b in objs:
                yield from self.base.hom(a, b)

    def _arrow(self, name) -> Mor:
        for f in self._all_arrows():
            if f.data == name:
                return f
        raise ValidationError(f"{self.name}: unknown arrow {name}")

    def fiber(self, a):
        return self._fibers[a]

    def reindex(self, f: Mor, alpha):
        table = self._tables.get(f.data)
        if table is None:
            if f == self.base.identity(f.src):
                return alpha
            raise ValidationError(f"{self.name}: no reindexing table for {f.data}")
        src, dst = self._fibers[f.src], self._fibers[f.dst]
        return src.index(table[dst.names[alpha]])

    def delta(self, a):
        if a not in self._deltas:
            raise MissingCapability("elementary", f"{self.name}: no equality on {a}")
        aa = self.base.product(a, a).carrier
        return self._fibers[aa].index(self._deltas[a])

    def exists_pr(self, a, b, alpha, leg: int = 0):
        if "existential" not in self.capabilities:
            raise MissingCapability("existential", self.name)
        C = self.base
        pr = C.product(a, b).legs[leg]
        G = self._fibers[C.product(a, b).carrier]
        y = least_above(self._fibers[(a, b)[leg]], lambda y: G.le(alpha, self.reindex(pr, y)))
        if y is None:
            raise MissingCapability("existential", f"{self.name}: no left adjoint at {alpha!r}")
        return y

    def forall_pr(self, a, b, alpha, leg: int = 0):
        if "universal" not in self.capabilities:
            raise MissingCapability("universal", self.name)
        C = self.base
        pr = C.product(a, b).legs[leg]
        G = self._fibers[C.product(a, b).carrier]
        y = greatest_below(self._fibers[(a, b)[leg]], lambda y: G.le(self.reindex(pr, y), alpha))
        if y is None:
            raise MissingCapability("universal", f"{self.name}: no right adjoint at {alpha!r}")
        return y


# ---------------------------------------------------------------- fuzzy sets, written out


@dataclass(frozen=True)
class HSet:
    """A finite carrier with an H-valued table (a predicate or a relation)."""

    size: int
    table: tuple

    def __repr__(self):
        return f"HSet({self.size}, {self.table})"


class _TableCategory(Category):
    """Shared plumbing for the directly built H-set categories."""

    def __init__(self, H: InfSemilattice):
        self.H = H
        self._objs: dict[int, list] = {}

    def objects(self, frag: Fragment) -> list:
        out = []
        for n in range(frag.cap + 1):
            if n not in self._objs:
                self._objs[n] = list(self._objects_of_size(n))
            out.extend(self._objs[n])
        out += [o for o in frag.objects if o not in out]
        return out

    def _objects_of_size(self, n):
        raise NotImplementedError

    def _valid(self, x: HSet, y: HSet, f: tuple) -> bool:
        raise NotImplementedError

    def _canon(self, x: HSet, y: HSet, f: tuple) -> tuple:
        return f

    def hom(self, x: HSet, y: HSet) -> list[Mor]:
        out, seen = [], set()
        for f in itertools.product(range(y.size), repeat=x.size):
            if self._valid(x, y, f):
                c = self._canon(x, y, f)
                if c not in seen:
                    seen.add(c)
                    out.append(Mor(x, y, c))
        return out

    def hom_size(self, x, y) -> int:
        return y.size**x.size

    def identity(self, x) -> Mor:
        return Mor(x, x, tuple(range(x.size)))

    def _compose(self, g: Mor, f: Mor) -> Mor:
        return Mor(f.src, g.dst, self._canon(f.src, g.dst, tuple(g.data[i] for i in f.data)))


class FuzCategory(_TableCategory):
    """Goguen's fuzzy sets: (A, α) with α: A → H; arrows f with α(a) ≤ β(f a)."""

    name = "Fuz"

    def _objects_of_size(self, n):
        for alpha in itertools.product(self.H.elements(), repeat=n):
            yield HSet(n, alpha)

    def _valid(self, x, y, f):
        le = self.H.le
        return all(le(x.table[a], y.table[f[a]]) for a in range(x.size))

    def terminal(self) -> StructureWitness:
        t = HSet(1, (self.H.top,))
        return StructureWitness("terminal", t, (), lambda x: Mor(x, t, (0,) * x.size))

    def product(self, x, y) -> StructureWitness:
        H = self.H
        n, m = x.size, y.size
        p = HSet(n * m, tuple(H.meet(x.table[i], y.table[j]) for i in range(n) for j in range(m)))
        legs = (Mor(p, x, tuple(i // m for i in range(n * m))), Mor(p, y, tuple(i % m for i in range(n * m))))
        return StructureWitness(
            "product", p, legs, lambda f, g: Mor(f.src, p, tuple(a * m + b for a, b in zip(f.data, g.data)))
        )


class UMCategory(_TableCategory):
    """H-valued ultrametric spaces: d(a,a) = ⊤, symmetric, d(a,b)∧d(b,c) ≤ d(a,c),
    and d(a,b) = ⊤ only when a = b; arrows are the non-expansive functions."""

    name = "UM"

    def _objects_of_size(self, n):
        H = self.H
        for d in itertools.product(H.elements(), repeat=n * n):
            if all(d[i * n + i] == H.top for i in range(n)) and _symmetric_transitive(H, n, d):
                if all(i == j or d[i * n + j] != H.top for i in range(n) for j in range(n)):
                    yield HSet(n, d)

    def _valid(self, x, y, f):
        n, m = x.size, y.size
        le = self.H.le
        return all(le(x.table[a * n + b], y.table[f[a] * m + f[b]]) for a in range(n) for b in range(n))

    def terminal(self) -> StructureWitness:
        t = HSet(1, (self.H.top,))
        return StructureWitness("terminal", t, (), lambda x: Mor(x, t, (0,) * x.size))

    def product(self, x, y) -> StructureWitness:
        p = _product_relation(self.H, x, y)
        n, m = x.size, y.size
        legs = (Mor(p, x, tuple(i // m for i in range(n * m))), Mor(p, y, tuple(i % m for i in range(n * m))))
        return StructureWitness(
            "product", p, legs, lambda f, g: Mor(f.src, p, tuple(a * m + b for a, b in zip(f.data, g.data)))
        )


class SeparatedHSets(_TableCategory):
    """Total H-valued sets: E symmetric and transitive with extent E(a,a), separated
    (E(a,b) = E(a,a) = E(b,b) forces a = b).  Arrows are functions with
    E(a,b) ≤ F(fa,fb), identified when E(a,a) ≤ F(fa,ga) for every a."""

    name = "SepHSet"

    def _objects_of_size(self, n):
        H = self.H
        for d in itertools.product(H.elements(), repeat=n * n):
            if not _symmetric_transitive(H, n, d):
                continue
            if all(
                i == j or not (d[i * n + j] == d[i * n + i] == d[j * n + j]) for i in range(n) for j in range(n)
            ):
                yield HSet(n, d)

    def _valid(self, x, y, f):
        n, m = x.size, y.size
        le = self.H.le
        return all(le(x.table[a * n + b], y.table[f[a] * m + f[b]]) for a in range(n) for b in range(n))

    def _canon(self, x, y, f):
        n, m = x.size, y.size
        le = self.H.le
        out = []
        for a in range(n):
            ext = x.table[a * n + a]
            out.append(next(b for b in range(m) if le(ext, y.table[f[a] * m + b])))
        return tuple(out)

    def terminal(self) -> StructureWitness:
        t = HSet(1, (self.H.top,))
        return StructureWitness("terminal", t, (), lambda x: Mor(x, t, (0,) * x.size))

    def product(self, x, y) -> StructureWitness:
        p = _product_relation(self.H, x, y)
        n, m = x.size, y.size
        legs = (
            Mor(p, x, self._canon(p, x, tuple(i // m for i in range(n * m)))),
            Mor(p, y, self._canon(p, y, tuple(i % m for i in range(n * m)))),
        )

        def mediate(f, g):
            return Mor(f.src, p, self._canon(f.src, p, tuple(a * m + b for a, b in zip(f.data, g.data))))

        return StructureWitness("product", p, legs, mediate)


def _symmetric_transitive(H, n, d) -> bool:
    for i in range(n):
        for j in range(n):
            if d[i * n + j] != d[j * n + i]:
                return False
            for k in range(n):
                if not H.le(H.meet(d[i * n + j], d[j * n + k]), d[i * n + k]):
                    return False
    return True


def _product_relation(H, x: HSet, y: HSet) -> HSet:
    n, m = x.size, y.size
    N = n * m
    tab = tuple(
        H.meet(x.table[(p // m) * n + (q // m)], y.table[(p % m) * m + (q % m)]) for p in range(N) for q in range(N)
    )
    return HSet(N, tab)


# ---------------------------------------------------------------- comparison functors


def um_to_eqc(U: UMCategory, Q) -> Functor:
    """UM_H → base of eqc(P_H): (A, d) ↦ (A, d), f ↦ [f]."""
    from .completions import EqcObject

    C = Q.base

    def obj(x: HSet):
        return EqcObject(x.size, x.table)

    def arr(f: Mor):
        return C.arrow(obj(f.src), obj(f.dst), Mor(f.src.size, f.dst.size, f.data))

    return Functor(U, C, obj, arr, name="UM→eqc")


def separated_to_eqc(S: SeparatedHSets, Q) -> Functor:
    """Separated H-sets → base of eqc(comprehension completion of P_H):
    (A, E) ↦ ((A, extent of E), E)."""
    from .completions import CompObject, EqcObject

    C = Q.base
    n_of = lambda x: x.size  # noqa: E731

    def obj(x: HSet):
        n = n_of(x)
        ext = tuple(x.table[i * n + i] for i in range(n))
        return EqcObject(CompObject(n, ext), x.table)

    def arr(f: Mor):
        src, dst = obj(f.src), obj(f.dst)
        inner = Mor(src.base, dst.base, Mor(f.src.size, f.dst.size, f.data))
        return C.arrow(src, dst, inner)

    return Functor(S, C, obj, arr, name="SepHSet→eqc")


def fuz_to_comprehension(F: FuzCategory, Cc) -> Functor:
    """Fuz(H) → base of the comprehension completion of P_H (identity on data)."""
    from .completions import CompObject

    B = Cc.base

    def obj(x: HSet):
        return CompObject(x.size, x.table)

    def arr(f: Mor):
        return Mor(obj(f.src), obj(f.dst), Mor(f.src.size, f.dst.size, f.data))

    return Functor(F, B, obj, arr, name="Fuz→comprehension")


# ---------------------------------------------------------------- builder


FRAMES = {
    "2": lattice.boolean,
    "H3": lattice.h3,
    "M3": lattice.m3,
    "P2": lambda: lattice.powerset_lattice(2),
}


@dataclass
class CorpusSpec:
    """Family name plus parameters.

    ``family`` is one of finset, powerdoctrine, sub, weaksub, fuz, um,
    separated, presented.  ``frame`` is an ``InfSemilattice`` or a key of
    ``FRAMES``; ``category`` is a presented category for sub/weaksub/presented.
    """

    family: str
    frame: Any = None
    category: Any = None
    params: dict = field(default_factory=dict)


def _frame(x) -> InfSemilattice:
    if isinstance(x, InfSemilattice):
        return x
    if x in FRAMES:
        return FRAMES[x]()
    raise CategoryError(f"unknown frame {x!r}")


def build(spec: CorpusSpec):
    fam = spec.family
    if fam == "finset":
        return FinSet()
    if fam == "powerdoctrine":
        H = _frame(spec.frame)
        if spec.params.get("require_frame") and not H.check_frame().holds:
            raise ValidationError(f"{H.name} is not a frame")
        return PowerDoctrine(H)
    if fam == "sub":
        L = _frame(spec.frame)
        return SubDoctrine(L)
    if fam == "weaksub":
        base = spec.category if spec.category is not None else FinSet()
        return WeakSubobjects(base, domain_cap=spec.params.get("domain_cap", 2))
    if fam == "fuz":
        return FuzCategory(_frame(spec.frame))
    if fam == "um":
        return UMCategory(_frame(spec.frame))
    if fam == "separated":
        return SeparatedHSets(_frame(spec.frame))
    if fam == "presented":
        if spec.category is None:
            raise ValidationError("a presented doctrine needs a category")
        return PresentedDoctrine(spec.params.get("name", "presented"), spec.category, **spec.params.get("tables", {}))
    raise ValidationError(f"unknown corpus family {fam!r}")
