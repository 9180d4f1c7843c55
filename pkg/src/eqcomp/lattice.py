"""Finite inf-semilattices, Heyting algebras and frames.

An ``InfSemilattice`` is tabulated once at construction: elements are the
indices ``0..n-1`` in load order, and ``leq``/``meet`` (plus ``join``,
``imp`` and ``bottom`` when they exist) are dense tables.  The same small
protocol (``top``, ``bottom``, ``le``, ``meet``, ``join``, ``imp``,
``elements``, ``size``) is implemented by the derived fibers below, so a
doctrine can hand out any of them as a fiber.
"""

from __future__ import annotations

import itertools
from typing import Iterable, Iterator, Sequence

from .kernel import CategoryError, PropertyReport, Tally


class MissingStructure(CategoryError):
    pass


# filtered fibers whose parent is larger than this report the parent size
SCAN_LIMIT = 1 << 16


class InfSemilattice:
    """A finite meet-semilattice with a top, tabulated.

    ``leq`` is a square boolean table.  Missing ``meet``, ``join``, ``imp``
    and ``bottom`` tables are derived by search; a missing meet or top is a
    validation error, a missing join or implication just leaves that table out.
    """

    def __init__(self, names: Sequence[str], leq, meet=None, join=None, imp=None, name: str = "L"):
        self.name = name
        self.names = [str(n) for n in names]
        n = len(self.names)
        if n == 0:
            raise CategoryError("an inf-semilattice needs at least one element")
        if len(set(self.names)) != n:
            raise CategoryError("duplicate element names")
        self._index = {nm: i for i, nm in enumerate(self.names)}
        self._le = [[bool(leq[i][j]) for j in range(n)] for i in range(n)]
        self._validate_order()
        self.top = self._extremum(maximum=True)
        if self.top is None:
            raise CategoryError(f"{name}: no top element")
        self.bottom = self._extremum(maximum=False)
        self._meet = self._table(meet, self._glb, "meet")
        if self._meet is None:
            raise CategoryError(f"{name}: binary meets do not exist")
        self._join = self._table(join, self._lub, "join")
        self._imp = self._table(imp, self._rpc, "implication")

    # -- construction helpers

    @classmethod
    def from_order(cls, names: Sequence[str], pairs: Iterable[tuple[str, str]], name: str = "L", **tables):
        """Build from generating order pairs (reflexive-transitive closure is taken)."""
        idx = {nm: i for i, nm in enumerate(names)}
        n = len(names)
        le = [[i == j for j in range(n)] for i in range(n)]
        for a, b in pairs:
            if a not in idx or b not in idx:
                raise CategoryError(f"order pair ({a}, {b}) mentions an undeclared element")
            le[idx[a]][idx[b]] = True
        for k in range(n):
            for i in range(n):
                if le[i][k]:
                    for j in range(n):
                        if le[k][j]:
                            le[i][j] = True
        return cls(names, le, name=name, **tables)

    def _validate_order(self):
        n = len(self.names)
        le = self._le
        for i in range(n):
            if not le[i][i]:
                raise CategoryError(f"{self.name}: order is not reflexive at {self.names[i]}")
            for j in range(n):
                if i != j and le[i][j] and le[j][i]:
                    raise CategoryError(f"{self.name}: order is not antisymmetric on {self.names[i]}, {self.names[j]}")
                for k in range(n):
                    if le[i][j] and le[j][k] and not le[i][k]:
                        raise CategoryError(f"{self.name}: order is not transitive")

    def _extremum(self, maximum: bool):
        n = len(self.names)
        for i in range(n):
            if all((self._le[j][i] if maximum else self._le[i][j]) for j in range(n)):
                return i
        return None

    def _glb(self, x, y):
        lower = [z for z in self.elements() if self._le[z][x] and self._le[z][y]]
        for z in lower:
            if all(self._le[w][z] for w in lower):
                return z
        return None

    def _lub(self, x, y):
        upper = [z for z in self.elements() if self._le[x][z] and self._le[y][z]]
        for z in upper:
            if all(self._le[z][w] for w in upper):
                return z
        return None

    def _rpc(self, x, y):
        # greatest z with z ∧ x ≤ y
        if self._meet is None:
            return None
        cands = [z for z in self.elements() if self._le[self._meet[z][x]][y]]
        for z in cands:
            if all(self._le[w][z] for w in cands):
                return z
        return None

    def _table(self, given, derive, what):
        n = len(self.names)
        derived = []
        for x in range(n):
            row = []
            for y in range(n):
                v = derive(x, y)
                if v is None:
                    if given is not None:
                        raise CategoryError(f"{self.name}: supplied {what} table is not the {what}")
                    return None
                row.append(v)
            derived.append(row)
        if given is not None:
            g = [[self._coerce(v) for v in row] for row in given]
            if g != derived:
                raise CategoryError(f"{self.name}: supplied {what} table disagrees with the order")
        return derived

    def _coerce(self, v):
        return self._index[v] if isinstance(v, str) else int(v)

    # -- protocol

    def elements(self) -> range:
        return range(len(self.names))

    def size(self) -> int:
        return len(self.names)

    def index(self, name: str) -> int:
        return self._index[name]

    def contains(self, x) -> bool:
        return isinstance(x, int) and 0 <= x < len(self.names)

    def le(self, x, y) -> bool:
        return self._le[x][y]

    def meet(self, x, y):
        return self._meet[x][y]

    @property
    def has_join(self) -> bool:
        return self._join is not None and self.bottom is not None

    @property
    def has_imp(self) -> bool:
        return self._imp is not None

    def join(self, x, y):
        if self._join is None:
            raise MissingStructure(f"{self.name}: no joins")
        return self._join[x][y]

    def imp(self, x, y):
        if self._imp is None:
            raise MissingStructure(f"{self.name}: no implication")
        return self._imp[x][y]

    def neg(self, x):
        if self.bottom is None:
            raise MissingStructure(f"{self.name}: no bottom")
        return self.imp(x, self.bottom)

    def upper_covers(self, x) -> list:
        above = [y for y in self.elements() if y != x and self._le[x][y]]
        return [y for y in above if not any(z != y and self._le[z][y] for z in above)]

    def __repr__(self):
        return f"InfSemilattice({self.name}, {self.names})"

    # -- checks

    def check_heyting(self) -> PropertyReport:
        """x∧y ≤ z ⇔ x ≤ y⇒z for all triples, plus joins and a bottom."""
        t = Tally("heyting")
        if self._imp is None:
            for x in self.elements():
                for y in self.elements():
                    if self._rpc(x, y) is None:
                        t.fail(reason="no relative pseudo-complement", x=self.names[x], y=self.names[y])
                        return t.report()
        if not self.has_join:
            t.fail(reason="no finite joins")
            return t.report()
        for x, y, z in itertools.product(self.elements(), repeat=3):
            if self.le(self.meet(x, y), z) != self.le(x, self.imp(y, z)):
                t.fail(x=self.names[x], y=self.names[y], z=self.names[z])
            else:
                t.ok()
        return t.report()

    def check_frame(self) -> PropertyReport:
        """Finite distributivity x∧(y∨z) = (x∧y)∨(x∧z)."""
        t = Tally("frame")
        if not self.has_join:
            t.fail(reason="no finite joins")
            return t.report()
        for x, y, z in itertools.product(self.elements(), repeat=3):
            if self.meet(x, self.join(y, z)) != self.join(self.meet(x, y), self.meet(x, z)):
                t.fail(x=self.names[x], y=self.names[y], z=self.names[z])
            else:
                t.ok()
        return t.report()

    def heyting_ops(self, x, y) -> dict:
        return {
            "meet": self.meet(x, y),
            "join": self.join(x, y),
            "implies": self.imp(x, y),
            "neg": self.neg(x),
        }


def heyting_ops(L: InfSemilattice, x, y) -> dict:
    return L.heyting_ops(x, y)


def check_heyting(L: InfSemilattice) -> PropertyReport:
    return L.check_heyting()


def check_frame(L: InfSemilattice) -> PropertyReport:
    return L.check_frame()


# ---------------------------------------------------------------- named lattices


def chain(names: Sequence[str], name: str | None = None) -> InfSemilattice:
    n = len(names)
    le = [[i <= j for j in range(n)] for i in range(n)]
    return InfSemilattice(names, le, name=name or "chain" + str(n))


def boolean() -> InfSemilattice:
    """The two-element Boolean algebra 0 < 1."""
    return chain(["0", "1"], name="2")


def h3() -> InfSemilattice:
    """The three-element chain 0 < h < 1: Heyting, not Boolean."""
    return chain(["0", "h", "1"], name="H3")


def m3() -> InfSemilattice:
    """The diamond M3: a lattice that is not distributive."""
    return InfSemilattice.from_order(
        ["0", "a", "b", "c", "1"],
        [("0", "a"), ("0", "b"), ("0", "c"), ("a", "1"), ("b", "1"), ("c", "1")],
        name="M3",
    )


def powerset_lattice(k: int) -> InfSemilattice:
    names = ["{" + ",".join(str(i) for i in range(k) if m >> i & 1) + "}" for m in range(2**k)]
    le = [[(a & ~b) == 0 for b in range(2**k)] for a in range(2**k)]
    return InfSemilattice(names, le, name=f"P({k})")


# ---------------------------------------------------------------- maps


class MonotoneMeetMap:
    """A table between two fibers, expected to preserve order, top and meets."""

    def __init__(self, source, target, table: dict):
        self.source = source
        self.target = target
        self.table = dict(table)

    def __call__(self, x):
        return self.table[x]

    def check(self) -> PropertyReport:
        t = Tally("monotone_meet_map")
        S, T = self.source, self.target
        if self(S.top) != T.top:
            t.fail(law="top", image=self(S.top))
            return t.report()
        for x in S.elements():
            for y in S.elements():
                fx, fy = self(x), self(y)
                if T.meet(fx, fy) != self(S.meet(x, y)):
                    t.fail(law="meet", x=x, y=y)
                elif S.le(x, y) and not T.le(fx, fy):
                    t.fail(law="monotone", x=x, y=y)
                else:
                    t.ok()
        return t.report()


# ---------------------------------------------------------------- derived fibers


class PowerFiber:
    """The pointwise lattice H^n; elements are tuples of H-indices."""

    def __init__(self, H: InfSemilattice, n: int):
        self.H = H
        self.n = n
        self.top = (H.top,) * n
        self.bottom = (H.bottom,) * n if H.bottom is not None else None

    def __repr__(self):
        return f"PowerFiber({self.H.name}^{self.n})"

    def elements(self) -> Iterator[tuple]:
        return itertools.product(self.H.elements(), repeat=self.n)

    def size(self) -> int:
        return self.H.size() ** self.n

    def contains(self, x) -> bool:
        return isinstance(x, tuple) and len(x) == self.n and all(self.H.contains(v) for v in x)

    @property
    def has_join(self) -> bool:
        return self.H.has_join

    @property
    def has_imp(self) -> bool:
        return self.H.has_imp

    def le(self, x, y) -> bool:
        le = self.H._le
        return all(le[a][b] for a, b in zip(x, y))

    def meet(self, x, y):
        m = self.H._meet
        return tuple(m[a][b] for a, b in zip(x, y))

    def join(self, x, y):
        j = self.H._join
        if j is None:
            raise MissingStructure("no joins")
        return tuple(j[a][b] for a, b in zip(x, y))

    def imp(self, x, y):
        i = self.H._imp
        if i is None:
            raise MissingStructure("no implication")
        return tuple(i[a][b] for a, b in zip(x, y))

    def neg(self, x):
        return self.imp(x, self.bottom)

    def upper_covers(self, x) -> list:
        out = []
        for k, v in enumerate(x):
            for w in self.H.upper_covers(v):
                out.append(x[:k] + (w,) + x[k + 1 :])
        return out


class SubFiber:
    """A sub-inf-semilattice of a parent fiber cut out by a predicate.

    Meets, joins and implications are inherited; the caller is responsible
    for the subset being closed under whichever of them it uses (the doctrine
    checks re-verify closure).
    """

    def __init__(self, parent, member, top=None, name: str = "sub"):
        self.parent = parent
        self.member = member
        self.name = name
        self.top = parent.top if top is None else top
        pb = parent.bottom
        self.bottom = pb if pb is not None and member(pb) else None
        self._cache: list | None = None

    def __repr__(self):
        return f"SubFiber({self.name} of {self.parent!r})"

    def elements(self):
        if self._cache is None:
            self._cache = [x for x in self.parent.elements() if self.member(x)]
        return iter(self._cache)

    def size(self) -> int:
        """Exact size, or the parent's size as an upper bound when scanning would be too costly."""
        if self._cache is None and self.parent.size() > SCAN_LIMIT:
            return self.parent.size()
        return sum(1 for _ in self.elements())

    def contains(self, x) -> bool:
        return self.parent.contains(x) and self.member(x)

    @property
    def has_join(self) -> bool:
        return self.parent.has_join and self.bottom is not None

    @property
    def has_imp(self) -> bool:
        return self.parent.has_imp

    def le(self, x, y):
        return self.parent.le(x, y)

    def meet(self, x, y):
        return self.parent.meet(x, y)

    def join(self, x, y):
        return self.parent.join(x, y)

    def imp(self, x, y):
        return self.parent.imp(x, y)

    def neg(self, x):
        return self.imp(x, self.bottom)

    def upper_covers(self, x) -> list:
        above = [y for y in self.elements() if y != x and self.le(x, y)]
        return [y for y in above if not any(z != y and self.le(z, y) for z in above)]


class DownFiber:
    """The down-set {φ ≤ α} of a parent fiber, with relative implication."""

    def __init__(self, parent, alpha):
        self.parent = parent
        self.alpha = alpha
        self.top = alpha
        self.bottom = parent.bottom

    def __repr__(self):
        return f"DownFiber(≤{self.alpha!r})"

    def elements(self):
        return (x for x in self.parent.elements() if self.parent.le(x, self.alpha))

    def size(self) -> int:
        if self.parent.size() > SCAN_LIMIT:
            return self.parent.size()
        return sum(1 for _ in self.elements())

    def contains(self, x) -> bool:
        return self.parent.contains(x) and self.parent.le(x, self.alpha)

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
        return self.parent.join(x, y)

    def imp(self, x, y):
        return self.parent.meet(self.parent.imp(x, y), self.alpha)

    def neg(self, x):
        return self.imp(x, self.bottom)

    def upper_covers(self, x) -> list:
        if isinstance(self.parent, PowerFiber):
            return [y for y in self.parent.upper_covers(x) if self.parent.le(y, self.alpha)]
        above = [y for y in self.elements() if y != x and self.le(x, y)]
        return [y for y in above if not any(z != y and self.le(z, y) for z in above)]


def meet_all(F, xs) -> object:
    out = F.top
    for x in xs:
        out = F.meet(out, x)
    return out


def join_all(F, xs) -> object:
    if F.bottom is None:
        raise MissingStructure("no bottom")
    out = F.bottom
    for x in xs:
        out = F.join(out, x)
    return out
