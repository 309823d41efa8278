"""Finite bi-Heyting algebras given by operation tables.

Elements are indices ``0..size-1``; labels are for display only. The order
is always derived from the meet table.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Any, Iterable, Iterator, Mapping, Optional, Sequence

from .kripke import KripkeModel, upsets
from .syntax import And, Bot, Excl, Formula, Imp, Or, Top, Var, variables

__all__ = [
    "FinBiHA", "AlgebraReport", "Congruence", "Equation", "validate", "leq",
    "interpret", "interpret_all", "Evaluator", "valuations", "validates_eq", "eq_consequence",
    "upset_algebra", "model_valuation", "principal_congruence",
    "all_congruences", "is_congruence", "quotient", "lattice_filters",
    "is_lattice_filter", "dn_element", "dn_stabilization", "c3",
    "two_element", "trivial_algebra", "algebra_from_document",
    "algebra_to_document",
]

Table = tuple[tuple[int, ...], ...]
Equation = tuple[Formula, Formula]
_OPS = ("meet", "join", "imp", "excl")


@dataclass(frozen=True, eq=False)
class FinBiHA:
    size: int
    top: int
    bot: int
    meet: Table
    join: Table
    imp: Table
    excl: Table
    labels: Optional[tuple[str, ...]] = None
    _leq: tuple[int, ...] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        n = self.size
        if n < 1:
            raise ValueError("an algebra needs at least one element")
        for name in ("top", "bot"):
            x = getattr(self, name)
            if not 0 <= x < n:
                raise ValueError(f"{name} = {x} is outside 0..{n - 1}")
        for name in _OPS:
            rows = getattr(self, name)
            if len(rows) != n or any(len(r) != n for r in rows):
                raise ValueError(f"{name} table must be {n}x{n}")
            rows = tuple(tuple(int(x) for x in r) for r in rows)
            for i, r in enumerate(rows):
                for j, x in enumerate(r):
                    if not 0 <= x < n:
                        raise ValueError(f"{name}[{i}][{j}] = {x} is outside 0..{n - 1}")
            object.__setattr__(self, name, rows)
        if self.labels is not None:
            labels = tuple(str(x) for x in self.labels)
            if len(labels) != n or len(set(labels)) != n:
                raise ValueError("labels must be distinct, one per element")
            object.__setattr__(self, "labels", labels)
        # row x holds the bitset of elements above x
        rows = []
        for x in range(n):
            bits = 0
            for y in range(n):
                if self.meet[x][y] == x:
                    bits |= 1 << y
            rows.append(bits)
        object.__setattr__(self, "_leq", tuple(rows))

    @property
    def elements(self) -> range:
        return range(self.size)

    def leq(self, x: int, y: int) -> bool:
        return bool(self._leq[x] >> y & 1)

    def label(self, x: int) -> str:
        return self.labels[x] if self.labels else str(x)

    def element(self, key: Any) -> int:
        """Resolve an index or label to an element."""
        if self.labels and str(key) in self.labels:
            return self.labels.index(str(key))
        try:
            x = int(key)
        except (TypeError, ValueError):
            raise KeyError(f"unknown element {key!r}") from None
        if not 0 <= x < self.size:
            raise KeyError(f"unknown element {key!r}")
        return x

    def neg(self, x: int) -> int:
        return self.imp[x][self.bot]

    def coneg(self, x: int) -> int:
        return self.excl[self.top][x]


def leq(a: FinBiHA, x: int, y: int) -> bool:
    return a.leq(x, y)


@dataclass
class AlgebraReport:
    ok: bool
    law: Optional[str] = None
    witness: tuple[int, ...] = ()
    message: str = ""

    def __bool__(self) -> bool:
        return self.ok

    def to_dict(self) -> dict[str, Any]:
        return {"ok": self.ok, "law": self.law, "witness": list(self.witness),
                "message": self.message}


def _fail(a: FinBiHA, law: str, *w: int) -> AlgebraReport:
    names = ", ".join(a.label(x) for x in w)
    return AlgebraReport(False, law, tuple(w), f"{law} fails at ({names})")


def validate(a: FinBiHA) -> AlgebraReport:
    """Exhaustively check the bounded lattice laws, the order and both
    residuation laws. Reports the first failure with its witnesses."""
    E = a.elements
    M, J, top, bot = a.meet, a.join, a.top, a.bot
    for x in E:
        if M[x][top] != x:
            return _fail(a, "P1", x)
        if J[x][bot] != x:
            return _fail(a, "P2", x)
    for x in E:
        for y in E:
            if M[x][y] != M[y][x]:
                return _fail(a, "P3", x, y)
            if M[x][J[x][y]] != x:
                return _fail(a, "P5", x, y)
            if J[x][y] != J[y][x]:
                return _fail(a, "P6", x, y)
            if J[x][M[x][y]] != x:
                return _fail(a, "P8", x, y)
    for x in E:
        for y in E:
            for z in E:
                if M[x][M[y][z]] != M[M[x][y]][z]:
                    return _fail(a, "P4", x, y, z)
                if J[x][J[y][z]] != J[J[x][y]][z]:
                    return _fail(a, "P7", x, y, z)
    # the order follows from the lattice laws, but check it directly anyway
    up = a._leq
    for x in E:
        if not up[x] >> x & 1:
            return _fail(a, "order-reflexive", x)
        if not up[x] >> top & 1 or not up[bot] >> x & 1:
            return _fail(a, "order-bounds", x)
        for y in E:
            if up[x] >> y & 1:
                if x != y and up[y] >> x & 1:
                    return _fail(a, "order-antisymmetric", x, y)
                if up[y] & ~up[x]:
                    return _fail(a, "order-transitive", x, y)
    I, X = a.imp, a.excl
    for x in E:
        for y in E:
            mxy = up[M[x][y]]
            jrow = J[y]
            for z in E:
                if bool(mxy >> z & 1) != bool(up[x] >> I[y][z] & 1):
                    return _fail(a, "ResI", x, y, z)
                if bool(up[x] >> jrow[z] & 1) != bool(up[X[x][y]] >> z & 1):
                    return _fail(a, "ResE", x, y, z)
    return AlgebraReport(True)


# ---------------------------------------------------------------------------
# terms and equations

def interpret(a: FinBiHA, v: Mapping[str, int], f: Formula) -> int:
    memo: dict[Formula, int] = {}

    def go(g: Formula) -> int:
        if isinstance(g, Var):
            if g.name not in v:
                raise ValueError(f"variable {g.name} has no value")
            return v[g.name]
        if isinstance(g, Top):
            return a.top
        if isinstance(g, Bot):
            return a.bot
        hit = memo.get(g)
        if hit is not None:
            return hit
        x, y = go(g.left), go(g.right)
        if isinstance(g, And):
            out = a.meet[x][y]
        elif isinstance(g, Or):
            out = a.join[x][y]
        elif isinstance(g, Imp):
            out = a.imp[x][y]
        else:
            out = a.excl[x][y]
        memo[g] = out
        return out

    return go(f)


def valuations(a: FinBiHA, names: Iterable[str]) -> Iterator[dict[str, int]]:
    names = sorted(set(names))
    for combo in itertools.product(a.elements, repeat=len(names)):
        yield dict(zip(names, combo))


class Evaluator:
    """Interpret formulas under every valuation of ``names`` at once.

    Each formula becomes a tuple of elements indexed like
    ``valuations(a, names)``.
    """

    def __init__(self, a: FinBiHA, names: Iterable[str]):
        self.a = a
        self.names = sorted(set(names))
        k, n = len(self.names), a.size
        self.count = n ** k
        self.cache: dict[Formula, tuple[int, ...]] = {}
        for i, name in enumerate(self.names):
            # the last name varies fastest, as in itertools.product
            block = n ** (k - 1 - i)
            self.cache[Var(name)] = tuple((j // block) % n for j in range(self.count))

    def __call__(self, f: Formula) -> tuple[int, ...]:
        hit = self.cache.get(f)
        if hit is not None:
            return hit
        a = self.a
        if isinstance(f, Var):
            raise ValueError(f"variable {f.name} has no value")
        if isinstance(f, Top):
            out = (a.top,) * self.count
        elif isinstance(f, Bot):
            out = (a.bot,) * self.count
        else:
            table = {And: a.meet, Or: a.join, Imp: a.imp, Excl: a.excl}[type(f)]
            out = tuple(table[x][y] for x, y in zip(self(f.left), self(f.right)))
        self.cache[f] = out
        return out


def interpret_all(a: FinBiHA, names: Iterable[str], f: Formula) -> tuple[int, ...]:
    """Values of ``f`` under every valuation of ``names``, in the order of
    :func:`valuations`."""
    return Evaluator(a, names)(f)


def _eq_vars(eqs: Iterable[Equation]) -> set[str]:
    out: set[str] = set()
    for e, d in eqs:
        out |= variables(e) | variables(d)
    return out


def validates_eq(a: FinBiHA, eq: Equation) -> bool:
    ev = Evaluator(a, _eq_vars([eq]))
    return ev(eq[0]) == ev(eq[1])


def eq_consequence(family: Iterable[FinBiHA], theta: Iterable[Equation], eq: Equation) -> bool:
    """Every valuation satisfying all of ``theta`` satisfies ``eq``, on every
    algebra of ``family``."""
    theta = list(theta)
    names = _eq_vars(theta + [eq])
    for a in family:
        ev = Evaluator(a, names)
        sides = [(ev(e), ev(d)) for e, d in theta]
        lhs, rhs = ev(eq[0]), ev(eq[1])
        for i in range(ev.count):
            if lhs[i] != rhs[i] and all(l[i] == r[i] for l, r in sides):
                return False
    return True


# ---------------------------------------------------------------------------
# upset algebras

def _upset_label(m: KripkeModel, s: int) -> str:
    return "{" + ",".join(m.label(w) for w in m.worlds if s >> w & 1) + "}"


def upset_algebra(m: KripkeModel) -> FinBiHA:
    """Complex algebra of the frame of ``m``: upward-closed world sets under
    intersection, union, and the forcing clauses of the two arrows.

    Elements are ordered by (cardinality, bitmask), so on a chain the index
    order is the inclusion order.
    """
    carrier = upsets(m)
    index = {s: i for i, s in enumerate(carrier)}
    full = m.full
    up, down = m.up, m.down

    def imp(x: int, y: int) -> int:
        bad = x & ~y
        return sum(1 << w for w in m.worlds if not up[w] & bad)

    def excl(x: int, y: int) -> int:
        good = x & ~y
        return sum(1 << w for w in m.worlds if down[w] & good)

    def table(op) -> Table:
        return tuple(tuple(index[op(x, y)] for y in carrier) for x in carrier)

    return FinBiHA(
        len(carrier), index[full], index[0],
        table(lambda x, y: x & y), table(lambda x, y: x | y),
        table(imp), table(excl),
        tuple(_upset_label(m, s) for s in carrier),
    )


def model_valuation(m: KripkeModel, names: Iterable[str] = ()) -> dict[str, int]:
    """The valuation of ``m`` as elements of :func:`upset_algebra` (m).

    Names absent from the model valuation map to the empty upset.
    """
    index = {s: i for i, s in enumerate(upsets(m))}
    out = {}
    for p in set(m.valuation) | set(names):
        s = sum(1 << w for w in m.valuation.get(p, ()))
        if s not in index:
            raise ValueError(f"valuation of {p} is not upward closed")
        out[p] = index[s]
    return out


# ---------------------------------------------------------------------------
# congruences

@dataclass(frozen=True)
class Congruence:
    """Partition of the carrier as a block id per element, numbered in order
    of first appearance."""
    blocks: tuple[int, ...]

    @classmethod
    def from_labels(cls, ids: Sequence[int]) -> "Congruence":
        seen: dict[int, int] = {}
        return cls(tuple(seen.setdefault(i, len(seen)) for i in ids))

    @property
    def count(self) -> int:
        return max(self.blocks) + 1

    def related(self, x: int, y: int) -> bool:
        return self.blocks[x] == self.blocks[y]

    def classes(self) -> list[list[int]]:
        out: list[list[int]] = [[] for _ in range(self.count)]
        for x, b in enumerate(self.blocks):
            out[b].append(x)
        return out


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        p = self.parent
        while p[x] != x:
            p[x] = p[p[x]]
            x = p[x]
        return x

    def union(self, x: int, y: int) -> bool:
        rx, ry = self.find(x), self.find(y)
        if rx == ry:
            return False
        if rx < ry:
            rx, ry = ry, rx
        self.parent[rx] = ry
        return True


def _close(a: FinBiHA, uf: _UnionFind) -> Congruence:
    """Merge blocks until every table respects the partition."""
    tables = [getattr(a, op) for op in _OPS]
    changed = True
    while changed:
        changed = False
        for x in a.elements:
            rx = uf.find(x)
            for y in range(x + 1, a.size):
                if uf.find(y) != rx:
                    continue
                for t in tables:
                    tx, ty = t[x], t[y]
                    for z in a.elements:
                        if uf.union(tx[z], ty[z]):
                            changed = True
                        if uf.union(t[z][x], t[z][y]):
                            changed = True
    return Congruence.from_labels([uf.find(x) for x in a.elements])


def principal_congruence(a: FinBiHA, x: int, y: int) -> Congruence:
    """Least congruence relating ``x`` and ``y``."""
    uf = _UnionFind(a.size)
    uf.union(x, y)
    return _close(a, uf)


def _join(a: FinBiHA, c: Congruence, d: Congruence) -> Congruence:
    uf = _UnionFind(a.size)
    for part in (c, d):
        for cls in part.classes():
            for z in cls[1:]:
                uf.union(cls[0], z)
    return _close(a, uf)


def all_congruences(a: FinBiHA) -> list[Congruence]:
    """Every congruence, as joins of principal ones. Sorted by block count
    descending, so the identity comes first and the total relation last."""
    identity = Congruence(tuple(a.elements))
    found = {identity}
    principal = {principal_congruence(a, x, y)
                 for x in a.elements for y in range(x + 1, a.size)}
    frontier = list(principal - found)
    found |= principal
    while frontier:
        nxt = []
        for c in frontier:
            for p in principal:
                j = _join(a, c, p)
                if j not in found:
                    found.add(j)
                    nxt.append(j)
        frontier = nxt
    return sorted(found, key=lambda c: (-c.count, c.blocks))


def is_congruence(a: FinBiHA, c: Congruence) -> bool:
    if len(c.blocks) != a.size:
        return False
    for t in (getattr(a, op) for op in _OPS):
        for x in a.elements:
            for y in a.elements:
                if not c.related(x, y):
                    continue
                for z in a.elements:
                    if not c.related(t[x][z], t[y][z]) or not c.related(t[z][x], t[z][y]):
                        return False
    return True


def quotient(a: FinBiHA, c: Congruence) -> FinBiHA:
    if not is_congruence(a, c):
        raise ValueError("partition is not a congruence")
    reps = [cls[0] for cls in c.classes()]
    b = c.blocks

    def table(t: Table) -> Table:
        return tuple(tuple(b[t[x][y]] for y in reps) for x in reps)

    labels = tuple("[" + ",".join(a.label(x) for x in cls) + "]" for cls in c.classes())
    return FinBiHA(len(reps), b[a.top], b[a.bot], table(a.meet), table(a.join),
                   table(a.imp), table(a.excl), labels)


# ---------------------------------------------------------------------------
# filters

def is_lattice_filter(a: FinBiHA, s: Iterable[int]) -> bool:
    s = set(s)
    if a.top not in s:
        return False
    for x in s:
        for y in a.elements:
            if a.leq(x, y) and y not in s:
                return False
        for y in s:
            if a.meet[x][y] not in s:
                return False
    return True


def lattice_filters(a: FinBiHA) -> list[frozenset[int]]:
    """All lattice filters. In a finite lattice a filter contains the meet
    of its members, so the filters are exactly the principal upsets."""
    out = {frozenset(y for y in a.elements if a.leq(x, y)) for x in a.elements}
    return sorted(out, key=lambda s: (len(s), sorted(s)))


# ---------------------------------------------------------------------------
# double negation

def dn_element(a: FinBiHA, x: int) -> int:
    return a.imp[a.excl[a.top][x]][a.bot]


def dn_stabilization(a: FinBiHA) -> int:
    """Least ``n`` with ``dn^(n+1)(x) = dn^n(x)`` for every element."""
    cur = list(a.elements)
    for n in range(a.size + 1):
        nxt = [dn_element(a, x) for x in cur]
        if nxt == cur:
            return n
        cur = nxt
    raise ValueError("double negation does not stabilise; is the algebra valid?")


# ---------------------------------------------------------------------------
# named algebras

def _chain(labels: Sequence[str]) -> FinBiHA:
    n = len(labels)
    E = range(n)
    return FinBiHA(
        n, n - 1, 0,
        tuple(tuple(min(x, y) for y in E) for x in E),
        tuple(tuple(max(x, y) for y in E) for x in E),
        tuple(tuple(n - 1 if x <= y else y for y in E) for x in E),
        tuple(tuple(0 if x <= y else x for y in E) for x in E),
        tuple(labels),
    )


def c3() -> FinBiHA:
    """Three-element chain ``0 < 1/2 < 1``."""
    return _chain(("0", "1/2", "1"))


def two_element() -> FinBiHA:
    return _chain(("0", "1"))


def trivial_algebra() -> FinBiHA:
    return _chain(("0",))


# ---------------------------------------------------------------------------
# document format

def algebra_to_document(a: FinBiHA) -> dict[str, Any]:
    doc: dict[str, Any] = {"size": a.size, "top": a.top, "bot": a.bot}
    for op in _OPS:
        doc[op] = [list(r) for r in getattr(a, op)]
    if a.labels:
        doc["labels"] = list(a.labels)
    return doc


def algebra_from_document(doc: Mapping[str, Any]) -> FinBiHA:
    missing = [k for k in ("size", "top", "bot", *_OPS) if k not in doc]
    if missing:
        raise ValueError(f"algebra document lacks {', '.join(missing)}")
    labels = doc.get("labels")
    return FinBiHA(int(doc["size"]), int(doc["top"]), int(doc["bot"]),
                   *(doc[op] for op in _OPS),
                   labels=tuple(labels) if labels is not None else None)
