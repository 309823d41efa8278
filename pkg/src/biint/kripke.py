"""Finite Kripke models for the bi-intuitionistic language.

Worlds are ``0..size-1``. The order is given by generating edges and its
reflexive-transitive closure is computed once at construction. World sets
are handled internally as integer bitmasks; the public functions speak in
world indices and frozensets.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Any, Iterable, Iterator, Mapping, Optional, Sequence

from .syntax import And, Bot, Formula, Imp, Or, Top, Var, variables

__all__ = [
    "KripkeModel", "ModelReport", "Countermodel", "validate_model", "forces",
    "extension", "local_consequence_on", "global_consequence_on",
    "countermodel_search", "candidate_models", "zigzag_n", "zigzag_reach", "connected",
    "n_bisimilar", "xmas_lights", "glue", "model_from_document",
    "model_to_document", "two_chain", "upsets",
]


def _bits(mask: int) -> Iterator[int]:
    i = 0
    while mask:
        if mask & 1:
            yield i
        mask >>= 1
        i += 1


def _mask(ws: Iterable[int]) -> int:
    m = 0
    for w in ws:
        m |= 1 << w
    return m


_TABLE_LIMIT = 10
_TABLES = object()


@dataclass(frozen=True, eq=False)
class KripkeModel:
    size: int
    edges: tuple[tuple[int, int], ...]
    valuation: Mapping[str, frozenset]
    labels: Optional[tuple[str, ...]] = None
    up: tuple[int, ...] = field(init=False, repr=False)
    down: tuple[int, ...] = field(init=False, repr=False)
    _cache: dict = field(init=False, repr=False)

    def __post_init__(self) -> None:
        n = self.size
        if n < 1:
            raise ValueError("a model needs at least one world")
        edges = tuple((int(a), int(b)) for a, b in self.edges)
        for a, b in edges:
            if not (0 <= a < n and 0 <= b < n):
                raise ValueError(f"edge ({a}, {b}) leaves the world range 0..{n - 1}")
        val = {}
        for p, ws in self.valuation.items():
            ws = frozenset(int(w) for w in ws)
            bad = [w for w in ws if not 0 <= w < n]
            if bad:
                raise ValueError(f"valuation of {p} names unknown worlds {bad}")
            val[p] = ws
        if self.labels is not None and len(self.labels) != n:
            raise ValueError("one label per world expected")
        up = [1 << w for w in range(n)]
        for a, b in edges:
            up[a] |= 1 << b
        # transitive closure, Warshall on bitmask rows
        for k in range(n):
            bit = 1 << k
            row = up[k]
            for i in range(n):
                if up[i] & bit:
                    up[i] |= row
        down = [0] * n
        for i in range(n):
            for j in _bits(up[i]):
                down[j] |= 1 << i
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "valuation", val)
        object.__setattr__(self, "up", tuple(up))
        object.__setattr__(self, "down", tuple(down))
        object.__setattr__(self, "_cache", {})

    @property
    def worlds(self) -> range:
        return range(self.size)

    @property
    def full(self) -> int:
        return (1 << self.size) - 1

    def leq(self, w: int, v: int) -> bool:
        return bool(self.up[w] >> v & 1)

    def label(self, w: int) -> str:
        return self.labels[w] if self.labels else str(w)

    def world(self, key: Any) -> int:
        """Resolve an index or label to a world index."""
        if isinstance(key, int) and not isinstance(key, bool):
            if 0 <= key < self.size:
                return key
        elif isinstance(key, str):
            if self.labels and key in self.labels:
                return self.labels.index(key)
            if key.lstrip("-").isdigit():
                return self.world(int(key))
        raise KeyError(f"unknown world {key!r}")

    def atoms(self) -> frozenset[str]:
        return frozenset(self.valuation)

    def with_valuation(self, valuation: Mapping[str, Iterable[int]]) -> "KripkeModel":
        return KripkeModel(self.size, self.edges,
                           {p: frozenset(ws) for p, ws in valuation.items()}, self.labels)

    def _box(self, bad: int) -> int:
        """Worlds with no successor in ``bad``."""
        table = self._tables()
        if table is not None:
            return table[0][bad]
        return sum(1 << w for w in range(self.size) if not self.up[w] & bad)

    def _diamond(self, good: int) -> int:
        """Worlds with some predecessor in ``good``."""
        table = self._tables()
        if table is not None:
            return table[1][good]
        return sum(1 << w for w in range(self.size) if self.down[w] & good)

    def _tables(self):
        # small models get both answers precomputed for every world set
        if self.size > _TABLE_LIMIT:
            return None
        t = self._cache.get(_TABLES)
        if t is None:
            n = self.size
            box = [0] * (1 << n)
            dia = [0] * (1 << n)
            for w in range(n):
                bit, up, down = 1 << w, self.up[w], self.down[w]
                for s in range(1 << n):
                    if not up & s:
                        box[s] |= bit
                    if down & s:
                        dia[s] |= bit
            t = self._cache[_TABLES] = (box, dia)
        return t

    def mask(self, f: Formula) -> int:
        """Bitmask of worlds forcing ``f``."""
        cache = self._cache
        hit = cache.get(f)
        if hit is not None:
            return hit
        if isinstance(f, Var):
            out = _mask(self.valuation.get(f.name, ()))
        elif isinstance(f, Top):
            out = self.full
        elif isinstance(f, Bot):
            out = 0
        else:
            a, b = self.mask(f.left), self.mask(f.right)
            if isinstance(f, And):
                out = a & b
            elif isinstance(f, Or):
                out = a | b
            elif isinstance(f, Imp):
                out = self._box(a & ~b)
            else:
                out = self._diamond(a & ~b)
        cache[f] = out
        return out


@dataclass
class ModelReport:
    ok: bool
    preorder: bool
    violations: list[tuple[int, int, str]]

    def __bool__(self) -> bool:
        return self.ok


def validate_model(m: KripkeModel) -> ModelReport:
    """Check the closed order is a preorder and the valuation persistent.

    Violations are ``(w, v, p)`` with ``w <= v``, ``w`` in ``I(p)`` and
    ``v`` not.
    """
    preorder = all(m.up[w] >> w & 1 for w in m.worlds) and all(
        (m.up[v] & ~m.up[w]) == 0 for w in m.worlds for v in _bits(m.up[w]))
    violations = []
    for p in sorted(m.valuation):
        ws = m.valuation[p]
        for w in sorted(ws):
            for v in _bits(m.up[w]):
                if v not in ws:
                    violations.append((w, v, p))
    return ModelReport(preorder and not violations, preorder, violations)


def _world(m: KripkeModel, w: int) -> int:
    if not isinstance(w, int) or not 0 <= w < m.size:
        raise KeyError(f"unknown world {w!r}")
    return w


def forces(m: KripkeModel, w: int, f: Formula) -> bool:
    return bool(m.mask(f) >> _world(m, w) & 1)


def extension(m: KripkeModel, f: Formula) -> frozenset[int]:
    return frozenset(_bits(m.mask(f)))


def local_consequence_on(m: KripkeModel, gamma: Iterable[Formula], f: Formula) -> bool:
    """Every world forcing all of ``gamma`` forces ``f``."""
    g = m.full
    for x in gamma:
        g &= m.mask(x)
    return g & ~m.mask(f) == 0


def global_consequence_on(m: KripkeModel, gamma: Iterable[Formula], f: Formula) -> bool:
    """If ``gamma`` holds everywhere then so does ``f``."""
    full = m.full
    if all(m.mask(x) == full for x in gamma):
        return m.mask(f) == full
    return True


# ---------------------------------------------------------------------------
# countermodels

@dataclass
class Countermodel:
    model: KripkeModel
    world: Optional[int]  # refuting world for local mode, None for global


def _posets(k: int) -> Iterator[tuple[tuple[int, int], ...]]:
    """Partial orders on ``0..k-1`` compatible with index order (every
    finite poset has such a labelling), as transitively closed pair sets."""
    pairs = [(i, j) for i in range(k) for j in range(i + 1, k)]
    for bits in range(1 << len(pairs)):
        chosen = {pairs[i] for i in range(len(pairs)) if bits >> i & 1}
        if all((a, c) in chosen for (a, b) in chosen for (b2, c) in chosen if b == b2):
            yield tuple(sorted(chosen))


def upsets(m: KripkeModel) -> list[int]:
    """All upward-closed world sets as bitmasks, ordered by (size, mask)."""
    seen = {0}
    frontier = [0]
    while frontier:
        nxt = []
        for s in frontier:
            for w in m.worlds:
                t = s | m.up[w]
                if t not in seen:
                    seen.add(t)
                    nxt.append(t)
        frontier = nxt
    return sorted(seen, key=lambda s: (bin(s).count("1"), s))


def candidate_models(atoms: Iterable[str], max_worlds: int) -> Iterator[KripkeModel]:
    """Every persistent model over ``atoms`` on the posets enumerated by
    :func:`_posets`, by world count, then order, then valuation."""
    atoms = sorted(set(atoms))
    for k in range(1, max_worlds + 1):
        for edges in _posets(k):
            frame = KripkeModel(k, edges, {})
            for choice in itertools.product(upsets(frame), repeat=len(atoms)):
                yield frame.with_valuation(
                    {p: tuple(_bits(s)) for p, s in zip(atoms, choice)})


def countermodel_search(gamma: Iterable[Formula], f: Formula, max_worlds: int,
                        mode: str = "local", jobs: int = 1) -> Optional[Countermodel]:
    """Smallest-first search for a finite model refuting ``gamma |- f``.

    The enumeration order of :func:`candidate_models` is fixed, so the first
    hit is reproducible. ``None`` means nothing up to the bound. ``jobs`` is
    accepted for interface stability; the search runs in-process.
    """
    if jobs < 1:
        raise ValueError("jobs must be at least 1")
    if max_worlds < 1:
        raise ValueError("max_worlds must be at least 1")
    if mode not in ("local", "global"):
        raise ValueError(f"unknown mode {mode!r}")
    gamma = list(gamma)
    atoms = set().union(variables(f), *(variables(g) for g in gamma))
    for m in candidate_models(atoms, max_worlds):
        if mode == "local":
            g = m.full
            for x in gamma:
                g &= m.mask(x)
            bad = g & ~m.mask(f)
            if bad:
                return Countermodel(m, next(_bits(bad)))
        elif not global_consequence_on(m, gamma, f):
            return Countermodel(m, None)
    return None


# ---------------------------------------------------------------------------
# zig-zag and bisimulation

def _zz_step(m: KripkeModel, s: int) -> int:
    out = 0
    for x in _bits(s):
        for u in _bits(m.up[x]):
            out |= m.down[u]
    return out


def zigzag_reach(m: KripkeModel, w: int, n: int) -> frozenset[int]:
    """Worlds ``v`` with ``w`` zig-zag related to ``v`` in exactly ``n`` steps."""
    s = 1 << _world(m, w)
    for _ in range(n):
        s = _zz_step(m, s)
    return frozenset(_bits(s))


def zigzag_n(m: KripkeModel, w: int, v: int, n: int) -> bool:
    return _world(m, v) in zigzag_reach(m, w, n)


def connected(m: KripkeModel, w: int, v: int) -> bool:
    s = 1 << _world(m, w)
    _world(m, v)
    while True:
        t = _zz_step(m, s) | s
        if t == s:
            return bool(s >> v & 1)
        s = t


def n_bisimilar(m: KripkeModel, w: int, m2: KripkeModel, w2: int, n: int) -> bool:
    """Depth-``n`` bisimilarity game, both directions along the order."""
    _world(m, w)
    _world(m2, w2)
    atoms = sorted(set(m.valuation) | set(m2.valuation))
    sig1 = [tuple(x in m.valuation.get(p, ()) for p in atoms) for x in m.worlds]
    sig2 = [tuple(y in m2.valuation.get(p, ()) for p in atoms) for y in m2.worlds]
    down1 = [list(_bits(s)) for s in m.down]
    up1 = [list(_bits(s)) for s in m.up]
    down2 = [list(_bits(s)) for s in m2.down]
    up2 = [list(_bits(s)) for s in m2.up]
    memo: dict[tuple[int, int, int], bool] = {}

    def bis(x: int, y: int, k: int) -> bool:
        key = (x, y, k)
        hit = memo.get(key)
        if hit is not None:
            return hit
        if sig1[x] != sig2[y]:
            res = False
        elif k == 0:
            res = True
        else:
            j = k - 1
            res = (all(any(bis(v, v2, j) for v2 in down2[y]) for v in down1[x])
                   and all(any(bis(v, v2, j) for v2 in up2[y]) for v in up1[x])
                   and all(any(bis(v, v2, j) for v in down1[x]) for v2 in down2[y])
                   and all(any(bis(v, v2, j) for v in up1[x]) for v2 in up2[y]))
        memo[key] = res
        return res

    return bis(w, w2, n)


# ---------------------------------------------------------------------------
# constructions

def two_chain(true_at: Iterable[int] = (1,), atom: str = "p") -> KripkeModel:
    """``w0 <= w1`` with ``atom`` true at the given worlds."""
    return KripkeModel(2, ((0, 1),), {atom: frozenset(true_at)}, ("w0", "w1"))


def xmas_lights(n: int) -> tuple[KripkeModel, dict[str, frozenset[int]]]:
    """Zig-zag of ``2n+3`` worlds: every even world sits below its odd
    neighbours. ``x1`` holds everywhere; ``x2``, ``y1``, ``y2`` fail only at
    the last world."""
    if n < 0:
        raise ValueError("n must be a natural number")
    size = 2 * n + 3
    edges = []
    for i in range(n + 1):
        edges.append((2 * i, 2 * i + 1))
        edges.append((2 * i + 2, 2 * i + 1))
    everywhere = frozenset(range(size))
    but_last = frozenset(range(size - 1))
    val = {"x1": everywhere, "x2": but_last, "y1": but_last, "y2": but_last}
    labels = tuple(str(i) for i in range(size))
    return KripkeModel(size, tuple(edges), val, labels), val


def glue(m: KripkeModel, w: int, n: int, atoms: Iterable[str] = ()) -> KripkeModel:
    """``2n+1`` copies of ``m`` chained through the copies of ``w`` in a
    zig-zag ``(w,0) <= (w,1) >= (w,2) <= ... >= (w,2n) <= c``, plus a world
    ``c`` forcing every atom of ``m`` and every name in ``atoms``.

    Copy ``k`` of world ``x`` has index ``k * m.size + x``; ``c`` is last.
    """
    if not validate_model(m):
        raise ValueError("glue needs a valid model")
    _world(m, w)
    if n < 1:
        raise ValueError("glue needs n >= 1")
    size = m.size
    copies = 2 * n + 1
    c = copies * size
    edges = []
    for k in range(copies):
        edges.extend((k * size + a, k * size + b) for a, b in m.edges)
    for k in range(n):
        hub = (2 * k + 1) * size + w
        edges.append((2 * k * size + w, hub))
        edges.append(((2 * k + 2) * size + w, hub))
    edges.append((2 * n * size + w, c))
    val = {}
    for p in set(m.valuation) | set(atoms):
        ws = {k * size + x for k in range(copies) for x in m.valuation.get(p, ())}
        ws.add(c)
        val[p] = frozenset(ws)
    labels = tuple(f"({m.label(x)},{k})" for k in range(copies) for x in m.worlds) + ("c",)
    return KripkeModel(c + 1, tuple(edges), val, labels)


# ---------------------------------------------------------------------------
# document format

def model_to_document(m: KripkeModel) -> dict[str, Any]:
    return {
        "worlds": list(m.labels) if m.labels else m.size,
        "edges": [list(e) for e in m.edges],
        "valuation": {p: sorted(ws) for p, ws in sorted(m.valuation.items())},
    }


def model_from_document(doc: Mapping[str, Any]) -> KripkeModel:
    if "worlds" not in doc:
        raise ValueError("model document needs 'worlds'")
    worlds = doc["worlds"]
    if isinstance(worlds, int):
        size, labels = worlds, None
    elif isinstance(worlds, Sequence) and not isinstance(worlds, str):
        labels = tuple(str(x) for x in worlds)
        if len(set(labels)) != len(labels):
            raise ValueError("world labels must be distinct")
        size = len(labels)
    else:
        raise ValueError("'worlds' must be a count or a list of labels")

    def ref(x: Any) -> int:
        if isinstance(x, int) and not isinstance(x, bool):
            return x
        if labels and str(x) in labels:
            return labels.index(str(x))
        raise ValueError(f"unknown world reference {x!r}")

    edges = tuple((ref(a), ref(b)) for a, b in doc.get("edges", []))
    val = {str(p): frozenset(ref(x) for x in ws) for p, ws in doc.get("valuation", {}).items()}
    return KripkeModel(size, edges, val, labels)
