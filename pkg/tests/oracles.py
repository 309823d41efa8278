"""Slow, direct reference implementations used to cross-check the library.

Nothing here shares code with the package beyond the formula types.
"""

import itertools

from biint.syntax import And, Bot, Excl, Imp, Or, Top, Var


def closure(n, edges):
    rel = {(w, w) for w in range(n)} | set(edges)
    while True:
        extra = {(a, d) for (a, b) in rel for (c, d) in rel if b == c} - rel
        if not extra:
            return rel
        rel |= extra


def model_rel(m):
    return closure(m.size, m.edges)


def naive_forces(m, w, f, rel=None):
    """Forcing clauses read straight off the definition."""
    rel = rel if rel is not None else model_rel(m)

    def go(w, f):
        if isinstance(f, Var):
            return w in m.valuation.get(f.name, ())
        if isinstance(f, Top):
            return True
        if isinstance(f, Bot):
            return False
        if isinstance(f, And):
            return go(w, f.left) and go(w, f.right)
        if isinstance(f, Or):
            return go(w, f.left) or go(w, f.right)
        if isinstance(f, Imp):
            return all(not go(v, f.left) or go(v, f.right)
                       for v in range(m.size) if (w, v) in rel)
        assert isinstance(f, Excl)
        return any(go(v, f.left) and not go(v, f.right)
                   for v in range(m.size) if (v, w) in rel)

    return go(w, f)


def naive_zigzag(m, w, k, rel=None):
    """Worlds reachable from ``w`` by ``k`` zig-zag steps, via explicit
    relation composition."""
    rel = rel if rel is not None else model_rel(m)
    zz = {(a, b) for a in range(m.size) for b in range(m.size)
          if any((a, u) in rel and (b, u) in rel for u in range(m.size))}
    cur = {w}
    for _ in range(k):
        cur = {b for a in cur for b in range(m.size) if (a, b) in zz}
    return cur


def naive_bisim_table(m1, m2, n):
    """Bottom-up relation tables Z_0 >= Z_1 >= ... >= Z_n."""
    r1, r2 = model_rel(m1), model_rel(m2)
    atoms = set(m1.valuation) | set(m2.valuation)

    def same(x, y):
        return all((x in m1.valuation.get(p, ())) == (y in m2.valuation.get(p, ()))
                   for p in atoms)

    z = {(x, y) for x in range(m1.size) for y in range(m2.size) if same(x, y)}
    tables = [z]
    for _ in range(n):
        prev = z
        up1 = lambda x: [v for v in range(m1.size) if (x, v) in r1]
        dn1 = lambda x: [v for v in range(m1.size) if (v, x) in r1]
        up2 = lambda y: [v for v in range(m2.size) if (y, v) in r2]
        dn2 = lambda y: [v for v in range(m2.size) if (v, y) in r2]
        z = {(x, y) for (x, y) in tables[0]
             if all(any((a, b) in prev for b in dn2(y)) for a in dn1(x))
             and all(any((a, b) in prev for b in up2(y)) for a in up1(x))
             and all(any((a, b) in prev for a in dn1(x)) for b in dn2(y))
             and all(any((a, b) in prev for a in up1(x)) for b in up2(y))}
        tables.append(z)
    return tables


def naive_upsets(m):
    rel = model_rel(m)
    out = []
    for bits in range(1 << m.size):
        s = {w for w in range(m.size) if bits >> w & 1}
        if all(v in s for w in s for v in range(m.size) if (w, v) in rel):
            out.append(frozenset(s))
    return out


def set_partitions(n):
    """All partitions of range(n) as canonical block-id tuples."""
    def go(i, ids, k):
        if i == n:
            yield tuple(ids)
            return
        for b in range(k + 1):
            yield from go(i + 1, ids + [b], max(k, b + 1))
    yield from go(0, [], 0)


def compatible(a, blocks):
    tables = (a.meet, a.join, a.imp, a.excl)
    pairs = [(x, y) for x in range(a.size) for y in range(a.size) if blocks[x] == blocks[y]]
    return all(blocks[t[x1][x2]] == blocks[t[y1][y2]]
               for t in tables for (x1, y1) in pairs for (x2, y2) in pairs)


def brute_congruences(a):
    return [p for p in set_partitions(a.size) if compatible(a, p)]


def brute_filters(a):
    out = []
    for bits in range(1 << a.size):
        s = {x for x in range(a.size) if bits >> x & 1}
        if a.top not in s:
            continue
        leq = lambda x, y: a.meet[x][y] == x
        if all(y in s for x in s for y in range(a.size) if leq(x, y)) and \
                all(a.meet[x][y] in s for x in s for y in s):
            out.append(frozenset(s))
    return out


def brute_dn_stabilization(a):
    """Iterate the tables for negation and co-negation on every element."""
    def step(x):
        co = a.excl[a.top][x]
        return a.imp[co][a.bot]
    seqs = []
    for x in range(a.size):
        seq = [x]
        for _ in range(a.size + 1):
            seq.append(step(seq[-1]))
        seqs.append(seq)
    for n in itertools.count():
        if all(s[n + 1] == s[n] for s in seqs):
            return n
