"""Random and exhaustive generators shared by the test modules."""

import random

from hypothesis import strategies as st

from biint.kripke import KripkeModel
from biint.syntax import BOT, TOP, And, Excl, Imp, Or, Var, depth

BINARY = (And, Or, Imp, Excl)


def random_model(rng: random.Random, max_worlds=6, atoms=("p", "q", "r"), min_worlds=1):
    """Random finite preorder (cycles allowed) with a persistent valuation."""
    n = rng.randint(min_worlds, max_worlds)
    density = rng.random() * 0.6
    edges = [(i, j) for i in range(n) for j in range(n) if i != j and rng.random() < density]
    frame = KripkeModel(n, edges, {})
    val = {}
    for p in atoms:
        ws = set()
        for w in range(n):
            if rng.random() < 0.35:
                ws |= {v for v in range(n) if frame.leq(w, v)}
        val[p] = ws
    return frame.with_valuation(val)


def random_formula(rng: random.Random, atoms=("p", "q"), height=3):
    if height == 0 or rng.random() < 0.25:
        leaves = [Var(a) for a in atoms] + [TOP, BOT]
        return rng.choice(leaves)
    cls = rng.choice(BINARY)
    return cls(random_formula(rng, atoms, height - 1), random_formula(rng, atoms, height - 1))


def random_formula_of_depth(rng: random.Random, atoms, max_depth):
    """Random formula whose bi-depth is at most ``max_depth``."""
    while True:
        f = random_formula(rng, atoms, height=max_depth + 1)
        if depth(f) <= max_depth:
            return f


def formulas_upto(atoms=("p", "q"), height=2, max_depth=None):
    """All formulas of syntactic height <= ``height`` over ``atoms``, T, F,
    with commuted conjunctions and disjunctions listed once."""
    allf = [Var(a) for a in atoms] + [TOP, BOT]
    for _ in range(height):
        new = []
        for i, a in enumerate(allf):
            for j, b in enumerate(allf):
                for cls in BINARY:
                    if cls in (And, Or) and j < i:
                        continue
                    f = cls(a, b)
                    if max_depth is not None and depth(f) > max_depth:
                        continue
                    new.append(f)
        seen = set(allf)
        fresh = [f for f in new if f not in seen and not seen.add(f)]
        allf = allf + fresh
    return allf


def formulas(atoms=("p", "q", "r", "s"), max_height=6):
    """Hypothesis strategy for formulas of syntactic height <= ``max_height``."""
    leaves = st.sampled_from([Var(a) for a in atoms] + [TOP, BOT])
    strat = leaves
    for _ in range(max_height):
        strat = st.one_of(leaves, st.builds(lambda c, l, r: c(l, r),
                                            st.sampled_from(BINARY), strat, strat))
    return strat


@st.composite
def models(draw, max_worlds=5, atoms=("p", "q")):
    seed = draw(st.integers(0, 2 ** 32 - 1))
    return random_model(random.Random(seed), max_worlds, atoms)
