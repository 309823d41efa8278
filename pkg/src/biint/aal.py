"""Finite-scale checks of the algebraic-logic results: soundness against
algebras, the algebraizability conditions, implicativity, equivalence
formula truncations, and the two counterexample constructions.

Every report carries hard checks; a report passes iff all of its
non-informational checks pass.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Iterable, Optional, Sequence

from . import hilbert
from .algebra import (
    FinBiHA, Evaluator, all_congruences, c3, eq_consequence, lattice_filters,
)
from .hilbert import STRONG, WEAK, Derivation, canned, check
from .kripke import (
    KripkeModel, forces, glue, global_consequence_on, local_consequence_on,
    n_bisimilar, validate_model, xmas_lights,
)
from .syntax import (
    BOT, TOP, And, Excl, Formula, Imp, Or, Var, depth, dn, iff, render,
    variables,
)

__all__ = [
    "Check", "Report", "delta", "check_alg1_soundness", "check_alg3",
    "check_alg4", "implicative_report", "equivalential_report_on",
    "finite_equivalential_refutation", "isomorphism_failure_report",
    "no_alg_sem_witness", "pt_consequence_on", "pdt_consequence_on",
]


@dataclass
class Check:
    name: str
    ok: bool
    detail: str = ""
    informational: bool = False

    def to_dict(self) -> dict[str, Any]:
        out = {"name": self.name, "ok": self.ok, "detail": self.detail}
        if self.informational:
            out["informational"] = True
        return out


@dataclass
class Report:
    title: str
    checks: list[Check] = field(default_factory=list)
    data: dict[str, Any] = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.ok for c in self.checks if not c.informational)

    def __bool__(self) -> bool:
        return self.passed

    def add(self, name: str, ok: bool, detail: str = "", informational: bool = False) -> bool:
        self.checks.append(Check(name, bool(ok), detail, informational))
        return bool(ok)

    def check(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_dict(self) -> dict[str, Any]:
        return {"title": self.title, "pass": self.passed,
                "checks": [c.to_dict() for c in self.checks],
                "data": self.data, "notes": self.notes}

    def to_text(self) -> str:
        lines = [self.title]
        for c in self.checks:
            mark = "ok  " if c.ok else "FAIL"
            if c.informational:
                mark = "info" if c.ok else "info:no"
            lines.append(f"  [{mark}] {c.name}" + (f": {c.detail}" if c.detail else ""))
        for note in self.notes:
            lines.append(f"  note: {note}")
        lines.append("PASS" if self.passed else "FAIL")
        return "\n".join(lines)


def delta(k: int, x: Formula, y: Formula) -> list[Formula]:
    """Truncated equivalence formulas ``dn(i, x <-> y)`` for ``i <= k``."""
    if k < 0:
        raise ValueError("truncation bound must be a natural number")
    return [dn(i, iff(x, y)) for i in range(k + 1)]


# ---------------------------------------------------------------------------
# algebraizability conditions

def check_alg1_soundness(d: Derivation, family: Sequence[FinBiHA]) -> bool:
    """Sound direction: a strong derivation of ``Gamma |- f`` gives
    ``{g = T | g in Gamma} |= f = T`` on every algebra of ``family``."""
    rep = check(d, STRONG)
    if not rep.ok:
        raise ValueError(f"not a strong derivation: {rep.message}")
    theta = [(g, TOP) for g in d.context]
    return eq_consequence(family, theta, (d.conclusion, TOP))


def check_alg3(f: Formula) -> tuple[Derivation, Derivation]:
    """Strong derivations of ``f |- f <-> T`` and ``f <-> T |- f``."""
    fwd = canned("alg3_fwd", [f], STRONG)
    bwd = canned("alg3_bwd", [f], STRONG)
    for d in (fwd, bwd):
        rep = check(d, STRONG)
        if not rep.ok:
            raise AssertionError(rep.message)
    return fwd, bwd


def check_alg4(a: FinBiHA, e: Formula, d: Formula) -> bool:
    """``e = d`` and ``(e <-> d) = T`` entail each other on ``a``."""
    there = eq_consequence([a], [(e, d)], (iff(e, d), TOP))
    back = eq_consequence([a], [(iff(e, d), TOP)], (e, d))
    return there and back


def implicative_report() -> Report:
    p, q, r = Var("p"), Var("q"), Var("r")
    p1, p2, q1, q2 = Var("p1"), Var("p2"), Var("q1"), Var("q2")
    items = [
        ("IL1", "imp_refl", [p]),
        ("IL2", "imp_trans", [p, q, r]),
        ("IL3 T", "il3_top", []),
        ("IL3 F", "il3_bot", []),
        ("IL3 &", "il3_and", [p1, q1, p2, q2]),
        ("IL3 |", "il3_or", [p1, q1, p2, q2]),
        ("IL3 ->", "il3_imp", [p1, q1, p2, q2]),
        ("IL3 \\", "il3_excl", [p1, q1, p2, q2]),
        ("IL4", "il4", [p, q]),
        ("IL5", "il5", [p, q]),
    ]
    rep = Report("sBIL is implicative (strong calculus)")
    for label, name, args in items:
        d = canned(name, args, STRONG)
        res = check(d, STRONG)
        ctx = ", ".join(sorted(render(g) for g in d.context))
        rep.add(label, res.ok, f"{ctx} |- {render(d.conclusion)} ({d.size()} nodes)"
                + ("" if res.ok else f": {res.message}"))
        if STRONG in hilbert.CANNED[name].logics and WEAK in hilbert.CANNED[name].logics:
            rep.add(f"{label} (weak)", check(canned(name, args, WEAK), WEAK).ok,
                    informational=True)
    return rep


# ---------------------------------------------------------------------------
# equivalence formulas

def equivalential_report_on(m: KripkeModel, k: int) -> Report:
    """Check (R), (MP') and (Re) for the truncation ``delta(k)`` as local
    consequences on ``m`` under its own valuation of ``x, y, x1, x2, y1, y2``.

    For exclusion the checked shape is the shifted one: premises at index
    ``i+1`` give the conclusion at index ``i``. The same-index version is
    reported for information only; it fails in general.
    """
    if not validate_model(m):
        raise ValueError("model is not valid")
    x, y = Var("x"), Var("y")
    x1, x2, y1, y2 = Var("x1"), Var("x2"), Var("y1"), Var("y2")
    rep = Report(f"equivalence formulas truncated at {k}")
    rep.add("R", all(local_consequence_on(m, [], g) for g in delta(k, x, x)))
    rep.add("MP'", local_consequence_on(m, [x, *delta(k, x, y)], y))
    prem = delta(k, x1, x2) + delta(k, y1, y2)
    rep.add("Re T", all(local_consequence_on(m, [], g) for g in delta(k, TOP, TOP)))
    rep.add("Re F", all(local_consequence_on(m, [], g) for g in delta(k, BOT, BOT)))
    for sym, cls in (("&", And), ("|", Or), ("->", Imp)):
        goal = delta(k, cls(x1, y1), cls(x2, y2))
        rep.add(f"Re {sym}", all(local_consequence_on(m, prem, g) for g in goal))
    target = iff(Excl(x1, y1), Excl(x2, y2))
    shifted = all(
        local_consequence_on(m, [dn(i + 1, iff(x1, x2)), dn(i + 1, iff(y1, y2))], dn(i, target))
        for i in range(k))
    rep.add("Re \\ (shifted)", shifted, f"dn(i+1) premises give dn(i) conclusion, i < {k}")
    naive = all(local_consequence_on(m, prem, g) for g in delta(k, Excl(x1, y1), Excl(x2, y2)))
    rep.add("Re \\ (same index)", naive, "not expected in general", informational=True)
    return rep


def _xmas_targets() -> tuple[Formula, Formula, Formula, Formula, Formula]:
    x1, x2, y1, y2 = Var("x1"), Var("x2"), Var("y1"), Var("y2")
    return x1, x2, y1, y2, iff(Excl(x1, y1), Excl(x2, y2))


def finite_equivalential_refutation(n: int, model: Optional[KripkeModel] = None) -> Report:
    """Refute (Re) for exclusion with ``delta(n)`` on the Xmas-lights model.

    ``model`` replaces the default construction, e.g. to confirm that a
    modified valuation does not refute.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    m = model if model is not None else xmas_lights(n)[0]
    if not validate_model(m):
        raise ValueError("model is not valid")
    x1, x2, y1, y2, target = _xmas_targets()
    rep = Report(f"no finite truncation of the equivalence formulas works (n={n})")
    prem = delta(n, x1, x2) + delta(n, y1, y2)
    missing = [render(g, sugar=True) for g in prem if not forces(m, 0, g)]
    rep.add("0 forces delta(n)(x1,x2) and delta(n)(y1,y2)", not missing,
            "all members forced" if not missing else "unforced: " + "; ".join(missing))
    goal = dn(n, target)
    rep.add("0 does not force dn(n, (x1\\y1) <-> (x2\\y2))", not forces(m, 0, goal))
    last = m.size - 1
    if 2 * n < m.size:
        rep.add(f"{2 * n} does not force (x1\\y1) <-> (x2\\y2)",
                not forces(m, 2 * n, target), informational=True)
    if 2 * n + 1 < m.size:
        w = 2 * n + 1
        rep.add(f"{w} forces x1\\y1", forces(m, w, Excl(x1, y1)), informational=True)
        rep.add(f"{w} forces x2\\y2", forces(m, w, Excl(x2, y2)),
                "actual value; the refutation needs it false", informational=True)
    cols = {"x1": x1, "x2": x2, "y1": y1, "y2": y2, "x1\\y1": Excl(x1, y1),
            "x2\\y2": Excl(x2, y2), "target": target}
    rep.data["table"] = [
        {"world": m.label(w), **{k: forces(m, w, f) for k, f in cols.items()}}
        for w in m.worlds]
    rep.data["worlds"] = m.size
    rep.data["last_world"] = last
    return rep


# ---------------------------------------------------------------------------
# non-algebraizability and no algebraic semantics

def isomorphism_failure_report() -> Report:
    a = c3()
    cons = all_congruences(a)
    filters = lattice_filters(a)
    rep = Report("wBIL is not algebraizable: c3 congruences vs filters")
    rep.add("congruences of c3", len(cons) == 2,
            f"{len(cons)}: " + "; ".join(
                "|".join(",".join(a.label(x) for x in cls) for cls in c.classes())
                for c in cons))
    ident = tuple(a.elements)
    rep.add("c3 is simple", {c.blocks for c in cons} == {ident, (0,) * a.size},
            "only the identity and the total relation")
    rep.add("lattice filters of c3", len(filters) == 3,
            f"{len(filters)}: " + "; ".join(
                "{" + ",".join(a.label(x) for x in sorted(f)) + "}" for f in filters))
    rep.add("no bijection between congruences and filters", len(cons) != len(filters))
    rep.data.update(congruences=len(cons), filters=len(filters))
    rep.notes.append("relative congruences coincide with all congruences since "
                     "bi-Heyting algebras form a variety")
    rep.notes.append("wBIL-filters on a bi-Heyting algebra are exactly its lattice filters")
    return rep


def no_alg_sem_witness(e: Formula, d: Formula, m: KripkeModel, w: int,
                       var: str = "x") -> Report:
    """Instance of the argument that no single-equation ``e(x) = d(x)``
    gives an algebraic semantics over bi-Heyting algebras.

    Needs ``w`` forcing ``e`` but not ``d`` in ``m``. Glues ``m`` at ``w``
    with ``n = max(depth e, depth d)`` and checks that at the new world
    ``c`` the consecution ``x, dn(n+1, d->d) |- dn(n+1, e->d)`` fails
    locally, which an algebraic semantics would forbid.
    """
    if not validate_model(m):
        raise ValueError("model is not valid")
    extra = sorted((variables(e) | variables(d)) - {var})
    if extra:
        raise ValueError(f"equation may only use {var}; found {', '.join(extra)}")
    w = m.world(w)
    if not forces(m, w, e) or forces(m, w, d):
        raise ValueError("precondition: the world must force e and not force d")
    n = max(depth(e), depth(d))
    g = glue(m, w, n, [var])
    c = g.size - 1
    w0 = w  # copy 0 keeps the original indices
    x = Var(var)
    hyp = dn(n + 1, Imp(d, d))
    goal = dn(n + 1, Imp(e, d))
    rep = Report(f"no algebraic semantics: {render(e, sugar=True)} = {render(d, sugar=True)}")
    rep.data.update(n=n, glued_worlds=g.size, c=c, base_world=w0)
    rep.add(f"{m.label(w)} and (w,0) are {2 * n}-bisimilar", n_bisimilar(m, w, g, w0, 2 * n))
    rep.add("(i) (w,0) forces e", forces(g, w0, e))
    rep.add("(ii) (w,0) does not force d", not forces(g, w0, d))
    rep.add(f"(iii) c forces {var}", forces(g, c, x))
    rep.add(f"(iv) c forces dn({n + 1}, d -> d)", forces(g, c, hyp))
    rep.add(f"(v) c does not force dn({n + 1}, e -> d)", not forces(g, c, goal))
    rep.add(f"{var}, dn({n + 1}, d->d) |- dn({n + 1}, e->d) fails locally",
            not local_consequence_on(g, [x, hyp], goal))
    rep.add("global consequence on the glued model", global_consequence_on(g, [x, hyp], goal),
            f"{var} is not forced everywhere, so this holds vacuously", informational=True)
    return rep


# ---------------------------------------------------------------------------
# truth and degrees of truth

def _names(gamma: Sequence[Formula], f: Formula) -> set[str]:
    return set(variables(f)).union(*(variables(g) for g in gamma))


def pt_consequence_on(family: Iterable[FinBiHA], gamma: Iterable[Formula], f: Formula) -> bool:
    """Preserving truth: whenever every premise is top, so is ``f``."""
    gamma = list(gamma)
    names = _names(gamma, f)
    for a in family:
        ev = Evaluator(a, names)
        prem = [ev(g) for g in gamma]
        concl = ev(f)
        top = a.top
        for i in range(ev.count):
            if concl[i] != top and all(g[i] == top for g in prem):
                return False
    return True


def pdt_consequence_on(family: Iterable[FinBiHA], gamma: Iterable[Formula], f: Formula) -> bool:
    """Preserving degrees of truth: the meet of the premises is below ``f``."""
    gamma = list(gamma)
    names = _names(gamma, f)
    for a in family:
        ev = Evaluator(a, names)
        lo = ev(TOP)
        for g in gamma:
            lo = tuple(a.meet[x][y] for x, y in zip(lo, ev(g)))
        if not all(a.leq(x, y) for x, y in zip(lo, ev(f))):
            return False
    return True
