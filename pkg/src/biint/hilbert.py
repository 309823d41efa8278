"""Generalised Hilbert calculi for the weak and strong logics.

A :class:`Derivation` is an immutable tree of consecutions. ``check`` is
the only authority on validity; every builder in this module produces
trees that ``check`` accepts, but nothing here trusts a tree it was
handed.

The weak logic admits ``El, Ax, MP, wDN``; the strong one ``El, Ax, MP,
sDN``. The two differ only in the double-negation rule: ``wDN`` needs an
empty-context premise, ``sDN`` keeps the context.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Any, Callable, Iterable, Mapping, Optional

from .syntax import (
    BOT, TOP, And, Excl, Formula, Imp, Or, Var, dn, iff, parse, render,
    substitute, variables,
)

WEAK = "weak"
STRONG = "strong"
LOGICS = (WEAK, STRONG)
RULES = {
    WEAK: frozenset({"El", "Ax", "MP", "wDN"}),
    STRONG: frozenset({"El", "Ax", "MP", "sDN"}),
}

# Metavariables are the schema's own variables: phi, psi, chi.
_AXIOM_TEXT = {
    "A1": r"phi -> (psi -> phi)",
    "A2": r"(phi -> (psi -> chi)) -> ((phi -> psi) -> (phi -> chi))",
    "A3": r"phi -> phi | psi",
    "A4": r"psi -> phi | psi",
    "A5": r"(phi -> chi) -> ((psi -> chi) -> (phi | psi -> chi))",
    "A6": r"phi & psi -> phi",
    "A7": r"phi & psi -> psi",
    "A8": r"(chi -> phi) -> ((chi -> psi) -> (chi -> phi & psi))",
    "A9": r"F -> phi",
    "A10": r"phi -> T",
    "A11": r"phi -> psi | (phi \ psi)",
    "A12": r"(phi \ psi) -> ~(phi -> psi)",
    "A13": r"((phi \ psi) \ chi) -> (phi \ (psi | chi))",
    "A14": r"!(phi \ psi) -> (phi -> psi)",
}
AXIOMS: dict[str, Formula] = {k: parse(v) for k, v in _AXIOM_TEXT.items()}


def _match(schema: Formula, f: Formula, binding: dict[str, Formula]) -> bool:
    if isinstance(schema, Var):
        bound = binding.get(schema.name)
        if bound is None:
            binding[schema.name] = f
            return True
        return bound == f
    if schema.__class__ is not f.__class__:
        return False
    if isinstance(schema, (type(TOP), type(BOT))):
        return True
    return _match(schema.left, f.left, binding) and _match(schema.right, f.right, binding)


def match_axiom(axiom: str, f: Formula) -> Optional[dict[str, Formula]]:
    binding: dict[str, Formula] = {}
    if _match(AXIOMS[axiom], f, binding):
        return binding
    return None


def axiom_instance(f: Formula) -> Optional[tuple[str, dict[str, Formula]]]:
    """First schema (A1..A14 order) that ``f`` instantiates, with its binding."""
    for name in AXIOMS:
        b = match_axiom(name, f)
        if b is not None:
            return name, b
    return None


# ---------------------------------------------------------------------------
# proof objects

@dataclass(frozen=True)
class Consecution:
    context: frozenset
    conclusion: Formula

    def __str__(self) -> str:
        ctx = ", ".join(sorted(render(g) for g in self.context))
        return f"{ctx} |- {render(self.conclusion)}" if ctx else f"|- {render(self.conclusion)}"


@dataclass(frozen=True, eq=False)
class Derivation:
    rule: str
    context: frozenset
    conclusion: Formula
    premises: tuple["Derivation", ...] = ()
    axiom: Optional[str] = None
    binding: Optional[Mapping[str, Formula]] = None

    @property
    def consecution(self) -> Consecution:
        return Consecution(self.context, self.conclusion)

    def size(self) -> int:
        seen: dict[int, int] = {}

        def go(d: Derivation) -> int:
            k = id(d)
            if k not in seen:
                seen[k] = 1 + sum(go(p) for p in d.premises)
            return seen[k]

        return go(self)

    def __repr__(self) -> str:
        return f"<Derivation {self.rule} {self.consecution}>"


class InvalidDerivation(ValueError):
    pass


@dataclass
class CheckReport:
    ok: bool
    logic: str
    path: Optional[tuple[int, ...]] = None
    rule: Optional[str] = None
    message: str = ""
    node: Optional[Derivation] = field(default=None, repr=False)

    def __bool__(self) -> bool:
        return self.ok

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {"ok": self.ok, "logic": self.logic}
        if not self.ok:
            out.update(path=list(self.path or ()), rule=self.rule, message=self.message)
            if self.node is not None:
                out["consecution"] = str(self.node.consecution)
        return out


def _node_error(d: Derivation, logic: str) -> Optional[str]:
    if d.rule not in RULES[logic]:
        return f"rule {d.rule} is not admitted by the {logic} logic"
    ps = d.premises
    if d.rule == "El":
        if ps:
            return "El takes no premises"
        if d.conclusion not in d.context:
            return "El conclusion is not in the context"
    elif d.rule == "Ax":
        if ps:
            return "Ax takes no premises"
        if d.axiom not in AXIOMS:
            return f"unknown axiom {d.axiom!r}"
        if d.binding is None:
            if match_axiom(d.axiom, d.conclusion) is None:
                return f"conclusion is not an instance of {d.axiom}"
        else:
            schema = AXIOMS[d.axiom]
            missing = variables(schema) - set(d.binding)
            if missing:
                return f"binding misses metavariables {sorted(missing)}"
            if substitute(d.binding, schema) != d.conclusion:
                return f"conclusion differs from the bound instance of {d.axiom}"
    elif d.rule == "MP":
        if len(ps) != 2:
            return "MP takes two premises"
        minor, major = ps
        if minor.context != d.context or major.context != d.context:
            return "MP premises must share the conclusion's context"
        if major.conclusion != Imp(minor.conclusion, d.conclusion):
            return "MP major premise is not minor -> conclusion"
    elif d.rule == "wDN":
        if len(ps) != 1:
            return "wDN takes one premise"
        if ps[0].context:
            return "wDN premise must have an empty context"
        if d.conclusion != dn(1, ps[0].conclusion):
            return "wDN conclusion is not !~ of the premise"
    elif d.rule == "sDN":
        if len(ps) != 1:
            return "sDN takes one premise"
        if ps[0].context != d.context:
            return "sDN premise must share the conclusion's context"
        if d.conclusion != dn(1, ps[0].conclusion):
            return "sDN conclusion is not !~ of the premise"
    else:
        return f"unknown rule {d.rule!r}"
    return None


def check(d: Derivation, logic: str) -> CheckReport:
    """Validate every node; the report names the first failing node in
    pre-order as a path of premise indices from the root."""
    if logic not in RULES:
        raise ValueError(f"unknown logic {logic!r}")
    good: set[int] = set()
    stack: list[tuple[Derivation, tuple[int, ...]]] = [(d, ())]
    while stack:
        node, path = stack.pop()
        if id(node) in good:
            continue
        err = _node_error(node, logic)
        if err is not None:
            return CheckReport(False, logic, path, node.rule, err, node)
        good.add(id(node))
        for i in reversed(range(len(node.premises))):
            stack.append((node.premises[i], path + (i,)))
    return CheckReport(True, logic)


def _require(d: Derivation, logic: str) -> None:
    rep = check(d, logic)
    if not rep.ok:
        raise InvalidDerivation(f"not a valid {logic} derivation: {rep.message} at {rep.path}")


# ---------------------------------------------------------------------------
# node constructors

def el(ctx: Iterable[Formula], f: Formula) -> Derivation:
    return Derivation("El", frozenset(ctx), f)


def ax(ctx: Iterable[Formula], f: Formula, axiom: Optional[str] = None) -> Derivation:
    if axiom is None:
        hit = axiom_instance(f)
        if hit is None:
            raise ValueError(f"{render(f)} is not an axiom instance")
        axiom, binding = hit
    else:
        binding = match_axiom(axiom, f)
        if binding is None:
            raise ValueError(f"{render(f)} is not an instance of {axiom}")
    return Derivation("Ax", frozenset(ctx), f, axiom=axiom, binding=binding)


def mp(minor: Derivation, major: Derivation) -> Derivation:
    c = major.conclusion
    if not isinstance(c, Imp) or c.left != minor.conclusion:
        raise ValueError(f"cannot detach {render(minor.conclusion)} from {render(c)}")
    return Derivation("MP", major.context, c.right, (minor, major))


def wdn(premise: Derivation, ctx: Iterable[Formula] = ()) -> Derivation:
    return Derivation("wDN", frozenset(ctx), dn(1, premise.conclusion), (premise,))


def sdn(premise: Derivation) -> Derivation:
    return Derivation("sDN", premise.context, dn(1, premise.conclusion), (premise,))


# ---------------------------------------------------------------------------
# structural transformations

def recontext(d: Derivation, ctx: frozenset) -> Derivation:
    """Replace every context by ``ctx``; wDN premises stay empty.

    Only sound when no El node depends on a formula missing from ``ctx``.
    """
    memo: dict[int, Derivation] = {}

    def go(n: Derivation) -> Derivation:
        hit = memo.get(id(n))
        if hit is not None:
            return hit
        if n.rule == "wDN":
            out = Derivation("wDN", ctx, n.conclusion, n.premises)
        elif n.context == ctx:
            out = n
        else:
            out = Derivation(n.rule, ctx, n.conclusion,
                             tuple(go(p) for p in n.premises), n.axiom, n.binding)
        memo[id(n)] = out
        return out

    return go(d)


def weaken(d: Derivation, delta: Iterable[Formula]) -> Derivation:
    delta = frozenset(delta)
    if not d.context <= delta:
        raise ValueError("weakening target must contain the original context")
    if delta == d.context:
        return d
    return recontext(d, delta)


def to_strong(d: Derivation) -> Derivation:
    """Rewrite wDN as sDN over a weakened premise (the weak logic is
    contained in the strong one)."""
    memo: dict[int, Derivation] = {}

    def go(n: Derivation) -> Derivation:
        hit = memo.get(id(n))
        if hit is not None:
            return hit
        if n.rule == "wDN":
            prem = recontext(go(n.premises[0]), n.context)
            out = Derivation("sDN", n.context, n.conclusion, (prem,))
        elif not n.premises:
            out = n
        else:
            ps = tuple(go(p) for p in n.premises)
            out = n if all(a is b for a, b in zip(ps, n.premises)) else \
                Derivation(n.rule, n.context, n.conclusion, ps, n.axiom, n.binding)
        memo[id(n)] = out
        return out

    return go(d)


def retag(d: Derivation, logic: str) -> Derivation:
    """Move an empty-context derivation between the two logics by renaming
    its double-negation nodes."""
    if d.context:
        raise ValueError("retagging needs an empty context")
    if logic == STRONG:
        return to_strong(d)
    memo: dict[int, Derivation] = {}

    def go(n: Derivation) -> Derivation:
        hit = memo.get(id(n))
        if hit is not None:
            return hit
        ps = tuple(go(p) for p in n.premises)
        rule = "wDN" if n.rule == "sDN" else n.rule
        out = Derivation(rule, n.context, n.conclusion, ps, n.axiom, n.binding)
        memo[id(n)] = out
        return out

    return go(d)


def lift(thm: Derivation, ctx: Iterable[Formula], logic: str = WEAK) -> Derivation:
    """Place a weak derivation under ``ctx`` in the requested logic."""
    ctx = frozenset(ctx)
    if logic == STRONG:
        if not thm.context <= ctx:
            raise ValueError("weakening target must contain the original context")
        return recontext(to_strong(thm), ctx)
    return weaken(thm, ctx)


def _has_rule(d: Derivation, rule: str) -> bool:
    seen: set[int] = set()
    stack = [d]
    while stack:
        n = stack.pop()
        if id(n) in seen:
            continue
        seen.add(id(n))
        if n.rule == rule:
            return True
        stack.extend(n.premises)
    return False


def _uses(d: Derivation, phi: Formula) -> Callable[[Derivation], bool]:
    memo: dict[int, bool] = {}

    def go(n: Derivation) -> bool:
        hit = memo.get(id(n))
        if hit is None:
            if n.rule == "El":
                hit = n.conclusion == phi
            elif n.rule == "wDN":
                hit = False
            else:
                hit = any(go(p) for p in n.premises)
            memo[id(n)] = hit
        return hit

    return go


def _discharge(d: Derivation, phi: Formula, gamma: frozenset) -> Derivation:
    uses = _uses(d, phi)
    memo: dict[int, Derivation] = {}

    def go(n: Derivation) -> Derivation:
        hit = memo.get(id(n))
        if hit is not None:
            return hit
        c = n.conclusion
        if not uses(n):
            base = recontext(n, gamma)
            out = mp(base, ax(gamma, Imp(c, Imp(phi, c)), "A1"))
        elif n.rule == "El":
            out = weaken(imp_refl(phi), gamma)
        elif n.rule == "MP":
            minor, major = (go(p) for p in n.premises)
            chi = n.premises[0].conclusion
            a2 = ax(gamma, Imp(Imp(phi, Imp(chi, c)),
                               Imp(Imp(phi, chi), Imp(phi, c))), "A2")
            out = mp(minor, mp(major, a2))
        else:
            raise InvalidDerivation(f"cannot discharge through {n.rule}")
        memo[id(n)] = out
        return out

    return go(d)


def deduction(d: Derivation, phi: Formula) -> Derivation:
    """From a weak proof of ``G, phi |- psi`` build one of ``G |- phi -> psi``
    with ``G`` the context minus ``phi``."""
    _require(d, WEAK)
    return _discharge(d, phi, d.context - {phi})


def detach(d: Derivation, logic: Optional[str] = None) -> Derivation:
    """From ``G |- phi -> psi`` build ``G, phi |- psi``."""
    c = d.conclusion
    if not isinstance(c, Imp):
        raise ValueError("detach needs an implication")
    if logic is not None:
        _require(d, logic)
    ctx = d.context | {c.left}
    return mp(el(ctx, c.left), weaken(d, ctx))


def strong_deduction(d: Derivation, phi: Formula) -> tuple[int, Derivation]:
    """From a strong proof of ``G, phi |- psi`` build ``G |- (!~)^n phi -> psi``.

    ``n`` counts sDN steps above uses of ``phi`` along a branch; MP joins
    take the maximum and pad the shallower side with ``!~x -> x``.
    """
    _require(d, STRONG)
    gamma = d.context - {phi}
    uses = _uses(d, phi)
    memo: dict[int, tuple[int, Derivation]] = {}

    def pad(k: int, target: int, dd: Derivation) -> Derivation:
        for m in range(k, target):
            step = lift(dn_t(dn(m, phi)), gamma, STRONG)
            dd = imp_trans(step, dd)
        return dd

    def go(n: Derivation) -> tuple[int, Derivation]:
        hit = memo.get(id(n))
        if hit is not None:
            return hit
        c = n.conclusion
        if not uses(n):
            base = recontext(n, gamma)
            out = (0, mp(base, ax(gamma, Imp(c, Imp(phi, c)), "A1")))
        elif n.rule == "El":
            out = (0, lift(imp_refl(phi), gamma, STRONG))
        elif n.rule == "MP":
            (k1, a), (k2, b) = (go(p) for p in n.premises)
            k = max(k1, k2)
            a, b = pad(k1, k, a), pad(k2, k, b)
            chi = n.premises[0].conclusion
            head = dn(k, phi)
            a2 = ax(gamma, Imp(Imp(head, Imp(chi, c)),
                               Imp(Imp(head, chi), Imp(head, c))), "A2")
            out = (k, mp(a, mp(b, a2)))
        elif n.rule == "sDN":
            k, a = go(n.premises[0])
            head = dn(k, phi)
            chi = n.premises[0].conclusion
            kk = lift(dn_k(head, chi), gamma, STRONG)
            out = (k + 1, mp(sdn(a), kk))
        else:
            raise InvalidDerivation(f"cannot discharge through {n.rule}")
        memo[id(n)] = out
        return out

    return go(d)


# ---------------------------------------------------------------------------
# theorem library (weak, empty context unless noted)

EMPTY: frozenset = frozenset()


@lru_cache(maxsize=None)
def top() -> Derivation:
    tt = ax(EMPTY, Imp(TOP, TOP), "A10")
    return mp(tt, ax(EMPTY, Imp(Imp(TOP, TOP), TOP), "A10"))


@lru_cache(maxsize=None)
def imp_refl(a: Formula) -> Derivation:
    aa = Imp(a, a)
    s1 = ax(EMPTY, Imp(a, Imp(aa, a)), "A1")
    s2 = ax(EMPTY, Imp(Imp(a, Imp(aa, a)), Imp(Imp(a, aa), aa)), "A2")
    s3 = ax(EMPTY, Imp(a, aa), "A1")
    return mp(s3, mp(s1, s2))


def lam(ctx: Iterable[Formula], hyp: Formula,
        body: Callable[[frozenset], Derivation]) -> Derivation:
    """Natural-deduction style implication introduction (weak)."""
    ctx = frozenset(ctx)
    inner = body(ctx | {hyp})
    return _discharge(inner, hyp, ctx)


@lru_cache(maxsize=None)
def syl(a: Formula, b: Formula, c: Formula) -> Derivation:
    """|- (a -> b) -> ((b -> c) -> (a -> c))"""
    ab, bc = Imp(a, b), Imp(b, c)
    return lam(EMPTY, ab, lambda g1: lam(g1, bc, lambda g2: lam(
        g2, a, lambda g3: mp(mp(el(g3, a), el(g3, ab)), el(g3, bc)))))


def imp_trans(d1: Derivation, d2: Derivation) -> Derivation:
    """From ``G |- a -> b`` and ``G |- b -> c`` get ``G |- a -> c``."""
    a, b = d1.conclusion.left, d1.conclusion.right
    c = d2.conclusion.right
    s = _weaken_dn_free(syl(a, b, c), d1.context)
    return mp(d2, mp(d1, s))


def _weaken_dn_free(thm: Derivation, ctx: frozenset) -> Derivation:
    # DN-free theorems are valid in both logics as they stand
    if _has_rule(thm, "wDN"):
        raise ValueError("theorem uses wDN; lift it with an explicit logic")
    return weaken(thm, ctx)


def top_in(ctx: frozenset) -> Derivation:
    return weaken(top(), ctx)


def and_i(d1: Derivation, d2: Derivation) -> Derivation:
    ctx = d1.context
    a, b = d1.conclusion, d2.conclusion
    ta = mp(d1, ax(ctx, Imp(a, Imp(TOP, a)), "A1"))
    tb = mp(d2, ax(ctx, Imp(b, Imp(TOP, b)), "A1"))
    a8 = ax(ctx, Imp(Imp(TOP, a), Imp(Imp(TOP, b), Imp(TOP, And(a, b)))), "A8")
    return mp(top_in(ctx), mp(tb, mp(ta, a8)))


def and_e1(d: Derivation) -> Derivation:
    c = d.conclusion
    return mp(d, ax(d.context, Imp(c, c.left), "A6"))


def and_e2(d: Derivation) -> Derivation:
    c = d.conclusion
    return mp(d, ax(d.context, Imp(c, c.right), "A7"))


def or_i1(d: Derivation, b: Formula) -> Derivation:
    a = d.conclusion
    return mp(d, ax(d.context, Imp(a, Or(a, b)), "A3"))


def or_i2(a: Formula, d: Derivation) -> Derivation:
    b = d.conclusion
    return mp(d, ax(d.context, Imp(b, Or(a, b)), "A4"))


def or_e(d_or: Derivation, d1: Derivation, d2: Derivation) -> Derivation:
    """From ``a | b``, ``a -> c`` and ``b -> c`` conclude ``c``."""
    ctx = d_or.context
    a, b = d_or.conclusion.left, d_or.conclusion.right
    c = d1.conclusion.right
    a5 = ax(ctx, Imp(Imp(a, c), Imp(Imp(b, c), Imp(Or(a, b), c))), "A5")
    return mp(d_or, mp(d2, mp(d1, a5)))


def efq(d_bot: Derivation, c: Formula) -> Derivation:
    return mp(d_bot, ax(d_bot.context, Imp(BOT, c), "A9"))


@lru_cache(maxsize=None)
def bilem(a: Formula) -> Derivation:
    """|- a | ~a"""
    a11 = ax(EMPTY, Imp(TOP, Or(a, Excl(TOP, a))), "A11")
    return mp(top(), a11)


@lru_cache(maxsize=None)
def exch(p: Formula, q: Formula, r: Formula) -> Derivation:
    """|- (p -> (q -> r)) -> (q -> (p -> r))"""
    pqr = Imp(p, Imp(q, r))
    return lam(EMPTY, pqr, lambda g1: lam(g1, q, lambda g2: lam(
        g2, p, lambda g3: mp(el(g3, q), mp(el(g3, p), el(g3, pqr))))))


@lru_cache(maxsize=None)
def dual_res_fwd_thm(a: Formula, b: Formula, c: Formula) -> Derivation:
    """|- ((a \\ b) -> c) -> (a -> (b | c))"""
    h = Imp(Excl(a, b), c)
    bc = Or(b, c)

    def body(g: frozenset) -> Derivation:
        split = mp(el(g, a), ax(g, Imp(a, Or(b, Excl(a, b))), "A11"))
        left = ax(g, Imp(b, bc), "A3")
        right = imp_trans(el(g, h), ax(g, Imp(c, bc), "A4"))
        return or_e(split, left, right)

    return lam(EMPTY, h, lambda g: lam(g, a, body))


@lru_cache(maxsize=None)
def _no_excl_thm(a: Formula, b: Formula, c: Formula) -> Derivation:
    """|- !~(a -> (b | c)) -> !(a \\ (b | c))"""
    x = Imp(a, Or(b, c))
    nx = dn(1, x)
    e = Excl(a, Or(b, c))

    def body(g: frozenset) -> Derivation:
        cx = mp(el(g, e), ax(g, Imp(e, Excl(TOP, x)), "A12"))
        return mp(cx, el(g, nx))

    return lam(EMPTY, nx, lambda g: lam(g, e, body))


def dual_res_bwd(d: Derivation, logic: str) -> Derivation:
    """From ``G |- a -> (b | c)`` get ``G |- (a \\ b) -> c``.

    In the weak logic ``G`` must be empty.
    """
    a = d.conclusion.left
    b, c = d.conclusion.right.left, d.conclusion.right.right
    ctx = d.context
    if logic == WEAK:
        if ctx:
            raise ValueError("weak dual residuation needs an empty context")
        boxed = wdn(d)
    else:
        boxed = sdn(d)
    ne = mp(boxed, lift(_no_excl_thm(a, b, c), ctx, logic))
    a13 = ax(ctx, Imp(Excl(Excl(a, b), c), Excl(a, Or(b, c))), "A13")
    n2 = imp_trans(a13, ne)
    a14 = ax(ctx, Imp(n2.conclusion, Imp(Excl(a, b), c)), "A14")
    return mp(n2, a14)


@lru_cache(maxsize=None)
def dn_t(a: Formula) -> Derivation:
    """|- !~a -> a"""
    na = Excl(TOP, a)
    box = dn(1, a)

    def body(g: frozenset) -> Derivation:
        case_a = weaken(imp_refl(a), g)
        case_na = lam(g, na, lambda g2: efq(mp(el(g2, na), el(g2, box)), a))
        return or_e(weaken(bilem(a), g), case_a, case_na)

    return lam(EMPTY, box, body)


@lru_cache(maxsize=None)
def dn_k(a: Formula, b: Formula) -> Derivation:
    """|- !~(a -> b) -> (!~a -> !~b)"""
    ab = Imp(a, b)
    na, nab = Excl(TOP, a), Excl(TOP, ab)
    tail = Or(na, nab)

    # |- T -> (b | (~a | ~(a -> b)))
    def cover(g: frozenset) -> Derivation:
        target = Or(b, tail)

        def from_a(g2: frozenset) -> Derivation:
            split = mp(el(g2, a), ax(g2, Imp(a, Or(b, Excl(a, b))), "A11"))
            left = ax(g2, Imp(b, target), "A3")
            right = lam(g2, Excl(a, b), lambda g3: or_i2(b, or_i2(
                na, mp(el(g3, Excl(a, b)), ax(g3, Imp(Excl(a, b), nab), "A12")))))
            return or_e(split, left, right)

        case_a = lam(g, a, from_a)
        case_na = lam(g, na, lambda g2: or_i2(b, or_i1(el(g2, na), nab)))
        return or_e(weaken(bilem(a), g), case_a, case_na)

    spread = dual_res_bwd(lam(EMPTY, TOP, cover), WEAK)  # |- ~b -> tail
    box_ab, box_a = dn(1, ab), dn(1, a)

    def body(g: frozenset) -> Derivation:
        def kill(g2: frozenset) -> Derivation:
            t = mp(el(g2, Excl(TOP, b)), weaken(spread, g2))
            return or_e(t, el(g2, box_a), el(g2, box_ab))

        return lam(g, Excl(TOP, b), kill)

    return lam(EMPTY, box_ab, lambda g: lam(g, box_a, body))


def _explode_box(g: frozenset, x: Formula, goal: Formula) -> Derivation:
    """``G |- ~x -> (!~x -> goal)``"""
    nx, bx = Excl(TOP, x), dn(1, x)
    return lam(g, nx, lambda g2: lam(g2, bx, lambda g3: efq(
        mp(el(g3, nx), el(g3, bx)), goal)))


@lru_cache(maxsize=None)
def mono_left_thm(a: Formula, a2: Formula, b: Formula) -> Derivation:
    """|- !~(a -> a2) -> ((a \\ b) -> (a2 \\ b))"""
    x = Imp(a, a2)
    box = dn(1, x)
    goal = Excl(a2, b)
    y = Imp(box, goal)

    def body(g: frozenset) -> Derivation:
        def holds(g2: frozenset) -> Derivation:
            a2_ = mp(el(g2, a), el(g2, x))
            split = mp(a2_, ax(g2, Imp(a2, Or(b, goal)), "A11"))
            left = ax(g2, Imp(b, Or(b, y)), "A3")
            right = lam(g2, goal, lambda g3: or_i2(b, mp(
                el(g3, goal), ax(g3, Imp(goal, y), "A1"))))
            return or_e(split, left, right)

        fails = lam(g, Excl(TOP, x), lambda g2: or_i2(
            b, mp(el(g2, Excl(TOP, x)), _explode_box(g2, x, goal))))
        return or_e(weaken(bilem(x), g), lam(g, x, holds), fails)

    res = dual_res_bwd(lam(EMPTY, a, body), WEAK)  # |- (a \ b) -> y
    return mp(res, exch(Excl(a, b), box, goal))


@lru_cache(maxsize=None)
def mono_right_thm(a: Formula, b: Formula, b2: Formula) -> Derivation:
    """|- !~(b2 -> b) -> ((a \\ b) -> (a \\ b2))"""
    x = Imp(b2, b)
    box = dn(1, x)
    goal = Excl(a, b2)
    z = Imp(box, goal)

    def body(g: frozenset) -> Derivation:
        split = mp(el(g, a), ax(g, Imp(a, Or(b2, goal)), "A11"))

        def from_b2(g2: frozenset) -> Derivation:
            holds = lam(g2, x, lambda g3: or_i1(mp(el(g3, b2), el(g3, x)), z))
            fails = lam(g2, Excl(TOP, x), lambda g3: or_i2(
                b, mp(el(g3, Excl(TOP, x)), _explode_box(g3, x, goal))))
            return or_e(weaken(bilem(x), g2), holds, fails)

        right = lam(g, goal, lambda g2: or_i2(b, mp(
            el(g2, goal), ax(g2, Imp(goal, z), "A1"))))
        return or_e(split, lam(g, b2, from_b2), right)

    res = dual_res_bwd(lam(EMPTY, a, body), WEAK)  # |- (a \ b) -> z
    return mp(res, exch(Excl(a, b), box, goal))


# ---------------------------------------------------------------------------
# canned derivations

def _il3_binary(cls, p1, q1, p2, q2) -> Derivation:
    """IL3 for an intuitionistic binary connective, from the four
    implications in context."""
    ctx = frozenset({Imp(p1, q1), Imp(q1, p1), Imp(p2, q2), Imp(q2, p2)})
    lhs, rhs = cls(p1, p2), cls(q1, q2)
    if cls is And:
        d = lam(ctx, lhs, lambda g: and_i(
            mp(and_e1(el(g, lhs)), el(g, Imp(p1, q1))),
            mp(and_e2(el(g, lhs)), el(g, Imp(p2, q2)))))
    elif cls is Or:
        d = lam(ctx, lhs, lambda g: or_e(
            el(g, lhs),
            imp_trans(el(g, Imp(p1, q1)), ax(g, Imp(q1, rhs), "A3")),
            imp_trans(el(g, Imp(p2, q2)), ax(g, Imp(q2, rhs), "A4"))))
    elif cls is Imp:
        d = lam(ctx, lhs, lambda g: imp_trans(
            imp_trans(el(g, Imp(q1, p1)), el(g, lhs)), el(g, Imp(p2, q2))))
    else:
        raise ValueError(cls)
    return d


def _il3_excl(p1, q1, p2, q2) -> Derivation:
    ctx = frozenset({Imp(p1, q1), Imp(q1, p1), Imp(p2, q2), Imp(q2, p2)})
    right = _excl_antimono_right(ctx, p1, p2, q2)   # (p1\p2) -> (p1\q2)
    left = _excl_mono_left(ctx, p1, q1, q2)         # (p1\q2) -> (q1\q2)
    return imp_trans(right, left)


def _excl_mono_left(ctx: frozenset, a, a2, b) -> Derivation:
    boxed = sdn(el(ctx, Imp(a, a2)))
    return mp(boxed, lift(mono_left_thm(a, a2, b), ctx, STRONG))


def _excl_antimono_right(ctx: frozenset, a, b, b2) -> Derivation:
    boxed = sdn(el(ctx, Imp(b2, b)))
    return mp(boxed, lift(mono_right_thm(a, b, b2), ctx, STRONG))


def _alg3_fwd(f: Formula) -> Derivation:
    ctx = frozenset({f})
    to_top = ax(ctx, Imp(f, TOP), "A10")
    from_top = mp(el(ctx, f), ax(ctx, Imp(f, Imp(TOP, f)), "A1"))
    return and_i(to_top, from_top)


def _alg3_bwd(f: Formula) -> Derivation:
    h = iff(f, TOP)
    ctx = frozenset({h})
    return mp(top_in(ctx), and_e2(el(ctx, h)))


@dataclass(frozen=True)
class CannedEntry:
    arity: int
    logics: tuple[str, ...]
    build: Callable[..., Derivation]
    doc: str


CANNED: dict[str, CannedEntry] = {
    "top": CannedEntry(0, (WEAK, STRONG), top, "|- T"),
    "bilem": CannedEntry(1, (WEAK, STRONG), bilem, "|- a | ~a"),
    "imp_refl": CannedEntry(1, (WEAK, STRONG), imp_refl, "IL1: |- a -> a"),
    "imp_trans": CannedEntry(
        3, (WEAK, STRONG),
        lambda p, q, r: imp_trans(el({Imp(p, q), Imp(q, r)}, Imp(p, q)),
                                  el({Imp(p, q), Imp(q, r)}, Imp(q, r))),
        "IL2: p -> q, q -> r |- p -> r"),
    "il3_top": CannedEntry(0, (WEAK, STRONG), lambda: imp_refl(TOP), "IL3 for T"),
    "il3_bot": CannedEntry(0, (WEAK, STRONG), lambda: imp_refl(BOT), "IL3 for F"),
    "il3_and": CannedEntry(4, (WEAK, STRONG), lambda *a: _il3_binary(And, *a), "IL3 for &"),
    "il3_or": CannedEntry(4, (WEAK, STRONG), lambda *a: _il3_binary(Or, *a), "IL3 for |"),
    "il3_imp": CannedEntry(4, (WEAK, STRONG), lambda *a: _il3_binary(Imp, *a), "IL3 for ->"),
    "il3_excl": CannedEntry(4, (STRONG,), _il3_excl, "IL3 for \\"),
    "il4": CannedEntry(2, (WEAK, STRONG),
                       lambda p, q: mp(el({p, Imp(p, q)}, p), el({p, Imp(p, q)}, Imp(p, q))),
                       "IL4: p, p -> q |- q"),
    "il5": CannedEntry(2, (WEAK, STRONG),
                       lambda p, q: mp(el({p}, p), ax({p}, Imp(p, Imp(q, p)), "A1")),
                       "IL5: p |- q -> p"),
    "excl_mono_left": CannedEntry(
        3, (STRONG,), lambda a, a2, b: _excl_mono_left(frozenset({Imp(a, a2)}), a, a2, b),
        "a -> a2 |- (a \\ b) -> (a2 \\ b)"),
    "excl_antimono_right": CannedEntry(
        3, (STRONG,), lambda a, b, b2: _excl_antimono_right(frozenset({Imp(b2, b)}), a, b, b2),
        "b2 -> b |- (a \\ b) -> (a \\ b2)"),
    "alg3_fwd": CannedEntry(1, (STRONG, WEAK), _alg3_fwd, "a |- a <-> T"),
    "alg3_bwd": CannedEntry(1, (STRONG, WEAK), _alg3_bwd, "a <-> T |- a"),
    "dual_res_fwd": CannedEntry(
        3, (WEAK, STRONG),
        lambda a, b, c: mp(el({Imp(Excl(a, b), c)}, Imp(Excl(a, b), c)),
                           weaken(dual_res_fwd_thm(a, b, c), {Imp(Excl(a, b), c)})),
        "(a \\ b) -> c |- a -> (b | c)"),
    "dual_res_bwd": CannedEntry(
        3, (STRONG,),
        lambda a, b, c: dual_res_bwd(el({Imp(a, Or(b, c))}, Imp(a, Or(b, c))), STRONG),
        "a -> (b | c) |- (a \\ b) -> c"),
    "dn_t": CannedEntry(1, (WEAK, STRONG), dn_t, "|- !~a -> a"),
    "dn_k": CannedEntry(2, (WEAK, STRONG), dn_k, "|- !~(a -> b) -> (!~a -> !~b)"),
    "mono_left_thm": CannedEntry(3, (WEAK, STRONG), mono_left_thm,
                                 "|- !~(a -> a2) -> ((a \\ b) -> (a2 \\ b))"),
    "mono_right_thm": CannedEntry(3, (WEAK, STRONG), mono_right_thm,
                                  "|- !~(b2 -> b) -> ((a \\ b) -> (a \\ b2))"),
}


def canned(name: str, args: Iterable[Formula] = (), logic: Optional[str] = None) -> Derivation:
    """Build a registered derivation; ``logic`` defaults to the entry's first."""
    entry = CANNED.get(name)
    if entry is None:
        raise KeyError(f"unknown canned derivation {name!r}")
    args = tuple(args)
    if len(args) != entry.arity:
        raise TypeError(f"{name} takes {entry.arity} formulas, got {len(args)}")
    logic = logic or entry.logics[0]
    if logic not in entry.logics:
        raise ValueError(f"{name} is not registered for the {logic} logic")
    d = entry.build(*args)
    if logic == STRONG and _has_rule(d, "wDN"):
        d = to_strong(d)
    return d


# ---------------------------------------------------------------------------
# document format

def to_document(d: Derivation) -> dict[str, Any]:
    doc: dict[str, Any] = {
        "rule": d.rule,
        "context": sorted(render(g) for g in d.context),
        "conclusion": render(d.conclusion),
    }
    if d.rule == "Ax":
        doc["axiom"] = d.axiom
        if d.binding is not None:
            doc["binding"] = {k: render(v) for k, v in sorted(d.binding.items())}
    if d.premises:
        doc["premises"] = [to_document(p) for p in d.premises]
    return doc


def from_document(doc: Mapping[str, Any]) -> Derivation:
    try:
        rule = doc["rule"]
        ctx = frozenset(parse(s) for s in doc.get("context", []))
        concl = parse(doc["conclusion"])
    except KeyError as e:
        raise ValueError(f"derivation node misses field {e.args[0]!r}") from None
    premises = tuple(from_document(p) for p in doc.get("premises", []))
    binding = doc.get("binding")
    if binding is not None:
        binding = {k: parse(v) for k, v in binding.items()}
    return Derivation(rule, ctx, concl, premises, doc.get("axiom"), binding)
