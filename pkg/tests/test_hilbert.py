import json
import random

import pytest
from hypothesis import given, settings, strategies as st

from biint.hilbert import (
    AXIOMS, CANNED, STRONG, WEAK, Derivation, InvalidDerivation, ax,
    axiom_instance, canned, check, deduction, detach, el, from_document, mp,
    retag, sdn, strong_deduction, to_document, wdn, weaken,
)
from biint.kripke import global_consequence_on, local_consequence_on
from biint.syntax import BOT, TOP, And, Excl, Imp, Var, coneg, dn, iff, substitute

from gen import formulas, random_formula, random_model

p, q, r, s = Var("p"), Var("q"), Var("r"), Var("s")


def canned_args(name, rng=None):
    k = CANNED[name].arity
    if rng is None:
        return [Var(f"v{i}") for i in range(k)]
    return [random_formula(rng, ("p", "q"), 2) for _ in range(k)]


def test_axiom_instance_examples():
    assert axiom_instance(Imp(p, Imp(q, p))) == ("A1", {"phi": p, "psi": q})
    assert axiom_instance(Imp(Excl(p, q), coneg(Imp(p, q)))) == ("A12", {"phi": p, "psi": q})
    assert axiom_instance(Imp(p, Imp(q, r))) is None


@given(st.sampled_from(sorted(AXIOMS)), formulas(max_height=2), formulas(max_height=2),
       formulas(max_height=2))
def test_axiom_instances_are_recognised(name, a, b, c):
    f = substitute({"phi": a, "psi": b, "chi": c}, AXIOMS[name])
    found = axiom_instance(f)
    assert found is not None
    assert substitute(found[1], AXIOMS[found[0]]) == f


def test_check_examples():
    assert check(el({p, q}, p), WEAK).ok and check(el({p, q}, p), STRONG).ok
    bad = Derivation("wDN", frozenset({p}), dn(1, p), (el({p}, p),))
    rep = check(bad, WEAK)
    assert not rep.ok and rep.path == () and "empty context" in rep.message
    assert check(ax({p}, Imp(BOT, q)), WEAK).ok


def test_check_rejects_wrong_rules_and_pinpoints_node():
    d = sdn(el({p}, p))
    assert check(d, STRONG).ok
    assert not check(d, WEAK).ok
    assert not check(wdn(ax((), Imp(p, TOP))), STRONG).ok
    inner = Derivation("El", frozenset({p}), q)
    d = mp(inner, ax({p}, Imp(q, Imp(p, q))))
    rep = check(d, WEAK)
    assert not rep.ok and rep.path == (0,) and rep.rule == "El"


def test_check_rejects_bad_mp_and_ax():
    d = Derivation("MP", frozenset(), q, (ax((), Imp(p, TOP)), ax((), Imp(p, TOP))))
    assert not check(d, WEAK).ok
    wrong = Derivation("Ax", frozenset(), Imp(p, q), axiom="A1")
    assert not check(wrong, WEAK).ok
    with pytest.raises(ValueError):
        ax((), Imp(p, q))


def test_weaken():
    d = el({p}, p)
    w = weaken(d, {p, q})
    assert w.context == {p, q} and check(w, WEAK).ok
    top_proof = canned("top")
    d = wdn(top_proof, {p})
    w = weaken(d, {p, q})
    assert w.premises[0].context == frozenset() and check(w, WEAK).ok
    assert w.premises[0] is top_proof
    assert weaken(d, {p}) is d
    with pytest.raises(ValueError):
        weaken(el({p}, p), {q})


def test_deduction_examples():
    d = deduction(el({p}, p), p)
    assert d.context == frozenset() and d.conclusion == Imp(p, p) and check(d, WEAK).ok
    d = deduction(ax({p}, Imp(BOT, q)), p)
    assert d.conclusion == Imp(p, Imp(BOT, q)) and check(d, WEAK).ok
    with pytest.raises(InvalidDerivation):
        deduction(sdn(el({p}, p)), p)


def test_deduction_through_wdn():
    d = wdn(canned("bilem", [q]), {p})
    out = deduction(d, p)
    assert out.conclusion == Imp(p, d.conclusion)
    assert check(out, WEAK).ok


def test_detach_examples():
    d = detach(canned("imp_refl", [p]))
    assert d.context == {p} and d.conclusion == p and check(d, WEAK).ok
    d = detach(ax({r}, Imp(BOT, q)))
    assert d.context == {r, BOT} and d.conclusion == q and check(d, WEAK).ok
    with pytest.raises(ValueError):
        detach(el({p}, p))


def test_strong_deduction_examples():
    n, d = strong_deduction(sdn(el({p}, p)), p)
    assert n == 1 and d.conclusion == Imp(dn(1, p), dn(1, p)) and check(d, STRONG).ok
    n, d = strong_deduction(mp(ax({p}, Imp(TOP, TOP)), ax({p}, Imp(Imp(TOP, TOP), TOP))), p)
    assert n == 0 and d.conclusion == Imp(p, TOP) and check(d, STRONG).ok
    n, d = strong_deduction(sdn(sdn(el({p}, p))), p)
    assert n == 2 and d.conclusion == Imp(dn(2, p), dn(2, p)) and check(d, STRONG).ok


def test_strong_deduction_pads_mp_branches():
    # {p, q} |- !~p and {p, q} |- !~p -> (q -> !~p), joined by MP
    ctx = {p, q}
    left = sdn(el(ctx, p))
    major = ax(ctx, Imp(dn(1, p), Imp(q, dn(1, p))), "A1")
    n, d = strong_deduction(mp(left, major), p)
    assert n == 1 and d.context == {q} and check(d, STRONG).ok
    assert d.conclusion == Imp(dn(1, p), Imp(q, dn(1, p)))


def _rule_set(d):
    out, stack, seen = set(), [d], set()
    while stack:
        n = stack.pop()
        if id(n) in seen:
            continue
        seen.add(id(n))
        out.add(n.rule)
        stack.extend(n.premises)
    return out


@pytest.mark.parametrize("name", sorted(CANNED))
def test_canned_checks_in_declared_logics(name):
    for logic in CANNED[name].logics:
        d = canned(name, canned_args(name), logic)
        rep = check(d, logic)
        assert rep.ok, rep.message


def test_canned_spec_examples():
    for logic in (WEAK, STRONG):
        assert check(canned("bilem", [p], logic), logic).ok
    p1, q1, p2, q2 = (Var(n) for n in ("p1", "q1", "p2", "q2"))
    d = canned("il3_excl", [p1, q1, p2, q2], STRONG)
    assert d.context == {Imp(p1, q1), Imp(q1, p1), Imp(p2, q2), Imp(q2, p2)}
    assert d.conclusion == Imp(Excl(p1, p2), Excl(q1, q2))
    assert check(d, STRONG).ok
    pq = And(p, q)
    d = canned("alg3_fwd", [pq], STRONG)
    assert d.context == {pq} and d.conclusion == iff(pq, TOP) and check(d, STRONG).ok


def test_canned_errors():
    with pytest.raises(KeyError):
        canned("nope")
    with pytest.raises(TypeError):
        canned("bilem", [])
    with pytest.raises(ValueError):
        canned("il3_excl", [p, q, r, s], WEAK)


def test_canned_with_compound_arguments():
    rng = random.Random(7)
    for name in sorted(CANNED):
        for logic in CANNED[name].logics:
            d = canned(name, canned_args(name, rng), logic)
            assert check(d, logic).ok, name


THEOREMS = [n for n in sorted(CANNED) if not canned(n, canned_args(n)).context]


@pytest.mark.parametrize("name", THEOREMS)
def test_empty_context_retagging(name):
    d = canned(name, canned_args(name), CANNED[name].logics[0])
    for logic in (WEAK, STRONG):
        out = retag(d, logic)
        assert check(out, logic).ok
        assert retag(out, WEAK if logic == STRONG else STRONG).conclusion == d.conclusion


@pytest.mark.parametrize("name", sorted(CANNED))
def test_deduction_round_trips(name):
    logics = CANNED[name].logics
    d = canned(name, canned_args(name), logics[0])
    for phi in sorted(d.context, key=str):
        if WEAK in logics:
            wd = canned(name, canned_args(name), WEAK)
            ded = deduction(wd, phi)
            assert check(ded, WEAK).ok
            back = detach(ded, WEAK)
            assert back.conclusion == wd.conclusion and check(back, WEAK).ok
        sd = canned(name, canned_args(name), STRONG) if STRONG in logics else None
        if sd is not None:
            n, out = strong_deduction(sd, phi)
            assert out.conclusion == Imp(dn(n, phi), sd.conclusion)
            assert check(out, STRONG).ok
            back = detach(out, STRONG)
            assert check(back, STRONG).ok


def test_document_round_trip():
    d = canned("il3_excl", [p, q, r, s], STRONG)
    doc = json.loads(json.dumps(to_document(d)))
    back = from_document(doc)
    assert back.conclusion == d.conclusion and back.context == d.context
    assert check(back, STRONG).ok
    assert to_document(back) == doc
    with pytest.raises(ValueError):
        from_document({"rule": "El"})


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_derivations_are_sound_on_random_models(seed):
    rng = random.Random(seed)
    m = random_model(rng, 5, ("v0", "v1", "v2", "v3"))
    for name, entry in sorted(CANNED.items()):
        args = canned_args(name)
        if WEAK in entry.logics:
            d = canned(name, args, WEAK)
            assert local_consequence_on(m, d.context, d.conclusion), name
        if STRONG in entry.logics:
            d = canned(name, args, STRONG)
            assert global_consequence_on(m, d.context, d.conclusion), name
