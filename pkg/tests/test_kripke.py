import random

import pytest
from hypothesis import given, settings, strategies as st

from biint.kripke import (
    KripkeModel, connected, countermodel_search, extension, forces, glue,
    global_consequence_on, local_consequence_on, model_from_document,
    model_to_document, n_bisimilar, two_chain, upsets, validate_model,
    xmas_lights, zigzag_n, zigzag_reach,
)
from biint.syntax import BOT, TOP, Excl, Or, Var, coneg, depth, dn, iff, parse

from gen import formulas, formulas_upto, models, random_formula, random_model
from oracles import (
    model_rel, naive_bisim_table, naive_forces, naive_upsets, naive_zigzag,
)

p, q = Var("p"), Var("q")


def test_validate_examples():
    assert validate_model(two_chain())
    rep = validate_model(two_chain((0,)))
    assert not rep and rep.violations == [(0, 1, "p")]
    assert validate_model(xmas_lights(1)[0])


def test_bad_models_rejected():
    with pytest.raises(ValueError):
        KripkeModel(2, [(0, 2)], {})
    with pytest.raises(ValueError):
        KripkeModel(2, [], {"p": {5}})
    with pytest.raises(ValueError):
        KripkeModel(0, [], {})


def test_forces_examples():
    m = two_chain()
    for w in m.worlds:
        assert not forces(m, w, BOT)
        assert forces(m, w, Or(p, coneg(p)))
    assert forces(m, 1, coneg(p))
    assert forces(m, 0, coneg(p))  # 0 does not force p, so it witnesses itself
    assert not forces(m, 1, dn(1, p))
    with pytest.raises(KeyError):
        forces(m, 2, p)


def test_consequence_examples():
    m = two_chain()
    assert local_consequence_on(m, [p], p) and global_consequence_on(m, [p], p)
    assert not local_consequence_on(m, [p], dn(1, p))
    assert global_consequence_on(m, [p], dn(1, p))


@settings(max_examples=200, deadline=None)
@given(models(max_worlds=5), formulas(atoms=("p", "q"), max_height=4))
def test_forcing_agrees_with_oracle(m, f):
    rel = model_rel(m)
    assert extension(m, f) == {w for w in m.worlds if naive_forces(m, w, f, rel)}


@settings(max_examples=200, deadline=None)
@given(models(max_worlds=6), formulas(atoms=("p", "q"), max_height=4))
def test_persistence(m, f):
    ext = extension(m, f)
    for w in ext:
        assert all(v in ext for v in m.worlds if m.leq(w, v))


@settings(max_examples=100, deadline=None)
@given(models(max_worlds=6), formulas(atoms=("p", "q"), max_height=3), st.integers(0, 3))
def test_jellyfish(m, f, n):
    ext = extension(m, f)
    for w in m.worlds:
        assert forces(m, w, dn(n, f)) == (zigzag_reach(m, w, n) <= ext)


@settings(max_examples=100, deadline=None)
@given(models(max_worlds=6), st.integers(0, 3))
def test_zigzag_matches_oracle(m, n):
    rel = model_rel(m)
    for w in m.worlds:
        assert zigzag_reach(m, w, n) == naive_zigzag(m, w, n, rel)


def test_zigzag_examples():
    x, _ = xmas_lights(1)
    assert zigzag_n(x, 3, 3, 0) and not zigzag_n(x, 0, 2, 0)
    assert zigzag_n(x, 0, 2, 1)
    anti = KripkeModel(2, [], {})
    assert not zigzag_n(anti, 0, 1, 1)
    assert connected(x, 0, 0) and connected(x, 0, 4)
    assert not connected(anti, 0, 1)


def test_xmas_zigzag_from_zero():
    for n in range(1, 5):
        x, _ = xmas_lights(n)
        assert zigzag_reach(x, 0, n) == set(range(2 * n + 1))


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.integers(0, 3))
def test_bisimilarity_matches_oracle(seed, n):
    rng = random.Random(seed)
    m1, m2 = random_model(rng, 4, ("p",)), random_model(rng, 4, ("p",))
    table = naive_bisim_table(m1, m2, n)[n]
    for a in m1.worlds:
        for b in m2.worlds:
            assert n_bisimilar(m1, a, m2, b, n) == ((a, b) in table)


def test_bisimilarity_examples():
    m = xmas_lights(2)[0]
    for w in m.worlds:
        assert n_bisimilar(m, w, m, w, 5)
    a = KripkeModel(1, [], {"p": {0}})
    b = two_chain((0, 1))
    assert n_bisimilar(a, 0, b, 1, 0)
    with pytest.raises(KeyError):
        n_bisimilar(a, 3, b, 0, 1)


SMALL = formulas_upto(("p", "q"), height=1)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.integers(0, 2))
def test_bisimilar_worlds_agree(seed, n):
    rng = random.Random(seed)
    m1, m2 = random_model(rng, 4, ("p", "q")), random_model(rng, 4, ("p", "q"))
    fs = [f for f in SMALL if depth(f) <= n]
    for a in m1.worlds:
        for b in m2.worlds:
            if n_bisimilar(m1, a, m2, b, n):
                for f in fs:
                    assert forces(m1, a, f) == forces(m2, b, f)


def test_countermodel_search_examples():
    found = countermodel_search([p], dn(1, p), 2, "local")
    assert found is not None
    m = found.model
    assert m.size == 2 and m.edges == ((0, 1),) and m.valuation == {"p": {1}}
    assert found.world == 1
    assert countermodel_search([], Or(p, coneg(p)), 3) is None
    assert countermodel_search([p], p, 3) is None
    assert countermodel_search([p], dn(1, p), 3, "global") is None
    with pytest.raises(ValueError):
        countermodel_search([], p, 0)


@settings(max_examples=30, deadline=None)
@given(formulas(atoms=("p", "q"), max_height=2), formulas(atoms=("p", "q"), max_height=2),
       st.sampled_from(["local", "global"]))
def test_countermodel_search_finds_real_refutations(g, f, mode):
    found = countermodel_search([g], f, 2, mode)
    if found is None:
        return
    m = found.model
    assert validate_model(m)
    if mode == "local":
        assert forces(m, found.world, g) and not forces(m, found.world, f)
    else:
        assert not global_consequence_on(m, [g], f)


def test_countermodel_search_is_exhaustive_on_small_frames():
    # p -> q fails on a one-world model with p true, q false
    found = countermodel_search([], parse("p -> q"), 1)
    assert found is not None and found.model.valuation == {"p": {0}, "q": set()}


def test_xmas_lights_construction():
    m, val = xmas_lights(1)
    assert m.size == 5
    assert set(m.edges) == {(0, 1), (2, 1), (2, 3), (4, 3)}
    assert val["x1"] == set(range(5)) and val["y2"] == set(range(4))
    t = iff(Excl(Var("x1"), Var("y1")), Excl(Var("x2"), Var("y2")))
    for n in range(1, 5):
        m, _ = xmas_lights(n)
        assert validate_model(m)
        assert not forces(m, 2 * n, t)
        assert not forces(m, 0, dn(n, t))
        assert forces(m, 2 * n + 1, Excl(Var("x1"), Var("y1")))
        assert not forces(m, 2 * n + 1, Excl(Var("x2"), Var("y2")))


def test_glue_construction():
    m = two_chain()
    for n in (1, 2, 3):
        g = glue(m, 1, n)
        assert g.size == (2 * n + 1) * m.size + 1
        assert validate_model(g)
        for k in range(2 * n + 1):
            for x in m.worlds:
                assert (k * m.size + x in g.valuation["p"]) == (x in m.valuation["p"])
        c = g.size - 1
        assert c in g.valuation["p"]
        assert n_bisimilar(m, 1, g, 1, 2 * n)
        assert zigzag_n(g, c, 1, n + 1) and not zigzag_n(g, c, 1, n)
    g = glue(m, 0, 1, ["x"])
    assert g.valuation["x"] == {g.size - 1}
    with pytest.raises(ValueError):
        glue(m, 0, 0)
    with pytest.raises(ValueError):
        glue(two_chain((0,)), 0, 1)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.integers(1, 2))
def test_glue_bisimilar_to_original(seed, n):
    m = random_model(random.Random(seed), 4, ("p", "q"))
    for w in m.worlds:
        assert n_bisimilar(m, w, glue(m, w, n), w, 2 * n)


@settings(max_examples=50, deadline=None)
@given(models(max_worlds=5))
def test_upsets_match_oracle(m):
    found = [frozenset(w for w in m.worlds if s >> w & 1) for s in upsets(m)]
    assert sorted(found, key=sorted) == sorted(naive_upsets(m), key=sorted)
    assert len(set(found)) == len(found)


def test_model_document_round_trip():
    m = xmas_lights(1)[0]
    back = model_from_document(model_to_document(m))
    assert back.size == m.size and back.edges == m.edges and back.valuation == m.valuation
    doc = {"worlds": ["a", "b"], "edges": [["a", "b"]], "valuation": {"p": ["b"]}}
    m = model_from_document(doc)
    assert m.world("b") == 1 and forces(m, 1, p)
    with pytest.raises(ValueError):
        model_from_document({"edges": []})
    with pytest.raises(ValueError):
        model_from_document({"worlds": ["a"], "valuation": {"p": ["z"]}})
    with pytest.raises(ValueError):
        model_from_document({"worlds": ["a", "a"]})


def test_random_formula_extension_is_an_upset():
    rng = random.Random(3)
    for _ in range(50):
        m = random_model(rng, 6)
        f = random_formula(rng, ("p", "q", "r"), 4)
        ext = extension(m, f)
        assert any(ext == {w for w in m.worlds if s >> w & 1} for s in upsets(m))
    assert extension(m, TOP) == set(m.worlds)
