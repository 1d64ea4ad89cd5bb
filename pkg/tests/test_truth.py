import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from htkernel import BUNDLED_UNIVERSES
from htkernel.formula import ParseError
from htkernel.truth import (
    BaseAtom,
    Grounded,
    SName,
    TAnd,
    ThreeVal,
    TNot,
    TOr,
    TrueN,
    TruePred,
    Ungrounded,
    UniverseError,
    classify_grounded,
    kripke_fixpoint,
    kripke_stages,
    load_universe,
    parse_universe,
    tarski_levels,
    truth_report,
    untiered,
)

T, F, U = ThreeVal.T, ThreeVal.F, ThreeVal.U


def random_universe(rng, n, tiered=False):
    """Random universe of ``n`` sentences; bare-name references only point
    backwards so they never form cycles."""
    names = [f"s{i}" for i in range(n)]

    def expr(i, depth):
        r = rng.random()
        if depth == 0 or r < 0.3:
            r2 = rng.random()
            if r2 < 0.35:
                return BaseAtom(f"p{rng.randrange(3)}", rng.random() < 0.5)
            if r2 < 0.85:
                target = rng.choice(names)
                return TrueN(rng.randint(1, 3), target) if tiered else TruePred(target)
            if i > 0:
                return SName(names[rng.randrange(i)])
            return BaseAtom("p0", True)
        if r < 0.5:
            return TNot(expr(i, depth - 1))
        ctor = TAnd if r < 0.75 else TOr
        return ctor(expr(i, depth - 1), expr(i, depth - 1))

    return {names[i]: expr(i, 3) for i in range(n)}


def stratified_universe(rng, n):
    """Universe where every true_k points at an earlier sentence below level k."""
    names, levels, u = [], {}, {}
    for i in range(n):
        def expr(depth):
            r = rng.random()
            if depth == 0 or r < 0.35:
                if names and rng.random() < 0.6:
                    target = rng.choice(names)
                    return TrueN(levels[target] + rng.randint(1, 2), target)
                return BaseAtom(f"p{rng.randrange(3)}", rng.random() < 0.5)
            if r < 0.55:
                return TNot(expr(depth - 1))
            return (TAnd if r < 0.8 else TOr)(expr(depth - 1), expr(depth - 1))

        name = f"s{i}"
        u[name] = expr(3)
        levels[name] = tarski_levels(u)[0][name]
        names.append(name)
    return u


# ------------------------------------------------------------------ Kripke

def test_liar_is_undefined():
    u = {"liar": TNot(TruePred("liar"))}
    v, stages = kripke_fixpoint(u)
    assert v == {"liar": U}
    assert classify_grounded(u, "liar") == Ungrounded()


def test_grounded_chain():
    u = {"s": BaseAtom("p", True), "t": TruePred("s")}
    stages = kripke_stages(u)
    assert stages[1]["s"] is T and stages[1]["t"] is U
    assert stages[2]["t"] is T
    assert kripke_fixpoint(u) == ({"s": T, "t": T}, 2)
    assert classify_grounded(u, "s") == Grounded(T, 1)
    assert classify_grounded(u, "t") == Grounded(T, 2)


def test_truth_teller_is_undefined():
    u = {"tt": TruePred("tt")}
    assert kripke_fixpoint(u)[0] == {"tt": U}
    assert classify_grounded(u, "tt") == Ungrounded()


def test_base_atom_grounded_at_stage_one():
    assert classify_grounded({"a": BaseAtom("p", False)}, "a") == Grounded(F, 1)


def test_second_liar_name_ungrounded():
    u = {"liar": TNot(TruePred("liar")), "echo": TNot(TruePred("liar"))}
    assert classify_grounded(u, "echo") == Ungrounded()


def test_classify_unbound():
    with pytest.raises(UniverseError):
        classify_grounded({"a": BaseAtom("p", True)}, "b")


def test_strong_kleene_tables():
    assert (F & U) is F and (T & U) is U and (T & T) is T
    assert (T | U) is T and (F | U) is U and (F | F) is F
    assert ~U is U and ~T is F


def test_kleene_dominance_grounds_mixed_sentences():
    u = {"liar": TNot(TruePred("liar")), "a": TOr(BaseAtom("p", True), TruePred("liar")),
         "b": TAnd(BaseAtom("p", False), TruePred("liar"))}
    v, _ = kripke_fixpoint(u)
    assert v == {"liar": U, "a": T, "b": F}


def test_bare_name_reads_content():
    u = {"a": BaseAtom("p", True), "b": TNot(SName("a"))}
    v, stages = kripke_fixpoint(u)
    assert v == {"a": T, "b": F} and stages == 1


@pytest.mark.parametrize("seed", range(100))
def test_kripke_monotone_random(seed):
    rng = random.Random(seed)
    u = random_universe(rng, rng.randint(1, 12))
    stages = kripke_stages(u)
    assert len(stages) - 1 <= len(u) + 1
    for before, after in zip(stages, stages[1:]):
        assert all(before[n].leq(after[n]) for n in u)
    # the last stage is a fixed point
    assert kripke_stages(u)[-1] == stages[-1]


def test_predicate_free_universe_one_stage():
    rng = random.Random(7)
    for _ in range(20):
        u = {f"s{i}": BaseAtom("p", rng.random() < 0.5) for i in range(rng.randint(1, 8))}
        u["neg"] = TNot(SName("s0"))
        v, stages = kripke_fixpoint(u)
        assert stages == 1
        assert all(isinstance(classify_grounded(u, n), Grounded) for n in u)


@pytest.mark.parametrize(
    "u",
    [{"a": TruePred("b")}, {"a": SName("a")}, {"a": SName("b"), "b": TNot(SName("a"))}],
)
def test_ill_formed_universes(u):
    with pytest.raises(UniverseError):
        kripke_stages(u)


# ------------------------------------------------------------------ Tarski

def test_tarski_examples():
    levels, values = tarski_levels({"a": BaseAtom("p", True)})
    assert levels == {"a": 0} and values == {"a": True}
    levels, values = tarski_levels({"a": BaseAtom("p", True), "b": TrueN(1, "a")})
    assert levels["b"] == 1 and values["b"] is True
    assert tarski_levels({"c": TrueN(1, "c")}) == ({"c": None}, {"c": None})


def test_tarski_blocks_downward_ascription():
    u = {"a": BaseAtom("p", True), "b": TrueN(1, "a"), "c": TrueN(1, "b"), "d": TrueN(2, "b")}
    levels, _ = tarski_levels(u)
    assert levels == {"a": 0, "b": 1, "c": None, "d": 2}


def test_tarski_rejects_single_predicate():
    assert tarski_levels({"a": TruePred("a")})[0] == {"a": None}


@pytest.mark.parametrize("seed", range(60))
def test_tarski_agrees_with_kripke_on_stratified(seed):
    rng = random.Random(seed)
    u = stratified_universe(rng, rng.randint(1, 10))
    levels, values = tarski_levels(u)
    assert all(lv is not None for lv in levels.values())
    v, _ = kripke_fixpoint(untiered(u))
    for n in u:
        assert v[n] is ThreeVal.of(values[n])


@pytest.mark.parametrize("seed", range(60))
def test_leveled_sentences_are_grounded(seed):
    rng = random.Random(1000 + seed)
    u = random_universe(rng, rng.randint(1, 10), tiered=True)
    levels, values = tarski_levels(u)
    v, _ = kripke_fixpoint(untiered(u))
    for n, lv in levels.items():
        if lv is not None:
            assert v[n] is ThreeVal.of(values[n])
        if not any(isinstance(s, (TrueN, TruePred)) for s in _nodes(u[n], u)):
            assert lv == 0


def _nodes(s, u):
    # bare names stand for their content, so follow them
    yield s
    if isinstance(s, SName):
        yield from _nodes(u[s.name], u)
    for attr in ("arg", "left", "right"):
        if hasattr(s, attr):
            yield from _nodes(getattr(s, attr), u)


# --------------------------------------------------------------- files

def test_parse_universe():
    u = parse_universe(
        "# comment\n"
        "sent a := atom(p, T)\n"
        "sent b := ~true(a) | true_2(a) & a\n"
    )
    assert u["a"] == BaseAtom("p", True)
    assert u["b"] == TOr(TNot(TruePred("a")), TAnd(TrueN(2, "a"), SName("a")))


@pytest.mark.parametrize(
    "text, line",
    [
        ("sent a := atom(p, X)\n", 1),
        ("sent a := atom(p, T)\nsent a := atom(q, F)\n", 2),
        ("sentence a := true(a)\n", 1),
        ("sent a := true(a\n", 1),
    ],
)
def test_parse_universe_errors(text, line):
    with pytest.raises(ParseError) as info:
        parse_universe(text)
    assert info.value.line == line


def test_parse_universe_unbound():
    with pytest.raises(UniverseError):
        parse_universe("sent a := true(b)\n")


def test_bundled_universes():
    liar = truth_report(load_universe(BUNDLED_UNIVERSES / "liar.tu"))
    assert liar["liar"]["value"] == "U" and liar["liar"]["grounded"] is False
    chain = truth_report(load_universe(BUNDLED_UNIVERSES / "grounded_chain.tu"))
    assert max(r["stage"] for r in chain.values()) == 2
    base = truth_report(load_universe(BUNDLED_UNIVERSES / "base_atom.tu"))
    assert all(r["grounded"] and r["stage"] == 1 for r in base.values())
    tarski = truth_report(load_universe(BUNDLED_UNIVERSES / "tarski.tu"), "tarski")
    assert tarski["c"]["tarski_level"] is None
    assert tarski["b"] == {"value": "T", "grounded": True, "stage": 2, "tarski_level": 1}


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10**6))
def test_report_deterministic(seed):
    u = random_universe(random.Random(seed), 6)
    assert truth_report(u) == truth_report(dict(reversed(list(u.items()))))
