"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line."""

import random
import time

import pytest

from conftest import LIAR_SEEDS, formulas_up_to
from htkernel import BUNDLED_SCRIPTS
from htkernel.formula import FALSUM, Atom, Name, encode, parse_formula, print_formula
from htkernel.kernel import CLASSICAL, HT, check_script
from htkernel.scriptfile import load_script
from htkernel.search import SearchBounds, build_universe, saturate
from htkernel.truth import (
    BaseAtom,
    Grounded,
    ThreeVal,
    TNot,
    TrueN,
    TruePred,
    Ungrounded,
    classify_grounded,
    kripke_fixpoint,
    kripke_stages,
    tarski_levels,
    untiered,
)
from scriptgen import classically_valid, random_script
from test_truth import random_universe, stratified_universe


@pytest.fixture
def report(capsys):
    def emit(criterion, ok, detail=""):
        with capsys.disabled():
            print(f"\n{'PASS' if ok else 'FAIL'}  {criterion}" + (f"  ({detail})" if detail else ""))
        assert ok, f"{criterion}: {detail}"

    return emit


def _load(name):
    return load_script(BUNDLED_SCRIPTS / name).script


def test_liar_entails_prov_contradiction(report):
    t0 = time.perf_counter()
    s = _load("liar_entails_prov_contradiction.ht")
    result = check_script(s)
    ms = (time.perf_counter() - t0) * 1000
    ok = (result.ok and str(result.goal) == "|- L -> Prov(#0=1#)" and s.config == HT
          and print_formula(s.env["L"]) == "Prov(#~L#)" and ms < 100)
    report("liar_entails_prov_contradiction.ht checks OK under HT in < 100 ms", ok, f"{ms:.1f} ms")


def test_liar_double_negation(report):
    result = check_script(_load("liar_double_negation.ht"))
    report("liar_double_negation.ht proves |- ~~L", result.ok and str(result.goal) == "|- ~~L")


def test_liar2_scripts(report):
    a = check_script(_load("liar2_negation.ht"))
    b = check_script(_load("liar2_double_negation_prov.ht"))
    ok = a.ok and b.ok and str(a.goal) == "|- ~L2" and str(b.goal) == "|- ~~Prov(#L2#)"
    report("L2 = ~Prov(#L2#): |- ~L2 and |- ~~Prov(#L2#) check OK", ok)


def _gated(name, rule, toggle, goal):
    s = _load(name)
    on = check_script(s)
    off = check_script(s.with_config(s.config.replace(**{toggle: False})))
    at = next(st.index for st in s.steps if st.rule == rule)
    return (on.ok and str(on.goal) == goal and getattr(s.config, toggle) and off.status == "Rejected"
            and off.error.step == at and off.error.kind == "rule-disabled"), f"rejected at step {off.error.step}"


def test_reflection_inconsistency(report):
    ok, detail = _gated("reflection_inconsistency.ht", "axRefl", "reflection", "|- 0=1")
    report("reflection_inconsistency.ht proves |- 0=1 with reflection; rule-disabled at axRefl without", ok, detail)


def test_lem_proves_prov_falsum(report):
    ok, detail = _gated("lem_proves_prov_falsum.ht", "lem", "excluded_middle", "|- Prov(#0=1#)")
    report("lem_proves_prov_falsum.ht proves |- Prov(#0=1#) with LEM; rule-disabled at lem without", ok, detail)


def test_liar_saturation(report, liar_env):
    t0 = time.perf_counter()
    seeds = [parse_formula(t, liar_env) for t in LIAR_SEEDS]
    b = SearchBounds(quote_depth=2, formula_size=16)
    result = saturate(build_universe(seeds, liar_env, b), HT, liar_env, b)
    secs = time.perf_counter() - t0
    d = result.derived
    ok = (result.saturated and parse_formula("~~L", liar_env) in d
          and parse_formula("L -> Prov(#0=1#)", liar_env) in d
          and FALSUM not in d and parse_formula("Prov(#0=1#)") not in d and secs < 10)
    report("HT saturation of the liar universe: fixpoint, has ~~L and L -> Prov(#0=1#), "
           "lacks 0=1 and Prov(#0=1#), < 10 s", ok,
           f"{len(d)} theorems, {result.rounds_used} rounds, {secs:.2f} s")


def test_kernel_vs_truth_tables(report):
    bad, rejected = [], []
    for seed in range(200):
        s = random_script(seed, CLASSICAL)
        if not check_script(s).ok:
            rejected.append(seed)
        elif not classically_valid(s.goal):
            bad.append(seed)
    report("200 random Prov-free scripts OK under classical config have valid goals",
           not bad and not rejected, f"{len(bad)} counterexamples, {len(rejected)} rejected")


def test_round_trip_and_injectivity(report):
    leaves = (Atom("A"), Atom("B"), Name("L"), FALSUM)
    count = failures = 0
    for f in formulas_up_to(8, leaves):
        count += 1
        if parse_formula(print_formula(f), ["L"]) != f:
            failures += 1
    codes = {}
    collisions = 0
    for f in formulas_up_to(5, (Atom("A"), Atom("B"), FALSUM)):
        c = encode(f)
        if codes.setdefault(c, f) != f:
            collisions += 1
    report("parse(print(f)) = f for all formulas of size <= 8; no encode collisions up to size 5",
           failures == 0 and collisions == 0,
           f"{count} round trips, {failures} failures; {len(codes)} codes, {collisions} collisions")


def test_kripke_suite(report):
    liar = {"liar": TNot(TruePred("liar"))}
    tt = {"tt": TruePred("tt")}
    chain = {"s": BaseAtom("p", True), "t": TruePred("s")}
    ok = (kripke_fixpoint(liar)[0]["liar"] is ThreeVal.U
          and classify_grounded(liar, "liar") == Ungrounded()
          and kripke_fixpoint(tt)[0]["tt"] is ThreeVal.U
          and kripke_fixpoint(chain) == ({"s": ThreeVal.T, "t": ThreeVal.T}, 2)
          and classify_grounded(chain, "t") == Grounded(ThreeVal.T, 2))
    violations = 0
    for seed in range(100):
        rng = random.Random(seed)
        u = random_universe(rng, rng.randint(1, 12))
        stages = kripke_stages(u)
        if len(stages) - 1 > len(u) + 1:
            violations += 1
        for before, after in zip(stages, stages[1:]):
            violations += sum(not before[n].leq(after[n]) for n in u)
    report("Kripke: liar and truth-teller U, chain grounded at stage 2, monotone and "
           "within |u|+1 stages on 100 random universes", ok and violations == 0,
           f"{violations} violations")


def test_tarski_suite(report):
    base = tarski_levels({"a": BaseAtom("p", True)})
    leveled = tarski_levels({"a": BaseAtom("p", True), "b": TrueN(1, "a")})
    selfref = tarski_levels({"c": TrueN(1, "c")})
    ok = (base == ({"a": 0}, {"a": True}) and leveled[0]["b"] == 1 and leveled[1]["b"] is True
          and selfref[0]["c"] is None)
    mismatches = 0
    for seed in range(100):
        rng = random.Random(seed)
        u = stratified_universe(rng, rng.randint(1, 10))
        levels, values = tarski_levels(u)
        v, _ = kripke_fixpoint(untiered(u))
        for n in u:
            if levels[n] is None or v[n] is not ThreeVal.of(values[n]):
                mismatches += 1
    report("Tarski: predicate-free level 0, stratified levels finite and matching Kripke, "
           "self-applied true_1 has no level", ok and mismatches == 0, f"{mismatches} mismatches")
