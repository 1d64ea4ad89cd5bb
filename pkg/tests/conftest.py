import itertools
from functools import lru_cache

import pytest
from hypothesis import strategies as st

from htkernel import BUNDLED_SCRIPTS, load_defenv
from htkernel.formula import FALSUM, And, Atom, Imp, Name, Or, Prov


@pytest.fixture(scope="session")
def liar_env():
    return load_defenv(BUNDLED_SCRIPTS / "liar.env")


@pytest.fixture(scope="session")
def liar2_env():
    return load_defenv(BUNDLED_SCRIPTS / "liar2.env")


def enumerate_formulas(n, leaves):
    """All formulas with exactly ``n`` nodes over the given leaves."""
    return _enum(n, tuple(leaves))


@lru_cache(maxsize=None)
def _enum(n, leaves):
    if n <= 0:
        return ()
    if n == 1:
        return leaves
    out = [Prov(f) for f in _enum(n - 1, leaves)]
    for k in range(1, n - 1):
        for a, b in itertools.product(_enum(k, leaves), _enum(n - 1 - k, leaves)):
            out.extend((And(a, b), Or(a, b), Imp(a, b)))
    return tuple(out)


def formulas_up_to(n, leaves):
    for k in range(1, n + 1):
        yield from enumerate_formulas(k, leaves)


def formula_strategy(leaves=(Atom("A"), Atom("B"), Name("L"), FALSUM), max_leaves=5):
    return st.recursive(
        st.sampled_from(leaves),
        lambda sub: st.one_of(
            st.builds(And, sub, sub),
            st.builds(Or, sub, sub),
            st.builds(Imp, sub, sub),
            st.builds(Prov, sub),
        ),
        max_leaves=max_leaves,
    )


LIAR_SEEDS = ("L", "L -> Prov(#0=1#)")


@pytest.fixture(scope="session")
def liar_universe(liar_env):
    from htkernel.formula import parse_formula
    from htkernel.search import SearchBounds, build_universe

    seeds = [parse_formula(t, liar_env) for t in LIAR_SEEDS]
    return build_universe(seeds, liar_env, SearchBounds(quote_depth=2, formula_size=16))
