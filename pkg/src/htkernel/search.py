"""Bounded forward-chaining saturation.

Facts are kept per hypothesis context (a set of at most ``hyp_levels``
assumed formulas).  Every round applies the enabled rules inside each
context; ``impI`` and ``orE`` read facts from the larger contexts that add
the discharged hypothesis.  Results outside the universe are dropped, so the
search always terminates.  Each fact records how it was obtained, and any
derived theorem can be replayed as a proof script that the kernel accepts.

Absence of a formula from the result only means "not derivable within these
bounds".
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional

from .formula import (
    FALSUM,
    And,
    DefEnv,
    Formula,
    Imp,
    Name,
    Or,
    Prov,
    children,
    defeq,
    neg,
    quote_depth,
    size,
    sort_key,
)
from .kernel import (
    DEF_BOUND,
    SCHEMES,
    LogicConfig,
    ProofScript,
    ProofStep,
    Sequent,
    instantiate_axiom,
    match_scheme,
)

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SearchBounds:
    quote_depth: int = 2
    formula_size: int = 16
    iterations: int = 64
    hyp_levels: int = 2

    def __post_init__(self):
        for name in ("quote_depth", "formula_size", "iterations", "hyp_levels"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")

    def fits(self, f: Formula) -> bool:
        return size(f) <= self.formula_size and quote_depth(f) <= self.quote_depth


def build_universe(seeds: Iterable[Formula], env: Mapping[str, Formula],
                   b: SearchBounds) -> tuple:
    """Candidate formulas for saturation, sorted by (size, text).

    Subformulas of the seeds and of every reachable definition body, then
    one negation of each, then ``Prov`` wrappings up to ``b.quote_depth``;
    anything larger than ``b.formula_size`` is dropped.
    """
    closure: set = set()
    stack = list(seeds)
    while stack:
        f = stack.pop()
        if f in closure:
            continue
        closure.add(f)
        stack.extend(children(f))
        if isinstance(f, Name):
            stack.append(env[f.id])
    base = {f for f in closure if b.fits(f)}
    if not base:
        return ()

    grown = set(base)
    for f in base:
        g = neg(f)
        if b.fits(g):
            grown.add(g)
            grown.add(FALSUM)
    for f in list(grown):
        g = Prov(f)
        while b.fits(g):
            grown.add(g)
            g = Prov(g)
    return tuple(sorted(grown, key=sort_key))


@dataclass(frozen=True)
class _Just:
    rule: str
    premises: tuple = ()  # ((context, formula), ...)
    scheme: Optional[str] = None
    subst: tuple = ()  # sorted (var, formula) pairs
    extra: object = None  # discharged formula / projection side


@dataclass
class SaturationResult:
    derived: frozenset
    rounds_used: int
    saturated: bool
    witness: dict = field(default_factory=dict)  # Formula -> tuple of ProofStep
    universe: tuple = ()
    _sat: object = field(default=None, repr=False, compare=False)

    def sorted_derived(self) -> list:
        return sorted(self.derived, key=sort_key)

    def to_dict(self, queries: Iterable[Formula] = ()) -> dict:
        return {
            "derived": [str(f) for f in self.sorted_derived()],
            "saturated": self.saturated,
            "rounds_used": self.rounds_used,
            "contains": {str(q): q in self.derived for q in queries},
        }


EMPTY = frozenset()


class _Saturator:
    def __init__(self, universe, config: LogicConfig, env, b: SearchBounds):
        self.universe = tuple(universe)
        self.inU = set(self.universe)
        self.config = config
        self.env = env
        self.b = b
        self.facts: dict[frozenset, dict] = {}
        self.order: list = []

        U = self.universe
        self.ands = [f for f in U if isinstance(f, And)]
        self.ors = [f for f in U if isinstance(f, Or)]
        self.imps = [f for f in U if isinstance(f, Imp)]
        self.prov_and = [f for f in U if isinstance(f, Prov) and isinstance(f.quoted, And)]
        self.prov_or = [f for f in U if isinstance(f, Prov) and isinstance(f.quoted, Or)]
        self.split_on = [f.left for f in self.imps if f.right == FALSUM]
        self.defeq_nbrs = {
            f: [g for g in U if g != f and defeq(f, g, env, DEF_BOUND)] for f in U
        }
        self.axioms = []
        for f in U:
            for scheme in SCHEMES:
                if not self._scheme_on(scheme):
                    continue
                m = match_scheme(scheme, f)
                if m is not None:
                    self.axioms.append((f, _Just("ax", scheme=scheme, subst=tuple(sorted(m.items())))))
            if (config.excluded_middle and isinstance(f, Or)
                    and f.right == neg(f.left)):
                self.axioms.append((f, _Just("lem")))
        self.context(EMPTY)

    def _scheme_on(self, scheme):
        return self.config.reflection if scheme == "Refl" else self.config.prov_axioms

    def context(self, hyps: frozenset) -> Optional[dict]:
        if len(hyps) > self.b.hyp_levels:
            return None
        if hyps not in self.facts:
            self.facts[hyps] = {}
            self.order.append(hyps)
            self.order.sort(key=lambda h: (len(h), sorted(map(sort_key, h))))
            self.grew = True
        return self.facts[hyps]

    def run(self) -> tuple[int, bool]:
        rounds = 0
        while rounds < self.b.iterations:
            rounds += 1
            self.grew = False
            for hyps in list(self.order):
                self._round(hyps)
            log.debug("round %d: %d contexts, %d theorems", rounds, len(self.facts),
                      len(self.facts[EMPTY]))
            if not self.grew:
                return rounds, True
        return rounds, False

    def _round(self, H: frozenset) -> None:
        F = self.facts[H]
        cfg = self.config

        def add(f, just):
            if f in self.inU and f not in F:
                F[f] = just
                self.grew = True

        def sub(extra):
            return self.context(H | {extra})

        for S in self.order:
            if S < H:
                for f in self.facts[S]:
                    add(f, _Just("inherit", ((S, f),)))
        for a in sorted(H, key=sort_key):
            add(a, _Just("hyp"))
        for f, just in self.axioms:
            add(f, just)

        snapshot = list(F)
        for r in self.ands:
            if r.left in F and r.right in F:
                add(r, _Just("andI", ((H, r.left), (H, r.right))))
        for r in self.ors:
            if r.left in F:
                add(r, _Just("orI1", ((H, r.left),)))
            elif r.right in F:
                add(r, _Just("orI2", ((H, r.right),)))
        for f in snapshot:
            if isinstance(f, And):
                add(f.left, _Just("andE1", ((H, f),)))
                add(f.right, _Just("andE2", ((H, f),)))
            elif isinstance(f, Imp) and f.left in F:
                add(f.right, _Just("impE", ((H, f.left), (H, f))))
            for g in self.defeq_nbrs[f]:
                add(g, _Just("def", ((H, f),)))
        if cfg.ex_falso and FALSUM in F:
            for g in self.universe:
                add(g, _Just("efq", ((H, FALSUM),)))

        if cfg.prov_axioms:
            self._prov_rules(H, F, add, snapshot)
        if cfg.reflection:
            for f in snapshot:
                if isinstance(f, Prov):
                    add(f.quoted, _mp("Refl", {"A": f.quoted}, (H, f)))

        for r in self.imps:
            a = r.left
            if a in H:
                if r.right in F:
                    add(r, _Just("impI", ((H, r.right),), extra=a))
                continue
            G = sub(a)
            if G is not None and r.right in G:
                add(r, _Just("impI", ((H | {a}, r.right),), extra=a))

        for f in list(F):
            if not isinstance(f, Or):
                continue
            Ha, Hb = H | {f.left}, H | {f.right}
            Ga, Gb = self.context(Ha), self.context(Hb)
            if Ga is None or Gb is None:
                continue
            for c in list(Ga):
                if c in Gb:
                    add(c, _Just("orE", ((H, f), (Ha, c), (Hb, c))))

        if cfg.excluded_middle:
            for a in self.split_on:
                Ha, Hn = H | {a}, H | {neg(a)}
                Ga, Gn = self.context(Ha), self.context(Hn)
                if Ga is None or Gn is None:
                    continue
                for c in list(Ga):
                    if c in Gn:
                        add(c, _Just("lemE", ((Ha, c), (Hn, c)), extra=a))

    def _prov_rules(self, H, F, add, snapshot):
        for f in snapshot:
            if Prov(f) in self.inU:
                add(Prov(f), _mp("S1", {"A": f}, (H, f)))
        for r in self.prov_and:
            a, b = r.quoted.left, r.quoted.right
            if Prov(a) in F and Prov(b) in F:
                add(r, _mp("S2a", {"A": a, "B": b}, (H, Prov(a)), (H, Prov(b))))
        for r in self.prov_or:
            a, b = r.quoted.left, r.quoted.right
            if Prov(a) in F:
                add(r, _mp("S3", {"A": a, "B": b}, (H, Prov(a)), extra=1))
            elif Prov(b) in F:
                add(r, _mp("S3", {"A": a, "B": b}, (H, Prov(b)), extra=2))
        prov_imps = [f for f in snapshot if isinstance(f, Prov) and isinstance(f.quoted, Imp)]
        for f in snapshot:
            if not isinstance(f, Prov):
                continue
            q = f.quoted
            if isinstance(q, And):
                s = {"A": q.left, "B": q.right}
                conj = And(Prov(q.left), Prov(q.right))
                add(conj, _mp("S2b", s, (H, f)))
                add(Prov(q.left), _mp("S2b", s, (H, f), extra=1))
                add(Prov(q.right), _mp("S2b", s, (H, f), extra=2))
            elif isinstance(q, Or):
                for g in prov_imps:
                    if g.quoted.left != q.left:
                        continue
                    c = g.quoted.right
                    third = Prov(Imp(q.right, c))
                    if third in F and Prov(c) in self.inU:
                        add(Prov(c), _mp("S4", {"A": q.left, "B": q.right, "C": c},
                                         (H, f), (H, g), (H, third)))
            elif isinstance(q, Imp) and Prov(q.left) in F:
                add(Prov(q.right), _mp("S5", {"A": q.left, "B": q.right},
                                       (H, Prov(q.left)), (H, f)))


def _mp(scheme, subst, *premises, extra=None):
    """Axiom instance used directly by modus ponens."""
    return _Just("axmp", tuple(premises), scheme, tuple(sorted(subst.items())), extra)


class _Replay:
    """Turns recorded justifications into kernel proof steps."""

    def __init__(self, sat: _Saturator):
        self.sat = sat
        self.steps: list[ProofStep] = []
        self.memo: dict = {}
        self.assumed: dict = {}

    def emit(self, rule, formula, premises=(), subst=None, discharge=()):
        idx = len(self.steps) + 1
        self.steps.append(ProofStep(idx, rule, tuple(premises), formula,
                                    subst=dict(subst or {}), discharge=tuple(discharge)))
        return idx

    def assume(self, f):
        if f not in self.assumed:
            self.assumed[f] = self.emit("hyp", f)
        return self.assumed[f]

    def build(self, ctx, f) -> int:
        key = (ctx, f)
        if key not in self.memo:
            self.memo[key] = self._build(ctx, f, self.sat.facts[ctx][f])
        return self.memo[key]

    def _build(self, ctx, f, j: _Just) -> int:
        prem = lambda: [self.build(c, g) for c, g in j.premises]  # noqa: E731
        if j.rule == "inherit":
            return self.build(*j.premises[0])
        if j.rule == "hyp":
            return self.assume(f)
        if j.rule == "ax":
            return self.emit("ax" + j.scheme, f, subst=j.subst)
        if j.rule == "lem":
            return self.emit("lem", f)
        if j.rule in ("andI", "andE1", "andE2", "orI1", "orI2", "impE", "def", "efq"):
            return self.emit(j.rule, f, prem())
        if j.rule == "impI":
            p = prem()
            return self.emit("impI", f, p, discharge=[self.assume(j.extra)])
        if j.rule == "orE":
            p = prem()
            major = j.premises[0][1]
            return self.emit("orE", f, p, discharge=[self.assume(major.left), self.assume(major.right)])
        if j.rule == "lemE":
            a = j.extra
            split = self.emit("lem", Or(a, neg(a)))
            p = prem()
            return self.emit("orE", f, [split, *p], discharge=[self.assume(a), self.assume(neg(a))])
        if j.rule == "axmp":
            return self._axmp(f, j, prem())
        raise AssertionError(j.rule)

    def _axmp(self, f, j: _Just, p: list) -> int:
        inst = instantiate_axiom(j.scheme, dict(j.subst))
        ax = self.emit("ax" + j.scheme, inst, subst=j.subst)
        ant = inst.left
        if j.scheme in ("S2a", "S5"):
            arg = self.emit("andI", ant, p)
        elif j.scheme == "S4":
            inner = self.emit("andI", ant.left, p[:2])
            arg = self.emit("andI", ant, [inner, p[2]])
        elif j.scheme == "S3":
            arg = self.emit("orI1" if j.extra == 1 else "orI2", ant, p)
        else:
            arg = p[0]
        out = self.emit("impE", inst.right, [arg, ax])
        if j.scheme == "S2b" and j.extra:
            out = self.emit("andE1" if j.extra == 1 else "andE2", f, [out])
        return out


def saturate(universe: Iterable[Formula], config: LogicConfig, env: DefEnv,
             b: SearchBounds = SearchBounds(), witnesses: bool = True) -> SaturationResult:
    sat = _Saturator(universe, config, env, b)
    rounds, done = sat.run()
    derived = frozenset(sat.facts[EMPTY])
    result = SaturationResult(derived, rounds, done, universe=sat.universe, _sat=sat)
    if witnesses:
        for f in result.sorted_derived():
            result.witness[f] = _replay(sat, f)
    return result


def _replay(sat: _Saturator, f: Formula) -> tuple:
    r = _Replay(sat)
    r.build(EMPTY, f)
    return tuple(r.steps)


def script_for(result: SaturationResult, f: Formula) -> Optional[ProofScript]:
    if f not in result.derived:
        return None
    sat = result._sat
    steps = result.witness.get(f) or _replay(sat, f)
    return ProofScript(sat.env, sat.config, Sequent((), f), steps)


def prove_bounded(goal: Formula, config: LogicConfig, env: DefEnv,
                  b: SearchBounds = SearchBounds(), seeds: Iterable[Formula] = ()) -> Optional[ProofScript]:
    universe = build_universe([*seeds, goal], env, b)
    if goal not in universe:
        return None
    result = saturate(universe, config, env, b, witnesses=False)
    return script_for(result, goal)
