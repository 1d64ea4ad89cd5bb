"""Natural-deduction proof checker for minimal logic plus provability axioms.

Each step of a script derives a sequent ``hyps |- formula``.  Premises are
cited by step index; hypotheses are tracked as formula sets, and ``impI`` /
``orE`` discharge the hypotheses named by their ``discharge`` annotations.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional

from .formula import (
    FALSUM,
    And,
    DefEnv,
    Falsum,
    Formula,
    Imp,
    Or,
    Prov,
    children,
    defeq,
    map_children,
    print_formula,
)

DEF_BOUND = 2


@dataclass(frozen=True)
class LogicConfig:
    ex_falso: bool = False
    excluded_middle: bool = False
    reflection: bool = False
    prov_axioms: bool = False

    FLAGS = ("ex_falso", "excluded_middle", "reflection", "prov_axioms")

    def toggles(self) -> frozenset[str]:
        return frozenset(f for f in self.FLAGS if getattr(self, f))

    def __le__(self, other: "LogicConfig") -> bool:
        return self.toggles() <= other.toggles()

    def replace(self, **overrides) -> "LogicConfig":
        return dataclasses.replace(self, **{k: v for k, v in overrides.items() if v is not None})

    def to_dict(self) -> dict:
        return {f: getattr(self, f) for f in self.FLAGS}

    def header(self) -> str:
        return "config " + " ".join(f"{f}={str(getattr(self, f)).lower()}" for f in self.FLAGS)


MINIMAL = LogicConfig()
INTUITIONISTIC = LogicConfig(ex_falso=True)
CLASSICAL = LogicConfig(ex_falso=True, excluded_middle=True)
HT = LogicConfig(prov_axioms=True)


# ---------------------------------------------------------------- axioms

@dataclass(frozen=True)
class Meta:
    """Metavariable in an axiom scheme."""

    var: str

    def __str__(self):
        return self.var


_A, _B, _C = Meta("A"), Meta("B"), Meta("C")

SCHEMES: dict[str, Formula] = {
    "S1": Imp(_A, Prov(_A)),
    "S2a": Imp(And(Prov(_A), Prov(_B)), Prov(And(_A, _B))),
    "S2b": Imp(Prov(And(_A, _B)), And(Prov(_A), Prov(_B))),
    "S3": Imp(Or(Prov(_A), Prov(_B)), Prov(Or(_A, _B))),
    "S4": Imp(And(And(Prov(Or(_A, _B)), Prov(Imp(_A, _C))), Prov(Imp(_B, _C))), Prov(_C)),
    "S5": Imp(And(Prov(_A), Prov(Imp(_A, _B))), Prov(_B)),
    "Refl": Imp(Prov(_A), _A),
}


def _metas(f) -> set[str]:
    if isinstance(f, Meta):
        return {f.var}
    out = set()
    for c in children(f):
        out |= _metas(c)
    return out


SCHEME_VARS = {name: frozenset(_metas(pat)) for name, pat in SCHEMES.items()}

AXIOM_RULES = {"ax" + name: name for name in SCHEMES}


class KernelError(Exception):
    def __init__(self, kind: str, message: str, step: Optional[int] = None,
                 expected: Optional[str] = None, actual: Optional[str] = None):
        super().__init__(f"{kind}: {message}")
        self.kind = kind
        self.message = message
        self.step = step
        self.expected = expected
        self.actual = actual

    def __eq__(self, other):
        if not isinstance(other, KernelError):
            return NotImplemented
        return self.to_dict() == other.to_dict()

    def __hash__(self):
        return hash((self.kind, self.message, self.step))

    def to_dict(self) -> dict:
        return {
            "step": self.step,
            "kind": self.kind,
            "message": self.message,
            "expected": self.expected,
            "actual": self.actual,
        }


def scheme_gate(scheme: str, config: LogicConfig) -> None:
    if scheme == "Refl":
        if not config.reflection:
            raise KernelError("rule-disabled", "reflection")
    elif not config.prov_axioms:
        raise KernelError("rule-disabled", "prov_axioms")


def instantiate_axiom(scheme: str, subst: Mapping[str, Formula],
                      config: Optional[LogicConfig] = None) -> Formula:
    """Closed instance of ``scheme``; gated by ``config`` when one is given."""
    if scheme not in SCHEMES:
        raise KernelError("unknown-rule", f"no axiom scheme {scheme}")
    if config is not None:
        scheme_gate(scheme, config)
    wanted = SCHEME_VARS[scheme]
    given = set(subst)
    if given != wanted:
        missing = sorted(wanted - given)
        extra = sorted(given - wanted)
        raise KernelError(
            "bad-subst",
            f"{scheme} needs {', '.join(sorted(wanted))}"
            + (f"; missing {', '.join(missing)}" if missing else "")
            + (f"; unexpected {', '.join(extra)}" if extra else ""),
        )

    def go(g):
        return subst[g.var] if isinstance(g, Meta) else map_children(g, go)

    return go(SCHEMES[scheme])


def match_scheme(scheme: str, f: Formula) -> Optional[dict[str, Formula]]:
    """Substitution making ``f`` an instance of ``scheme``, or None."""
    binding: dict[str, Formula] = {}

    def go(pat, g):
        if isinstance(pat, Meta):
            if pat.var in binding:
                return binding[pat.var] == g
            binding[pat.var] = g
            return True
        if type(pat) is not type(g):
            return False
        pc, gc = children(pat), children(g)
        return all(go(p, c) for p, c in zip(pc, gc))

    return binding if go(SCHEMES[scheme], f) else None


# --------------------------------------------------------------- sequents

def _dedupe(formulas: Iterable[Formula]) -> tuple:
    out = []
    for f in formulas:
        if f not in out:
            out.append(f)
    return tuple(out)


@dataclass(frozen=True)
class Sequent:
    hypotheses: tuple
    conclusion: Formula

    def __init__(self, hypotheses: Iterable[Formula], conclusion: Formula):
        object.__setattr__(self, "hypotheses", _dedupe(hypotheses))
        object.__setattr__(self, "conclusion", conclusion)

    def __str__(self):
        if not self.hypotheses:
            return f"|- {print_formula(self.conclusion)}"
        hyps = ", ".join(print_formula(h) for h in self.hypotheses)
        return f"[{hyps}] |- {print_formula(self.conclusion)}"

    def discharge(self, f: Formula) -> tuple:
        return tuple(h for h in self.hypotheses if h != f)


RULES = frozenset({
    "hyp", "andI", "andE1", "andE2", "orI1", "orI2", "orE", "impI", "impE",
    "def", "efq", "lem", *AXIOM_RULES,
})


@dataclass(frozen=True)
class ProofStep:
    index: int
    rule: str
    premises: tuple = ()
    formula: Formula = FALSUM
    note: Optional[str] = None
    subst: Mapping[str, Formula] = field(default_factory=dict)
    discharge: tuple = ()


@dataclass(frozen=True)
class ProofScript:
    env: DefEnv
    config: LogicConfig
    goal: Sequent
    steps: tuple

    def with_config(self, config: LogicConfig) -> "ProofScript":
        return dataclasses.replace(self, config=config)


# ---------------------------------------------------------------- checking

def _show(f: Formula) -> str:
    return print_formula(f)


def _mismatch(expected: Formula, actual: Formula, what: str) -> KernelError:
    return KernelError(
        "premise-mismatch",
        f"{what}: expected {_show(expected)}, got {_show(actual)}",
        expected=_show(expected),
        actual=_show(actual),
    )


def _arity(step: ProofStep, n: int) -> None:
    if len(step.premises) != n:
        raise KernelError(
            "premise-mismatch",
            f"{step.rule} takes {n} premise(s), got {len(step.premises)}",
            expected=str(n),
            actual=str(len(step.premises)),
        )


def _discharged(state: Mapping[int, Sequent], step: ProofStep, ref: int,
                hyp: Formula) -> None:
    if ref not in state or ref >= step.index:
        raise KernelError("discharge-mismatch", f"discharge {ref} is not an earlier step")
    s = state[ref]
    if s.conclusion != hyp or hyp not in s.hypotheses:
        raise KernelError(
            "discharge-mismatch",
            f"step {ref} does not assume {_show(hyp)}",
            expected=f"[{_show(hyp)}] |- {_show(hyp)}",
            actual=str(s),
        )


def check_step(state: Mapping[int, Sequent], step: ProofStep, config: LogicConfig,
               env: Mapping[str, Formula]) -> Sequent:
    """Sequent derived by ``step`` from earlier sequents in ``state``."""
    rule, F = step.rule, step.formula
    if rule not in RULES:
        raise KernelError("unknown-rule", f"no rule {rule!r}")
    for p in step.premises:
        if p >= step.index or p not in state:
            raise KernelError("bad-premise", f"premise {p} is not an earlier step",
                              expected=f"< {step.index}", actual=str(p))
    prem = [state[p] for p in step.premises]
    concl = [s.conclusion for s in prem]
    union = [h for s in prem for h in s.hypotheses]

    if rule in AXIOM_RULES:
        _arity(step, 0)
        inst = instantiate_axiom(AXIOM_RULES[rule], step.subst, config)
        if inst != F:
            raise _mismatch(inst, F, f"{rule} instance")
        return Sequent((), F)

    if step.subst:
        raise KernelError("bad-subst", f"{rule} takes no substitution")

    if rule == "hyp":
        if not step.premises:
            return Sequent((F,), F)
        _arity(step, 1)
        if F not in prem[0].hypotheses:
            raise KernelError("premise-mismatch", f"{_show(F)} is not a hypothesis of step {step.premises[0]}",
                              expected=_show(F), actual=str(prem[0]))
        return Sequent(prem[0].hypotheses, F)

    if rule == "andI":
        _arity(step, 2)
        want = And(concl[0], concl[1])
        if F != want:
            raise _mismatch(want, F, "andI conclusion")
        return Sequent(union, F)

    if rule in ("andE1", "andE2"):
        _arity(step, 1)
        c = concl[0]
        if not isinstance(c, And):
            raise KernelError("premise-mismatch", f"{rule} premise must be a conjunction",
                              expected="A & B", actual=_show(c))
        want = c.left if rule == "andE1" else c.right
        if F != want:
            raise _mismatch(want, F, f"{rule} conclusion")
        return Sequent(union, F)

    if rule in ("orI1", "orI2"):
        _arity(step, 1)
        if not isinstance(F, Or):
            raise KernelError("premise-mismatch", f"{rule} must conclude a disjunction",
                              expected="A | B", actual=_show(F))
        side = F.left if rule == "orI1" else F.right
        if side != concl[0]:
            raise _mismatch(side, concl[0], f"{rule} premise")
        return Sequent(union, F)

    if rule == "orE":
        _arity(step, 3)
        major = concl[0]
        if not isinstance(major, Or):
            raise KernelError("premise-mismatch", "orE major premise must be a disjunction",
                              expected="A | B", actual=_show(major))
        for c in concl[1:]:
            if c != F:
                raise _mismatch(F, c, "orE case")
        if len(step.discharge) != 2:
            raise KernelError("discharge-mismatch", "orE needs two discharge annotations")
        _discharged(state, step, step.discharge[0], major.left)
        _discharged(state, step, step.discharge[1], major.right)
        hyps = (prem[0].hypotheses + prem[1].discharge(major.left)
                + prem[2].discharge(major.right))
        return Sequent(hyps, F)

    if rule == "impI":
        _arity(step, 1)
        if not isinstance(F, Imp):
            raise KernelError("premise-mismatch", "impI must conclude an implication",
                              expected="A -> B", actual=_show(F))
        if concl[0] != F.right:
            raise _mismatch(F.right, concl[0], "impI premise")
        if len(step.discharge) != 1:
            raise KernelError("discharge-mismatch", "impI needs one discharge annotation")
        _discharged(state, step, step.discharge[0], F.left)
        return Sequent(prem[0].discharge(F.left), F)

    if rule == "impE":
        _arity(step, 2)
        want = Imp(concl[0], F)
        if concl[1] != want:
            raise _mismatch(want, concl[1], "impE major premise")
        return Sequent(union, F)

    if rule == "def":
        _arity(step, 1)
        if not defeq(concl[0], F, env, DEF_BOUND):
            raise KernelError(
                "premise-mismatch",
                f"{_show(F)} is not definitionally equal to {_show(concl[0])} within {DEF_BOUND} unfoldings",
                expected=_show(concl[0]),
                actual=_show(F),
            )
        return Sequent(union, F)

    if rule == "efq":
        if not config.ex_falso:
            raise KernelError("rule-disabled", "ex_falso")
        _arity(step, 1)
        if not isinstance(concl[0], Falsum):
            raise _mismatch(FALSUM, concl[0], "efq premise")
        return Sequent(union, F)

    if rule == "lem":
        if not config.excluded_middle:
            raise KernelError("rule-disabled", "excluded_middle")
        _arity(step, 0)
        if not (isinstance(F, Or) and F.right == Imp(F.left, FALSUM)):
            raise KernelError("premise-mismatch", "lem instance must read A | ~A",
                              expected="A | ~A", actual=_show(F))
        return Sequent((), F)

    raise KernelError("unknown-rule", f"no rule {rule!r}")  # pragma: no cover


@dataclass(frozen=True)
class CheckResult:
    status: str
    goal: Sequent
    sequents: tuple  # (index, rule, Sequent) per checked step
    error: Optional[KernelError] = None

    @property
    def ok(self) -> bool:
        return self.status == "OK"

    def to_dict(self) -> dict:
        out = {
            "status": self.status,
            "goal": str(self.goal),
            "steps": [{"index": i, "rule": r, "sequent": str(s)} for i, r, s in self.sequents],
        }
        if self.error is not None:
            out["error"] = self.error.to_dict()
        return out


def check_script(s: ProofScript) -> CheckResult:
    state: dict[int, Sequent] = {}
    done = []
    last = 0
    for step in s.steps:
        try:
            if step.index <= last:
                raise KernelError("bad-index", f"step {step.index} does not follow step {last}")
            seq = check_step(state, step, s.config, s.env)
        except KernelError as exc:
            exc.step = step.index
            return CheckResult("Rejected", s.goal, tuple(done), exc)
        state[step.index] = seq
        done.append((step.index, step.rule, seq))
        last = step.index

    if not done:
        return CheckResult("Rejected", s.goal, (),
                           KernelError("goal-mismatch", "script has no steps", expected=str(s.goal)))
    final = done[-1][2]
    ok = defeq(final.conclusion, s.goal.conclusion, s.env, DEF_BOUND) and all(
        any(defeq(h, g, s.env, DEF_BOUND) for g in s.goal.hypotheses) for h in final.hypotheses
    )
    if not ok:
        err = KernelError("goal-mismatch", "final sequent does not match the goal",
                          step=done[-1][0], expected=str(s.goal), actual=str(final))
        return CheckResult("Rejected", s.goal, tuple(done), err)
    return CheckResult("OK", s.goal, tuple(done))
