"""Truth over finite sentence universes: Kripke's least fixed point under the
strong Kleene scheme, and Tarski's hierarchy of indexed truth predicates.

Sentences refer to each other by name.  ``true(s)`` reads the current stage
value of ``s``; ``true_n(s)`` is the level-``n`` Tarski predicate.  A bare
name ``s`` stands for the content of sentence ``s`` and must not form cycles.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Optional, Union

from .formula import ParseError


class ThreeVal(enum.Enum):
    T = "T"
    F = "F"
    U = "U"

    def __invert__(self):
        return {ThreeVal.T: ThreeVal.F, ThreeVal.F: ThreeVal.T}.get(self, ThreeVal.U)

    def __and__(self, other):
        if ThreeVal.F in (self, other):
            return ThreeVal.F
        if ThreeVal.U in (self, other):
            return ThreeVal.U
        return ThreeVal.T

    def __or__(self, other):
        if ThreeVal.T in (self, other):
            return ThreeVal.T
        if ThreeVal.U in (self, other):
            return ThreeVal.U
        return ThreeVal.F

    @classmethod
    def of(cls, b: bool) -> "ThreeVal":
        return cls.T if b else cls.F

    def leq(self, other: "ThreeVal") -> bool:
        """Information order: U below both T and F."""
        return self is ThreeVal.U or self is other


@dataclass(frozen=True)
class BaseAtom:
    name: str
    value: bool


@dataclass(frozen=True)
class TNot:
    arg: "TSentence"


@dataclass(frozen=True)
class TAnd:
    left: "TSentence"
    right: "TSentence"


@dataclass(frozen=True)
class TOr:
    left: "TSentence"
    right: "TSentence"


@dataclass(frozen=True)
class TruePred:
    target: str


@dataclass(frozen=True)
class TrueN:
    level: int
    target: str


@dataclass(frozen=True)
class SName:
    name: str


TSentence = Union[BaseAtom, TNot, TAnd, TOr, TruePred, TrueN, SName]


class UniverseError(ValueError):
    pass


def _parts(s: TSentence) -> tuple:
    if isinstance(s, TNot):
        return (s.arg,)
    if isinstance(s, (TAnd, TOr)):
        return (s.left, s.right)
    return ()


def _refs(s: TSentence):
    stack = [s]
    while stack:
        x = stack.pop()
        if isinstance(x, (TruePred, TrueN)):
            yield x.target
        elif isinstance(x, SName):
            yield x.name
        stack.extend(_parts(x))


def _content_refs(s: TSentence):
    stack = [s]
    while stack:
        x = stack.pop()
        if isinstance(x, SName):
            yield x.name
        stack.extend(_parts(x))


def validate(u: Mapping[str, TSentence]) -> None:
    for name, body in u.items():
        for ref in _refs(body):
            if ref not in u:
                raise UniverseError(f"unbound name {ref!r} in sentence {name!r}")
    # bare-name references are inlined, so they must be acyclic
    state: dict[str, int] = {}

    def visit(n, path):
        if state.get(n) == 2:
            return
        if state.get(n) == 1:
            raise UniverseError("circular name reference: " + " -> ".join(path + [n]))
        state[n] = 1
        for ref in _content_refs(u[n]):
            visit(ref, path + [n])
        state[n] = 2

    for n in u:
        visit(n, [])


# ------------------------------------------------------------------ Kripke

Valuation = dict


def _kleene(s: TSentence, v: Mapping[str, ThreeVal], u: Mapping[str, TSentence]) -> ThreeVal:
    if isinstance(s, BaseAtom):
        return ThreeVal.of(s.value)
    if isinstance(s, TNot):
        return ~_kleene(s.arg, v, u)
    if isinstance(s, TAnd):
        return _kleene(s.left, v, u) & _kleene(s.right, v, u)
    if isinstance(s, TOr):
        return _kleene(s.left, v, u) | _kleene(s.right, v, u)
    if isinstance(s, (TruePred, TrueN)):
        return v[s.target]
    if isinstance(s, SName):
        return _kleene(u[s.name], v, u)
    raise TypeError(f"not a sentence: {s!r}")


def kripke_stages(u: Mapping[str, TSentence]) -> list[dict[str, ThreeVal]]:
    """Valuations from the all-U start up to and including the least fixed point.

    Every stage is computed from the previous one simultaneously, so the
    result does not depend on evaluation order.  Indexed predicates
    ``true_n`` are read as the single predicate ``true``.
    """
    validate(u)
    v = {n: ThreeVal.U for n in u}
    stages = [v]
    while True:
        nxt = {n: _kleene(body, v, u) for n, body in u.items()}
        if nxt == v:
            return stages
        stages.append(nxt)
        v = nxt


def kripke_fixpoint(u: Mapping[str, TSentence]) -> tuple[dict[str, ThreeVal], int]:
    stages = kripke_stages(u)
    return stages[-1], len(stages) - 1


@dataclass(frozen=True)
class Grounded:
    value: ThreeVal
    stage: int


@dataclass(frozen=True)
class Ungrounded:
    pass


def classify_grounded(u: Mapping[str, TSentence], name: str) -> Grounded | Ungrounded:
    if name not in u:
        raise UniverseError(f"unbound name {name!r}")
    stages = kripke_stages(u)
    for i, v in enumerate(stages):
        if v[name] is not ThreeVal.U:
            return Grounded(v[name], i)
    return Ungrounded()


# ------------------------------------------------------------------ Tarski

def tarski_levels(u: Mapping[str, TSentence]) -> tuple[dict[str, Optional[int]], dict[str, Optional[bool]]]:
    """Least Tarski level of each sentence and its classical value.

    The level of a sentence is the largest ``n`` among the ``true_n`` it
    contains (0 when none); ``true_n(s)`` is well formed only when ``s`` sits
    strictly below level ``n``.  Ill-formed sentences, and those using the
    unindexed ``true``, get ``None``.
    """
    validate(u)
    levels: dict[str, Optional[int]] = {}
    visiting: set[str] = set()

    def expr_level(s) -> Optional[int]:
        if isinstance(s, BaseAtom):
            return 0
        if isinstance(s, TruePred):
            return None
        if isinstance(s, SName):
            return level(s.name)
        if isinstance(s, TrueN):
            inner = level(s.target)
            if inner is None or inner >= s.level:
                return None
            return s.level
        out = 0
        for p in _parts(s):
            lv = expr_level(p)
            if lv is None:
                return None
            out = max(out, lv)
        return out

    def level(n: str) -> Optional[int]:
        if n in levels:
            return levels[n]
        if n in visiting:
            return None
        visiting.add(n)
        lv = expr_level(u[n])
        visiting.discard(n)
        levels[n] = lv
        return lv

    for n in u:
        level(n)

    values: dict[str, Optional[bool]] = {}

    def classical(s) -> bool:
        if isinstance(s, BaseAtom):
            return s.value
        if isinstance(s, TNot):
            return not classical(s.arg)
        if isinstance(s, TAnd):
            return classical(s.left) and classical(s.right)
        if isinstance(s, TOr):
            return classical(s.left) or classical(s.right)
        if isinstance(s, TrueN):
            return value(s.target)
        if isinstance(s, SName):
            return value(s.name)
        raise TypeError(f"no classical value for {s!r}")

    def value(n: str) -> bool:
        if n not in values:
            values[n] = classical(u[n])
        return values[n]

    for n in u:
        values[n] = value(n) if levels[n] is not None else None
    return {n: levels[n] for n in u}, {n: values[n] for n in u}


def untiered(u: Mapping[str, TSentence]) -> dict[str, TSentence]:
    """Replace every ``true_n`` by the single predicate ``true``."""

    def go(s):
        if isinstance(s, TrueN):
            return TruePred(s.target)
        if isinstance(s, TNot):
            return TNot(go(s.arg))
        if isinstance(s, (TAnd, TOr)):
            return type(s)(go(s.left), go(s.right))
        return s

    return {n: go(s) for n, s in u.items()}


# ------------------------------------------------------------ file format

_TOK = re.compile(r"[A-Za-z][A-Za-z0-9_']*|[~&|(),]")
_LINE = re.compile(r"^\s*sent\s+([A-Za-z][A-Za-z0-9_']*)\s*:=\s*(.*?)\s*$")
_KEYWORDS = re.compile(r"^(true|atom|true_\d+)$")


def parse_tsentence(text: str, line: int = 1, column: int = 1) -> TSentence:
    tokens = []
    pos = 0
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            break
        m = _TOK.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, column + pos)
        tokens.append((m.group(), column + pos))
        pos = m.end()
    tokens.append(("", column + len(text)))
    i = 0

    def peek():
        return tokens[i][0]

    def take(value=None):
        nonlocal i
        tok, col = tokens[i]
        if value is not None and tok != value:
            raise ParseError(f"expected {value!r}, found {tok or 'end of input'!r}", line, col)
        i += 1
        return tok, col

    def name():
        tok, col = take()
        if not re.match(r"[A-Za-z]", tok or " ") or _KEYWORDS.match(tok):
            raise ParseError(f"expected a sentence name, found {tok or 'end of input'!r}", line, col)
        return tok

    def disj():
        s = conj()
        while peek() == "|":
            take()
            s = TOr(s, conj())
        return s

    def conj():
        s = unary()
        while peek() == "&":
            take()
            s = TAnd(s, unary())
        return s

    def unary():
        tok, col = tokens[i]
        if tok == "~":
            take()
            return TNot(unary())
        if tok == "(":
            take()
            s = disj()
            take(")")
            return s
        if tok == "true":
            take()
            take("(")
            target = name()
            take(")")
            return TruePred(target)
        m = re.fullmatch(r"true_(\d+)", tok)
        if m:
            take()
            take("(")
            target = name()
            take(")")
            return TrueN(int(m.group(1)), target)
        if tok == "atom":
            take()
            take("(")
            atom = name()
            take(",")
            val, vcol = take()
            if val not in ("T", "F"):
                raise ParseError(f"atom value must be T or F, found {val!r}", line, vcol)
            take(")")
            return BaseAtom(atom, val == "T")
        return SName(name())

    s = disj()
    if peek() != "":
        raise ParseError(f"unexpected {peek()!r}", line, tokens[i][1])
    return s


def parse_universe(text: str) -> dict[str, TSentence]:
    u: dict[str, TSentence] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        m = _LINE.match(raw)
        if m is None:
            raise ParseError("expected 'sent NAME := ...'", lineno, 1)
        if m.group(1) in u:
            raise ParseError(f"duplicate sentence {m.group(1)}", lineno, m.start(1) + 1)
        u[m.group(1)] = parse_tsentence(m.group(2), lineno, m.start(2) + 1)
    validate(u)
    return u


def load_universe(path: str | Path) -> dict[str, TSentence]:
    return parse_universe(Path(path).read_text(encoding="utf-8"))


def truth_report(u: Mapping[str, TSentence], mode: str = "kripke") -> dict:
    """Per-sentence report: value, grounded, stage, tarski_level.

    In kripke mode ``value`` is the least-fixed-point value; in tarski mode it
    is the classical value of leveled sentences and ``U`` for the rest.
    """
    if mode not in ("kripke", "tarski"):
        raise ValueError(f"unknown mode {mode!r}")
    stages = kripke_stages(u)
    final = stages[-1]
    levels, values = tarski_levels(u)
    out = {}
    for n in sorted(u):
        stage = next((i for i, v in enumerate(stages) if v[n] is not ThreeVal.U), None)
        if mode == "kripke":
            value = final[n].value
        else:
            value = "U" if values[n] is None else ThreeVal.of(values[n]).value
        out[n] = {
            "value": value,
            "grounded": final[n] is not ThreeVal.U,
            "stage": stage,
            "tarski_level": levels[n],
        }
    return out
