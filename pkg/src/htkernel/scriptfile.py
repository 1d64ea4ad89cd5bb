"""Reading and writing proof-script files (``.ht``).

Layout::

    # comment; "# expect: rejected" and "# rejected-under: flag=value ..."
    # record how the script should fare under other configurations
    use liar.env
    config ex_falso=false excluded_middle=false reflection=false prov_axioms=true
    goal |- L -> Prov(#0=1#)
    1. assume : L
    2. def [1] : Prov(#~L#)
    3. axS1 : L -> Prov(#L#)  (subst A=L)
    4. impE [1, 3] : Prov(#L#)
    5. impI [4] discharge 1 : L -> Prov(#L#)  -- optional note
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .diagonal import load_defenv
from .formula import DefEnv, Formula, ParseError, parse_formula, print_formula
from .kernel import RULES, LogicConfig, ProofScript, ProofStep, Sequent

_BOOLS = {"true": True, "false": False, "1": True, "0": False, "yes": True, "no": False}


def parse_bool(text: str) -> bool:
    try:
        return _BOOLS[text.strip().lower()]
    except KeyError:
        raise ValueError(f"not a boolean: {text!r}") from None


def parse_flags(text: str, line: int = 1, column: int = 1) -> dict[str, bool]:
    flags = {}
    for m in re.finditer(r"(\S+)", text):
        item = m.group(1)
        key, eq, value = item.partition("=")
        key = key.replace("-", "_")
        if not eq or key not in LogicConfig.FLAGS:
            raise ParseError(f"bad config item {item!r}", line, column + m.start())
        try:
            flags[key] = parse_bool(value)
        except ValueError as exc:
            raise ParseError(str(exc), line, column + m.start()) from None
    return flags


def load_config(path: str | Path) -> LogicConfig:
    """Read the ``config ...`` line of a config file."""
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if not line.startswith("config"):
            raise ParseError("expected 'config ...'", lineno, 1)
        return LogicConfig(**parse_flags(line[len("config"):], lineno, len("config") + 1))
    raise ParseError("no config line", 1, 1)


def parse_sequent(text: str, names=(), line: int = 1, column: int = 1) -> Sequent:
    head, sep, tail = text.partition("|-")
    if not sep:
        raise ParseError("sequent needs '|-'", line, column)
    head = head.strip()
    hyps = []
    if head:
        if not (head.startswith("[") and head.endswith("]")):
            raise ParseError("hypotheses must be written [f1, f2]", line, column)
        inner = head[1:-1]
        offset = text.index("[") + 1
        for part in inner.split(","):
            if part.strip():
                hyps.append(parse_formula(part, names, line=line, column=column + offset))
            offset += len(part) + 1
    concl = parse_formula(tail, names, line=line, column=column + len(head) + 2)
    return Sequent(hyps, concl)


@dataclass
class ScriptFile:
    script: ProofScript
    path: Optional[Path] = None
    # (overrides, expected status) pairs read from header comments
    expectations: list = field(default_factory=list)


_STEP = re.compile(
    r"""^\s*(?P<index>\d+)\.\s+(?P<rule>[A-Za-z0-9]+)
        \s*(?:\[(?P<premises>[^\]]*)\])?
        \s*(?:discharge\s+(?P<discharge>[\d,\s]+?))?
        \s*:(?P<rest>.*)$""",
    re.VERBOSE,
)
_NOTE = re.compile(r"\s--\s?(?P<note>.*)$")


def _ints(text: str, lineno: int, col: int) -> tuple:
    try:
        return tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise ParseError(f"bad index list {text!r}", lineno, col) from None


def _split_subst(rest: str):
    # "(subst A=..., B=...)" is the last parenthesised group on the line.
    idx = rest.rfind("(subst")
    if idx < 0:
        return rest, None, 0
    tail = rest[idx:].rstrip()
    if not tail.endswith(")"):
        return rest, None, 0
    return rest[:idx], tail[len("(subst"):-1], idx + len("(subst")


def _parse_step(raw: str, lineno: int, names) -> ProofStep:
    m = _STEP.match(raw)
    if m is None:
        raise ParseError("expected '<n>. <rule> [premises] : <formula>'", lineno, 1)
    rule = m.group("rule")
    if rule == "assume":
        rule = "hyp"
    if rule not in RULES:
        raise ParseError(f"unknown rule {rule!r}", lineno, m.start("rule") + 1)
    premises = _ints(m.group("premises") or "", lineno, (m.start("premises") or 0) + 1)
    discharge = _ints(m.group("discharge") or "", lineno, (m.start("discharge") or 0) + 1)
    if m.group("rule") == "assume" and premises:
        raise ParseError("assume takes no premises", lineno, m.start("premises") + 1)

    rest = m.group("rest")
    base = m.start("rest") + 1
    note = None
    nm = _NOTE.search(rest)
    if nm is not None:
        note = nm.group("note").strip() or None
        rest = rest[: nm.start()]

    body, subst_text, subst_off = _split_subst(rest)
    subst: dict[str, Formula] = {}
    if subst_text is not None:
        offset = subst_off
        for part in subst_text.split(","):
            sm = re.match(r"\s*([A-Za-z])\s*=(.*)$", part)
            if sm is None:
                raise ParseError(f"bad substitution {part.strip()!r}", lineno, base + offset)
            var = sm.group(1)
            if var in subst:
                raise ParseError(f"duplicate substitution for {var}", lineno, base + offset)
            subst[var] = parse_formula(sm.group(2), names, line=lineno,
                                       column=base + offset + sm.start(2))
            offset += len(part) + 1
    formula = parse_formula(body, names, line=lineno, column=base)
    return ProofStep(int(m.group("index")), rule, premises, formula, note, subst, discharge)


def parse_script(text: str, base_dir: str | Path = ".", env: Optional[DefEnv] = None) -> ScriptFile:
    base_dir = Path(base_dir)
    env = env if env is not None else DefEnv()
    config = LogicConfig()
    goal = None
    steps = []
    expectations = []

    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            c = line.lstrip("#").strip()
            if c.startswith("expect:"):
                status = c[len("expect:"):].strip().lower()
                if status not in ("ok", "rejected"):
                    raise ParseError(f"bad expectation {status!r}", lineno, 1)
                expectations.append(({}, "OK" if status == "ok" else "Rejected"))
            for key, status in (("rejected-under:", "Rejected"), ("ok-under:", "OK")):
                if c.startswith(key):
                    expectations.append((parse_flags(c[len(key):], lineno), status))
            continue
        col = len(raw) - len(raw.lstrip()) + 1
        word = line.split(None, 1)[0]
        arg = line[len(word):].strip()
        if word == "use":
            if steps or goal is not None:
                raise ParseError("'use' must precede goal and steps", lineno, col)
            env = DefEnv({**env, **load_defenv(base_dir / arg)})
        elif word == "config":
            config = LogicConfig(**parse_flags(arg, lineno, col + len(word) + 1))
        elif word == "goal":
            goal = parse_sequent(arg, env, lineno, col + raw.strip().index(arg))
        elif word[0].isdigit():
            steps.append(_parse_step(raw, lineno, env))
        else:
            raise ParseError(f"unexpected {word!r}", lineno, col)

    if goal is None:
        raise ParseError("script has no goal", 1, 1)
    if not any(not over for over, _ in expectations):
        expectations.insert(0, ({}, "OK"))
    return ScriptFile(ProofScript(env, config, goal, tuple(steps)), None, expectations)


def load_script(path: str | Path) -> ScriptFile:
    path = Path(path)
    sf = parse_script(path.read_text(encoding="utf-8"), path.parent)
    sf.path = path
    return sf


def format_step(step: ProofStep) -> str:
    rule = "assume" if step.rule == "hyp" and not step.premises else step.rule
    parts = [f"{step.index}. {rule}"]
    if step.premises:
        parts.append("[" + ", ".join(map(str, step.premises)) + "]")
    if step.discharge:
        parts.append("discharge " + ", ".join(map(str, step.discharge)))
    text = " ".join(parts) + " : " + print_formula(step.formula)
    if step.subst:
        items = ", ".join(f"{k}={print_formula(v)}" for k, v in sorted(step.subst.items()))
        text += f"  (subst {items})"
    if step.note:
        text += f"  -- {step.note}"
    return text


def format_script(script: ProofScript, use: Optional[str] = None) -> str:
    """Script text; the env is inlined via ``use`` when a file name is given."""
    lines = []
    if use:
        lines.append(f"use {use}")
    lines.append(script.config.header())
    lines.append(f"goal {script.goal}")
    lines.extend(format_step(s) for s in script.steps)
    return "\n".join(lines) + "\n"
