"""Self-referential sentences as named fixed points.

A template is a formula containing ``@`` holes.  ``diagonalize("L", t, env)``
binds ``L`` to ``t`` with every hole replaced by ``L`` itself, so unfolding
``L`` once yields the template applied to ``L``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path

from .formula import (
    DefEnv,
    Formula,
    Hole,
    Name,
    ParseError,
    has_hole,
    map_children,
    parse_formula,
    print_formula,
)


class DiagonalError(ValueError):
    pass


@dataclass(frozen=True)
class Template:
    body: Formula

    def __post_init__(self):
        if not has_hole(self.body):
            raise DiagonalError(f"template has no hole: {print_formula(self.body)}")

    def fill(self, f: Formula) -> Formula:
        def go(g):
            return f if isinstance(g, Hole) else map_children(g, go)

        return go(self.body)

    def __str__(self):
        return print_formula(self.body)


def diagonalize(name: str, t: Template | Formula, env: DefEnv) -> DefEnv:
    if not isinstance(t, Template):
        t = Template(t)
    if name in env:
        raise DiagonalError(f"name already bound: {name}")
    return env.extend(name, t.fill(Name(name)))


_DIRECTIVE = re.compile(r"^(\s*)(def|diag)\s+([A-Za-z][A-Za-z0-9_']*)\s*:=\s*(.*?)\s*$")


def parse_defenv(text: str) -> DefEnv:
    """Parse ``def NAME := formula`` / ``diag NAME := template`` lines.

    Every name declared anywhere in the file is in scope for every body, so
    definitions may refer to themselves and to each other.
    """
    entries = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        m = _DIRECTIVE.match(raw)
        if m is None:
            raise ParseError("expected 'def NAME := ...' or 'diag NAME := ...'", lineno, 1)
        entries.append((lineno, m))

    declared = [m.group(3) for _, m in entries]
    seen = set()
    for (lineno, m), name in zip(entries, declared):
        if name in seen:
            raise ParseError(f"duplicate binding {name}", lineno, m.start(3) + 1)
        seen.add(name)

    bodies = {}
    for lineno, m in entries:
        kind, name = m.group(2), m.group(3)
        col = m.start(4) + 1
        body = parse_formula(m.group(4), seen, holes=(kind == "diag"), line=lineno, column=col)
        if kind == "diag":
            try:
                tmpl = Template(body)
            except DiagonalError as exc:
                raise ParseError(str(exc), lineno, col) from None
            body = tmpl.fill(Name(name))
        elif has_hole(body):
            raise ParseError("'@' is only allowed in diag templates", lineno, col)
        bodies[name] = body
    return DefEnv(bodies)


def load_defenv(path: str | Path) -> DefEnv:
    return parse_defenv(Path(path).read_text(encoding="utf-8"))
