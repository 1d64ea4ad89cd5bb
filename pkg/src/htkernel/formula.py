"""Formula syntax: AST, concrete text syntax, Goedel codes, definitional unfolding.

Concrete syntax (ASCII)::

    formula := imp
    imp     := or ("->" imp)?
    or      := and ("|" and)*
    and     := unary ("&" unary)*
    unary   := "~" unary | "Prov" "(" "#" formula "#" ")" | "(" formula ")"
             | "0=1" | IDENT

Negation is sugar: ``~A`` is ``A -> 0=1``.  Identifiers listed in ``names``
parse as :class:`Name` (references into a :class:`DefEnv`); all others are
:class:`Atom`.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from math import isqrt
from types import MappingProxyType
from typing import Callable, Iterable, Iterator, Mapping, Union


class ParseError(ValueError):
    """Syntax error at a 1-based line/column."""

    def __init__(self, message: str, line: int = 1, column: int = 1):
        super().__init__(f"{line}:{column}: {message}")
        self.message = message
        self.line = line
        self.column = column


class UnboundNameError(KeyError):
    def __init__(self, name: str):
        super().__init__(name)
        self.name = name

    def __str__(self):
        return f"unbound name: {self.name}"


class DecodeError(ValueError):
    pass


@dataclass(frozen=True)
class Atom:
    name: str

    def __str__(self):
        return print_formula(self)


@dataclass(frozen=True)
class Falsum:
    def __str__(self):
        return "0=1"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"

    def __str__(self):
        return print_formula(self)


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"

    def __str__(self):
        return print_formula(self)


@dataclass(frozen=True)
class Imp:
    left: "Formula"
    right: "Formula"

    def __str__(self):
        return print_formula(self)


@dataclass(frozen=True)
class Prov:
    quoted: "Formula"

    def __str__(self):
        return print_formula(self)


@dataclass(frozen=True)
class Name:
    id: str

    def __str__(self):
        return self.id


@dataclass(frozen=True)
class Hole:
    """Placeholder used only in diagonalization templates."""

    def __str__(self):
        return "@"


Formula = Union[Atom, Falsum, And, Or, Imp, Prov, Name, Hole]

FALSUM = Falsum()
HOLE = Hole()

_BINARY = (And, Or, Imp)


def neg(f: Formula) -> Imp:
    return Imp(f, FALSUM)


def is_neg(f: Formula) -> bool:
    return isinstance(f, Imp) and isinstance(f.right, Falsum)


def children(f: Formula) -> tuple:
    if isinstance(f, _BINARY):
        return (f.left, f.right)
    if isinstance(f, Prov):
        return (f.quoted,)
    return ()


def map_children(f: Formula, fn: Callable[[Formula], Formula]) -> Formula:
    if isinstance(f, _BINARY):
        left, right = fn(f.left), fn(f.right)
        if left is f.left and right is f.right:
            return f
        return type(f)(left, right)
    if isinstance(f, Prov):
        q = fn(f.quoted)
        return f if q is f.quoted else Prov(q)
    return f


def subformulas(f: Formula) -> Iterator[Formula]:
    """Pre-order walk, quotations included."""
    stack = [f]
    while stack:
        g = stack.pop()
        yield g
        stack.extend(reversed(children(g)))


@lru_cache(maxsize=None)
def size(f: Formula) -> int:
    return 1 + sum(size(c) for c in children(f))


@lru_cache(maxsize=None)
def quote_depth(f: Formula) -> int:
    if isinstance(f, Prov):
        return 1 + quote_depth(f.quoted)
    return max((quote_depth(c) for c in children(f)), default=0)


def names_in(f: Formula) -> set[str]:
    return {g.id for g in subformulas(f) if isinstance(g, Name)}


def atoms_in(f: Formula) -> set[str]:
    return {g.name for g in subformulas(f) if isinstance(g, Atom)}


def has_hole(f: Formula) -> bool:
    return any(isinstance(g, Hole) for g in subformulas(f))


# ---------------------------------------------------------------- parsing

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<arrow>->)
  | (?P<falsum>0=1)
  | (?P<ident>[A-Za-z][A-Za-z0-9_']*)
  | (?P<punct>[~&|()#@])
    """,
    re.VERBOSE,
)


def _tokenize(text: str, line: int, col0: int) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col0 + pos)
        kind = m.lastgroup
        if kind != "ws":
            value = m.group()
            if kind == "punct" or kind == "arrow":
                kind = value
            elif kind == "ident" and value == "Prov":
                kind = "Prov"
            tokens.append((kind, value, col0 + pos))
        pos = m.end()
    tokens.append(("eof", "", col0 + len(text)))
    return tokens


class _Parser:
    def __init__(self, text, names, holes, line, col0):
        self.tokens = _tokenize(text, line, col0)
        self.i = 0
        self.names = names
        self.holes = holes
        self.line = line

    def peek(self):
        return self.tokens[self.i][0]

    def take(self, kind):
        tok = self.tokens[self.i]
        if tok[0] != kind:
            found = tok[1] or "end of input"
            raise ParseError(f"expected {kind!r}, found {found!r}", self.line, tok[2])
        self.i += 1
        return tok

    def formula(self):
        left = self.disj()
        if self.peek() == "->":
            self.i += 1
            return Imp(left, self.formula())
        return left

    def disj(self):
        f = self.conj()
        while self.peek() == "|":
            self.i += 1
            f = Or(f, self.conj())
        return f

    def conj(self):
        f = self.unary()
        while self.peek() == "&":
            self.i += 1
            f = And(f, self.unary())
        return f

    def unary(self):
        kind, value, col = self.tokens[self.i]
        if kind == "~":
            self.i += 1
            return neg(self.unary())
        if kind == "Prov":
            self.i += 1
            self.take("(")
            self.take("#")
            inner = self.formula()
            self.take("#")
            self.take(")")
            return Prov(inner)
        if kind == "(":
            self.i += 1
            f = self.formula()
            self.take(")")
            return f
        if kind == "falsum":
            self.i += 1
            return FALSUM
        if kind == "ident":
            self.i += 1
            return Name(value) if value in self.names else Atom(value)
        if kind == "@" and self.holes:
            self.i += 1
            return HOLE
        found = value or "end of input"
        raise ParseError(f"unexpected {found!r}", self.line, col)


def parse_formula(text: str, names: Iterable[str] = (), *, holes: bool = False,
                  line: int = 1, column: int = 1) -> Formula:
    """Parse ``text``; ``line``/``column`` offset error positions for file input."""
    p = _Parser(text, frozenset(names), holes, line, column)
    f = p.formula()
    p.take("eof")
    return f


# --------------------------------------------------------------- printing

_IMP, _OR, _AND, _UNARY = 1, 2, 3, 4


def _prec(f: Formula) -> int:
    if isinstance(f, Imp):
        return _UNARY if is_neg(f) else _IMP
    if isinstance(f, Or):
        return _OR
    if isinstance(f, And):
        return _AND
    return _UNARY


def _show(f: Formula, min_prec: int) -> str:
    s = _render(f)
    return f"({s})" if _prec(f) < min_prec else s


@lru_cache(maxsize=65536)
def _render(f: Formula) -> str:
    if isinstance(f, Atom):
        return f.name
    if isinstance(f, Name):
        return f.id
    if isinstance(f, Falsum):
        return "0=1"
    if isinstance(f, Hole):
        return "@"
    if isinstance(f, Prov):
        return f"Prov(#{_render(f.quoted)}#)"
    if is_neg(f):
        return "~" + _show(f.left, _UNARY)
    if isinstance(f, And):
        return f"{_show(f.left, _AND)} & {_show(f.right, _AND + 1)}"
    if isinstance(f, Or):
        return f"{_show(f.left, _OR)} | {_show(f.right, _OR + 1)}"
    if isinstance(f, Imp):
        return f"{_show(f.left, _IMP + 1)} -> {_show(f.right, _IMP)}"
    raise TypeError(f"not a formula: {f!r}")


def print_formula(f: Formula) -> str:
    return _render(f)


def sort_key(f: Formula) -> tuple:
    return (size(f), _render(f), type(f).__name__)


# ----------------------------------------------------------- Goedel codes

def pair(x: int, y: int) -> int:
    return (x + y) * (x + y + 1) // 2 + y


def unpair(z: int) -> tuple[int, int]:
    w = (isqrt(8 * z + 1) - 1) // 2
    y = z - w * (w + 1) // 2
    return w - y, y


# Identifier registry: shortlex order (length, then ASCII order) over every
# string matching IDENT.  Gives each identifier a fixed index, so codes do not
# depend on which formulas happen to be encoded together.
_FIRST = "".join(sorted("ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz"))
_REST = "".join(sorted(_FIRST + "0123456789_'"))


def ident_index(name: str) -> int:
    if not re.fullmatch(r"[A-Za-z][A-Za-z0-9_']*", name):
        raise ValueError(f"not an identifier: {name!r}")
    n = len(name)
    offset = sum(len(_FIRST) * len(_REST) ** (k - 1) for k in range(1, n))
    value = _FIRST.index(name[0])
    for ch in name[1:]:
        value = value * len(_REST) + _REST.index(ch)
    return offset + value


def ident_from_index(i: int) -> str:
    n = 1
    while True:
        count = len(_FIRST) * len(_REST) ** (n - 1)
        if i < count:
            break
        i -= count
        n += 1
    rest = []
    for _ in range(n - 1):
        i, r = divmod(i, len(_REST))
        rest.append(_REST[r])
    return _FIRST[i] + "".join(reversed(rest))


_TAGS = {And: 2, Or: 3, Imp: 4}
_CTORS = {2: And, 3: Or, 4: Imp}


def encode(f: Formula) -> int:
    if isinstance(f, Atom):
        return pair(0, ident_index(f.name))
    if isinstance(f, Falsum):
        return pair(1, 0)
    if isinstance(f, _BINARY):
        return pair(_TAGS[type(f)], pair(encode(f.left), encode(f.right)))
    if isinstance(f, Prov):
        return pair(5, encode(f.quoted))
    if isinstance(f, Name):
        return pair(6, ident_index(f.id))
    raise ValueError(f"cannot encode {f!r}")


def decode(code: int) -> Formula:
    if not isinstance(code, int) or code < 0:
        raise DecodeError(f"not a code: {code!r}")
    tag, body = unpair(code)
    if tag == 0:
        return Atom(ident_from_index(body))
    if tag == 1:
        if body != 0:
            raise DecodeError(f"not a code: {code}")
        return FALSUM
    if tag in _CTORS:
        a, b = unpair(body)
        return _CTORS[tag](decode(a), decode(b))
    if tag == 5:
        return Prov(decode(body))
    if tag == 6:
        return Name(ident_from_index(body))
    raise DecodeError(f"not a code: {code}")


# --------------------------------------------------------------- DefEnv

class DefEnv(Mapping[str, Formula]):
    """Immutable map from sentence names to their defining formulas."""

    def __init__(self, bindings: Mapping[str, Formula] | Iterable[tuple[str, Formula]] = ()):
        data = dict(bindings)
        for name, body in data.items():
            for ref in names_in(body):
                if ref not in data:
                    raise UnboundNameError(ref)
        self._data = MappingProxyType(data)

    def __getitem__(self, name: str) -> Formula:
        try:
            return self._data[name]
        except KeyError:
            raise UnboundNameError(name) from None

    def __iter__(self):
        return iter(self._data)

    def __len__(self):
        return len(self._data)

    def __hash__(self):
        return hash(tuple(sorted(self._data.items(), key=lambda kv: kv[0])))

    def __repr__(self):
        inner = ", ".join(f"{k} := {print_formula(v)}" for k, v in self._data.items())
        return f"DefEnv({{{inner}}})"

    def extend(self, name: str, body: Formula) -> "DefEnv":
        data = dict(self._data)
        data[name] = body
        return DefEnv(data)

    def to_text(self) -> str:
        return "".join(f"def {k} := {print_formula(v)}\n" for k, v in self._data.items())


def unfold_once(f: Formula, env: Mapping[str, Formula], target: str) -> Formula:
    """Replace every ``Name(target)`` in ``f`` by its body, quotations included."""
    if target not in env:
        raise UnboundNameError(target)
    body = env[target]

    def go(g):
        if isinstance(g, Name) and g.id == target:
            return body
        return map_children(g, go)

    return go(f)


def defeq(a: Formula, b: Formula, env: Mapping[str, Formula], depth_bound: int = 2) -> bool:
    """True iff ``a`` and ``b`` are joined by at most ``depth_bound`` single
    unfold/fold rewrites of one name occurrence each."""
    if a == b:
        return True
    if depth_bound <= 0:
        return False
    return _defeq_cost(a, b, env, depth_bound) <= depth_bound


def _defeq_cost(a, b, env, cap):
    # Minimal rewrite count, or cap + 1 when above the cap.  A shortest path
    # either rewrites a Name at the root of one side or works childwise.
    memo = {}
    over = cap + 1

    def cost(x, y, budget):
        if x == y:
            return 0
        if budget <= 0:
            return over
        key = (x, y, budget)
        if key in memo:
            return memo[key]
        best = over
        if type(x) is type(y) and not isinstance(x, (Name, Atom, Falsum, Hole)):
            total = 0
            for cx, cy in zip(children(x), children(y)):
                total += cost(cx, cy, budget - total)
                if total > budget:
                    break
            if total <= budget:
                best = total
        if isinstance(x, Name) and x.id in env:
            best = min(best, 1 + cost(env[x.id], y, min(budget, best - 1) - 1))
        if isinstance(y, Name) and y.id in env:
            best = min(best, 1 + cost(x, env[y.id], min(budget, best - 1) - 1))
        best = best if best <= budget else over
        memo[key] = best
        return best

    return cost(a, b, cap)
