"""Expression language for catalog identities.

    expr  := term ('+' term)*
    term  := power (('*' | '/' | <juxtaposition>) power)*
    power := atom ('^' INT)*
    atom  := '[' index ']' | NAME | INT | '(' expr ')'
           | 'P(' INT ',' INT ';' expr ')' | 'inv(' expr ')'
    index := linear combination of integers and variables, e.g. 2r, i+j, i-j

NAME refers to an alias defined by the catalog entry (``a: "[r]"``).  Numeric
evaluation yields a LaurentSeriesF2 with tracked precision; symbolic
evaluation yields an SPoly and rejects ``/``, ``inv`` and projections with
q > 8.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Union

from ..series import LaurentSeriesF2
from ..theta import SPoly, normalize_index, symbolic_project, theta_power, theta_series

_TOKEN = re.compile(r"\s*(?:(\[[^\]]*\])|(P\(|inv\()|([A-Za-z_]\w*)|(\d+)|([-+*/^();,]))")
_INDEX_TERM = re.compile(r"([+-]?)(\d*)\*?([a-z_]\w*)?")


@dataclass(frozen=True)
class Theta:
    index: tuple  # ((coef, var or None), ...)


@dataclass(frozen=True)
class Name:
    name: str


@dataclass(frozen=True)
class Const:
    value: int


@dataclass(frozen=True)
class Add:
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Mul:
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Div:
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Pow:
    base: "Node"
    exp: int


@dataclass(frozen=True)
class Proj:
    q: int
    j: int
    arg: "Node"


@dataclass(frozen=True)
class Inv:
    arg: "Node"


Node = Union[Theta, Name, Const, Add, Mul, Div, Pow, Proj, Inv]


def _parse_index(text: str) -> tuple:
    src = text.replace(" ", "")
    if not src:
        raise ValueError("empty theta index")
    terms = []
    pos = 0
    while pos < len(src):
        m = _INDEX_TERM.match(src, pos)
        if not m or m.end() == pos or (not m.group(2) and not m.group(3)):
            raise ValueError(f"bad theta index {text!r}")
        sign = -1 if m.group(1) == "-" else 1
        coef = int(m.group(2)) if m.group(2) else 1
        terms.append((sign * coef, m.group(3)))
        pos = m.end()
    return tuple(terms)


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens: list[tuple[str, str]] = []
        pos = 0
        while pos < len(text):
            if text[pos:].strip() == "":
                break
            m = _TOKEN.match(text, pos)
            if not m:
                raise ValueError(f"unexpected input at {text[pos:]!r} in {text!r}")
            kind = ("theta", "call", "name", "int", "op")[m.lastindex - 1]
            self.tokens.append((kind, m.group(m.lastindex)))
            pos = m.end()
        self.i = 0

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else (None, None)

    def take(self, value=None):
        tok = self.peek()
        if value is not None and tok[1] != value:
            raise ValueError(f"expected {value!r}, found {tok[1]!r} in {self.text!r}")
        self.i += 1
        return tok

    def parse(self) -> Node:
        node = self.expr()
        if self.i != len(self.tokens):
            raise ValueError(f"trailing input {self.peek()[1]!r} in {self.text!r}")
        return node

    def expr(self) -> Node:
        node = self.term()
        while self.peek()[1] == "+":
            self.take()
            node = Add(node, self.term())
        return node

    def term(self) -> Node:
        node = self.power()
        while True:
            kind, val = self.peek()
            if val == "*":
                self.take()
                node = Mul(node, self.power())
            elif val == "/":
                self.take()
                node = Div(node, self.power())
            elif kind in ("theta", "call", "name", "int") or val == "(":
                node = Mul(node, self.power())
            else:
                return node

    def power(self) -> Node:
        node = self.atom()
        while self.peek()[1] == "^":
            self.take()
            kind, val = self.take()
            if kind != "int":
                raise ValueError(f"exponent must be an integer in {self.text!r}")
            node = Pow(node, int(val))
        return node

    def _int(self) -> int:
        kind, val = self.take()
        if kind != "int":
            raise ValueError(f"expected an integer, found {val!r} in {self.text!r}")
        return int(val)

    def atom(self) -> Node:
        kind, val = self.take()
        if kind == "theta":
            return Theta(_parse_index(val[1:-1]))
        if kind == "name":
            return Name(val)
        if kind == "int":
            return Const(int(val) % 2)
        if kind == "call" and val == "P(":
            q = self._int()
            self.take(",")
            j = self._int()
            self.take(";")
            arg = self.expr()
            self.take(")")
            return Proj(q, j, arg)
        if kind == "call" and val == "inv(":
            arg = self.expr()
            self.take(")")
            return Inv(arg)
        if val == "(":
            node = self.expr()
            self.take(")")
            return node
        raise ValueError(f"unexpected token {val!r} in {self.text!r}")


def parse(text: str) -> Node:
    return _Parser(text).parse()


class Context:
    """Variable binding and aliases for one instance of a catalog entry."""

    def __init__(self, l: int, env: dict[str, int] | None = None, aliases: dict[str, str] | None = None):
        self.l = l
        self.env = dict(env or {})
        self._alias_text = dict(aliases or {})
        self._alias_ast: dict[str, Node] = {}

    def index(self, idx: tuple) -> int:
        total = 0
        for coef, var in idx:
            if var is None:
                total += coef
            elif var in self.env:
                total += coef * self.env[var]
            else:
                raise KeyError(f"unbound index variable {var!r}")
        return normalize_index(self.l, total)

    def alias(self, name: str, seen=()) -> Node:
        if name in seen:
            raise ValueError(f"alias cycle through {name!r}")
        if name not in self._alias_text:
            raise KeyError(f"unknown name {name!r}")
        if name not in self._alias_ast:
            self._alias_ast[name] = parse(self._alias_text[name])
        return self._alias_ast[name]


def evaluate(node: Node, ctx: Context, bound: int, _seen=()) -> LaurentSeriesF2:
    """Series value of ``node`` from theta series known below ``bound``."""

    def ev(n: Node, seen) -> LaurentSeriesF2:
        if isinstance(n, Theta):
            return theta_series(ctx.l, ctx.index(n.index), bound)
        if isinstance(n, Name):
            return ev(ctx.alias(n.name, seen), seen + (n.name,))
        if isinstance(n, Const):
            return LaurentSeriesF2.one(bound) if n.value else LaurentSeriesF2.zero(bound)
        if isinstance(n, Add):
            return ev(n.left, seen) + ev(n.right, seen)
        if isinstance(n, Mul):
            return ev(n.left, seen) * ev(n.right, seen)
        if isinstance(n, Div):
            return ev(n.left, seen) / ev(n.right, seen)
        if isinstance(n, Pow):
            base = n.base
            while isinstance(base, Name):
                name = base.name
                base = ctx.alias(name, seen)
                seen = seen + (name,)
            if isinstance(base, Theta) and n.exp > 0:
                return theta_power(ctx.l, ctx.index(base.index), n.exp, bound)
            return ev(base, seen) ** n.exp
        if isinstance(n, Proj):
            return ev(n.arg, seen).project(n.q, n.j)
        if isinstance(n, Inv):
            return ev(n.arg, seen).inverse()
        raise TypeError(f"unknown node {n!r}")

    return ev(node, _seen)


def symbolic(node: Node, ctx: Context) -> SPoly:
    """The SPoly denoted by a polynomial expression (no division or inverses)."""
    l = ctx.l

    def ev(n: Node, seen) -> SPoly:
        if isinstance(n, Theta):
            return SPoly.gen(l, ctx.index(n.index))
        if isinstance(n, Name):
            return ev(ctx.alias(n.name, seen), seen + (n.name,))
        if isinstance(n, Const):
            return SPoly.one(l) if n.value else SPoly.zero(l)
        if isinstance(n, Add):
            return ev(n.left, seen) + ev(n.right, seen)
        if isinstance(n, Mul):
            return ev(n.left, seen) * ev(n.right, seen)
        if isinstance(n, Pow):
            return ev(n.base, seen) ** n.exp
        if isinstance(n, Proj):
            return symbolic_project(ev(n.arg, seen), n.q, n.j)
        raise ValueError(f"{type(n).__name__} has no polynomial value in S")

    return ev(node, ())
