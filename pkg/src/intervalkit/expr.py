"""Expression language: AST, recursive-descent parser and renderer.

Grammar::

    expr   := term (('+' | '-') term)*
    term   := factor (('*' | '/') factor)*
    factor := unary ('^' uint)?
    unary  := '-'? atom
    atom   := number | 'pi' | 'e' | 't' | 'x'
            | '[' expr ',' expr ']' | '<' expr ';' expr '>'
            | fn '(' expr (',' expr)* ')' | '(' expr ')'

Bracket and angle forms whose parts are numeric constants become
:class:`IntervalLit` nodes; each literal gets a ``param_id`` in parse order.
If a part depends on ``t`` or ``x`` the form is kept as an :class:`IntervalOf`
node, which builds an interval from two real subexpressions at evaluation
time (``[t, t^2+1]`` is the usual way to write an interval-valued function).
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Union

from .core import Interval, from_center_radius, from_endpoints
from .errors import DegenerateInterval, ExprSyntaxError

TRANSCENDENTAL = ("sin", "cos", "exp", "ln", "abs")
CLASSICAL = ("madd", "msub", "hsub", "ghsub", "mmul", "mdiv", "smul")
FUNCTIONS = {name: 1 for name in TRANSCENDENTAL}
FUNCTIONS.update({name: 2 for name in CLASSICAL})
CONSTANTS = {"pi": math.pi, "e": math.e}


# --- AST ---------------------------------------------------------------------

@dataclass(frozen=True)
class RealLit:
    value: float


@dataclass(frozen=True)
class IntervalLit:
    """Constant interval.  ``form`` records how it was written."""

    a: float
    b: float
    param_id: int
    form: str = "endpoints"  # or "center"

    @property
    def value(self) -> Interval:
        if self.form == "center":
            return from_center_radius(self.a, self.b)
        return from_endpoints(self.a, self.b)

    @property
    def bounds(self) -> tuple[float, float]:
        if self.form == "center":
            return self.a - self.b, self.a + self.b
        return self.a, self.b


@dataclass(frozen=True)
class IntervalOf:
    """Interval assembled from two real-valued subexpressions."""

    first: "ExprNode"
    second: "ExprNode"
    form: str = "endpoints"


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Unary:
    op: str
    child: "ExprNode"


@dataclass(frozen=True)
class Binary:
    op: str
    lhs: "ExprNode"
    rhs: "ExprNode"


@dataclass(frozen=True)
class Power:
    base: "ExprNode"
    n: int


@dataclass(frozen=True)
class Call:
    fn: str
    args: tuple


ExprNode = Union[RealLit, IntervalLit, IntervalOf, Var, Unary, Binary, Power, Call]


def walk(node):
    """Pre-order traversal."""
    yield node
    if isinstance(node, Unary):
        yield from walk(node.child)
    elif isinstance(node, Binary):
        yield from walk(node.lhs)
        yield from walk(node.rhs)
    elif isinstance(node, Power):
        yield from walk(node.base)
    elif isinstance(node, Call):
        for a in node.args:
            yield from walk(a)
    elif isinstance(node, IntervalOf):
        yield from walk(node.first)
        yield from walk(node.second)


def interval_literals(node) -> list[IntervalLit]:
    lits = [n for n in walk(node) if isinstance(n, IntervalLit)]
    return sorted(lits, key=lambda n: n.param_id)


def variables(node) -> set[str]:
    return {n.name for n in walk(node) if isinstance(n, Var)}


def substitute_var(node, old: str, new: str):
    """Rename a variable throughout the tree."""
    if isinstance(node, Var):
        return Var(new) if node.name == old else node
    if isinstance(node, Unary):
        return Unary(node.op, substitute_var(node.child, old, new))
    if isinstance(node, Binary):
        return Binary(node.op, substitute_var(node.lhs, old, new),
                      substitute_var(node.rhs, old, new))
    if isinstance(node, Power):
        return Power(substitute_var(node.base, old, new), node.n)
    if isinstance(node, Call):
        return Call(node.fn, tuple(substitute_var(a, old, new) for a in node.args))
    if isinstance(node, IntervalOf):
        return IntervalOf(substitute_var(node.first, old, new),
                          substitute_var(node.second, old, new), node.form)
    return node


# --- lexer ---------------------------------------------------------------------

_TOKEN_RE = re.compile(r"""
    (?P<ws>\s+)
  | (?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^(),;\[\]<>−])
""", re.VERBOSE)


@dataclass(frozen=True)
class _Tok:
    kind: str  # num, ident, op, eof
    text: str
    pos: int  # character index


def _tokenize(src: str) -> list[_Tok]:
    toks = []
    i = 0
    while i < len(src):
        m = _TOKEN_RE.match(src, i)
        if m is None:
            raise ExprSyntaxError(f"unexpected character {src[i]!r}",
                                  len(src[:i].encode("utf-8")))
        kind = m.lastgroup
        if kind != "ws":
            text = m.group()
            if text == "−":
                text = "-"
            toks.append(_Tok(kind, text, i))
        i = m.end()
    toks.append(_Tok("eof", "", len(src)))
    return toks


# --- parser ----------------------------------------------------------------------

class _Parser:
    def __init__(self, src: str):
        self.src = src
        self.toks = _tokenize(src)
        self.i = 0
        self.next_param = 0

    def _offset(self, tok: _Tok) -> int:
        return len(self.src[:tok.pos].encode("utf-8"))

    def error(self, msg, tok=None):
        tok = tok or self.peek()
        return ExprSyntaxError(msg, self._offset(tok))

    def peek(self) -> _Tok:
        return self.toks[self.i]

    def take(self) -> _Tok:
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def accept(self, text) -> bool:
        tok = self.peek()
        if tok.kind == "op" and tok.text == text:
            self.i += 1
            return True
        return False

    def expect(self, text):
        if not self.accept(text):
            tok = self.peek()
            found = "end of input" if tok.kind == "eof" else repr(tok.text)
            raise self.error(f"expected {text!r}, found {found}")

    def parse(self):
        if self.peek().kind == "eof":
            raise self.error("empty expression")
        node = self.expr()
        tok = self.peek()
        if tok.kind != "eof":
            raise self.error(f"unexpected {tok.text!r}")
        return node

    def expr(self):
        node = self.term()
        while True:
            tok = self.peek()
            if tok.kind == "op" and tok.text in "+-":
                self.i += 1
                node = Binary(tok.text, node, self.term())
            else:
                return node

    def term(self):
        node = self.factor()
        while True:
            tok = self.peek()
            if tok.kind == "op" and tok.text in "*/":
                self.i += 1
                node = Binary(tok.text, node, self.factor())
            else:
                return node

    def factor(self):
        node = self.unary()
        if self.accept("^"):
            tok = self.peek()
            if tok.kind != "num" or not tok.text.isdigit():
                raise self.error("exponent must be a nonnegative integer")
            self.i += 1
            node = Power(node, int(tok.text))
        return node

    def unary(self):
        if self.accept("-"):
            return Unary("-", self.atom())
        return self.atom()

    def atom(self):
        tok = self.take()
        if tok.kind == "num":
            return RealLit(float(tok.text))
        if tok.kind == "ident":
            return self._ident(tok)
        if tok.kind == "op":
            if tok.text == "(":
                node = self.expr()
                self.expect(")")
                return node
            if tok.text == "[":
                return self._bracket(tok, ",", "]", "endpoints")
            if tok.text == "<":
                return self._bracket(tok, ";", ">", "center")
        if tok.kind == "eof":
            raise self.error("unexpected end of input", tok)
        raise self.error(f"unexpected {tok.text!r}", tok)

    def _ident(self, tok):
        name = tok.text
        if name in ("t", "x"):
            return Var(name)
        if name in CONSTANTS:
            return RealLit(CONSTANTS[name])
        if name not in FUNCTIONS:
            raise self.error(f"unknown name {name!r}", tok)
        self.expect("(")
        args = [self.expr()]
        while self.accept(","):
            args.append(self.expr())
        self.expect(")")
        if len(args) != FUNCTIONS[name]:
            raise self.error(
                f"{name} takes {FUNCTIONS[name]} argument(s), got {len(args)}", tok)
        return Call(name, tuple(args))

    def _bracket(self, open_tok, sep, close, form):
        first = self.expr()
        self.expect(sep)
        second = self.expr()
        self.expect(close)
        a, b = _constant(first), _constant(second)
        if a is None or b is None:
            return IntervalOf(first, second, form)
        if form == "endpoints":
            if not a < b:
                raise DegenerateInterval(
                    f"interval literal [{a!r},{b!r}] at offset {self._offset(open_tok)} "
                    "needs left < right")
        elif not b > 0:
            raise DegenerateInterval(
                f"radius {b!r} at offset {self._offset(open_tok)} must be positive")
        node = IntervalLit(a, b, self.next_param, form)
        node.value  # validates finiteness
        self.next_param += 1
        return node


def _constant(node):
    """Value of a real constant expression, or None if it is not one."""
    if isinstance(node, RealLit):
        return node.value
    if isinstance(node, Unary):
        v = _constant(node.child)
        return None if v is None else -v
    if isinstance(node, Binary):
        a, b = _constant(node.lhs), _constant(node.rhs)
        if a is None or b is None:
            return None
        if node.op == "+":
            return a + b
        if node.op == "-":
            return a - b
        if node.op == "*":
            return a * b
        return a / b if b != 0 else None
    if isinstance(node, Power):
        v = _constant(node.base)
        return None if v is None else v ** node.n
    return None


def parse(src: str):
    """Parse expression text into an AST."""
    if not isinstance(src, str):
        raise TypeError("expression source must be text")
    return _Parser(src).parse()


# --- renderer --------------------------------------------------------------------

def _num(v: float) -> str:
    if v == int(v) and abs(v) < 1e15:
        s = str(int(v))
    else:
        s = repr(float(v))
    return s


_PREC = {"+": 1, "-": 1, "*": 2, "/": 2}


def _prec(node) -> int:
    if isinstance(node, Binary):
        return _PREC[node.op]
    if isinstance(node, Power):
        return 3
    if isinstance(node, Unary):
        return 4
    return 5


def render(node) -> str:
    """Text that parses back to the same tree."""
    if isinstance(node, RealLit):
        if math.copysign(1.0, node.value) < 0:
            return f"(-{_num(-node.value)})"
        return _num(node.value)
    if isinstance(node, IntervalLit):
        if node.form == "center":
            return f"<{_num(node.a)};{_num(node.b)}>"
        return f"[{_num(node.a)},{_num(node.b)}]"
    if isinstance(node, IntervalOf):
        a, b = render(node.first), render(node.second)
        return f"<{a};{b}>" if node.form == "center" else f"[{a},{b}]"
    if isinstance(node, Var):
        return node.name
    if isinstance(node, Unary):
        inner = render(node.child)
        return f"-{inner}" if _prec(node.child) >= 5 else f"-({inner})"
    if isinstance(node, Power):
        base = render(node.base)
        if _prec(node.base) < 4:
            base = f"({base})"
        return f"{base}^{node.n}"
    if isinstance(node, Binary):
        p = _PREC[node.op]
        lhs, rhs = render(node.lhs), render(node.rhs)
        if _prec(node.lhs) < p:
            lhs = f"({lhs})"
        if _prec(node.rhs) <= p:
            rhs = f"({rhs})"
        return f"{lhs} {node.op} {rhs}" if p == 1 else f"{lhs}{node.op}{rhs}"
    if isinstance(node, Call):
        return f"{node.fn}(" + ", ".join(render(a) for a in node.args) + ")"
    raise TypeError(f"not an expression node: {node!r}")
