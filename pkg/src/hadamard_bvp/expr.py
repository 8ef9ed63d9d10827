"""Mini-language for user-supplied scalar loads F(x, u).

Grammar, loosest to tightest binding:

    sum     := product (('+' | '-') product)*
    product := unary (('*' | '/') unary)*
    unary   := '-' unary | power
    power   := atom ('^' unary)?          right-associative
    atom    := NUMBER | 'x' | 'u' | 'pi' | 'e' | FUNC '(' sum ')' | '(' sum ')'

Functions: ln, exp, sqrt, sin, cos, abs.  No implicit multiplication; unknown
identifiers are rejected at parse time.  Unary minus binds looser than '^',
so -2^2 evaluates to -4.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

import numpy as np

from .errors import EvaluationError, ParseError

FUNCTIONS = ("abs", "cos", "exp", "ln", "sin", "sqrt")
CONSTANTS = {"pi": math.pi, "e": math.e}
VARIABLES = ("x", "u")

_MAX_DEPTH = 200
_EXACT_POW_LIMIT = 16

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^()]))")


class Expr:
    """Base class for parsed expression nodes; immutable and hashable."""

    __slots__ = ()


@dataclass(frozen=True)
class Const(Expr):
    value: float


@dataclass(frozen=True)
class Var(Expr):
    name: str


@dataclass(frozen=True)
class Neg(Expr):
    operand: Expr


@dataclass(frozen=True)
class BinOp(Expr):
    op: str
    lhs: Expr
    rhs: Expr


@dataclass(frozen=True)
class Call(Expr):
    fn: str
    operand: Expr


def _tokenize(source: str):
    tokens = []
    pos = 0
    n = len(source)
    while pos < n:
        m = _TOKEN_RE.match(source, pos)
        if m is None or m.end() == m.start():
            stripped = source[pos:].lstrip()
            if not stripped:
                break
            bad_at = n - len(stripped)
            raise ParseError(f"unexpected character {source[bad_at]!r}", bad_at)
        if m.lastgroup == "number":
            tokens.append(("number", m.group("number"), m.start("number")))
        elif m.lastgroup == "name":
            tokens.append(("name", m.group("name"), m.start("name")))
        else:
            tokens.append(("op", m.group("op"), m.start("op")))
        pos = m.end()
    tokens.append(("end", "", n))
    return tokens


class _Parser:
    def __init__(self, source: str):
        self.source = source
        self.tokens = _tokenize(source)
        self.i = 0
        self.depth = 0

    def peek(self):
        return self.tokens[self.i]

    def advance(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect_op(self, op):
        kind, text, pos = self.peek()
        if kind != "op" or text != op:
            raise ParseError(f"got {text!r}" if kind != "end" else "unexpected end of input",
                             pos, expected=(repr(op),))
        return self.advance()

    def _enter(self, pos):
        self.depth += 1
        if self.depth > _MAX_DEPTH:
            raise ParseError("expression nested too deeply", pos)

    def parse(self) -> Expr:
        node = self.sum()
        kind, text, pos = self.peek()
        if kind != "end":
            raise ParseError(f"unexpected trailing input {text!r}", pos,
                             expected=("operator", "end of input"))
        return node

    def sum(self) -> Expr:
        kind, _, pos = self.peek()
        self._enter(pos)
        try:
            node = self.product()
            while True:
                kind, text, _ = self.peek()
                if kind == "op" and text in "+-":
                    self.advance()
                    node = BinOp(text, node, self.product())
                else:
                    return node
        finally:
            self.depth -= 1

    def product(self) -> Expr:
        node = self.unary()
        while True:
            kind, text, _ = self.peek()
            if kind == "op" and text in "*/":
                self.advance()
                node = BinOp(text, node, self.unary())
            else:
                return node

    def unary(self) -> Expr:
        kind, text, pos = self.peek()
        self._enter(pos)
        try:
            if kind == "op" and text == "-":
                self.advance()
                return Neg(self.unary())
            return self.power()
        finally:
            self.depth -= 1

    def power(self) -> Expr:
        node = self.atom()
        kind, text, _ = self.peek()
        if kind == "op" and text == "^":
            self.advance()
            return BinOp("^", node, self.unary())
        return node

    def atom(self) -> Expr:
        kind, text, pos = self.advance()
        if kind == "number":
            return Const(float(text))
        if kind == "name":
            if text in VARIABLES:
                return Var(text)
            if text in CONSTANTS:
                return Const(CONSTANTS[text])
            if text in FUNCTIONS:
                self.expect_op("(")
                arg = self.sum()
                self.expect_op(")")
                return Call(text, arg)
            raise ParseError(f"unknown identifier {text!r}", pos,
                             expected=("x", "u", "pi", "e") + FUNCTIONS)
        if kind == "op" and text == "(":
            node = self.sum()
            self.expect_op(")")
            return node
        raise ParseError(f"got {text!r}" if kind != "end" else "unexpected end of input",
                         pos, expected=("number", "identifier", "'('", "'-'"))


def parse(source: str) -> Expr:
    """Parse expression source into an AST; raises ParseError with a position
    and the expected-token set on malformed input."""
    if not isinstance(source, str):
        raise ParseError("expression source must be text", 0)
    return _Parser(source).parse()


def _exact_int_pow(base, n: int, node):
    if n == 0:
        return base * 0 + 1.0
    acc = base
    for _ in range(abs(n) - 1):
        acc = acc * base
    if n < 0:
        zero = base == 0.0
        if np.any(zero):
            raise EvaluationError("zero base with negative exponent",
                                  index=_bad_index(zero), detail=to_source(node))
        return 1.0 / acc
    return acc


def _bad_index(mask):
    if isinstance(mask, np.ndarray):
        return int(np.argmax(mask))
    return None


def _pow(base, exponent, node):
    if np.ndim(exponent) == 0:
        e = float(exponent)
        if e == round(e) and abs(e) <= _EXACT_POW_LIMIT:
            return _exact_int_pow(base, int(round(e)), node)
    non_integer = exponent != np.round(exponent)
    bad = (base < 0.0) & non_integer
    if np.any(bad):
        raise EvaluationError("negative base raised to a non-integer power",
                              index=_bad_index(bad), detail=to_source(node))
    zero_neg = (base == 0.0) & (exponent < 0.0)
    if np.any(zero_neg):
        raise EvaluationError("zero base with negative exponent",
                              index=_bad_index(zero_neg), detail=to_source(node))
    if isinstance(base, np.ndarray) or isinstance(exponent, np.ndarray):
        return np.power(base, exponent)
    return math.pow(base, float(exponent))


def _eval(node: Expr, x, u):
    if isinstance(node, Const):
        return node.value
    if isinstance(node, Var):
        return x if node.name == "x" else u
    if isinstance(node, Neg):
        return -_eval(node.operand, x, u)
    if isinstance(node, Call):
        v = _eval(node.operand, x, u)
        if node.fn == "ln":
            bad = v <= 0.0
            if np.any(bad):
                raise EvaluationError("ln of a non-positive value",
                                      index=_bad_index(bad), detail=to_source(node))
            return np.log(v) if isinstance(v, np.ndarray) else math.log(v)
        if node.fn == "sqrt":
            bad = v < 0.0
            if np.any(bad):
                raise EvaluationError("sqrt of a negative value",
                                      index=_bad_index(bad), detail=to_source(node))
            return np.sqrt(v) if isinstance(v, np.ndarray) else math.sqrt(v)
        if node.fn == "exp":
            return np.exp(v) if isinstance(v, np.ndarray) else _scalar_exp(v, node)
        if node.fn == "sin":
            return np.sin(v) if isinstance(v, np.ndarray) else math.sin(v)
        if node.fn == "cos":
            return np.cos(v) if isinstance(v, np.ndarray) else math.cos(v)
        return np.abs(v) if isinstance(v, np.ndarray) else abs(v)
    lhs = _eval(node.lhs, x, u)
    rhs = _eval(node.rhs, x, u)
    if node.op == "+":
        return lhs + rhs
    if node.op == "-":
        return lhs - rhs
    if node.op == "*":
        return lhs * rhs
    if node.op == "/":
        bad = rhs == 0.0
        if np.any(bad):
            raise EvaluationError("division by zero",
                                  index=_bad_index(bad), detail=to_source(node))
        return lhs / rhs
    return _pow(lhs, rhs, node)


def _scalar_exp(v, node):
    try:
        return math.exp(v)
    except OverflowError:
        raise EvaluationError("exp overflow", detail=to_source(node)) from None


def evaluate(node: Expr, x: float, u: float) -> float:
    """Evaluate at a scalar point; sqrt of a negative, ln of a non-positive,
    division by zero and non-finite results raise EvaluationError rather than
    propagating NaN."""
    out = _eval(node, float(x), float(u))
    out = float(out)
    if not math.isfinite(out):
        raise EvaluationError("non-finite result", x=float(x), u=float(u))
    return out


def evaluate_array(node: Expr, x: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Elementwise evaluation over numpy arrays; domain failures carry the
    index of the first offending element."""
    x = np.asarray(x, dtype=float)
    u = np.asarray(u, dtype=float)
    out = _eval(node, x, u)
    if np.ndim(out) == 0:
        out = np.full(np.broadcast(x, u).shape, float(out))
    return out


def free_variables(node: Expr) -> set[str]:
    if isinstance(node, Var):
        return {node.name}
    if isinstance(node, Neg):
        return free_variables(node.operand)
    if isinstance(node, Call):
        return free_variables(node.operand)
    if isinstance(node, BinOp):
        return free_variables(node.lhs) | free_variables(node.rhs)
    return set()


def to_source(node: Expr) -> str:
    """Canonical fully parenthesized unparser; parse(to_source(e)) reproduces e."""
    if isinstance(node, Const):
        return repr(node.value)
    if isinstance(node, Var):
        return node.name
    if isinstance(node, Neg):
        return f"(-{to_source(node.operand)})"
    if isinstance(node, Call):
        return f"{node.fn}({to_source(node.operand)})"
    return f"({to_source(node.lhs)} {node.op} {to_source(node.rhs)})"
