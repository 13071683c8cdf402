"""Small recursive-descent parser for immersion / metric expressions.

Grammar (standard precedence, ^ right-associative and tighter than unary
minus):

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := '-' unary | power
    power  := atom ('^' unary)?
    atom   := NUMBER | VAR | FUNC '(' expr ')' | '(' expr ')'

Variables are t1..t9; the constants pi and e are folded to numbers at parse
time.  Unknown identifiers are rejected with their byte offset.  Printing a
tree and reparsing it yields an equal tree.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Sequence, Union

FUNCTIONS = {
    "sin": math.sin,
    "cos": math.cos,
    "tan": math.tan,
    "sinh": math.sinh,
    "cosh": math.cosh,
    "tanh": math.tanh,
    "exp": math.exp,
    "log": math.log,
    "sqrt": math.sqrt,
}

CONSTANTS = {"pi": math.pi, "e": math.e}

MAX_VARS = 9
VAR_NAMES = tuple(f"t{i}" for i in range(1, MAX_VARS + 1))


class ExprSyntaxError(ValueError):
    """Parse failure, with the byte offset of the offending token."""

    def __init__(self, message: str, offset: int):
        self.offset = offset
        super().__init__(f"{message} at offset {offset}")


@dataclass(frozen=True)
class Num:
    value: float

    def __str__(self):
        return repr(self.value)


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Neg:
    operand: "Expr"

    def __str__(self):
        return f"(-{self.operand})"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expr"
    right: "Expr"

    def __str__(self):
        return f"({self.left} {self.op} {self.right})"


@dataclass(frozen=True)
class Call:
    func: str
    arg: "Expr"

    def __str__(self):
        return f"{self.func}({self.arg})"


Expr = Union[Num, Var, Neg, BinOp, Call]

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>\d+(?:\.\d*)?(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?)"
    r"|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<op>[-+*/^(),]))"
)


def _tokenize(text: str):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None or m.end() == pos:
            stripped = text[pos:].lstrip()
            if not stripped:
                break
            offset = len(text) - len(stripped)
            raise ExprSyntaxError(f"unexpected character {stripped[0]!r}", offset)
        if m.group("num") is not None:
            tokens.append(("num", m.group("num"), m.start("num")))
        elif m.group("ident") is not None:
            tokens.append(("ident", m.group("ident"), m.start("ident")))
        else:
            tokens.append(("op", m.group("op"), m.start("op")))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def advance(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect_op(self, op: str):
        kind, val, off = self.peek()
        if kind != "op" or val != op:
            raise ExprSyntaxError(f"expected {op!r}", off)
        self.advance()

    def parse(self) -> Expr:
        node = self.expr()
        kind, val, off = self.peek()
        if kind != "end":
            raise ExprSyntaxError(f"unexpected token {val!r}", off)
        return node

    def expr(self) -> Expr:
        node = self.term()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in "+-":
                self.advance()
                node = BinOp(val, node, self.term())
            else:
                return node

    def term(self) -> Expr:
        node = self.unary()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in "*/":
                self.advance()
                node = BinOp(val, node, self.unary())
            else:
                return node

    def unary(self) -> Expr:
        kind, val, _ = self.peek()
        if kind == "op" and val == "-":
            self.advance()
            return Neg(self.unary())
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        kind, val, _ = self.peek()
        if kind == "op" and val == "^":
            self.advance()
            return BinOp("^", base, self.unary())
        return base

    def atom(self) -> Expr:
        kind, val, off = self.advance()
        if kind == "num":
            return Num(float(val))
        if kind == "ident":
            if val in FUNCTIONS:
                self.expect_op("(")
                arg = self.expr()
                k2, v2, o2 = self.peek()
                if k2 == "op" and v2 == ",":
                    raise ExprSyntaxError(f"function '{val}' takes one argument", o2)
                self.expect_op(")")
                return Call(val, arg)
            if val in VAR_NAMES:
                return Var(val)
            if val in CONSTANTS:
                return Num(CONSTANTS[val])
            raise ExprSyntaxError(f"unknown identifier '{val}'", off)
        if kind == "op" and val == "(":
            node = self.expr()
            self.expect_op(")")
            return node
        raise ExprSyntaxError(f"unexpected token {val!r}" if val else "unexpected end of input", off)


def parse_expr(text: str) -> Expr:
    """Parse an expression over t1..t9 into a tree."""
    if not text or not text.strip():
        raise ExprSyntaxError("empty expression", 0)
    return _Parser(text).parse()


def evaluate(node: Expr, values: Sequence[float]) -> float:
    """Evaluate a tree with t1..tn bound to ``values``."""
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Var):
        idx = int(node.name[1:]) - 1
        if idx >= len(values):
            raise ValueError(f"variable {node.name} not bound ({len(values)} values given)")
        return float(values[idx])
    if isinstance(node, Neg):
        return -evaluate(node.operand, values)
    if isinstance(node, Call):
        return FUNCTIONS[node.func](evaluate(node.arg, values))
    if isinstance(node, BinOp):
        a = evaluate(node.left, values)
        b = evaluate(node.right, values)
        if node.op == "+":
            return a + b
        if node.op == "-":
            return a - b
        if node.op == "*":
            return a * b
        if node.op == "/":
            return a / b
        if node.op == "^":
            return a ** b
    raise TypeError(f"not an expression node: {node!r}")


def max_variable(node: Expr) -> int:
    """Highest variable index used (0 when the expression is constant)."""
    if isinstance(node, Var):
        return int(node.name[1:])
    if isinstance(node, Neg):
        return max_variable(node.operand)
    if isinstance(node, Call):
        return max_variable(node.arg)
    if isinstance(node, BinOp):
        return max(max_variable(node.left), max_variable(node.right))
    return 0
