"""Recursive-descent parser for source-term expressions.

Grammar (lowest to highest precedence)::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := '-' unary | power
    power  := atom ('^' unary)?          # right-associative
    atom   := NUMBER | NAME | FUNC '(' expr ')' | '(' expr ')'

Names are the variables ``x``, ``y`` and the constant ``pi``; functions are
sin, cos, exp, sqrt, abs. Evaluation is vectorised over numpy arrays.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ParseError

FUNCTIONS = {
    "sin": np.sin,
    "cos": np.cos,
    "exp": np.exp,
    "sqrt": np.sqrt,
    "abs": np.abs,
}
VARIABLES = ("x", "y")
CONSTANTS = {"pi": np.pi}

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)|(?P<name>[A-Za-z_]\w*)|(?P<op>[-+*/^()]))"
)


class Node:
    prec = 100

    def evaluate(self, x, y):
        raise NotImplementedError


@dataclass(frozen=True)
class Num(Node):
    value: float

    def evaluate(self, x, y):
        return np.full(np.broadcast(x, y).shape, self.value)

    def __str__(self):
        return repr(float(self.value))


@dataclass(frozen=True)
class Name(Node):
    name: str

    def evaluate(self, x, y):
        x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
        if self.name == "x":
            return x.copy()
        if self.name == "y":
            return y.copy()
        return np.full(x.shape, CONSTANTS[self.name])

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Neg(Node):
    arg: Node
    prec = 3

    def evaluate(self, x, y):
        return -self.arg.evaluate(x, y)

    def __str__(self):
        inner = str(self.arg)
        # nested negation prints as -(-x)
        if self.arg.prec < self.prec or isinstance(self.arg, Neg):
            inner = f"({inner})"
        return f"-{inner}"


@dataclass(frozen=True)
class Call(Node):
    func: str
    arg: Node

    def evaluate(self, x, y):
        v = self.arg.evaluate(x, y)
        if self.func == "sqrt" and np.any(v < 0):
            raise DomainError("sqrt of a negative number")
        return FUNCTIONS[self.func](v)

    def __str__(self):
        return f"{self.func}({self.arg})"


_BINARY_PREC = {"+": 1, "-": 1, "*": 2, "/": 2, "^": 4}


@dataclass(frozen=True)
class BinOp(Node):
    op: str
    left: Node
    right: Node

    @property
    def prec(self):
        return _BINARY_PREC[self.op]

    def evaluate(self, x, y):
        a = self.left.evaluate(x, y)
        b = self.right.evaluate(x, y)
        if self.op == "+":
            return a + b
        if self.op == "-":
            return a - b
        if self.op == "*":
            return a * b
        if self.op == "/":
            if np.any(b == 0):
                raise DomainError("division by zero")
            return a / b
        with np.errstate(invalid="ignore"):
            out = np.power(a, b)
        if np.any(np.isnan(out) & ~np.isnan(a) & ~np.isnan(b)):
            raise DomainError("fractional power of a negative number")
        return out

    def __str__(self):
        p = self.prec
        left, right = str(self.left), str(self.right)
        if self.op == "^":
            # right-associative: parenthesise a left operand of equal precedence
            if self.left.prec <= p:
                left = f"({left})"
            if self.right.prec < p and not isinstance(self.right, Neg):
                right = f"({right})"
        else:
            if self.left.prec < p:
                left = f"({left})"
            if self.right.prec <= p:
                right = f"({right})"
        return f"{left} {self.op} {right}" if p < 4 else f"{left}^{right}"


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = self._tokenize(text)
        self.pos = 0

    @staticmethod
    def _tokenize(text):
        out = []
        i = 0
        while i < len(text):
            m = _TOKEN.match(text, i)
            if m is None or m.end() == i:
                if text[i:].strip() == "":
                    break
                j = i + (len(text[i:]) - len(text[i:].lstrip()))
                raise ParseError(f"unexpected character {text[j]!r}", _byte_offset(text, j), text)
            kind = m.lastgroup
            start = m.start(kind)
            out.append((kind, m.group(kind), start))
            i = m.end()
        out.append(("eof", "", len(text)))
        return out

    def peek(self):
        return self.tokens[self.pos]

    def take(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def fail(self, message, tok=None):
        tok = tok or self.peek()
        what = "end of input" if tok[0] == "eof" else repr(tok[1])
        raise ParseError(f"{message}, found {what}", _byte_offset(self.text, tok[2]), self.text)

    def expect(self, value):
        tok = self.peek()
        if tok[1] != value or tok[0] != "op":
            self.fail(f"expected {value!r}")
        return self.take()

    def parse(self):
        node = self.expr()
        if self.peek()[0] != "eof":
            self.fail("unexpected token")
        return node

    def expr(self):
        node = self.term()
        while self.peek()[0] == "op" and self.peek()[1] in "+-":
            op = self.take()[1]
            node = BinOp(op, node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.peek()[0] == "op" and self.peek()[1] in "*/":
            op = self.take()[1]
            node = BinOp(op, node, self.unary())
        return node

    def unary(self):
        if self.peek()[0] == "op" and self.peek()[1] == "-":
            self.take()
            return Neg(self.unary())
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[0] == "op" and self.peek()[1] == "^":
            self.take()
            return BinOp("^", base, self.unary())
        return base

    def atom(self):
        tok = self.peek()
        kind, value, _ = tok
        if kind == "num":
            self.take()
            return Num(float(value))
        if kind == "name":
            self.take()
            if value in FUNCTIONS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return Call(value, arg)
            if value in VARIABLES or value in CONSTANTS:
                return Name(value)
            self.fail("unknown identifier", tok)
        if kind == "op" and value == "(":
            self.take()
            node = self.expr()
            self.expect(")")
            return node
        self.fail("expected a number, variable, function or '('")


def _byte_offset(text: str, char_index: int) -> int:
    return len(text[:char_index].encode("utf-8"))


def parse_expression(text: str) -> Node:
    """Parse ``text`` into an expression tree; raises ParseError."""
    return _Parser(text).parse()


def to_text(node: Node) -> str:
    """Canonical text form; ``parse_expression(to_text(n))`` rebuilds ``n``."""
    return str(node)
