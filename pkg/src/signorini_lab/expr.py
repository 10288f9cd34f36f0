"""Boundary-data mini-language.

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := ('-' | '+') unary | power
    power  := atom ('^' unary)?
    atom   := NUMBER | NAME | NAME '(' expr ')' | '(' expr ')'
    vector := expr (',' expr)*

Names are ``x``, ``y``, ``pi`` and ``e``; functions are sin, cos, tan, exp,
ln (alias log), sqrt and abs.  Evaluation is vectorized with numpy.
"""
from __future__ import annotations

import re

import numpy as np

__all__ = ["Expression", "ExpressionError", "parse"]

_FUNCS = {
    "sin": np.sin,
    "cos": np.cos,
    "tan": np.tan,
    "exp": np.exp,
    "ln": np.log,
    "log": np.log,
    "sqrt": np.sqrt,
    "abs": np.abs,
}
_CONSTS = {"pi": np.pi, "e": np.e}
_VARS = ("x", "y")
_TOKEN = re.compile(r"\s*(?:(\d+\.?\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?)|([A-Za-z_]\w*)|(\*\*|[-+*/^(),]))")


class ExpressionError(ValueError):
    pass


def _tokenize(text: str):
    pos, out = 0, []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ExpressionError(f"unexpected character {text[pos:].strip()[:1]!r} at position {pos}")
        num, name, op = m.groups()
        if num is not None:
            out.append(("num", float(num)))
        elif name is not None:
            out.append(("name", name))
        else:
            out.append(("op", "^" if op == "**" else op))
        pos = m.end()
    out.append(("end", None))
    return out


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self, kind=None, value=None):
        tok = self.toks[self.i]
        if (kind and tok[0] != kind) or (value is not None and tok[1] != value):
            want = value if value is not None else kind
            raise ExpressionError(f"expected {want!r}, found {tok[1]!r}")
        self.i += 1
        return tok

    def is_op(self, *ops):
        tok = self.peek()
        return tok[0] == "op" and tok[1] in ops

    def vector(self):
        items = [self.expr()]
        while self.is_op(","):
            self.take()
            items.append(self.expr())
        self.take("end")
        return items

    def expr(self):
        node = self.term()
        while self.is_op("+", "-"):
            op = self.take()[1]
            node = (op, node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.is_op("*", "/"):
            op = self.take()[1]
            node = (op, node, self.unary())
        return node

    def unary(self):
        if self.is_op("-"):
            self.take()
            return ("neg", self.unary())
        if self.is_op("+"):
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.is_op("^"):
            self.take()
            return ("^", base, self.unary())
        return base

    def atom(self):
        kind, val = self.peek()
        if kind == "num":
            self.take()
            return ("num", val)
        if kind == "name":
            self.take()
            if self.is_op("("):
                if val not in _FUNCS:
                    raise ExpressionError(f"unknown function {val!r}")
                self.take()
                arg = self.expr()
                self.take("op", ")")
                return ("call", val, arg)
            if val in _VARS:
                return ("var", val)
            if val in _CONSTS:
                return ("num", _CONSTS[val])
            raise ExpressionError(f"unknown name {val!r}")
        if kind == "op" and val == "(":
            self.take()
            node = self.expr()
            self.take("op", ")")
            return node
        if kind == "end":
            raise ExpressionError("unexpected end of expression")
        raise ExpressionError(f"unexpected token {val!r}")


def _eval(node, x, y):
    kind = node[0]
    if kind == "num":
        return node[1]
    if kind == "var":
        return x if node[1] == "x" else y
    if kind == "neg":
        return -_eval(node[1], x, y)
    if kind == "call":
        return _FUNCS[node[1]](_eval(node[2], x, y))
    a, b = _eval(node[1], x, y), _eval(node[2], x, y)
    if kind == "+":
        return a + b
    if kind == "-":
        return a - b
    if kind == "*":
        return a * b
    if kind == "/":
        return a / b
    return np.power(a, b)


def _has_vars(node) -> bool:
    if node[0] == "var":
        return True
    return any(_has_vars(c) for c in node[1:] if isinstance(c, tuple))


class Expression:
    """Parsed scalar or vector expression in x and y."""

    def __init__(self, text: str):
        if not isinstance(text, str) or not text.strip():
            raise ExpressionError("empty expression")
        self.text = text.strip()
        self.components = _Parser(self.text).vector()

    @property
    def ncomp(self) -> int:
        return len(self.components)

    @property
    def is_constant(self) -> bool:
        return not any(_has_vars(c) for c in self.components)

    def constant_value(self):
        if not self.is_constant:
            raise ExpressionError(f"{self.text!r} depends on x or y")
        with np.errstate(all="ignore"):
            vals = [float(_eval(c, 0.0, 0.0)) for c in self.components]
        return vals[0] if self.ncomp == 1 else np.array(vals)

    def __call__(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        with np.errstate(all="ignore"):
            cols = [np.broadcast_to(np.asarray(_eval(c, x, y), dtype=float), np.broadcast(x, y).shape)
                    for c in self.components]
        return cols[0].copy() if self.ncomp == 1 else np.stack(cols, axis=-1)

    def __repr__(self):
        return f"Expression({self.text!r})"


def parse(text: str) -> Expression:
    return Expression(text)
