"""Real-valued expressions for plant right-hand sides and sensor predicates.

Grammar: numbers, named variables, ``+ - * /``, unary minus, parentheses and
``log(c)`` / ``exp(c)`` applied to a constant subexpression.  Expressions are
compiled to plain Python closures for the integrator's inner loop.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

from .errors import ParseError
from .lang import tokenize

_FUNCS = {"log": math.log, "exp": math.exp}


@dataclass(frozen=True)
class RNum:
    value: float


@dataclass(frozen=True)
class RVar:
    name: str


@dataclass(frozen=True)
class RBin:
    op: str
    left: object
    right: object


@dataclass(frozen=True)
class RNeg:
    arg: object


class _RealParser:
    def __init__(self, text: str, names: Sequence[str]):
        self.toks = tokenize(text)
        self.pos = 0
        self.names = set(names)

    @property
    def tok(self):
        return self.toks[self.pos]

    def at(self, *texts):
        return self.tok.kind in ("op", "id") and self.tok.text in texts

    def fail(self, msg):
        raise ParseError(msg, self.tok.line, self.tok.col)

    def expr(self):
        left = self.term()
        while self.at("+", "-"):
            op = self.toks[self.pos].text
            self.pos += 1
            left = RBin(op, left, self.term())
        return left

    def term(self):
        left = self.unary()
        while self.at("*", "/"):
            op = self.tok.text
            self.pos += 1
            left = RBin(op, left, self.unary())
        return left

    def unary(self):
        if self.at("-"):
            self.pos += 1
            return RNeg(self.unary())
        if self.at("+"):
            self.pos += 1
            return self.unary()
        return self.atom()

    def atom(self):
        t = self.tok
        if t.kind == "num":
            self.pos += 1
            return RNum(float(t.text))
        if self.at("("):
            self.pos += 1
            e = self.expr()
            if not self.at(")"):
                self.fail("expected ')'")
            self.pos += 1
            return e
        if t.kind == "id":
            self.pos += 1
            if t.text in _FUNCS:
                if not self.at("("):
                    self.fail(f"expected '(' after {t.text}")
                self.pos += 1
                arg = self.expr()
                if not self.at(")"):
                    self.fail("expected ')'")
                self.pos += 1
                value = constant_value(arg)
                if value is None:
                    raise ParseError(f"{t.text} is only allowed on constants", t.line, t.col)
                try:
                    return RNum(_FUNCS[t.text](value))
                except (ValueError, OverflowError):
                    raise ParseError(f"{t.text}({value}) is undefined", t.line, t.col) from None
            if t.text in self.names:
                return RVar(t.text)
            raise ParseError(f"unknown name {t.text!r}", t.line, t.col)
        self.fail(f"unexpected {t.text or 'end of input'!r}")

    def done(self):
        if self.tok.kind != "eof":
            self.fail(f"unexpected {self.tok.text!r}")


def parse_real(text: str, names: Sequence[str]):
    p = _RealParser(text, names)
    e = p.expr()
    p.done()
    return e


def constant_value(e):
    if isinstance(e, RNum):
        return e.value
    if isinstance(e, RVar):
        return None
    if isinstance(e, RNeg):
        v = constant_value(e.arg)
        return None if v is None else -v
    l, r = constant_value(e.left), constant_value(e.right)
    if l is None or r is None:
        return None
    return _apply(e.op, l, r)


def _apply(op, l, r):
    if op == "+":
        return l + r
    if op == "-":
        return l - r
    if op == "*":
        return l * r
    if r == 0:
        raise ZeroDivisionError("division by zero in real expression")
    return l / r


def evaluate(e, env: dict) -> float:
    if isinstance(e, RNum):
        return e.value
    if isinstance(e, RVar):
        return env[e.name]
    if isinstance(e, RNeg):
        return -evaluate(e.arg, env)
    return _apply(e.op, evaluate(e.left, env), evaluate(e.right, env))


def _source(e) -> str:
    if isinstance(e, RNum):
        return repr(e.value)
    if isinstance(e, RVar):
        return e.name
    if isinstance(e, RNeg):
        return f"(-{_source(e.arg)})"
    return f"({_source(e.left)} {e.op} {_source(e.right)})"


def compile_real(e, args: Sequence[str]) -> Callable:
    """A Python function of ``args`` evaluating ``e``.

    The generated source only contains numeric literals, the argument names
    and arithmetic operators, all produced by the parser above.
    """
    src = f"lambda {', '.join(args)}: {_source(e)}"
    return eval(src, {"__builtins__": {}}, {})  # noqa: S307


def affine_coeffs(e, names: Sequence[str]) -> tuple:
    """(coefficients per name, constant) if ``e`` is affine, else ValueError."""
    if isinstance(e, RNum):
        return {n: 0.0 for n in names}, e.value
    if isinstance(e, RVar):
        return {n: (1.0 if n == e.name else 0.0) for n in names}, 0.0
    if isinstance(e, RNeg):
        c, k = affine_coeffs(e.arg, names)
        return {n: -v for n, v in c.items()}, -k
    lc, lk = affine_coeffs(e.left, names)
    rc, rk = affine_coeffs(e.right, names)
    if e.op in "+-":
        s = 1.0 if e.op == "+" else -1.0
        return {n: lc[n] + s * rc[n] for n in names}, lk + s * rk
    l_const = not any(lc.values())
    r_const = not any(rc.values())
    if e.op == "*":
        if l_const:
            return {n: lk * rc[n] for n in names}, lk * rk
        if r_const:
            return {n: rk * lc[n] for n in names}, lk * rk
        raise ValueError("product of non-constant terms is not affine")
    if not r_const:
        raise ValueError("division by a non-constant term is not affine")
    if rk == 0:
        raise ZeroDivisionError("division by zero")
    return {n: lc[n] / rk for n in names}, lk / rk
