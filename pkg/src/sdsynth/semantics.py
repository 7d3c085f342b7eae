"""Concrete semantics: evaluation of expressions, commands and formulas."""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Mapping

from .errors import SynthError, UnboundVariableError
from .lang import (
    Act, ActAssign, And, Assign, BinOp, Cmp, Const, Exists, Forall, If, LVar,
    Mode, ModeEq, Not, Num, Or, Seq, Sense, Skip, Var, is_quantifier_free,
)

EPS_EQ = 1e-9


@dataclass(frozen=True)
class Valuation:
    """A controller state: think vars to reals, sense vars to booleans, a mode."""

    think: Mapping[str, object] = field(default_factory=dict)
    sense: Mapping[str, bool] = field(default_factory=dict)
    act: str = ""

    def with_think(self, name, value) -> "Valuation":
        return replace(self, think={**self.think, name: value})

    def with_sense(self, values: Mapping[str, bool]) -> "Valuation":
        return replace(self, sense={**self.sense, **values})

    def with_act(self, mode: str) -> "Valuation":
        return replace(self, act=mode)

    def __hash__(self):
        return hash((tuple(sorted(self.think.items())), tuple(sorted(self.sense.items())), self.act))


def eval_aexp(a, sigma: Valuation, gamma: Mapping[str, object] | None = None):
    """Value of ``a``; exact when every leaf is rational, float otherwise."""
    if isinstance(a, Num):
        return a.value
    if isinstance(a, Var):
        try:
            return sigma.think[a.name]
        except KeyError:
            raise UnboundVariableError(a.name) from None
    if isinstance(a, LVar):
        try:
            return (gamma or {})[a.name]
        except KeyError:
            raise UnboundVariableError(a.name) from None
    if isinstance(a, BinOp):
        x = eval_aexp(a.left, sigma, gamma)
        y = eval_aexp(a.right, sigma, gamma)
        if a.op == "+":
            return x + y
        if a.op == "-":
            return x - y
        if a.op == "*":
            return x * y
    raise TypeError(a)


def compare(op: str, x, y, eps_eq: float = EPS_EQ) -> bool:
    exact = isinstance(x, (int, Fraction)) and isinstance(y, (int, Fraction))
    if op == "=":
        return x == y if exact else abs(x - y) <= eps_eq
    if op == "<":
        return x < y
    if op == "<=":
        return x <= y
    if op == ">":
        return x > y
    if op == ">=":
        return x >= y
    raise ValueError(op)


def _mode_value(m, sigma):
    if isinstance(m, Mode):
        return m.name
    if isinstance(m, Act):
        return sigma.act
    raise TypeError(m)


def _holds_qf(sigma, gamma, phi, eps_eq) -> bool:
    if isinstance(phi, Const):
        return phi.value
    if isinstance(phi, Sense):
        try:
            return sigma.sense[phi.name]
        except KeyError:
            raise UnboundVariableError(phi.name) from None
    if isinstance(phi, Cmp):
        return compare(phi.op, eval_aexp(phi.left, sigma, gamma), eval_aexp(phi.right, sigma, gamma), eps_eq)
    if isinstance(phi, ModeEq):
        return _mode_value(phi.left, sigma) == _mode_value(phi.right, sigma)
    if isinstance(phi, Not):
        return not _holds_qf(sigma, gamma, phi.arg, eps_eq)
    if isinstance(phi, And):
        return all(_holds_qf(sigma, gamma, a, eps_eq) for a in phi.args)
    if isinstance(phi, Or):
        return any(_holds_qf(sigma, gamma, a, eps_eq) for a in phi.args)
    if isinstance(phi, (Exists, Forall)):
        raise SynthError("residual quantifier during evaluation")
    raise TypeError(phi)


def eval_bexp(b, sigma: Valuation, eps_eq: float = EPS_EQ) -> bool:
    return _holds_qf(sigma, None, b, eps_eq)


def holds(sigma: Valuation, gamma, phi, eps_eq: float = EPS_EQ) -> bool:
    """Truth of ``phi`` at ``(sigma, gamma)``.

    Quantified formulas are first reduced by quantifier elimination; free
    logical variables left after that are read from ``gamma``.
    """
    if not is_quantifier_free(phi):
        from .logic import eliminate_quantifiers

        phi = eliminate_quantifiers(phi)
    return _holds_qf(sigma, gamma, phi, eps_eq)


def exec_cmd(c, sigma: Valuation) -> Valuation:
    if isinstance(c, Skip):
        return sigma
    if isinstance(c, Assign):
        return sigma.with_think(c.var, eval_aexp(c.expr, sigma))
    if isinstance(c, ActAssign):
        return sigma.with_act(c.mode)
    if isinstance(c, Seq):
        return exec_cmd(c.second, exec_cmd(c.first, sigma))
    if isinstance(c, If):
        return exec_cmd(c.then if eval_bexp(c.cond, sigma) else c.orelse, sigma)
    raise TypeError(c)
