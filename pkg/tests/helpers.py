"""Shared fixtures-by-construction and hypothesis strategies."""
from __future__ import annotations

import itertools
import math
from fractions import Fraction

from hypothesis import strategies as st

from sdsynth.intervals import Interval, IntervalSet, parse_interval
from sdsynth.lang import (
    FALSE, TRUE, Act, ActAssign, And, Assign, BinOp, Cmp, If, Mode, ModeEq, Not, Num,
    Or, Seq, Sense, SKIP, Var, VarTable, parse_controller, parse_formula,
)
from sdsynth.plant import PlantSpec
from sdsynth.semantics import Valuation
from sdsynth.sensor import SensorSpec
from sdsynth.system import CPCondition, SynthesisProblem, SystemSpec

CB_VARS = VarTable(think=("cnt",), sense=("xs",), act="xa", modes=("Acl", "Brk"))
CB_CONTROLLER = "if xs then cnt := cnt + 1 else cnt := 0; if cnt < 2 then xa := Acl else xa := Brk"


def cb_system(ode_steps: int = 1000) -> SystemSpec:
    plant = PlantSpec({"Acl": "(2 - v) * log(2)", "Brk": "-0.5"}, state="v", steps=ode_steps)
    sensor = SensorSpec.parse({"xs": "v + i >= 1"}, parse_interval("[-0.2, 0.2]"), "v", "i")
    return SystemSpec(parse_controller(CB_CONTROLLER, CB_VARS), plant, sensor, CB_VARS)


def cb_problem(steps: int = 4, post=None) -> SynthesisProblem:
    sys = cb_system()
    pre = CPCondition(parse_formula("cnt = 0", CB_VARS), IntervalSet.of(0, 1))
    post = post or CPCondition(TRUE, IntervalSet.of(1.5, 2))
    return SynthesisProblem(sys, pre, post, steps)


def f(text: str, vars: VarTable = CB_VARS):
    return parse_formula(text, vars)


def val(cnt=0, xs=False, xa="Acl") -> Valuation:
    return Valuation({"cnt": cnt}, {"xs": xs}, xa)


# ---------------------------------------------------------------------------
# Random syntax over a small vocabulary

V = VarTable(think=("x", "y"), sense=("s",), act="xa", modes=("A", "B"))

small_int = st.integers(-3, 3)


def aexps(linear: bool = True, max_leaves: int = 6):
    leaves = st.one_of(small_int.map(lambda n: Num(n)), st.sampled_from([Var("x"), Var("y")]))

    def extend(children):
        ops = st.sampled_from(["+", "-"])
        bin_ = st.builds(BinOp, ops, children, children)
        scaled = st.builds(lambda c, e: BinOp("*", Num(c), e), small_int, children)
        if linear:
            return st.one_of(bin_, scaled)
        prod = st.builds(lambda a, b: BinOp("*", a, b), children, children)
        return st.one_of(bin_, scaled, prod)

    return st.recursive(leaves, extend, max_leaves=max_leaves)


def atoms(linear: bool = True):
    cmp = st.builds(Cmp, st.sampled_from(["=", "<", "<=", ">", ">="]), aexps(linear, 4), aexps(linear, 4))
    mode = st.sampled_from([ModeEq(Act("xa"), Mode("A")), ModeEq(Act("xa"), Mode("B"))])
    return st.one_of(cmp, cmp, st.just(Sense("s")), mode, st.sampled_from([TRUE, FALSE]))


def formulas(linear: bool = True, max_leaves: int = 8):
    def extend(children):
        return st.one_of(
            children.map(Not),
            st.lists(children, min_size=2, max_size=3).map(lambda xs: And(tuple(xs))),
            st.lists(children, min_size=2, max_size=3).map(lambda xs: Or(tuple(xs))),
        )

    return st.recursive(atoms(linear), extend, max_leaves=max_leaves)


def bexps():
    cmp = st.builds(Cmp, st.sampled_from(["=", "<", "<=", ">", ">="]), aexps(True, 3), aexps(True, 3))
    base = st.one_of(cmp, st.just(Sense("s")), st.sampled_from([TRUE, FALSE]))

    def extend(children):
        return st.one_of(
            children.map(Not),
            st.lists(children, min_size=2, max_size=2).map(lambda xs: And(tuple(xs))),
            st.lists(children, min_size=2, max_size=2).map(lambda xs: Or(tuple(xs))),
        )

    return st.recursive(base, extend, max_leaves=3)


def commands(linear: bool = True, max_leaves: int = 5):
    assign = st.builds(Assign, st.sampled_from(["x", "y"]), aexps(linear, 3))
    act = st.builds(ActAssign, st.just("xa"), st.sampled_from(["A", "B"]))
    leaves = st.one_of(st.just(SKIP), assign, assign, act)

    def extend(children):
        return st.one_of(st.builds(Seq, children, children), st.builds(If, bexps(), children, children))

    return st.recursive(leaves, extend, max_leaves=max_leaves)


quarter = st.integers(-12, 12).map(lambda n: Fraction(n, 4))


def valuations():
    return st.builds(
        lambda x, y, s, a: Valuation({"x": x, "y": y}, {"s": s}, a),
        quarter, quarter, st.booleans(), st.sampled_from(["A", "B"]),
    )


def grid_valuations(step=Fraction(1, 4), lo=-2, hi=2):
    """Every valuation of V with x, y on a finite grid."""
    n = int((hi - lo) / step)
    pts = [lo + k * step for k in range(n + 1)]
    for x, y, s, a in itertools.product(pts, pts, (True, False), ("A", "B")):
        yield Valuation({"x": x, "y": y}, {"s": s}, a)


def sorted_intervals():
    """Random normalized interval sets with finite endpoints."""
    ends = st.lists(st.integers(-20, 20), min_size=0, max_size=8, unique=True).map(sorted)

    def build(es, flags):
        parts = []
        for k in range(0, len(es) - 1, 2):
            lc, hc = flags[k % len(flags)], flags[(k + 1) % len(flags)]
            parts.append(Interval(es[k] / 4, es[k + 1] / 4, lc, hc))
        return IntervalSet(parts)

    return st.builds(build, ends, st.lists(st.booleans(), min_size=1, max_size=8))


def close(a: float, b: float, tol: float = 1e-6) -> bool:
    return math.isclose(a, b, abs_tol=tol)
