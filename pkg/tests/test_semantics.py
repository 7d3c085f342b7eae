from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from helpers import CB_CONTROLLER, CB_VARS, bexps, commands, f, formulas, val, valuations
from sdsynth.errors import UnboundVariableError
from sdsynth.lang import And, BinOp, If, LVar, Not, Num, Or, Seq, Skip, Var, parse_controller
from sdsynth.semantics import Valuation, eval_aexp, eval_bexp, exec_cmd, holds

CTRL = parse_controller(CB_CONTROLLER, CB_VARS)


def test_eval_aexp_examples():
    assert eval_aexp(BinOp("+", Var("cnt"), Num(1)), val(cnt=0)) == 1
    assert eval_aexp(Num(5), val(cnt=7)) == 5
    assert eval_aexp(BinOp("*", Num(2), LVar("_v0")), Valuation(), {"_v0": 0.9}) == pytest.approx(1.8)


def test_eval_unbound():
    with pytest.raises(UnboundVariableError):
        eval_aexp(Var("zz"), val())
    with pytest.raises(UnboundVariableError):
        eval_aexp(LVar("_v9"), val(), {})


def test_eval_bexp_examples():
    assert eval_bexp(f("cnt < 2"), val(cnt=1))
    assert not eval_bexp(f("xs"), val(xs=False))


@given(st.floats(-1e6, 1e6, allow_nan=False), st.booleans())
def test_tautology(cnt, xs):
    assert eval_bexp(f("!(cnt >= 1) || cnt >= 1"), val(cnt=cnt, xs=xs))


def test_exec_examples():
    s = val(cnt=0, xs=True, xa="Acl")
    assert exec_cmd(Skip(), s) == s
    assert exec_cmd(CTRL, s) == val(cnt=1, xs=True, xa="Acl")
    assert exec_cmd(CTRL, val(cnt=1, xs=True, xa="Acl")) == val(cnt=2, xs=True, xa="Brk")
    assert exec_cmd(CTRL, val(cnt=5, xs=False, xa="Brk")) == val(cnt=0, xs=False, xa="Acl")


def test_holds_examples():
    assert holds(val(), None, f("true"))
    assert holds(val(cnt=0), None, f("cnt = 0 || cnt = 1"))
    assert not holds(val(xa="Brk"), None, f("xa = Acl"))


def test_float_equality_tolerance():
    assert eval_bexp(f("cnt = 1"), val(cnt=1 + 1e-12))
    assert not eval_bexp(f("cnt = 1"), val(cnt=1 + 1e-6))
    # exact values compare exactly
    assert not eval_bexp(f("cnt = 1"), val(cnt=Fraction(1) + Fraction(1, 10**12)))


def test_holds_quantified():
    from sdsynth.lang import parse_formula

    phi = parse_formula("exists _v0. (_v0 = 0 && cnt = _v0 + 1)", CB_VARS, allow_logical=True)
    assert holds(val(cnt=1), None, phi)
    assert not holds(val(cnt=2), None, phi)


@given(commands(), valuations())
def test_determinism(c, sigma):
    assert exec_cmd(c, sigma) == exec_cmd(c, sigma)


@given(bexps(), commands(), commands(), valuations())
def test_conditional_law(b, c1, c2, sigma):
    expected = exec_cmd(c1, sigma) if eval_bexp(b, sigma) else exec_cmd(c2, sigma)
    assert exec_cmd(If(b, c1, c2), sigma) == expected


@given(commands(), commands(), valuations())
def test_sequencing_law(c1, c2, sigma):
    assert exec_cmd(Seq(c1, c2), sigma) == exec_cmd(c2, exec_cmd(c1, sigma))


@given(formulas(), formulas(), valuations())
def test_connectives_pointwise(p, q, sigma):
    hp, hq = holds(sigma, None, p), holds(sigma, None, q)
    assert holds(sigma, None, Not(p)) == (not hp)
    assert holds(sigma, None, And((p, q))) == (hp and hq)
    assert holds(sigma, None, Or((p, q))) == (hp or hq)


def test_counts_are_reals():
    out = exec_cmd(CTRL, val(cnt=0.5, xs=True))
    assert out.think["cnt"] == 1.5 and out.act == "Acl"
