import random

import pytest

from helpers import CB_VARS, cb_problem, cb_system, f
from sdsynth.intervals import IntervalSet, parse_interval_set
from sdsynth.lang import FALSE, TRUE
from sdsynth.logic import equivalent, find_model, is_satisfiable
from sdsynth.forward import fa_sequence, modes_attainable, one_fa, one_fa_branches, one_fa_pre
from sdsynth.system import CPCondition, SystemState, run, satisfies

SYS = cb_system()
MODES = CB_VARS.modes
PRE = CPCondition(f("cnt = 0"), IntervalSet.of(0, 1))
TT, FF = {"xs": True}, {"xs": False}


def same(cp, text, ivs):
    return equivalent(cp.c_cond, f(text), MODES) and cp.p_cond.close_to(parse_interval_set(ivs), 1e-6)


def test_one_fa_pre_examples():
    assert same(one_fa_pre(SYS, TT, "Acl", PRE), "cnt = 1 && xa = Acl && xs", "[1.4, 1.5]")
    brk = one_fa_pre(SYS, TT, "Brk", PRE)
    assert not is_satisfiable(brk.c_cond, MODES)
    assert brk.p_cond.close_to(IntervalSet.of(0.3, 0.5), 1e-6)
    for sout in (TT, FF):
        for m in MODES:
            assert not is_satisfiable(one_fa_pre(SYS, sout, m, CPCondition(FALSE, PRE.p_cond)).c_cond, MODES)


def test_one_fa_examples():
    assert same(one_fa(SYS, PRE), "(cnt = 0 || cnt = 1) && xa = Acl", "[1, 1.5]")
    out = one_fa(SYS, CPCondition(FALSE, IntervalSet()))
    assert out.c_cond == FALSE and out.p_cond.empty


def test_two_step_by_hand():
    # from [1, 1.5]: tt keeps all of it (cnt 1 -> Acl, cnt 2 -> Brk); ff keeps [1, 1.2) (reset, Acl)
    two = fa_sequence(cb_problem(steps=2), truncate=False)[2]
    assert same(two, "((cnt = 0 || cnt = 1) && xa = Acl) || (cnt = 2 && xa = Brk)", "[0.5, 1] | [1.5, 1.75]")


def test_sequence_entries():
    fa = fa_sequence(cb_problem(steps=4), truncate=False)
    assert fa[0] is not None and fa[0].c_cond == PRE.c_cond and fa[0].p_cond == PRE.p_cond
    assert len(fa) == 5 and not any(fa.truncated)
    assert same(fa[1], "(cnt = 0 || cnt = 1) && xa = Acl", "[1, 1.5]")
    assert fa[3].p_cond.close_to(parse_interval_set("[0.3, 0.5] | [1, 1.5] | [1.75, 1.875]"), 1e-6)
    # the backward child of the root over [1, 2] sees exactly the two upper parts
    assert (fa[3].p_cond & IntervalSet.of(1, 2)).close_to(parse_interval_set("[1, 1.5] | [1.75, 1.875]"), 1e-6)


def test_truncation_flags():
    fa = fa_sequence(cb_problem(steps=4))
    assert fa.truncated == [False, False, True, True, True]
    assert all(fa[k].c_cond == TRUE for k in (2, 3, 4))
    plain = fa_sequence(cb_problem(steps=4), truncate=False)
    for k in range(5):
        assert fa[k].p_cond == plain[k].p_cond
    assert fa.c_size() < plain.c_size()


def test_trigger_is_swappable():
    never = fa_sequence(cb_problem(steps=3), trigger=lambda sys, br: False)
    assert not any(never.truncated)
    assert modes_attainable(SYS, one_fa_branches(SYS, one_fa(SYS, PRE)))
    assert not modes_attainable(SYS, one_fa_branches(SYS, PRE))


def test_compositional():
    fa = fa_sequence(cb_problem(steps=4), truncate=False)
    cp = PRE
    for k in range(1, 5):
        cp = one_fa(SYS, cp)
        assert equivalent(cp.c_cond, fa[k].c_cond, MODES) and cp.p_cond == fa[k].p_cond


@pytest.mark.parametrize("truncate", [False, True])
def test_over_approximation(truncate):
    fa = fa_sequence(cb_problem(steps=4), truncate=truncate)
    plain = fa_sequence(cb_problem(steps=4), truncate=False)
    rng = random.Random(11 + truncate)
    sigma0 = find_model(PRE.c_cond, CB_VARS)
    for _ in range(300):
        st0 = SystemState(sigma0.with_sense({"xs": rng.random() < 0.5}).with_act(rng.choice(MODES)), rng.uniform(0, 1))
        k = rng.randint(1, 4)
        trace = run(SYS, st0, [rng.uniform(-0.2, 0.2) for _ in range(k)])
        for j, s in enumerate(trace):
            assert satisfies(s, fa[j])
            if satisfies(s, plain[j]):
                assert satisfies(s, fa[j])
