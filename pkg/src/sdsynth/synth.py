"""From a successful search path to a concrete initial state and input sequence."""
from __future__ import annotations

import logging
import time
from typing import Optional, Sequence

from .errors import DriftError, UnsatisfiableError
from .forward import fa_sequence
from .lang import VarTable
from .logic import find_model
from .search import search_leaf
from .sensor import feasible_inputs, pick_input, sense_eval
from .system import (
    EPS_MEMBER, Answer, CPCondition, SynthesisProblem, SystemSpec, SystemState, run, satisfies,
)

log = logging.getLogger(__name__)


def choose_initial(leaf: CPCondition, vars: VarTable) -> SystemState:
    big = leaf.p_cond.largest()
    if big is None:
        raise UnsatisfiableError("leaf plant condition is empty")
    return SystemState(find_model(leaf.c_cond, vars), big.midpoint())


def replay_modes(sys: SystemSpec, x0: float, modes: Sequence[str]) -> list:
    xs = [x0]
    for m in modes:
        xs.append(sys.plant.flow(m, xs[-1]))
    return xs


def synthesize_inputs(sys: SystemSpec, path: Sequence, xs: Sequence[float]) -> list:
    """Inputs realizing each time-ordered (sensor output, mode) step at the given states."""
    if len(xs) != len(path) + 1:
        raise ValueError("need one more plant state than path steps")
    inputs = []
    for k, ((sout, _), x) in enumerate(zip(path, xs)):
        sout = dict(sout)
        feas = feasible_inputs(sys.sensor, x, sout)
        if feas.empty:
            raise DriftError(
                f"no input yields the required sensor output at step {k}",
                step=k,
                diagnostics={"x": x, "sense": sout, "feasible": str(feas)},
            )
        inputs.append(pick_input(feas))
    return inputs


def verify_answer(problem: SynthesisProblem, ans: Answer, eps: float = EPS_MEMBER) -> bool:
    if len(ans.inputs) != problem.steps:
        return False
    try:
        trace = run(problem.system, ans.initial, ans.inputs)
    except Exception as exc:  # out-of-domain input or flow failure
        log.debug("replay failed: %s", exc)
        return False
    return satisfies(trace[0], problem.pre, eps) and satisfies(trace[-1], problem.post, eps)


def _path_followed(sys: SystemSpec, trace: list, path: Sequence, inputs: Sequence[float]) -> Optional[int]:
    """First step whose sensor output or mode deviates from the path, else None."""
    for k, ((sout, mode), i) in enumerate(zip(path, inputs)):
        st = trace[k]
        if sense_eval(sys.sensor, st.p_state, i) != dict(sout) or trace[k + 1].c_state.act != mode:
            return k
    return None


def solve_report(
    problem: SynthesisProblem,
    strategy: str = "robustness",
    seed: int = 0,
    truncate: bool = True,
    eps: float = EPS_MEMBER,
    retry_widen: bool = False,
):
    """Run all three phases; returns (Answer or None, SearchStats)."""
    sys = problem.system
    t0 = time.perf_counter()
    fa = fa_sequence(problem, truncate)
    t1 = time.perf_counter()
    path, stats, leaf = search_leaf(problem, fa, strategy, seed)
    t2 = time.perf_counter()
    stats.times_ms = {"fa": (t1 - t0) * 1e3, "search": (t2 - t1) * 1e3}
    if path is None:
        stats.times_ms["synth"] = 0.0
        return None, stats
    timed = list(reversed(path))
    initial = choose_initial(leaf.label, sys.vars)
    xs = replay_modes(sys, initial.p_state, [m for _, m in timed])
    inputs = synthesize_inputs(sys, timed, xs)
    trace = run(sys, initial, inputs)
    stats.times_ms["synth"] = (time.perf_counter() - t2) * 1e3

    bad = _path_followed(sys, trace, timed, inputs)
    if bad is not None:
        raise DriftError(f"replay left the search path at step {bad}", step=bad)
    tol = eps
    tries = 4 if retry_widen else 0
    while not (satisfies(trace[0], problem.pre, tol) and satisfies(trace[-1], problem.post, tol)):
        if tries == 0:
            raise DriftError(
                "replayed run misses the pre- or postcondition",
                step=problem.steps,
                diagnostics={"final": trace[-1].p_state, "tolerance": tol},
            )
        tries -= 1
        tol *= 2
        log.info("widening membership tolerance to %g", tol)
    path_out = tuple((dict(s), m) for s, m in timed)
    return Answer(initial, tuple(inputs), tuple(trace), path_out), stats


def solve(problem: SynthesisProblem, strategy: str = "robustness", seed: int = 0, truncate: bool = True,
          eps: float = EPS_MEMBER, retry_widen: bool = False) -> Optional[Answer]:
    return solve_report(problem, strategy, seed, truncate, eps, retry_widen)[0]
