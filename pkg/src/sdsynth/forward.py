"""Forward over-approximation of the reachable CP-conditions, step by step."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Mapping, Optional

from .intervals import IntervalSet, union
from .lang import TRUE, Act, FALSE, Mode, ModeEq, conj, disj, pretty
from .logic import exists_vars, is_satisfiable, simplify, sp, sp_sense
from .plant import FORWARD
from .sensor import sensor_preimage
from .system import CPCondition, SynthesisProblem, SystemSpec


def sense_stage(sys: SystemSpec, sout: Mapping[str, bool], cp: CPCondition) -> CPCondition:
    phi = cp.c_cond
    for xs in sys.vars.sense:
        phi = sp_sense(xs, sout[xs], phi, sys.modes)
    return CPCondition(phi, cp.p_cond & sensor_preimage(sys.sensor, sout))


def think_stage(sys: SystemSpec, cp: CPCondition) -> CPCondition:
    return CPCondition(sp(sys.controller, cp.c_cond, sys.modes), cp.p_cond)


def act_stage(sys: SystemSpec, m: str, cp: CPCondition) -> CPCondition:
    phi = simplify(conj(cp.c_cond, ModeEq(Act(sys.vars.act), Mode(m))), sys.modes, sys.vars.act)
    return CPCondition(phi, sys.plant.flow_interval(m, cp.p_cond, FORWARD))


def one_fa_pre(sys: SystemSpec, sout: Mapping[str, bool], m: str, cp: CPCondition) -> CPCondition:
    """Symbolic one step for a fixed sensor output and mode."""
    return act_stage(sys, m, think_stage(sys, sense_stage(sys, sout, cp)))


def _branches(sys: SystemSpec, cp: CPCondition):
    """Yield (sout, mode, result) for every branch, sharing the think stage per output."""
    for sout in sys.sensor.outputs():
        thought = think_stage(sys, sense_stage(sys, sout, cp))
        for m in sys.modes:
            yield sout, m, act_stage(sys, m, thought)


def _satisfiable(sys, cp: CPCondition) -> bool:
    return not cp.p_cond.empty and is_satisfiable(cp.c_cond, sys.modes)


def one_fa_branches(sys: SystemSpec, cp: CPCondition) -> list:
    """All (sout, mode, one_fa_pre result) triples in canonical order."""
    return list(_branches(sys, cp))


def unify(sys: SystemSpec, branches: list) -> CPCondition:
    """Disjunction/union over the satisfiable branches; sense variables are projected."""
    formulas, sets = [], []
    for _, _, res in branches:
        if _satisfiable(sys, res):
            formulas.append(res.c_cond)
            sets.append(res.p_cond)
    if not formulas:
        return CPCondition(FALSE, IntervalSet())
    phi = exists_vars(disj(*formulas), sense=sys.vars.sense, modes=sys.modes, act_name=sys.vars.act)
    return CPCondition(phi, union(*sets))


def one_fa(sys: SystemSpec, cp: CPCondition) -> CPCondition:
    return unify(sys, one_fa_branches(sys, cp))


def modes_attainable(sys: SystemSpec, branches: list) -> bool:
    """Truncation trigger: every mode is the outcome of some branch with satisfiable C-part."""
    seen = {m for _, m, res in branches if is_satisfiable(res.c_cond, sys.modes)}
    return seen == set(sys.modes)


@dataclass
class FASequence:
    entries: list
    truncated: list = field(default_factory=list)

    def __getitem__(self, k: int) -> CPCondition:
        return self.entries[k]

    def __len__(self) -> int:
        return len(self.entries)

    def c_size(self) -> int:
        """Total printed size of the C-conditions."""
        return sum(len(pretty(e.c_cond)) for e in self.entries)


def fa_sequence(
    problem: SynthesisProblem,
    truncate: bool = True,
    trigger: Optional[Callable[[SystemSpec, list], bool]] = None,
) -> FASequence:
    """Entries 0..T; once the trigger holds at entry k, later C-conditions become true."""
    sys = problem.system
    trigger = trigger or modes_attainable
    entries = [problem.pre]
    flags = [False]
    cut = False
    for _ in range(problem.steps):
        branches = one_fa_branches(sys, entries[-1])
        if truncate and not cut and trigger(sys, branches):
            cut = True
        nxt = unify(sys, branches)
        if cut:
            nxt = CPCondition(TRUE, nxt.p_cond)
        entries.append(nxt)
        flags.append(cut)
    return FASequence(entries, flags)
