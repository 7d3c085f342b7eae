"""Sampled-data systems: the sense-think-act step, runs and CP-conditions."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .intervals import IntervalSet
from .lang import Cmd, Formula, VarTable, iter_commands, pretty, ActAssign, Assign
from .logic import is_satisfiable
from .plant import FORWARD, PlantSpec
from .semantics import Valuation, exec_cmd, holds
from .sensor import SensorSpec, sense_eval

EPS_MEMBER = 1e-6


@dataclass(frozen=True, eq=False)
class SystemSpec:
    controller: Cmd
    plant: PlantSpec
    sensor: SensorSpec
    vars: VarTable

    def __post_init__(self):
        if set(self.plant.modes) != set(self.vars.modes):
            raise ValueError(f"plant modes {self.plant.modes} differ from declared {self.vars.modes}")
        if set(self.sensor.sense_vars) != set(self.vars.sense):
            raise ValueError(f"sensor defines {self.sensor.sense_vars}, declared {self.vars.sense}")
        for c in iter_commands(self.controller):
            if isinstance(c, ActAssign) and (c.var != self.vars.act or c.mode not in self.vars.modes):
                raise ValueError(f"bad act assignment {c.var} := {c.mode}")
            if isinstance(c, Assign) and c.var not in self.vars.think:
                raise ValueError(f"assignment to undeclared think variable {c.var}")

    @property
    def modes(self) -> tuple:
        return self.vars.modes


@dataclass(frozen=True)
class SystemState:
    c_state: Valuation
    p_state: float


@dataclass(frozen=True)
class CPCondition:
    c_cond: Formula
    p_cond: IntervalSet

    def __str__(self) -> str:
        return f"{pretty(self.c_cond)} / {self.p_cond}"


@dataclass(frozen=True, eq=False)
class SynthesisProblem:
    system: SystemSpec
    pre: CPCondition
    post: CPCondition
    steps: int

    def __post_init__(self):
        if self.steps < 0:
            raise ValueError("the number of steps must be non-negative")


@dataclass(frozen=True)
class Answer:
    initial: SystemState
    inputs: tuple
    trace: tuple
    path: tuple  # time-ordered ((sensor output dict, mode), ...)


def step(sys: SystemSpec, st: SystemState, i: float) -> SystemState:
    """One cycle: sense, then think, then act."""
    sigma = st.c_state.with_sense(sense_eval(sys.sensor, st.p_state, i))
    sigma = exec_cmd(sys.controller, sigma)
    x = sys.plant.flow(sigma.act, st.p_state, FORWARD)
    return SystemState(sigma, x)


def run(sys: SystemSpec, st0: SystemState, inputs: Sequence[float]) -> list:
    out = [st0]
    for i in inputs:
        out.append(step(sys, out[-1], i))
    return out


def satisfies(st: SystemState, cp: CPCondition, eps: float = EPS_MEMBER) -> bool:
    return cp.p_cond.contains(st.p_state, eps) and holds(st.c_state, {}, cp.c_cond)


def cp_satisfiable(cp: CPCondition, modes: Sequence[str] | None = None) -> bool:
    """Unsatisfiable exactly when the formula is or the interval set is empty."""
    return not cp.p_cond.empty and is_satisfiable(cp.c_cond, modes)
