"""Input synthesis for sampled-data systems.

A digital controller program, a family of 1-D plant ODEs indexed by mode and
a threshold sensor form a closed loop.  Given pre- and postconditions on the
controller and plant and a horizon T, :func:`solve` returns an initial state
and T inputs that steer the loop into the postcondition.
"""
from .errors import (
    DriftError, FlowError, FragmentError, InputDomainError, ParseError, ProblemFileError,
    SubstitutionError, SynthError, UnboundVariableError, UnsatisfiableError,
)
from .forward import FASequence, fa_sequence, one_fa, one_fa_pre
from .intervals import Interval, IntervalSet, intersect, union, volume
from .lang import VarTable, parse_controller, parse_formula, pretty, substitute
from .logic import (
    eliminate_exists, equivalent, find_model, is_satisfiable, simplify, sp, sp_sense, wp,
)
from .plant import FORWARD, REVERSE, PlantSpec, flow, flow_interval
from .problem_file import fixture_path, load_problem, parse_problem
from .search import SearchNode, SearchStats, expand_child, one_bs_pre, search
from .semantics import Valuation, eval_aexp, eval_bexp, exec_cmd, holds
from .sensor import SensorSpec, feasible_inputs, sense_eval, sensor_preimage
from .synth import choose_initial, replay_modes, solve, solve_report, synthesize_inputs, verify_answer
from .system import (
    Answer, CPCondition, SynthesisProblem, SystemSpec, SystemState, run, satisfies, step,
)

__version__ = "0.1.0"

__all__ = [
    "Answer",
    "choose_initial",
    "CPCondition",
    "DriftError",
    "eliminate_exists",
    "equivalent",
    "eval_aexp",
    "eval_bexp",
    "exec_cmd",
    "expand_child",
    "fa_sequence",
    "FASequence",
    "feasible_inputs",
    "find_model",
    "fixture_path",
    "flow",
    "flow_interval",
    "FlowError",
    "FORWARD",
    "FragmentError",
    "holds",
    "InputDomainError",
    "intersect",
    "Interval",
    "IntervalSet",
    "is_satisfiable",
    "load_problem",
    "one_bs_pre",
    "one_fa",
    "one_fa_pre",
    "parse_controller",
    "parse_formula",
    "parse_problem",
    "ParseError",
    "PlantSpec",
    "pretty",
    "ProblemFileError",
    "replay_modes",
    "REVERSE",
    "run",
    "satisfies",
    "search",
    "SearchNode",
    "SearchStats",
    "sense_eval",
    "sensor_preimage",
    "SensorSpec",
    "simplify",
    "solve",
    "solve_report",
    "sp",
    "sp_sense",
    "step",
    "substitute",
    "SubstitutionError",
    "SynthError",
    "SynthesisProblem",
    "synthesize_inputs",
    "SystemSpec",
    "SystemState",
    "UnboundVariableError",
    "union",
    "UnsatisfiableError",
    "Valuation",
    "VarTable",
    "verify_answer",
    "volume",
    "wp",
]

