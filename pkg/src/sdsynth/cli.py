"""Command-line entry point: ``sdsynth {synth, simulate, fa}``."""
from __future__ import annotations

import argparse
import json
import logging
import sys
from fractions import Fraction
from pathlib import Path

from .errors import DriftError, ProblemFileError, SynthError
from .lang import pretty
from .forward import fa_sequence
from .problem_file import load_problem
from .search import STRATEGIES
from .semantics import Valuation
from .synth import solve_report, verify_answer
from .system import EPS_MEMBER, Answer, SystemState, run

EXIT_OK, EXIT_NONE, EXIT_DRIFT = 0, 1, 2
EXIT_BAD_INPUT = 2  # malformed problem or trace file


class SchemaError(SynthError):
    pass


def _num(v):
    if isinstance(v, Fraction):
        return v.numerator if v.denominator == 1 else float(v)
    if isinstance(v, float) and v.is_integer() and abs(v) < 2**53:
        return int(v)
    return v


def state_json(st: SystemState) -> dict:
    c = st.c_state
    return {
        "c_state": {
            "think": {k: _num(v) for k, v in c.think.items()},
            "sense": dict(c.sense),
            "act": c.act,
        },
        "p_state": float(st.p_state),
    }


def answer_json(ans: Answer, stats=None, record_times: bool = False) -> dict:
    doc = {
        "initial": state_json(ans.initial),
        "inputs": [float(i) for i in ans.inputs],
        "path": [{"sense": dict(s), "mode": m} for s, m in ans.path],
        "trace": [state_json(s) for s in ans.trace],
    }
    if stats is not None:
        doc["stats"] = stats_json(stats, record_times)
    return doc


def stats_json(stats, record_times: bool) -> dict:
    out = {"backtracks": stats.backtracks, "expanded": stats.expanded, "pruned": stats.pruned}
    if record_times:
        out["times_ms"] = {k: round(v, 3) for k, v in stats.times_ms.items()}
    return out


def _state_from_json(doc, where: str) -> SystemState:
    try:
        c = doc["c_state"]
        think = c.get("think", {})
        sense = c.get("sense", {})
        act = c["act"]
        x = doc["p_state"]
    except (KeyError, TypeError, AttributeError):
        raise SchemaError(f"{where}: expected c_state{{think, sense, act}} and p_state") from None
    if not isinstance(x, (int, float)) or isinstance(x, bool):
        raise SchemaError(f"{where}: p_state must be a number")
    if not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in think.values()):
        raise SchemaError(f"{where}: think values must be numbers")
    if not all(isinstance(v, bool) for v in sense.values()):
        raise SchemaError(f"{where}: sense values must be booleans")
    return SystemState(Valuation(dict(think), dict(sense), act), float(x))


def answer_from_json(doc, problem) -> Answer:
    if not isinstance(doc, dict):
        raise SchemaError("trace file must hold a JSON object")
    for key in ("initial", "inputs"):
        if key not in doc:
            raise SchemaError(f"missing field {key!r}")
    initial = _state_from_json(doc["initial"], "initial")
    vars = problem.system.vars
    if set(initial.c_state.think) != set(vars.think) or set(initial.c_state.sense) != set(vars.sense):
        raise SchemaError("initial state does not match the problem's variables")
    if initial.c_state.act not in vars.modes:
        raise SchemaError(f"unknown mode {initial.c_state.act!r}")
    inputs = doc["inputs"]
    if not isinstance(inputs, list) or not all(
        isinstance(i, (int, float)) and not isinstance(i, bool) for i in inputs
    ):
        raise SchemaError("inputs must be an array of numbers")
    if len(inputs) != problem.steps:
        raise SchemaError(f"expected {problem.steps} inputs, found {len(inputs)}")
    path = tuple((p["sense"], p["mode"]) for p in doc.get("path", []))
    return Answer(initial, tuple(float(i) for i in inputs), (initial,), path)


def _problem(args):
    return load_problem(args.problem, ode_steps=args.ode_steps)


def cmd_synth(args) -> int:
    problem = _problem(args)
    try:
        ans, stats = solve_report(
            problem, args.strategy, args.seed, not args.no_truncate_fa, args.tol, args.retry_widen
        )
    except DriftError as exc:
        print(f"drift: {exc} {exc.diagnostics}", file=sys.stderr)
        return EXIT_DRIFT
    info = sys.stdout if args.out else sys.stderr
    times = " ".join(f"{k}={v:.1f}ms" for k, v in stats.times_ms.items())
    print(f"backtracks={stats.backtracks} expanded={stats.expanded} pruned={stats.pruned} {times}", file=info)
    if ans is None:
        print("no answer", file=info)
        return EXIT_NONE
    text = json.dumps(answer_json(ans, stats, args.record_times), indent=2, sort_keys=True) + "\n"
    if args.out:
        Path(args.out).write_text(text)
        print(f"answer written to {args.out}", file=info)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_simulate(args) -> int:
    problem = _problem(args)
    try:
        doc = json.loads(Path(args.trace).read_text())
        ans = answer_from_json(doc, problem)
    except (OSError, json.JSONDecodeError, SchemaError) as exc:
        print(f"schema error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    try:
        trace = run(problem.system, ans.initial, ans.inputs)
    except SynthError as exc:
        print(f"replay failed: {exc}", file=sys.stderr)
        return EXIT_NONE
    for k, st in enumerate(trace):
        c = st.c_state
        think = ", ".join(f"{n}={_num(v)}" for n, v in c.think.items())
        sense = ", ".join(f"{n}={'tt' if v else 'ff'}" for n, v in c.sense.items())
        print(f"{k:5d}  {think}  {sense}  {problem.system.vars.act}={c.act}  x={st.p_state!r}")
    ok = verify_answer(problem, ans, args.tol)
    print("verified" if ok else "NOT verified")
    return EXIT_OK if ok else EXIT_NONE


def cmd_fa(args) -> int:
    problem = _problem(args)
    if not 0 <= args.k <= problem.steps:
        print(f"k must lie in 0..{problem.steps}", file=sys.stderr)
        return EXIT_BAD_INPUT
    from dataclasses import replace

    fa = fa_sequence(replace(problem, steps=args.k), not args.no_truncate_fa)
    entry = fa[args.k]
    flag = "  (truncated)" if fa.truncated[args.k] else ""
    print(f"{pretty(entry.c_cond)} / {entry.p_cond}{flag}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="sdsynth", description="Input synthesis for sampled-data systems.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("problem", help="problem file (.sds)")
        sp.add_argument("--ode-steps", type=int, default=1000, help="RK4 steps per cycle")
        sp.add_argument("--tol", type=float, default=EPS_MEMBER, help="interval membership tolerance")

    s = sub.add_parser("synth", help="synthesize an initial state and inputs")
    common(s)
    s.add_argument("--strategy", choices=STRATEGIES, default="robustness")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--no-truncate-fa", action="store_true")
    s.add_argument("--retry-widen", action="store_true", help="double the tolerance up to 4 times on drift")
    s.add_argument("--record-times", action="store_true", help="store phase timings in the trace")
    s.add_argument("--out", help="write the trace here instead of standard output")
    s.set_defaults(func=cmd_synth)

    r = sub.add_parser("simulate", help="replay and verify a trace")
    common(r)
    r.add_argument("trace", help="trace file (JSON)")
    r.set_defaults(func=cmd_simulate)

    f = sub.add_parser("fa", help="print one forward-approximation entry")
    common(f)
    f.add_argument("k", type=int)
    f.add_argument("--no-truncate-fa", action="store_true")
    f.set_defaults(func=cmd_fa)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except ProblemFileError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT


if __name__ == "__main__":
    sys.exit(main())
