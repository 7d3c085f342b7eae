"""
Cruise control with a noisy speed sensor
========================================

Three modes pull the speed toward 19, 5 and 4 at rate 0.02.  The sensor
reads true when the speed is within 0.25 of the input, and the controller
switches mode as the run of true readings grows.  The full problem asks for
``cnt = 100`` after 1000 cycles, which takes a few minutes.  This script
runs a shortened horizon by default; set ``STEPS = 1000`` for the full run.
"""

# %%
import time
from dataclasses import replace

from sdsynth import fixture_path, load_problem, solve_report, verify_answer
from sdsynth.lang import parse_formula
from sdsynth.system import CPCondition

STEPS = 60

problem = load_problem(fixture_path("cruise.sds"))
if STEPS != problem.steps:
    # a reachable target for the short horizon: a run of 20 true readings
    post = CPCondition(parse_formula("cnt = 20", problem.system.vars), problem.post.p_cond)
    problem = replace(problem, steps=STEPS, post=post)
print(problem.post, "after", problem.steps, "steps")

# %%
t0 = time.perf_counter()
ans, stats = solve_report(problem)
print(f"{time.perf_counter() - t0:.1f}s, backtracks={stats.backtracks}")
print("final:", ans.trace[-1].c_state.think, ans.trace[-1].c_state.act)
print("verified:", verify_answer(problem, ans))
