"""
Count-and-brake: synthesizing inputs end to end
===============================================

A car accelerates toward speed 2 in mode ``Acl`` and slows by 0.5 per cycle
in mode ``Brk``.  The controller counts consecutive cycles in which the
sensor reports ``v + i >= 1`` and brakes once the count reaches 2.  We ask
for a start with ``cnt = 0`` and ``v`` in [0, 1] that ends in [1.5, 2]
after four cycles.
"""

# %%
from sdsynth import fixture_path, load_problem, solve_report, verify_answer

problem = load_problem(fixture_path("count_brake.sds"))
print(problem.pre, "->", problem.post, "in", problem.steps, "steps")

# %%
# Phase 1 to 3 in one call.  The stats mirror what the CLI prints.
ans, stats = solve_report(problem, strategy="canonical")
print("backtracks:", stats.backtracks, "expanded:", stats.expanded, "pruned:", stats.pruned)

# %%
for k, (st, (sout, mode)) in enumerate(zip(ans.trace, ans.path)):
    print(f"t={k}  v={st.p_state:.4f}  input={ans.inputs[k]:+.3f}  xs={sout['xs']}  -> {mode}")
print(f"t={problem.steps}  v={ans.trace[-1].p_state:.4f}")

# %%
# Inputs sit in the middle of their feasible sets, so small integration
# error does not flip a sensor reading on replay.
print("verified:", verify_answer(problem, ans))
