"""
Looking inside the two symbolic phases
======================================

The forward phase over-approximates what is reachable after k cycles.  The
backward phase walks from the postcondition toward the start, one
(sensor output, mode) choice per level, and prunes any branch whose label
becomes unsatisfiable.
"""

# %%
from sdsynth import fa_sequence, fixture_path, load_problem
from sdsynth.search import BackwardSearch

problem = load_problem(fixture_path("count_brake.sds"))

# %%
# Without truncation every entry keeps its controller condition.
fa = fa_sequence(problem, truncate=False)
for k in range(len(fa)):
    print(k, fa[k])

# %%
# With truncation, the controller part is dropped once every mode is
# attainable; the plant part is unchanged.
short = fa_sequence(problem)
for k in range(len(short)):
    flag = "  (truncated)" if short.truncated[k] else ""
    print(k, short[k], flag)
print("printed size:", fa.c_size(), "vs", short.c_size())

# %%
# The four children of the root.  Two of them are pruned.
bs = BackwardSearch(problem, fa)
for child in bs.children(bs.root()):
    (sout, mode), = child.path
    print(dict(sout), mode, "|", child.label, "| live" if bs.satisfiable(child) else "| pruned")
