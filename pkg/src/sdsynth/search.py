"""Backward depth-first search over (sensor output, mode) choices.

The tree is rooted at the postcondition; a child at depth ``d + 1`` labels
time ``k = T - d - 1`` and is intersected with the forward approximant at
``k``.  Only the current DFS stack is kept in memory.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from typing import Mapping, Optional

from .forward import FASequence
from .lang import Act, Mode, ModeEq, Sense, conj, substitute, assigns_act_on_all_paths
from .logic import exists_vars, is_satisfiable, simplify, wp
from .plant import REVERSE
from .sensor import sensor_preimage
from .system import CPCondition, SynthesisProblem, SystemSpec

STRATEGIES = ("robustness", "volume", "random", "canonical")


def sout_key(sout: Mapping[str, bool]) -> tuple:
    return tuple(sorted(sout.items()))


@dataclass(frozen=True)
class SearchNode:
    path: tuple  # root-first ((sout_key, mode), ...)
    label: CPCondition
    depth: int


@dataclass
class SearchStats:
    backtracks: int = 0
    expanded: int = 0
    pruned: int = 0
    times_ms: dict = field(default_factory=dict)


def one_bs_pre(sys: SystemSpec, sout: Mapping[str, bool], m: str, cp: CPCondition) -> CPCondition:
    """Reverse of one step: act with reversed flow, then wp, then sense."""
    phi = conj(cp.c_cond, ModeEq(Act(sys.vars.act), Mode(m)))
    xs = sys.plant.flow_interval(m, cp.p_cond, REVERSE)
    phi = wp(sys.controller, phi, sys.modes, simp=False)
    for name in sys.vars.sense:
        phi = substitute(phi, Sense(name), sout[name])
    phi = simplify(phi, sys.modes, sys.vars.act)
    return CPCondition(phi, xs & sensor_preimage(sys.sensor, sout))


class BackwardSearch:
    """Node expansion against a fixed forward approximation, with caching."""

    def __init__(self, problem: SynthesisProblem, fa: FASequence):
        self.problem = problem
        self.sys = problem.system
        self.fa = fa
        self._bs_cache = {}
        self._fa_c = {}
        self.drop_act = assigns_act_on_all_paths(self.sys.controller)

    def fa_c(self, k: int):
        """C-part of entry k; the act variable is projected when the controller overwrites it."""
        if k not in self._fa_c:
            phi = self.fa[k].c_cond
            if k >= 1 and self.drop_act:
                phi = exists_vars(phi, act=True, modes=self.sys.modes, act_name=self.sys.vars.act)
            self._fa_c[k] = phi
        return self._fa_c[k]

    def bs(self, sout, m, cp: CPCondition) -> CPCondition:
        key = (cp.c_cond, cp.p_cond, sout_key(sout), m)
        hit = self._bs_cache.get(key)
        if hit is None:
            hit = one_bs_pre(self.sys, sout, m, cp)
            if len(self._bs_cache) > 100_000:
                self._bs_cache.clear()
            self._bs_cache[key] = hit
        return hit

    def root(self) -> SearchNode:
        label = self.problem.post
        if self.problem.steps == 0:
            # the root is also the leaf: fold in the precondition
            pre = self.fa[0]
            label = CPCondition(simplify(conj(pre.c_cond, label.c_cond), self.sys.modes, self.sys.vars.act),
                                pre.p_cond & label.p_cond)
        return SearchNode((), label, 0)

    def expand_child(self, node: SearchNode, sout, m: str) -> SearchNode:
        k = self.problem.steps - node.depth - 1
        if k < 0:
            raise ValueError("cannot expand a node at full depth")
        b = self.bs(sout, m, node.label)
        fa_k = self.fa[k]
        phi = simplify(conj(self.fa_c(k), b.c_cond), self.sys.modes, self.sys.vars.act)
        label = CPCondition(phi, fa_k.p_cond & b.p_cond)
        return SearchNode(node.path + ((sout_key(sout), m),), label, node.depth + 1)

    def satisfiable(self, node: SearchNode) -> bool:
        return not node.label.p_cond.empty and is_satisfiable(node.label.c_cond, self.sys.modes)

    def children(self, node: SearchNode) -> list:
        out = []
        for sout in self.sys.sensor.outputs():
            for m in self.sys.modes:
                out.append(self.expand_child(node, sout, m))
        return out

    def order(self, node: SearchNode, kids: list, strategy: str, rng: random.Random) -> list:
        if strategy == "canonical":
            return kids
        if strategy == "random":
            kids = list(kids)
            rng.shuffle(kids)
            return kids
        if strategy == "volume":
            # infinite volumes rank first; sort is stable so ties stay canonical
            return sorted(kids, key=lambda c: -c.label.p_cond.volume())
        if strategy == "robustness":
            k = self.problem.steps - node.depth - 1
            big = self.fa[k].p_cond.largest()
            centre = big.midpoint() if big is not None else 0.0

            def dist(c):
                mids = [p.midpoint() for p in c.label.p_cond]
                return min((abs(x - centre) for x in mids), default=math.inf)

            return sorted(kids, key=dist)
        raise ValueError(f"unknown strategy {strategy!r}")


def search(
    sys: SystemSpec,
    problem: SynthesisProblem,
    fa: FASequence,
    strategy: str = "robustness",
    seed: int = 0,
):
    """Depth-first search; returns (root-first path or None, stats)."""
    path, stats, _ = search_leaf(problem, fa, strategy, seed)
    return path, stats


def search_leaf(problem: SynthesisProblem, fa: FASequence, strategy: str = "robustness", seed: int = 0):
    """As :func:`search`, also returning the successful leaf node."""
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}")
    bs = BackwardSearch(problem, fa)
    stats = SearchStats()
    rng = random.Random(seed)
    root = bs.root()
    if not bs.satisfiable(root):
        return None, stats, None
    T = problem.steps
    if T == 0:
        return (), stats, root
    # stack of (node, remaining children)
    stack = []

    def push(node):
        stats.expanded += 1
        kids = bs.children(node)
        live = []
        for c in kids:
            if bs.satisfiable(c):
                live.append(c)
            else:
                stats.pruned += 1
        stack.append((node, list(reversed(bs.order(node, live, strategy, rng)))))

    push(root)
    while stack:
        node, todo = stack[-1]
        if not todo:
            stack.pop()
            stats.backtracks += 1
            continue
        child = todo.pop()
        if child.depth == T:
            return child.path, stats, child
        push(child)
    return None, stats, None


def expand_child(sys: SystemSpec, fa: FASequence, node: SearchNode, sout, m: str,
                 problem: Optional[SynthesisProblem] = None, steps: Optional[int] = None) -> SearchNode:
    """One child of ``node``; the horizon comes from ``problem`` or ``steps``."""
    if problem is None:
        if steps is None:
            steps = len(fa) - 1
        problem = SynthesisProblem(sys, fa[0], node.label, steps)
    return BackwardSearch(problem, fa).expand_child(node, sout, m)
