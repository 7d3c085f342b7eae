"""Plant dynamics: per-mode 1-D ODEs integrated with fixed-step RK4 over one cycle."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .errors import FlowError
from .intervals import Interval, IntervalSet
from .realexpr import compile_real, parse_real

FORWARD = "forward"
REVERSE = "reverse"
DEFAULT_STEPS = 1000


@dataclass(frozen=True, eq=False)
class PlantSpec:
    """Right-hand sides ``x' = p_m(t, x)`` keyed by mode name.

    Solutions are assumed unique (the RHS should be Lipschitz on the working
    domain); under that assumption the one-cycle flow is increasing in the
    initial state, which the interval image relies on.
    """

    rhs: Mapping[str, str]
    state: str = "x"
    steps: int = DEFAULT_STEPS
    _fns: dict = field(default_factory=dict, init=False, repr=False, compare=False)
    _cache: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "rhs", dict(self.rhs))
        if self.steps < 1:
            raise ValueError("steps must be positive")
        for mode, text in self.rhs.items():
            expr = parse_real(text, ("t", self.state))
            self._fns[mode] = compile_real(expr, ("t", self.state))

    @property
    def modes(self) -> tuple:
        return tuple(self.rhs)

    def with_steps(self, steps: int) -> "PlantSpec":
        return PlantSpec(self.rhs, self.state, steps)

    def field(self, mode: str, direction: str = FORWARD):
        f = self._fns[mode]
        if direction == FORWARD:
            return f
        return lambda t, x: -f(1.0 - t, x)

    def flow(self, mode: str, x0: float, direction: str = FORWARD) -> float:
        key = (mode, float(x0), direction)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        out = rk4(self.field(mode, direction), float(x0), self.steps)
        if len(self._cache) > 200_000:
            self._cache.clear()
        self._cache[key] = out
        return out

    def flow_interval(self, mode: str, xs: IntervalSet, direction: str = FORWARD) -> IntervalSet:
        return flow_interval(self, mode, xs, direction)


def rk4(f, x0: float, steps: int = DEFAULT_STEPS) -> float:
    """Classical RK4 from t = 0 to t = 1 with ``steps`` equal steps."""
    if not math.isfinite(x0):
        raise FlowError(f"non-finite initial state {x0}")
    h = 1.0 / steps
    x = x0
    try:
        for n in range(steps):
            t = n * h
            k1 = f(t, x)
            k2 = f(t + h / 2, x + h / 2 * k1)
            k3 = f(t + h / 2, x + h / 2 * k2)
            k4 = f(t + h, x + h * k3)
            x = x + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
    except (ZeroDivisionError, OverflowError) as exc:
        raise FlowError(f"integration failed: {exc}") from exc
    if not math.isfinite(x):
        raise FlowError(f"integration produced non-finite value from x0={x0}")
    return x


def rk4_batch(f, x0: np.ndarray, steps: int = DEFAULT_STEPS) -> np.ndarray:
    """Vectorized RK4 for many initial states at once."""
    h = 1.0 / steps
    x = np.asarray(x0, dtype=float).copy()
    with np.errstate(all="raise"):
        try:
            for n in range(steps):
                t = n * h
                k1 = f(t, x)
                k2 = f(t + h / 2, x + h / 2 * k1)
                k3 = f(t + h / 2, x + h / 2 * k2)
                k4 = f(t + h, x + h * k3)
                x = x + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        except FloatingPointError as exc:
            raise FlowError(f"integration failed: {exc}") from exc
    if not np.all(np.isfinite(x)):
        raise FlowError("integration produced non-finite values")
    return x


def flow(plant: PlantSpec, mode: str, x0: float, direction: str = FORWARD) -> float:
    return plant.flow(mode, x0, direction)


def flow_many(plant: PlantSpec, mode: str, xs, direction: str = FORWARD) -> np.ndarray:
    """Flow an array of initial states in one vectorized integration."""
    return rk4_batch(plant.field(mode, direction), np.asarray(xs, dtype=float), plant.steps)


def flow_interval(plant: PlantSpec, mode: str, xs: IntervalSet, direction: str = FORWARD) -> IntervalSet:
    """Image of ``xs`` under the one-cycle flow, computed from component endpoints.

    Infinite endpoints are mapped to themselves.
    """
    out = []
    for p in xs:
        lo = p.lo if math.isinf(p.lo) else plant.flow(mode, p.lo, direction)
        hi = p.hi if math.isinf(p.hi) else plant.flow(mode, p.hi, direction)
        if lo <= hi:
            out.append(Interval(lo, hi, p.lo_closed, p.hi_closed))
        else:
            out.append(Interval(hi, lo, p.hi_closed, p.lo_closed))
    return IntervalSet(out)
