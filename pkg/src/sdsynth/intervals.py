"""Finite unions of real intervals with exact open/closed endpoint tracking."""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Iterable, Sequence

INF = math.inf


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float
    lo_closed: bool = True
    hi_closed: bool = True

    def __post_init__(self):
        # infinite ends are always open
        if self.lo == -INF and self.lo_closed:
            object.__setattr__(self, "lo_closed", False)
        if self.hi == INF and self.hi_closed:
            object.__setattr__(self, "hi_closed", False)

    @property
    def empty(self) -> bool:
        if self.lo > self.hi:
            return True
        return self.lo == self.hi and not (self.lo_closed and self.hi_closed)

    @property
    def width(self) -> float:
        return self.hi - self.lo

    def contains(self, x: float, eps: float = 0.0) -> bool:
        if eps > 0:
            return self.lo - eps <= x <= self.hi + eps
        lo_ok = x > self.lo or (self.lo_closed and x == self.lo)
        hi_ok = x < self.hi or (self.hi_closed and x == self.hi)
        return lo_ok and hi_ok

    def midpoint(self) -> float:
        """Midpoint; unbounded sides are replaced by the finite bound ± 1."""
        lo, hi = self.lo, self.hi
        if lo == -INF and hi == INF:
            return 0.0
        if lo == -INF:
            return hi - 1.0
        if hi == INF:
            return lo + 1.0
        return lo + (hi - lo) / 2

    def __str__(self) -> str:
        left = "[" if self.lo_closed else "("
        right = "]" if self.hi_closed else ")"
        return f"{left}{fmt(self.lo)}, {fmt(self.hi)}{right}"


def fmt(x: float) -> str:
    if x == INF:
        return "inf"
    if x == -INF:
        return "-inf"
    s = f"{x:.12g}"
    return "0" if s == "-0" else s


class IntervalSet:
    """Normalized union: sorted, disjoint, non-touching, no empty parts."""

    __slots__ = ("parts",)

    def __init__(self, parts: Iterable[Interval] = ()):
        self.parts = _normalize(parts)

    @classmethod
    def of(cls, lo, hi, lo_closed=True, hi_closed=True) -> "IntervalSet":
        return cls([Interval(float(lo), float(hi), lo_closed, hi_closed)])

    @classmethod
    def everything(cls) -> "IntervalSet":
        return cls([Interval(-INF, INF, False, False)])

    @property
    def empty(self) -> bool:
        return not self.parts

    def __bool__(self):
        return bool(self.parts)

    def __iter__(self):
        return iter(self.parts)

    def __len__(self):
        return len(self.parts)

    def __eq__(self, other):
        return isinstance(other, IntervalSet) and self.parts == other.parts

    def __hash__(self):
        return hash(self.parts)

    def __repr__(self):
        return f"IntervalSet({str(self)!r})"

    def __str__(self):
        if not self.parts:
            return "empty"
        return " | ".join(str(p) for p in self.parts)

    def __and__(self, other):
        return intersect(self, other)

    def __or__(self, other):
        return union(self, other)

    def contains(self, x: float, eps: float = 0.0) -> bool:
        return any(p.contains(x, eps) for p in self.parts)

    def volume(self) -> float:
        return volume(self)

    def largest(self) -> Interval | None:
        """The widest component; the first one wins ties."""
        best = None
        for p in self.parts:
            if best is None or p.width > best.width:
                best = p
        return best

    def close_to(self, other: "IntervalSet", tol: float) -> bool:
        if len(self.parts) != len(other.parts):
            return False
        for a, b in zip(self.parts, other.parts):
            for x, y in ((a.lo, b.lo), (a.hi, b.hi)):
                if math.isinf(x) or math.isinf(y):
                    if x != y:
                        return False
                elif abs(x - y) > tol:
                    return False
        return True


def _normalize(parts: Iterable[Interval]) -> tuple:
    ps = sorted((p for p in parts if not p.empty), key=lambda p: (p.lo, not p.lo_closed))
    out = []
    for p in ps:
        if out:
            cur = out[-1]
            touching = p.lo < cur.hi or (p.lo == cur.hi and (cur.hi_closed or p.lo_closed))
            if touching:
                if p.hi > cur.hi or (p.hi == cur.hi and p.hi_closed):
                    out[-1] = Interval(cur.lo, p.hi, cur.lo_closed, p.hi_closed)
                continue
        out.append(p)
    return tuple(out)


def union(*sets: IntervalSet) -> IntervalSet:
    return IntervalSet(p for s in sets for p in s.parts)


def _meet(a: Interval, b: Interval) -> Interval:
    if a.lo > b.lo:
        lo, lc = a.lo, a.lo_closed
    elif b.lo > a.lo:
        lo, lc = b.lo, b.lo_closed
    else:
        lo, lc = a.lo, a.lo_closed and b.lo_closed
    if a.hi < b.hi:
        hi, hc = a.hi, a.hi_closed
    elif b.hi < a.hi:
        hi, hc = b.hi, b.hi_closed
    else:
        hi, hc = a.hi, a.hi_closed and b.hi_closed
    return Interval(lo, hi, lc, hc)


def intersect(x: IntervalSet, y: IntervalSet) -> IntervalSet:
    return IntervalSet(_meet(a, b) for a in x.parts for b in y.parts)


def complement(x: IntervalSet) -> IntervalSet:
    out = []
    lo, lc = -INF, False
    for p in x.parts:
        out.append(Interval(lo, p.lo, lc, not p.lo_closed))
        lo, lc = p.hi, not p.hi_closed
    out.append(Interval(lo, INF, lc, False))
    return IntervalSet(out)


def volume(x: IntervalSet) -> float:
    return sum(p.width for p in x.parts)


def midpoints(x: IntervalSet) -> list:
    return [p.midpoint() for p in x.parts]


_NUM = r"[-+]?(?:inf|\d+(?:\.\d*)?(?:[eE][-+]?\d+)?|\.\d+(?:[eE][-+]?\d+)?)"
_IV_RE = re.compile(rf"\s*([\[(])\s*({_NUM})\s*,\s*({_NUM})\s*([\])])\s*")


def parse_interval(text: str) -> Interval:
    m = _IV_RE.fullmatch(text)
    if not m:
        raise ValueError(f"malformed interval {text.strip()!r}")
    lo, hi = float(m.group(2)), float(m.group(3))
    if lo > hi:
        raise ValueError(f"interval bounds out of order in {text.strip()!r}")
    return Interval(lo, hi, m.group(1) == "[", m.group(4) == "]")


def parse_interval_set(text: str) -> IntervalSet:
    """Parse ``[a, b] | (c, inf)`` style unions; ``empty`` is the empty set."""
    text = text.strip()
    if text in ("empty", "{}", ""):
        return IntervalSet()
    return IntervalSet(parse_interval(part) for part in text.split("|"))


def from_pairs(pairs: Sequence[tuple]) -> IntervalSet:
    return IntervalSet(Interval(float(a), float(b)) for a, b in pairs)
