"""Threshold sensors over (plant state, input), their preimages and feasible inputs.

Each sense variable is defined by a conjunction of affine atoms
``a*x + b*i + k  op  0``.  Preimages eliminate the shared input ``i`` jointly
across all sense variables, so they are exact.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from itertools import product
from typing import Mapping

from .errors import InputDomainError, ParseError
from .intervals import INF, Interval, IntervalSet
from .realexpr import affine_coeffs, parse_real

_OPS = ("<=", ">=", "<", ">", "=")


@dataclass(frozen=True)
class SensorAtom:
    a: float  # plant-state coefficient
    b: float  # input coefficient
    k: float
    op: str

    def holds(self, x: float, i: float) -> bool:
        v = self.a * x + self.b * i + self.k
        return {"<": v < 0, "<=": v <= 0, ">": v > 0, ">=": v >= 0, "=": v == 0}[self.op]


# (a, b, c, strict) meaning a*x + b*i + c < 0 (strict) or <= 0
_Le = tuple


def _as_le(atom: SensorAtom, positive: bool) -> list:
    """Alternatives, each a conjunction of ``_Le`` constraints."""
    a, b, k, op = atom.a, atom.b, atom.k, atom.op
    if not positive:
        op = {"<": ">=", "<=": ">", ">": "<=", ">=": "<", "=": "!="}[op]
    if op == "<":
        return [[(a, b, k, True)]]
    if op == "<=":
        return [[(a, b, k, False)]]
    if op == ">":
        return [[(-a, -b, -k, True)]]
    if op == ">=":
        return [[(-a, -b, -k, False)]]
    if op == "=":
        return [[(a, b, k, False), (-a, -b, -k, False)]]
    return [[(a, b, k, True)], [(-a, -b, -k, True)]]


@dataclass(frozen=True, eq=False)
class SensorSpec:
    atoms: Mapping[str, tuple]  # sense var -> tuple of SensorAtom (a conjunction)
    domain: Interval = Interval(-INF, INF, False, False)
    state: str = "x"
    input: str = "i"
    source: Mapping[str, str] | None = None

    def __post_init__(self):
        object.__setattr__(self, "atoms", {k: tuple(v) for k, v in self.atoms.items()})
        if self.domain.empty:
            raise ValueError("input domain is empty")
        for name, conj in self.atoms.items():
            if not 1 <= len(conj) <= 2:
                raise ValueError(f"sense variable {name} needs one or two atoms")

    @property
    def sense_vars(self) -> tuple:
        return tuple(self.atoms)

    @classmethod
    def parse(cls, defs: Mapping[str, str], domain: Interval, state="x", input="i") -> "SensorSpec":
        """Build from predicate texts such as ``{"xs": "v + i >= 1"}``."""
        atoms = {}
        for name, text in defs.items():
            atoms[name] = tuple(parse_atom(part, state, input) for part in text.split("&&"))
        return cls(atoms, domain, state, input, dict(defs))

    def outputs(self) -> list:
        """Every sensor output, true before false, in variable order."""
        names = self.sense_vars
        return [dict(zip(names, vals)) for vals in product((True, False), repeat=len(names))]

    def _dnf(self, out: Mapping[str, bool]) -> list:
        per_var = []
        for name, conj in self.atoms.items():
            if out[name]:
                per_var.append([[c for atom in conj for c in _as_le(atom, True)[0]]])
            else:
                alts = []
                for atom in conj:
                    alts.extend(_as_le(atom, False))
                per_var.append(alts)
        out_dnf = []
        for choice in product(*per_var):
            out_dnf.append([c for part in choice for c in part])
        return out_dnf

    def _domain_le(self) -> list:
        d = self.domain
        cons = []
        if d.lo != -INF:
            cons.append((0.0, -1.0, d.lo, not d.lo_closed))
        if d.hi != INF:
            cons.append((0.0, 1.0, -d.hi, not d.hi_closed))
        return cons


def parse_atom(text: str, state: str = "x", input: str = "i") -> SensorAtom:
    m = re.search(r"<=|>=|<|>|=", text)
    if not m:
        raise ParseError(f"sensor atom needs a comparison: {text.strip()!r}")
    lhs, op, rhs = text[: m.start()], m.group(), text[m.end():]
    names = (state, input)
    try:
        lc, lk = affine_coeffs(parse_real(lhs, names), names)
        rc, rk = affine_coeffs(parse_real(rhs, names), names)
    except ValueError as exc:
        raise ParseError(f"sensor atom is not affine: {text.strip()!r} ({exc})") from None
    return SensorAtom(lc[state] - rc[state], lc[input] - rc[input], lk - rk, op)


def sense_eval(spec: SensorSpec, x: float, i: float) -> dict:
    if not spec.domain.contains(i):
        raise InputDomainError(f"input {i} outside the input domain {spec.domain}")
    return {name: all(a.holds(x, i) for a in conj) for name, conj in spec.atoms.items()}


def _half_line(a: float, c: float, strict: bool):
    """Solution set of a*x + c < 0 (strict) or <= 0 as an Interval or bool."""
    if a == 0:
        return (c < 0) if strict else (c <= 0)
    bound = -c / a
    if a > 0:
        return Interval(-INF, bound, False, not strict)
    return Interval(bound, INF, not strict, False)


def _meet_all(parts) -> IntervalSet:
    cur = IntervalSet.everything()
    for p in parts:
        if p is True:
            continue
        if p is False:
            return IntervalSet()
        cur = cur & IntervalSet([p])
    return cur


def sensor_preimage(spec: SensorSpec, out: Mapping[str, bool]) -> IntervalSet:
    """Plant states from which some admissible input yields ``out``."""
    result = IntervalSet()
    for conj in spec._dnf(out):
        cons = conj + spec._domain_le()
        uppers = [c for c in cons if c[1] > 0]
        lowers = [c for c in cons if c[1] < 0]
        parts = [_half_line(a, c, s) for a, b, c, s in cons if b == 0]
        for au, bu, cu, su in uppers:
            for al, bl, cl, sl in lowers:
                a = au / bu + al / -bl
                c = cu / bu + cl / -bl
                parts.append(_half_line(a, c, su or sl))
        result = result | _meet_all(parts)
    return result


def feasible_inputs(spec: SensorSpec, x: float, out: Mapping[str, bool]) -> IntervalSet:
    """Inputs in the domain that produce ``out`` at plant state ``x``."""
    result = IntervalSet()
    for conj in spec._dnf(out):
        cons = conj + spec._domain_le()
        # as constraints on i: b*i + (a*x + c) op 0
        parts = [_half_line(b, a * x + c, s) for a, b, c, s in cons]
        result = result | _meet_all(parts)
    return result & IntervalSet([spec.domain])


def pick_input(feasible: IntervalSet) -> float:
    """Midpoint of the largest feasible component, kept strictly inside it."""
    best = feasible.largest()
    if best is None:
        raise InputDomainError("no feasible input")
    m = best.midpoint()
    if not best.contains(m) and not math.isinf(best.lo) and not math.isinf(best.hi):
        m = best.lo + (best.hi - best.lo) / 2
    return m
