"""Symbolic kernel: wp/sp calculi, quantifier elimination and satisfiability.

Formulas are decided over the linear fragment.  Internally a quantifier-free
formula is put into disjunctive normal form whose disjuncts are frozensets
of literals:

* :class:`LinAtom` -- ``sum(c_i * x_i) + k  op  0`` with ``op`` in ``=, <, <=``
  and exact rational coefficients, scaled so the leading coefficient is ±1;
* :class:`SenseLit` -- ``xs`` or ``!xs``;
* :class:`ModeLit` -- ``xa = m`` or its negation.

Linear feasibility and projection use Fourier-Motzkin elimination with exact
tracking of strict versus non-strict bounds.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Optional, Sequence

from .errors import FragmentError, UnsatisfiableError
from .lang import (
    FALSE, TRUE, Act, ActAssign, And, Assign, BinOp, Cmp, Const, Exists, Forall,
    If, LVar, Mode, ModeEq, Not, Num, Or, Seq, Sense, Skip, Var, VarTable, conj,
    disj, fresh_logical, neg, substitute,
)
from .semantics import Valuation

_LOGICAL_RE = re.compile(r"_v\d+")
_OTHER_MODE = "\x00other"

# ---------------------------------------------------------------------------
# Literals


@dataclass(frozen=True)
class LinAtom:
    coeffs: tuple  # ((name, Fraction), ...) sorted by name, no zeros
    const: Fraction
    op: str  # '=', '<', '<='

    def vars(self):
        return {n for n, _ in self.coeffs}

    def coeff(self, name) -> Fraction:
        for n, c in self.coeffs:
            if n == name:
                return c
        return Fraction(0)


@dataclass(frozen=True)
class SenseLit:
    name: str
    pos: bool


@dataclass(frozen=True)
class ModeLit:
    mode: str
    pos: bool


def make_atom(coeffs: dict, const, op: str):
    """Canonical atom, or a Python bool when it has no variables."""
    items = sorted((n, Fraction(c)) for n, c in coeffs.items() if c != 0)
    const = Fraction(const)
    if not items:
        if op == "=":
            return const == 0
        if op == "<":
            return const < 0
        return const <= 0
    lead = items[0][1]
    scale = 1 / abs(lead)
    if op == "=" and lead < 0:
        scale = -scale
    return LinAtom(tuple((n, c * scale) for n, c in items), const * scale, op)


def negate_literal(lit) -> list:
    """The negation of ``lit`` as a list of alternative literals."""
    if isinstance(lit, SenseLit):
        return [SenseLit(lit.name, not lit.pos)]
    if isinstance(lit, ModeLit):
        return [ModeLit(lit.mode, not lit.pos)]
    neg_coeffs = {n: -c for n, c in lit.coeffs}
    pos_coeffs = dict(lit.coeffs)
    if lit.op == "<":
        return [make_atom(neg_coeffs, -lit.const, "<=")]
    if lit.op == "<=":
        return [make_atom(neg_coeffs, -lit.const, "<")]
    return [make_atom(pos_coeffs, lit.const, "<"), make_atom(neg_coeffs, -lit.const, "<")]


# ---------------------------------------------------------------------------
# Linearization


def linearize(a) -> tuple:
    """``a`` as (coefficient dict, constant), or FragmentError if nonlinear."""
    if isinstance(a, Num):
        return {}, a.value
    if isinstance(a, (Var, LVar)):
        return {a.name: Fraction(1)}, Fraction(0)
    if isinstance(a, BinOp):
        lc, lk = linearize(a.left)
        rc, rk = linearize(a.right)
        if a.op in "+-":
            sign = 1 if a.op == "+" else -1
            out = dict(lc)
            for n, c in rc.items():
                out[n] = out.get(n, 0) + sign * c
            return out, lk + sign * rk
        if a.op == "*":
            if lc and rc:
                raise FragmentError("nonlinear product of variables")
            if lc:
                lc, lk, rc, rk = rc, rk, lc, lk
            return {n: lk * c for n, c in rc.items()}, lk * rk
    raise FragmentError(f"unsupported arithmetic node {a!r}")


def _cmp_literals(phi: Cmp, positive: bool) -> list:
    """Alternatives (a disjunction) of literals for a possibly negated comparison."""
    lc, lk = linearize(phi.left)
    rc, rk = linearize(phi.right)
    diff = dict(lc)
    for n, c in rc.items():
        diff[n] = diff.get(n, 0) - c
    k = lk - rk
    negd = {n: -c for n, c in diff.items()}
    op = phi.op
    if not positive:
        op = {"=": "!=", "<": ">=", "<=": ">", ">": "<=", ">=": "<"}[op]
    if op == "=":
        return [make_atom(diff, k, "=")]
    if op == "!=":
        return [make_atom(diff, k, "<"), make_atom(negd, -k, "<")]
    if op == "<":
        return [make_atom(diff, k, "<")]
    if op == "<=":
        return [make_atom(diff, k, "<=")]
    if op == ">":
        return [make_atom(negd, -k, "<")]
    return [make_atom(negd, -k, "<=")]


# ---------------------------------------------------------------------------
# Fourier-Motzkin


def _combine(upper: LinAtom, lower: LinAtom, var: str):
    a = upper.coeff(var)  # > 0
    b = -lower.coeff(var)  # > 0
    coeffs = {}
    for n, c in upper.coeffs:
        coeffs[n] = coeffs.get(n, 0) + b * c
    for n, c in lower.coeffs:
        coeffs[n] = coeffs.get(n, 0) + a * c
    coeffs.pop(var, None)
    op = "<" if "<" in (upper.op, lower.op) else "<="
    return make_atom(coeffs, b * upper.const + a * lower.const, op)


def _substitute_eq(atom: LinAtom, var: str, eq: LinAtom):
    """Eliminate ``var`` from ``atom`` using equality ``eq`` (coefficient of var nonzero)."""
    c = atom.coeff(var)
    if c == 0:
        return atom
    e = eq.coeff(var)
    factor = c / e
    coeffs = dict(atom.coeffs)
    for n, d in eq.coeffs:
        coeffs[n] = coeffs.get(n, 0) - factor * d
    coeffs.pop(var, None)
    return make_atom(coeffs, atom.const - factor * eq.const, atom.op)


def _tidy(atoms: Iterable) -> Optional[list]:
    """Drop trivially true atoms and parallel weaker bounds; None if trivially false."""
    best = {}
    eqs = set()
    for a in atoms:
        if a is True:
            continue
        if a is False:
            return None
        if a.op == "=":
            eqs.add(a)
            continue
        key = a.coeffs
        cur = best.get(key)
        if cur is None or a.const > cur.const or (a.const == cur.const and a.op == "<"):
            best[key] = a
    out = sorted(eqs, key=_atom_key) + sorted(best.values(), key=_atom_key)
    # equalities sharing a coefficient vector must agree
    seen = {}
    for a in eqs:
        if a.coeffs in seen and seen[a.coeffs] != a.const:
            return None
        seen[a.coeffs] = a.const
    return out


def _atom_key(a: LinAtom):
    return (a.coeffs, a.const, a.op)


def fm_project(atoms: Sequence[LinAtom], eliminate: Iterable[str]) -> Optional[list]:
    """Project a conjunction of atoms onto the variables not in ``eliminate``.

    Returns the projected conjunction, or None if it is infeasible.
    """
    cur = _tidy(atoms)
    if cur is None:
        return None
    todo = [v for v in dict.fromkeys(eliminate)]
    while todo:
        occurring = {v for v in todo if any(v in a.vars() for a in cur)}
        if not occurring:
            break
        # prefer an equality (one-point rule), else the cheapest FM step
        pick = None
        for a in cur:
            if a.op == "=":
                vs = [v for v in sorted(a.vars()) if v in occurring]
                if vs:
                    pick = (vs[0], a)
                    break
        if pick is not None:
            var, eq = pick
            cur = _tidy(_substitute_eq(a, var, eq) for a in cur if a is not eq)
            if cur is None:
                return None
            todo.remove(var)
            continue

        def cost(v):
            up = sum(1 for a in cur if a.coeff(v) > 0)
            lo = sum(1 for a in cur if a.coeff(v) < 0)
            return (up * lo - up - lo, v)

        var = min(occurring, key=cost)
        uppers = [a for a in cur if a.coeff(var) > 0]
        lowers = [a for a in cur if a.coeff(var) < 0]
        rest = [a for a in cur if a.coeff(var) == 0]
        rest.extend(_combine(u, l, var) for u in uppers for l in lowers)
        cur = _tidy(rest)
        if cur is None:
            return None
        todo.remove(var)
    return cur


def fm_feasible(atoms: Sequence[LinAtom]) -> bool:
    names = set()
    for a in atoms:
        if isinstance(a, LinAtom):
            names |= a.vars()
    return fm_project(atoms, sorted(names)) is not None


def var_bounds(atoms: Sequence[LinAtom], var: str):
    """Bounds on ``var`` implied by atoms mentioning only ``var``.

    Returns (lo, lo_strict, hi, hi_strict) with None for an absent bound.
    """
    lo = hi = None
    lo_s = hi_s = False
    for a in atoms:
        if a.vars() != {var}:
            continue
        c = a.coeff(var)
        val = -a.const / c
        strict = a.op == "<"
        if a.op == "=":
            if lo is None or val > lo or (val == lo and lo_s):
                lo, lo_s = val, False
            if hi is None or val < hi or (val == hi and hi_s):
                hi, hi_s = val, False
            continue
        if c > 0:
            if hi is None or val < hi or (val == hi and strict):
                hi, hi_s = val, strict
        else:
            if lo is None or val > lo or (val == lo and strict):
                lo, lo_s = val, strict
    return lo, lo_s, hi, hi_s


# ---------------------------------------------------------------------------
# Conjunction satisfiability


def _split(lits):
    lin, sense, modes = [], {}, ([], [])
    for l in lits:
        if isinstance(l, LinAtom):
            lin.append(l)
        elif isinstance(l, SenseLit):
            sense.setdefault(l.name, set()).add(l.pos)
        else:
            modes[0 if l.pos else 1].append(l.mode)
    return lin, sense, modes


def _bool_ok(sense, modes, universe) -> bool:
    if any(len(v) > 1 for v in sense.values()):
        return False
    posm, negm = modes
    if len(set(posm)) > 1:
        return False
    if posm:
        if posm[0] in negm:
            return False
        if universe is not None and posm[0] not in universe:
            return False
    elif universe is not None and set(universe) <= set(negm):
        return False
    return True


@lru_cache(maxsize=1 << 18)
def conj_sat(lits: frozenset, universe: Optional[tuple] = None) -> bool:
    """Satisfiability of a conjunction of literals."""
    lin, sense, modes = _split(lits)
    if not _bool_ok(sense, modes, universe):
        return False
    return fm_feasible(lin)


# ---------------------------------------------------------------------------
# DNF


def _nnf_dnf(phi, positive: bool) -> list:
    """DNF (list of frozensets) of ``phi`` or its negation."""
    if isinstance(phi, Const):
        return [frozenset()] if phi.value == positive else []
    if isinstance(phi, Sense):
        return [frozenset([SenseLit(phi.name, positive)])]
    if isinstance(phi, Cmp):
        out = []
        for lit in _cmp_literals(phi, positive):
            if lit is True:
                return [frozenset()]
            if lit is not False:
                out.append(frozenset([lit]))
        return out
    if isinstance(phi, ModeEq):
        l, r = phi.left, phi.right
        if isinstance(l, Mode) and isinstance(r, Mode):
            return [frozenset()] if (l.name == r.name) == positive else []
        if isinstance(l, Act) and isinstance(r, Act):
            return [frozenset()] if positive else []
        m = l if isinstance(l, Mode) else r
        return [frozenset([ModeLit(m.name, positive)])]
    if isinstance(phi, Not):
        return _nnf_dnf(phi.arg, not positive)
    if isinstance(phi, (And, Or)):
        is_and = isinstance(phi, And) == positive
        parts = [_nnf_dnf(a, positive) for a in phi.args]
        if not is_and:
            out = []
            for p in parts:
                out.extend(p)
            return _dedupe(out)
        out = [frozenset()]
        for p in parts:
            if not p:
                return []
            nxt = []
            for d in out:
                for e in p:
                    merged = d | e
                    if _quick_ok(merged):
                        nxt.append(merged)
            out = _dedupe(nxt)
            if not out:
                return []
        return out
    if isinstance(phi, (Exists, Forall)):
        return _nnf_dnf(eliminate_quantifiers(phi), positive)
    raise TypeError(phi)


def _quick_ok(lits: frozenset) -> bool:
    _, sense, modes = _split(l for l in lits if not isinstance(l, LinAtom))
    return _bool_ok(sense, modes, None)


def _dedupe(ds: list) -> list:
    seen = set()
    out = []
    for d in ds:
        if d not in seen:
            seen.add(d)
            out.append(d)
    return out


def to_dnf(phi, modes: Optional[Sequence[str]] = None) -> list:
    """Satisfiable disjuncts of ``phi``'s DNF."""
    universe = tuple(modes) if modes is not None else None
    return [d for d in _nnf_dnf(phi, True) if conj_sat(d, universe)]


# ---------------------------------------------------------------------------
# Back to formulas


def _term(name: str):
    return LVar(name) if _LOGICAL_RE.fullmatch(name) else Var(name)


def literal_formula(lit):
    if isinstance(lit, SenseLit):
        return Sense(lit.name) if lit.pos else Not(Sense(lit.name))
    if isinstance(lit, ModeLit):
        # the act variable name is filled in by the caller
        raise TypeError("mode literal needs the act variable name")
    coeffs = list(lit.coeffs)
    const = lit.const
    op = lit.op
    if coeffs[0][1] < 0:
        coeffs = [(n, -c) for n, c in coeffs]
        const = -const
        op = {"<": ">", "<=": ">=", "=": "="}[op]
    lhs = None
    for n, c in coeffs:
        mag = abs(c)
        t = _term(n) if mag == 1 else BinOp("*", Num(mag), _term(n))
        if lhs is None:
            lhs = t
        else:
            lhs = BinOp("+" if c > 0 else "-", lhs, t)
    return Cmp(op, lhs, Num(-const))


def _lit_order(lit):
    if isinstance(lit, LinAtom):
        return (0, tuple(n for n, _ in lit.coeffs), float(-lit.const / lit.coeffs[0][1]), lit.op)
    if isinstance(lit, ModeLit):
        return (1, (), 0.0, f"{not lit.pos}{lit.mode}")
    return (2, (), 0.0, f"{lit.name}{not lit.pos}")


def _lits_formula(lits, act: str):
    parts = []
    for l in sorted(lits, key=_lit_order):
        if isinstance(l, ModeLit):
            eq = ModeEq(Act(act), Mode(l.mode))
            parts.append(eq if l.pos else Not(eq))
        else:
            parts.append(literal_formula(l))
    return conj(*parts)


def dnf_formula(dnf: list, act: str = "xa"):
    """Formula for a list of disjuncts, factoring out literals common to all."""
    if not dnf:
        return FALSE
    if any(len(d) == 0 for d in dnf):
        return TRUE
    common = frozenset.intersection(*dnf) if len(dnf) > 1 else frozenset()
    rests = [d - common for d in dnf]
    if any(not r for r in rests):
        return _lits_formula(common, act)
    body = disj(*[_lits_formula(r, act) for r in _sorted_dnf(rests)])
    return conj(body, _lits_formula(common, act))


def _sorted_dnf(dnf):
    return sorted(dnf, key=lambda d: sorted(_lit_order(l) for l in d))


# ---------------------------------------------------------------------------
# Simplification


def _tighten(d: frozenset, universe) -> Optional[frozenset]:
    """Merge single-variable bounds and implied mode literals inside a disjunct."""
    lin, sense, modes = _split(d)
    single = {}
    out = set(l for l in d if not isinstance(l, LinAtom))
    for a in lin:
        if len(a.coeffs) == 1:
            single.setdefault(a.coeffs[0][0], []).append(a)
        else:
            out.add(a)
    for var, atoms in single.items():
        lo, lo_s, hi, hi_s = var_bounds(atoms, var)
        if lo is not None and hi is not None:
            if lo > hi or (lo == hi and (lo_s or hi_s)):
                return None
            if lo == hi:
                out.add(make_atom({var: 1}, -lo, "="))
                continue
        if lo is not None:
            out.add(make_atom({var: -1}, lo, "<" if lo_s else "<="))
        if hi is not None:
            out.add(make_atom({var: 1}, -hi, "<" if hi_s else "<="))
    posm, negm = modes
    if posm:
        out = {l for l in out if not (isinstance(l, ModeLit) and not l.pos)}
    elif universe is not None:
        remaining = [m for m in universe if m not in negm]
        if len(remaining) == 1:
            out = {l for l in out if not isinstance(l, ModeLit)}
            out.add(ModeLit(remaining[0], True))
    return frozenset(out)


def implies(d1: frozenset, d2: frozenset, universe=None) -> bool:
    """Whether conjunction ``d1`` entails conjunction ``d2`` (``d1`` satisfiable)."""
    missing = d2 - d1
    if not missing:
        return True
    pos_mode = None
    multi_vars = set()
    for l in d1:
        if isinstance(l, ModeLit) and l.pos:
            pos_mode = l.mode
        elif isinstance(l, LinAtom) and len(l.coeffs) > 1:
            multi_vars |= l.vars()
    lin1 = None
    for l in missing:
        if isinstance(l, SenseLit):
            return False
        if isinstance(l, ModeLit):
            if l.pos or pos_mode is None or pos_mode == l.mode:
                return False
            continue
        if len(l.coeffs) == 1 and l.coeffs[0][0] not in multi_vars:
            var = l.coeffs[0][0]
            if lin1 is None:
                lin1 = [a for a in d1 if isinstance(a, LinAtom)]
            if not _box_implies(var_bounds(lin1, var), l):
                return False
            continue
        for alt in negate_literal(l):
            if alt is False:
                continue
            if alt is True or conj_sat(d1 | {alt}, universe):
                return False
    return True


def _box_implies(bounds, atom: LinAtom) -> bool:
    lo, lo_s, hi, hi_s = bounds
    c = atom.coeff(atom.coeffs[0][0])
    val = -atom.const / c
    if atom.op == "=":
        return lo is not None and lo == hi == val
    strict = atom.op == "<"
    if c > 0:  # var <= val (or <)
        return hi is not None and (hi < val or (hi == val and (hi_s or not strict)))
    return lo is not None and (lo > val or (lo == val and (lo_s or not strict)))


def _merge_complements(dnf: list, universe) -> list:
    changed = True
    while changed:
        changed = False
        dset = set(dnf)
        for d in list(dnf):
            if d not in dset:
                continue
            for l in d:
                alts = negate_literal(l)
                if len(alts) != 1 or isinstance(alts[0], bool):
                    continue
                partner = (d - {l}) | {alts[0]}
                if partner in dset and partner != d:
                    dset.discard(d)
                    dset.discard(partner)
                    dset.add(d - {l})
                    changed = True
                    break
        if universe is not None:
            groups = {}
            for d in dset:
                pos = [l for l in d if isinstance(l, ModeLit) and l.pos]
                if len(pos) == 1:
                    groups.setdefault(d - {pos[0]}, set()).add(pos[0].mode)
            for rest, ms in groups.items():
                if set(universe) <= ms:
                    for m in ms:
                        dset.discard(rest | {ModeLit(m, True)})
                    dset.add(rest)
                    changed = True
        dnf = list(dset)
    return dnf


def _drop_subsumed(dnf: list, universe, semantic: bool) -> list:
    dnf = sorted(set(dnf), key=lambda d: (len(d), sorted(_lit_order(l) for l in d)))
    kept = []
    for d in dnf:
        if any(k <= d for k in kept):
            continue
        kept.append(d)
    if not semantic or len(kept) > 64:
        return kept
    # drop disjuncts entailed by another retained one, one at a time
    i = 0
    while i < len(kept):
        d = kept[i]
        if any(implies(d, e, universe) for j, e in enumerate(kept) if j != i):
            del kept[i]
            continue
        i += 1
    return kept


def simplify_dnf(dnf: list, modes: Optional[Sequence[str]] = None, semantic: bool = True) -> list:
    universe = tuple(modes) if modes is not None else None
    out = []
    for d in dnf:
        t = _tighten(d, universe)
        if t is not None and conj_sat(t, universe):
            out.append(t)
    out = _merge_complements(out, universe)
    out = [t for t in (_tighten(d, universe) for d in out) if t is not None]
    out = _drop_subsumed(out, universe, semantic)
    return _sorted_dnf(out)


def simplify(phi, modes: Optional[Sequence[str]] = None, act: Optional[str] = None):
    """Equivalent, normalized formula; unchanged if outside the linear fragment."""
    try:
        dnf = to_dnf(phi, modes)
    except FragmentError:
        return phi
    return dnf_formula(simplify_dnf(dnf, modes), act or _act_name(phi))


def _act_name(phi, default="xa") -> str:
    stack = [phi]
    while stack:
        f = stack.pop()
        if isinstance(f, ModeEq):
            for m in (f.left, f.right):
                if isinstance(m, Act):
                    return m.name
        elif isinstance(f, Not):
            stack.append(f.arg)
        elif isinstance(f, (And, Or)):
            stack.extend(f.args)
        elif isinstance(f, (Exists, Forall)):
            stack.append(f.body)
    return default


# ---------------------------------------------------------------------------
# Quantifier elimination and projection


def project_dnf(dnf: list, arith=(), sense=(), act: bool = False, universe=None) -> list:
    """Existentially project variables out of each disjunct."""
    arith = set(arith)
    sense = set(sense)
    out = []
    for d in dnf:
        lin = [l for l in d if isinstance(l, LinAtom)]
        other = [
            l for l in d
            if not isinstance(l, LinAtom)
            and not (isinstance(l, SenseLit) and l.name in sense)
            and not (isinstance(l, ModeLit) and act)
        ]
        if lin and arith & set().union(*(a.vars() for a in lin)):
            lin = fm_project(lin, sorted(arith))
            if lin is None:
                continue
        new = frozenset(other) | frozenset(lin)
        if conj_sat(new, universe):
            out.append(new)
    return _dedupe(out)


def exists_vars(phi, arith=(), sense=(), act: bool = False, modes=None, act_name=None):
    """``exists`` over the given variables, returned quantifier-free and simplified."""
    universe = tuple(modes) if modes is not None else None
    dnf = project_dnf(to_dnf(phi, modes), arith, sense, act, universe)
    return dnf_formula(simplify_dnf(dnf, modes), act_name or _act_name(phi))


def eliminate_quantifiers(phi):
    """Equivalent quantifier-free formula (linear fragment only)."""
    if isinstance(phi, Exists):
        body = eliminate_quantifiers(phi.body)
        return exists_vars(body, arith=[phi.var])
    if isinstance(phi, Forall):
        body = eliminate_quantifiers(phi.body)
        inner = exists_vars(Not(body), arith=[phi.var])
        return simplify(Not(inner))
    if isinstance(phi, Not):
        return Not(eliminate_quantifiers(phi.arg))
    if isinstance(phi, (And, Or)):
        return type(phi)(tuple(eliminate_quantifiers(a) for a in phi.args))
    return phi


def eliminate_exists(phi):
    return eliminate_quantifiers(phi)


# ---------------------------------------------------------------------------
# Satisfiability, models, equivalence


def is_satisfiable(phi, modes: Optional[Sequence[str]] = None, witness: bool = False):
    """Decide satisfiability; with ``witness`` also return a satisfying disjunct."""
    universe = tuple(modes) if modes is not None else None
    for d in _nnf_dnf(phi, True):
        if conj_sat(d, universe):
            return (True, d) if witness else True
    return (False, None) if witness else False


def _pick(lo, lo_s, hi, hi_s) -> Fraction:
    if lo is not None and hi is not None:
        return (lo + hi) / 2
    if lo is not None:
        return lo + 1
    if hi is not None:
        return hi - 1
    return Fraction(0)


def model_of_disjunct(d: frozenset, vars: VarTable, order: Optional[Sequence[str]] = None) -> tuple:
    """Midpoint model of one satisfiable disjunct: (Valuation, logical env)."""
    lin, sense, modes = _split(d)
    names = list(order) if order is not None else list(vars.think)
    extra = sorted(set().union(*(a.vars() for a in lin)) - set(names)) if lin else []
    names = names + extra
    values = {}
    cur = list(lin)
    for i, v in enumerate(names):
        others = [n for n in names[i + 1:]]
        proj = fm_project(cur, others)
        if proj is None:
            raise UnsatisfiableError("disjunct is unsatisfiable")
        val = _pick(*var_bounds(proj, v))
        values[v] = val
        eq = make_atom({v: 1}, -val, "=")
        cur = _tidy([_substitute_eq(a, v, eq) if isinstance(a, LinAtom) else a for a in cur])
        if cur is None:
            raise UnsatisfiableError("model construction failed")
    think = {n: values.get(n, Fraction(0)) for n in vars.think}
    gamma = {n: values[n] for n in extra if _LOGICAL_RE.fullmatch(n)}
    sense_vals = {s: (True in sense.get(s, ())) for s in vars.sense}
    posm, negm = modes
    if posm:
        act = posm[0]
    else:
        act = next(m for m in vars.modes if m not in negm)
    return Valuation(think, sense_vals, act), gamma


def find_model(phi, vars: VarTable) -> Valuation:
    """A valuation satisfying ``phi``, built from the first satisfiable disjunct."""
    dnf = to_dnf(phi, vars.modes)
    if not dnf:
        raise UnsatisfiableError("formula is unsatisfiable")
    dnf = simplify_dnf(dnf, vars.modes, semantic=False)
    return model_of_disjunct(dnf[0], vars)[0]


def _sat_against(base: frozenset, others: list, universe) -> bool:
    """Is ``base`` AND NOT(d) for every d in ``others`` satisfiable?"""
    if not conj_sat(base, universe):
        return False
    for idx, e in enumerate(others):
        # some literal of e already contradicts base, so NOT(e) holds for free
        if any(not conj_sat(base | {l}, universe) for l in e):
            continue
        rest = others[idx + 1:]
        for l in sorted(e, key=_lit_order):
            for alt in negate_literal(l):
                if alt is False:
                    continue
                nb = base if alt is True else base | {alt}
                if conj_sat(nb, universe) and _sat_against(nb, rest, universe):
                    return True
        return False
    return True


def entails(phi, psi, modes: Optional[Sequence[str]] = None) -> bool:
    universe = tuple(modes) if modes is not None else None
    psi_dnf = to_dnf(psi, modes)
    for d in to_dnf(phi, modes):
        if _sat_against(d, psi_dnf, universe):
            return False
    return True


def equivalent(phi, psi, modes: Optional[Sequence[str]] = None) -> bool:
    return entails(phi, psi, modes) and entails(psi, phi, modes)


# ---------------------------------------------------------------------------
# wp and sp


def wp(c, phi, modes: Optional[Sequence[str]] = None, simp: bool = True):
    def go(c, phi):
        if isinstance(c, Skip):
            return phi
        if isinstance(c, Assign):
            return substitute(phi, Var(c.var), c.expr)
        if isinstance(c, ActAssign):
            return substitute(phi, Act(c.var), Mode(c.mode))
        if isinstance(c, Seq):
            return go(c.first, go(c.second, phi))
        if isinstance(c, If):
            return disj(conj(c.cond, go(c.then, phi)), conj(neg(c.cond), go(c.orelse, phi)))
        raise TypeError(c)

    out = go(c, phi)
    return simplify(out, modes) if simp else out


def _modes_in(phi) -> list:
    found = []
    stack = [phi]
    while stack:
        f = stack.pop()
        if isinstance(f, ModeEq):
            for m in (f.left, f.right):
                if isinstance(m, Mode) and m.name not in found:
                    found.append(m.name)
        elif isinstance(f, Not):
            stack.append(f.arg)
        elif isinstance(f, (And, Or)):
            stack.extend(f.args)
        elif isinstance(f, (Exists, Forall)):
            stack.append(f.body)
    return found


def sp(c, phi, modes: Optional[Sequence[str]] = None):
    """Strongest postcondition, quantifier-free and simplified."""
    if isinstance(c, Skip):
        return simplify(phi, modes)
    if isinstance(c, Assign):
        v = fresh_logical()
        body = conj(substitute(phi, Var(c.var), v), Cmp("=", Var(c.var), _subst_expr(c.expr, c.var, v)))
        linearize(c.expr)  # reject nonlinear assignments up front
        return exists_vars(body, arith=[v.name], modes=modes)
    if isinstance(c, ActAssign):
        universe = list(modes) if modes is not None else _modes_in(phi) + [_OTHER_MODE]
        pre = disj(*[substitute(phi, Act(c.var), Mode(m)) for m in universe])
        return simplify(conj(pre, ModeEq(Act(c.var), Mode(c.mode))), modes, c.var)
    if isinstance(c, Seq):
        return sp(c.second, sp(c.first, phi, modes), modes)
    if isinstance(c, If):
        left = sp(c.then, conj(c.cond, phi), modes)
        right = sp(c.orelse, conj(neg(c.cond), phi), modes)
        return simplify(disj(left, right), modes)
    raise TypeError(c)


def _subst_expr(a, name, repl):
    from .lang import substitute_aexp

    return substitute_aexp(a, Var(name), repl)


def sp_sense(xs: str, value: bool, phi, modes: Optional[Sequence[str]] = None):
    both = disj(substitute(phi, Sense(xs), TRUE), substitute(phi, Sense(xs), FALSE))
    lit = Sense(xs) if value else Not(Sense(xs))
    return simplify(conj(both, lit), modes)
