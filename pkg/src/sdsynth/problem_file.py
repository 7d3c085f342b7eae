"""The ``.sds`` problem-file format.

A file is a list of bracketed sections, ``#`` starts a comment::

    [modes]
    state v                 # plant state name (default x)
    Acl: (2 - v) * log(2)
    Brk: -0.5

    [controller]
    if xs then cnt := cnt + 1 else cnt := 0;
    if cnt < 2 then xa := Acl else xa := Brk

    [sensor]
    input i                 # input name (default i)
    xs: v + i >= 1          # up to two atoms joined by &&

    [input]
    [-0.2, 0.2]

    [pre]
    cnt = 0                 # controller formula
    [0, 1]                  # plant interval set, `|` for unions, `empty`

    [post]
    true
    [1.5, 2]

    [steps]
    4

The act variable is the target of assignments whose right-hand side is a
mode name; every other identifier in the controller and the conditions is a
think variable.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path

from .errors import ParseError, ProblemFileError
from .intervals import parse_interval, parse_interval_set
from .lang import KEYWORDS, VarTable, parse_controller, parse_formula, tokenize
from .plant import DEFAULT_STEPS, PlantSpec
from .sensor import SensorSpec
from .system import CPCondition, SynthesisProblem, SystemSpec

SECTIONS = ("modes", "controller", "sensor", "input", "pre", "post", "steps")
_HEADER = re.compile(r"^\s*\[(\w+)\]\s*$")
_LOGICAL = re.compile(r"_v\d+")


@dataclass
class ProblemFile:
    sections: dict  # name -> list of (line number, text)
    path: str = "<string>"

    def lines(self, name) -> list:
        return [(n, t) for n, t in self.sections[name] if t.strip()]

    def text(self, name) -> str:
        return "\n".join(t for _, t in self.sections[name])

    def first_line(self, name) -> int:
        rows = self.sections[name]
        return rows[0][0] if rows else None


def _strip_comment(line: str) -> str:
    return line.split("#", 1)[0].rstrip()


def read_sections(text: str, path: str = "<string>") -> ProblemFile:
    sections = {}
    current = None
    for n, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw)
        m = _HEADER.match(line)
        if m:
            current = m.group(1)
            if current not in SECTIONS:
                raise ProblemFileError(f"unknown section [{current}]", line=n)
            if current in sections:
                raise ProblemFileError(f"duplicate section [{current}]", line=n)
            sections[current] = []
            continue
        if current is None:
            if line.strip():
                raise ProblemFileError("text before the first section", line=n)
            continue
        sections[current].append((n, line))
    missing = [s for s in SECTIONS if s not in sections]
    if missing:
        raise ProblemFileError(f"missing section(s): {', '.join('[' + s + ']' for s in missing)}")
    return ProblemFile(sections, path)


def _reraise(exc: Exception, section: str, base_line):
    line = base_line
    if isinstance(exc, ParseError) and exc.line is not None and base_line is not None:
        line = base_line + exc.line - 1
    raise ProblemFileError(str(exc), section=section, line=line) from exc


def _identifiers(text: str) -> list:
    try:
        toks = tokenize(text)
    except ParseError:
        return []
    return [t.text for t in toks if t.kind == "id"]


def parse_problem(text: str, path: str = "<string>", ode_steps: int = DEFAULT_STEPS) -> SynthesisProblem:
    pf = read_sections(text, path)

    # modes and plant
    state = "x"
    rhs = {}
    for n, line in pf.lines("modes"):
        s = line.strip()
        if s.startswith("state "):
            state = s.split(None, 1)[1].strip()
            continue
        if ":" not in s:
            raise ProblemFileError("expected `Mode: rhs`", "modes", n)
        name, expr = (p.strip() for p in s.split(":", 1))
        if not re.fullmatch(r"[A-Za-z_]\w*", name) or name in KEYWORDS:
            raise ProblemFileError(f"bad mode name {name!r}", "modes", n)
        if name in rhs:
            raise ProblemFileError(f"duplicate mode {name}", "modes", n)
        rhs[name] = expr
    if not rhs:
        raise ProblemFileError("no modes declared", "modes", pf.first_line("modes"))
    modes = tuple(rhs)
    try:
        plant = PlantSpec(rhs, state, ode_steps)
    except ParseError as exc:
        _reraise(exc, "modes", pf.first_line("modes"))

    # sensor
    input_name = "i"
    sdefs = {}
    sense_lines = {}
    for n, line in pf.lines("sensor"):
        s = line.strip()
        if s.startswith("input "):
            input_name = s.split(None, 1)[1].strip()
            continue
        if ":" not in s:
            raise ProblemFileError("expected `xs: predicate`", "sensor", n)
        name, pred = (p.strip() for p in s.split(":", 1))
        sdefs[name] = pred
        sense_lines[name] = n

    # input domain
    dom_lines = pf.lines("input")
    if len(dom_lines) != 1:
        raise ProblemFileError("expected exactly one interval", "input", pf.first_line("input"))
    try:
        domain = parse_interval(dom_lines[0][1])
    except ValueError as exc:
        raise ProblemFileError(str(exc), "input", dom_lines[0][0]) from None
    try:
        sensor = SensorSpec.parse(sdefs, domain, state, input_name)
    except (ParseError, ValueError) as exc:
        raise ProblemFileError(str(exc), "sensor", pf.first_line("sensor")) from None

    # variables
    ctext = pf.text("controller")
    ids = _identifiers(ctext)
    act = "xa"
    toks = tokenize(ctext) if ids else []
    for a, b, c in zip(toks, toks[1:], toks[2:]):
        if a.kind == "id" and b.text == ":=" and c.text in modes:
            act = a.text
            break
    cond_texts = []
    for sec in ("pre", "post"):
        rows = pf.lines(sec)
        if len(rows) != 2:
            raise ProblemFileError("expected a formula line and an interval-set line", sec, pf.first_line(sec))
        cond_texts.append(rows[0][1])
    think = []
    for name in ids + [i for t in cond_texts for i in _identifiers(t)]:
        if name in KEYWORDS or name in modes or name == act or name in sdefs or _LOGICAL.fullmatch(name):
            continue
        if name not in think:
            think.append(name)
    try:
        vars = VarTable(tuple(think), tuple(sdefs), act, modes)
    except ValueError as exc:
        raise ProblemFileError(str(exc), "controller", pf.first_line("controller")) from None

    try:
        controller = parse_controller(ctext, vars)
    except ParseError as exc:
        _reraise(exc, "controller", pf.first_line("controller"))
    try:
        system = SystemSpec(controller, plant, sensor, vars)
    except ValueError as exc:
        raise ProblemFileError(str(exc), "controller", pf.first_line("controller")) from None

    conds = []
    for sec in ("pre", "post"):
        (fl, ftext), (il, itext) = pf.lines(sec)
        try:
            phi = parse_formula(ftext, vars)
        except ParseError as exc:
            raise ProblemFileError(str(exc), sec, fl) from None
        try:
            xs = parse_interval_set(itext)
        except ValueError as exc:
            raise ProblemFileError(str(exc), sec, il) from None
        conds.append(CPCondition(phi, xs))

    srows = pf.lines("steps")
    try:
        (sl, stext), = srows
        steps = int(stext.strip())
        if steps < 0:
            raise ValueError
    except ValueError:
        raise ProblemFileError("expected one non-negative integer", "steps", pf.first_line("steps")) from None
    return SynthesisProblem(system, conds[0], conds[1], steps)


def load_problem(path, ode_steps: int = DEFAULT_STEPS) -> SynthesisProblem:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise ProblemFileError(f"cannot read {p}: {exc.strerror}") from None
    return parse_problem(text, str(p), ode_steps)


def fixture_path(name: str) -> Path:
    """Path of a bundled problem file such as ``count_brake.sds``."""
    return Path(__file__).parent / "data" / name
