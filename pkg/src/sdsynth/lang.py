"""Controller command language and its assertion language.

Both share one set of immutable AST node types: a controller's Boolean
expressions are formulas without quantifiers, logical variables or mode
equalities.  Concrete syntax::

    cmd     := stmt (';' stmt)*
    stmt    := 'skip' | x ':=' aexp | xa ':=' MODE
             | 'if' bexp 'then' stmt ['else' stmt]
             | 'switch' '{' ('case' bexp ':' stmt [';'])+ ['default' ':' stmt] '}'
             | '{' cmd '}'
    formula := 'exists' _vN '.' formula | 'forall' _vN '.' formula
             | formula '||' formula | formula '&&' formula | '!' formula
             | 'true' | 'false' | xs | aexp rop aexp | mexp '=' mexp
    aexp    := number | number '/' number | x | aexp ('+'|'-'|'*') aexp
"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from decimal import Decimal, localcontext
from fractions import Fraction
from typing import Iterator, Union

from .errors import ParseError, SubstitutionError

ROPS = ("=", "<", "<=", ">", ">=")
AOPS = ("+", "-", "*")
_PREC = {"+": 1, "-": 1, "*": 2}

# ---------------------------------------------------------------------------
# AST


@dataclass(frozen=True)
class Num:
    value: Fraction

    def __post_init__(self):
        if not isinstance(self.value, Fraction):
            object.__setattr__(self, "value", Fraction(self.value))


@dataclass(frozen=True)
class Var:
    """Reference to a think variable."""

    name: str


@dataclass(frozen=True)
class LVar:
    """Reference to a machine-generated logical variable."""

    name: str


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "AExp"
    right: "AExp"


AExp = Union[Num, Var, LVar, BinOp]


@dataclass(frozen=True)
class Const:
    value: bool


TRUE = Const(True)
FALSE = Const(False)


@dataclass(frozen=True)
class Sense:
    name: str


@dataclass(frozen=True)
class Cmp:
    op: str
    left: AExp
    right: AExp


@dataclass(frozen=True)
class Mode:
    name: str


@dataclass(frozen=True)
class Act:
    """Reference to the act variable inside a formula."""

    name: str


MExp = Union[Mode, Act]


@dataclass(frozen=True)
class ModeEq:
    left: MExp
    right: MExp


@dataclass(frozen=True)
class Not:
    arg: "Formula"


@dataclass(frozen=True)
class And:
    args: tuple


@dataclass(frozen=True)
class Or:
    args: tuple


@dataclass(frozen=True)
class Exists:
    var: str
    body: "Formula"


@dataclass(frozen=True)
class Forall:
    var: str
    body: "Formula"


Formula = Union[Const, Sense, Cmp, ModeEq, Not, And, Or, Exists, Forall]
BExp = Formula


@dataclass(frozen=True)
class Skip:
    pass


@dataclass(frozen=True)
class Assign:
    var: str
    expr: AExp


@dataclass(frozen=True)
class ActAssign:
    var: str
    mode: str


@dataclass(frozen=True)
class Seq:
    first: "Cmd"
    second: "Cmd"


@dataclass(frozen=True)
class If:
    cond: BExp
    then: "Cmd"
    orelse: "Cmd"


Cmd = Union[Skip, Assign, ActAssign, Seq, If]

SKIP = Skip()


@dataclass(frozen=True)
class VarTable:
    think: tuple = ()
    sense: tuple = ()
    act: str = "xa"
    modes: tuple = ()

    def __post_init__(self):
        for attr in ("think", "sense", "modes"):
            object.__setattr__(self, attr, tuple(getattr(self, attr)))
        names = list(self.think) + list(self.sense) + [self.act]
        if len(set(names)) != len(names):
            raise ValueError(f"variable classes overlap: {names}")
        if len(set(self.modes)) != len(self.modes):
            raise ValueError(f"duplicate mode names: {self.modes}")
        clash = set(names) & set(self.modes)
        if clash:
            raise ValueError(f"names used both as variable and mode: {sorted(clash)}")
        bad = [n for n in names + list(self.modes) if _LOGICAL_RE.fullmatch(n)]
        if bad:
            raise ValueError(f"names reserved for logical variables: {bad}")
        if not self.modes:
            raise ValueError("at least one mode is required")


_LOGICAL_RE = re.compile(r"_v\d+")
_fresh = itertools.count()


def fresh_logical() -> LVar:
    # next() on itertools.count is atomic under the GIL
    return LVar(f"_v{next(_fresh)}")


# ---------------------------------------------------------------------------
# Smart constructors


def conj(*args) -> Formula:
    out = []
    for a in args:
        if isinstance(a, And):
            out.extend(a.args)
        elif a == TRUE:
            continue
        elif a == FALSE:
            return FALSE
        else:
            out.append(a)
    if not out:
        return TRUE
    if len(out) == 1:
        return out[0]
    return And(tuple(out))


def disj(*args) -> Formula:
    out = []
    for a in args:
        if isinstance(a, Or):
            out.extend(a.args)
        elif a == FALSE:
            continue
        elif a == TRUE:
            return TRUE
        else:
            out.append(a)
    if not out:
        return FALSE
    if len(out) == 1:
        return out[0]
    return Or(tuple(out))


def neg(a: Formula) -> Formula:
    if a == TRUE:
        return FALSE
    if a == FALSE:
        return TRUE
    if isinstance(a, Not):
        return a.arg
    return Not(a)


# ---------------------------------------------------------------------------
# Traversal helpers


def aexp_vars(a: AExp) -> set:
    """Names of think and logical variables occurring in ``a``."""
    if isinstance(a, (Var, LVar)):
        return {a.name}
    if isinstance(a, BinOp):
        return aexp_vars(a.left) | aexp_vars(a.right)
    return set()


def free_vars(phi) -> set:
    """All free variable names (think, logical, sense, act) of a formula."""
    if isinstance(phi, Const):
        return set()
    if isinstance(phi, Sense):
        return {phi.name}
    if isinstance(phi, Cmp):
        return aexp_vars(phi.left) | aexp_vars(phi.right)
    if isinstance(phi, ModeEq):
        return {m.name for m in (phi.left, phi.right) if isinstance(m, Act)}
    if isinstance(phi, Not):
        return free_vars(phi.arg)
    if isinstance(phi, (And, Or)):
        out = set()
        for a in phi.args:
            out |= free_vars(a)
        return out
    if isinstance(phi, (Exists, Forall)):
        return free_vars(phi.body) - {phi.var}
    raise TypeError(phi)


def is_quantifier_free(phi) -> bool:
    if isinstance(phi, (Exists, Forall)):
        return False
    if isinstance(phi, Not):
        return is_quantifier_free(phi.arg)
    if isinstance(phi, (And, Or)):
        return all(is_quantifier_free(a) for a in phi.args)
    return True


def formula_size(phi) -> int:
    if isinstance(phi, Not):
        return 1 + formula_size(phi.arg)
    if isinstance(phi, (And, Or)):
        return 1 + sum(formula_size(a) for a in phi.args)
    if isinstance(phi, (Exists, Forall)):
        return 1 + formula_size(phi.body)
    return 1


def assigns_act_on_all_paths(c: Cmd) -> bool:
    """True when every execution path of ``c`` assigns the act variable."""
    if isinstance(c, ActAssign):
        return True
    if isinstance(c, Seq):
        return assigns_act_on_all_paths(c.first) or assigns_act_on_all_paths(c.second)
    if isinstance(c, If):
        return assigns_act_on_all_paths(c.then) and assigns_act_on_all_paths(c.orelse)
    return False


# ---------------------------------------------------------------------------
# Substitution


def _subst_aexp(a: AExp, name: str, repl: AExp) -> AExp:
    if isinstance(a, (Var, LVar)):
        return repl if a.name == name else a
    if isinstance(a, BinOp):
        left = _subst_aexp(a.left, name, repl)
        right = _subst_aexp(a.right, name, repl)
        if left is a.left and right is a.right:
            return a
        return BinOp(a.op, left, right)
    return a


def _rename_bound(phi, repl_vars: set):
    new = fresh_logical()
    while new.name in repl_vars:
        new = fresh_logical()
    body = _subst(phi.body, ("arith", phi.var), new)
    return type(phi)(new.name, body)


def _subst(phi, key, repl):
    kind, name = key
    if isinstance(phi, Const):
        return phi
    if isinstance(phi, Sense):
        if kind == "sense" and phi.name == name:
            return repl
        return phi
    if isinstance(phi, Cmp):
        if kind != "arith":
            return phi
        left = _subst_aexp(phi.left, name, repl)
        right = _subst_aexp(phi.right, name, repl)
        if left is phi.left and right is phi.right:
            return phi
        return Cmp(phi.op, left, right)
    if isinstance(phi, ModeEq):
        if kind != "act":
            return phi
        left = repl if isinstance(phi.left, Act) and phi.left.name == name else phi.left
        right = repl if isinstance(phi.right, Act) and phi.right.name == name else phi.right
        return ModeEq(left, right)
    if isinstance(phi, Not):
        return Not(_subst(phi.arg, key, repl))
    if isinstance(phi, (And, Or)):
        return type(phi)(tuple(_subst(a, key, repl) for a in phi.args))
    if isinstance(phi, (Exists, Forall)):
        if kind == "arith" and phi.var == name:
            return phi
        if kind == "arith":
            repl_vars = aexp_vars(repl)
            if phi.var in repl_vars:
                phi = _rename_bound(phi, repl_vars)
        return type(phi)(phi.var, _subst(phi.body, key, repl))
    raise TypeError(phi)


def substitute(phi: Formula, target, replacement) -> Formula:
    """Capture-avoiding substitution ``phi[replacement/target]``.

    ``target`` is a :class:`Var`, :class:`LVar`, :class:`Sense` or
    :class:`Act` node; the replacement must be of the matching kind (an
    arithmetic expression, a Boolean, or a :class:`Mode`).
    """
    if isinstance(target, (Var, LVar)):
        if not isinstance(replacement, (Num, Var, LVar, BinOp)):
            raise SubstitutionError(f"cannot substitute {replacement!r} for arithmetic {target!r}")
        return _subst(phi, ("arith", target.name), replacement)
    if isinstance(target, Sense):
        if isinstance(replacement, bool):
            replacement = Const(replacement)
        if not isinstance(replacement, Const):
            raise SubstitutionError(f"sense variable {target.name} needs a Boolean literal")
        return _subst(phi, ("sense", target.name), replacement)
    if isinstance(target, Act):
        if not isinstance(replacement, Mode):
            raise SubstitutionError(f"act variable {target.name} needs a mode literal")
        return _subst(phi, ("act", target.name), replacement)
    raise SubstitutionError(f"not a substitutable variable: {target!r}")


def substitute_aexp(a: AExp, target, replacement: AExp) -> AExp:
    return _subst_aexp(a, target.name, replacement)


# ---------------------------------------------------------------------------
# Pretty printing


def format_number(q: Fraction) -> str:
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    d = q.denominator
    for p in (2, 5):
        while d % p == 0:
            d //= p
    if d != 1:
        return f"{q.numerator}/{q.denominator}"
    with localcontext() as ctx:
        ctx.prec = 200
        text = format(Decimal(q.numerator) / Decimal(q.denominator), "f")
    return text.rstrip("0").rstrip(".") if "." in text else text


def _pretty_aexp(a: AExp) -> str:
    if isinstance(a, Num):
        return format_number(a.value)
    if isinstance(a, (Var, LVar)):
        return a.name
    if isinstance(a, BinOp):
        p = _PREC[a.op]
        left = _pretty_aexp(a.left)
        if isinstance(a.left, BinOp) and _PREC[a.left.op] < p:
            left = f"({left})"
        right = _pretty_aexp(a.right)
        if isinstance(a.right, BinOp) and _PREC[a.right.op] <= p:
            right = f"({right})"
        return f"{left} {a.op} {right}"
    raise TypeError(a)


def _pretty_formula(phi, nested=False) -> str:
    if isinstance(phi, Const):
        return "true" if phi.value else "false"
    if isinstance(phi, Sense):
        return phi.name
    if isinstance(phi, Cmp):
        return f"{_pretty_aexp(phi.left)} {phi.op} {_pretty_aexp(phi.right)}"
    if isinstance(phi, ModeEq):
        return f"{phi.left.name} = {phi.right.name}"
    if isinstance(phi, Not):
        inner = _pretty_formula(phi.arg, nested=True)
        if isinstance(phi.arg, (Cmp, ModeEq, And, Or)):
            inner = f"({inner})"
        return f"!{inner}"
    if isinstance(phi, (And, Or)):
        sep = " && " if isinstance(phi, And) else " || "
        if not phi.args:
            return "true" if isinstance(phi, And) else "false"
        parts = []
        for a in phi.args:
            s = _pretty_formula(a, nested=True)
            if isinstance(a, (And, Or)):
                s = f"({s})"
            parts.append(s)
        text = sep.join(parts)
        if len(phi.args) == 1:
            text = f"({text})"
        return text
    if isinstance(phi, (Exists, Forall)):
        word = "exists" if isinstance(phi, Exists) else "forall"
        text = f"{word} {phi.var}. {_pretty_formula(phi.body)}"
        return f"({text})" if nested else text
    raise TypeError(phi)


def _pretty_cmd(c: Cmd, indent: int) -> str:
    pad = "  " * indent
    if isinstance(c, Skip):
        return pad + "skip"
    if isinstance(c, Assign):
        return f"{pad}{c.var} := {_pretty_aexp(c.expr)}"
    if isinstance(c, ActAssign):
        return f"{pad}{c.var} := {c.mode}"
    if isinstance(c, Seq):
        first = _pretty_cmd(c.first, indent)
        if isinstance(c.first, Seq):
            first = f"{pad}{{\n{_pretty_cmd(c.first, indent + 1)}\n{pad}}}"
        return f"{first};\n{_pretty_cmd(c.second, indent)}"
    if isinstance(c, If):
        return (
            f"{pad}if {_pretty_formula(c.cond)} then\n"
            f"{_branch(c.then, indent + 1)}\n"
            f"{pad}else\n"
            f"{_branch(c.orelse, indent + 1)}"
        )
    raise TypeError(c)


def _branch(c: Cmd, indent: int) -> str:
    if isinstance(c, (Seq, If)):
        pad = "  " * (indent - 1)
        return f"{pad}{{\n{_pretty_cmd(c, indent)}\n{pad}}}"
    return _pretty_cmd(c, indent)


def pretty(node) -> str:
    """Concrete syntax for any AST node; reparses to an equal tree."""
    if isinstance(node, (Num, Var, LVar, BinOp)):
        return _pretty_aexp(node)
    if isinstance(node, (Skip, Assign, ActAssign, Seq, If)):
        return _pretty_cmd(node, 0)
    return _pretty_formula(node)


# ---------------------------------------------------------------------------
# Tokenizer and parser

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r]+|\#[^\n]*)
  | (?P<nl>\n)
  | (?P<num>\d+(?:\.\d*)?(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?)
  | (?P<id>[A-Za-z_][A-Za-z0-9_']*)
  | (?P<op>:=|<=|>=|&&|\|\||[-+*/<>=!();:{}.,\[\]|])
    """,
    re.VERBOSE,
)

KEYWORDS = {
    "if", "then", "else", "skip", "switch", "case", "default",
    "true", "false", "exists", "forall",
}


@dataclass
class Token:
    kind: str
    text: str
    line: int
    col: int


def tokenize(text: str) -> list:
    tokens = []
    line, line_start, pos = 1, 0, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        if kind == "nl":
            line += 1
            line_start = m.end()
        elif kind != "ws":
            tokens.append(Token(kind, m.group(), line, m.start() - line_start + 1))
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens


class _Backtrack(Exception):
    pass


@dataclass
class Parser:
    tokens: list
    vars: VarTable
    allow_logical: bool = False
    pos: int = 0
    bound: list = field(default_factory=list)

    # -- token helpers
    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def peek(self, k=1) -> Token:
        return self.tokens[min(self.pos + k, len(self.tokens) - 1)]

    def at(self, *texts) -> bool:
        t = self.tok
        return t.kind in ("op", "id") and t.text in texts

    def advance(self) -> Token:
        t = self.tok
        self.pos += 1
        return t

    def expect(self, text) -> Token:
        if not self.at(text):
            self.error(f"expected {text!r}, found {self.tok.text or 'end of input'!r}")
        return self.advance()

    def error(self, message, tok=None):
        tok = tok or self.tok
        raise ParseError(message, tok.line, tok.col)

    def expect_eof(self):
        if self.tok.kind != "eof":
            self.error(f"unexpected {self.tok.text!r}")

    # -- arithmetic
    def number(self) -> Fraction:
        t = self.advance()
        value = Fraction(t.text)
        if self.at("/") and self.peek().kind == "num":
            self.advance()
            den = Fraction(self.advance().text)
            if den == 0:
                self.error("zero denominator in rational literal", t)
            value /= den
        return value

    def aexp(self) -> AExp:
        left = self.term()
        while self.at("+", "-"):
            op = self.advance().text
            left = BinOp(op, left, self.term())
        return left

    def term(self) -> AExp:
        left = self.factor()
        while self.at("*"):
            self.advance()
            left = BinOp("*", left, self.factor())
        return left

    def factor(self) -> AExp:
        t = self.tok
        if t.kind == "num":
            return Num(self.number())
        if self.at("-"):
            self.advance()
            if self.tok.kind == "num":
                return Num(-self.number())
            return BinOp("*", Num(-1), self.factor())
        if self.at("("):
            self.advance()
            inner = self.aexp()
            self.expect(")")
            return inner
        if t.kind == "id" and t.text not in KEYWORDS:
            self.advance()
            name = t.text
            if name in self.vars.think:
                return Var(name)
            if _LOGICAL_RE.fullmatch(name):
                if not self.allow_logical and name not in self.bound:
                    self.error(f"logical variable {name} is not user-writable", t)
                return LVar(name)
            if name in self.vars.sense or name == self.vars.act or name in self.vars.modes:
                self.error(f"{name} cannot appear in arithmetic", t)
            self.error(f"undeclared identifier {name!r}", t)
        self.error(f"expected arithmetic expression, found {t.text or 'end of input'!r}")

    # -- formulas
    def formula(self, bexp=False):
        if self.at("exists", "forall"):
            return self.quantified(bexp)
        left = self.conjunction(bexp)
        if not self.at("||"):
            return left
        args = [left]
        while self.at("||"):
            self.advance()
            args.append(self.conjunction(bexp))
        return Or(tuple(args))

    def quantified(self, bexp):
        t = self.advance()
        if bexp:
            self.error("quantifiers are not allowed in controller conditions", t)
        v = self.tok
        if v.kind != "id" or not _LOGICAL_RE.fullmatch(v.text):
            self.error("quantifier must bind a logical variable _vN")
        if not self.allow_logical:
            self.error(f"logical variable {v.text} is not user-writable")
        self.advance()
        self.expect(".")
        self.bound.append(v.text)
        try:
            body = self.formula(bexp)
        finally:
            self.bound.pop()
        return (Exists if t.text == "exists" else Forall)(v.text, body)

    def conjunction(self, bexp):
        left = self.negation(bexp)
        if not self.at("&&"):
            return left
        args = [left]
        while self.at("&&"):
            self.advance()
            args.append(self.negation(bexp))
        return And(tuple(args))

    def negation(self, bexp):
        if self.at("!"):
            self.advance()
            return Not(self.negation(bexp))
        return self.atom(bexp)

    def atom(self, bexp):
        t = self.tok
        if self.at("exists", "forall"):
            return self.quantified(bexp)
        if self.at("true"):
            self.advance()
            return TRUE
        if self.at("false"):
            self.advance()
            return FALSE
        if self.at("("):
            start = self.pos
            try:
                self.advance()
                inner = self.formula(bexp)
                if not self.at(")"):
                    raise _Backtrack
                self.advance()
                if self.at(*ROPS, "+", "-", "*"):
                    raise _Backtrack
                return inner
            except (_Backtrack, ParseError):
                self.pos = start
            return self.comparison()
        if t.kind == "id":
            name = t.text
            if name in self.vars.sense:
                self.advance()
                return Sense(name)
            if name == self.vars.act or name in self.vars.modes:
                if bexp:
                    self.error("mode comparisons are not allowed in controller conditions")
                return self.mode_equality()
        return self.comparison()

    def mode_expr(self) -> MExp:
        t = self.advance()
        if t.text == self.vars.act:
            return Act(t.text)
        if t.text in self.vars.modes:
            return Mode(t.text)
        self.error(f"expected mode expression, found {t.text!r}", t)

    def mode_equality(self):
        left = self.mode_expr()
        self.expect("=")
        return ModeEq(left, self.mode_expr())

    def comparison(self):
        left = self.aexp()
        if not self.at(*ROPS):
            self.error(f"expected comparison operator, found {self.tok.text or 'end of input'!r}")
        op = self.advance().text
        return Cmp(op, left, self.aexp())

    # -- commands
    def command(self) -> Cmd:
        stmts = [self.statement()]
        while self.at(";"):
            self.advance()
            if self.tok.kind == "eof" or self.at("}"):
                break
            stmts.append(self.statement())
        out = stmts[-1]
        for s in reversed(stmts[:-1]):
            out = Seq(s, out)
        return out

    def statement(self) -> Cmd:
        t = self.tok
        if self.at("skip"):
            self.advance()
            return SKIP
        if self.at("{"):
            self.advance()
            body = self.command()
            self.expect("}")
            return body
        if self.at("if"):
            self.advance()
            cond = self.formula(bexp=True)
            self.expect("then")
            then = self.statement()
            orelse = SKIP
            if self.at("else"):
                self.advance()
                orelse = self.statement()
            return If(cond, then, orelse)
        if self.at("switch"):
            return self.switch()
        if t.kind == "id" and self.peek().text == ":=":
            self.advance()
            self.advance()
            if t.text == self.vars.act:
                m = self.tok
                if m.kind != "id" or m.text not in self.vars.modes:
                    self.error(f"undeclared mode {m.text!r}", m)
                self.advance()
                return ActAssign(t.text, m.text)
            if t.text not in self.vars.think:
                self.error(f"assignment to undeclared think variable {t.text!r}", t)
            return Assign(t.text, self.aexp())
        self.error(f"expected command, found {t.text or 'end of input'!r}")

    def switch(self) -> Cmd:
        self.expect("switch")
        self.expect("{")
        arms = []
        default = None
        while self.at("case"):
            self.advance()
            guard = self.formula(bexp=True)
            self.expect(":")
            arms.append((guard, self.statement()))
            if self.at(";"):
                self.advance()
        if self.at("default"):
            self.advance()
            self.expect(":")
            default = self.statement()
            if self.at(";"):
                self.advance()
        self.expect("}")
        if not arms:
            self.error("switch needs at least one case")
        # the last arm is the fall-through branch
        if default is None:
            default = arms.pop()[1]
        out = default
        for guard, body in reversed(arms):
            out = If(guard, body, out)
        return out


def parse_controller(text: str, vars: VarTable) -> Cmd:
    p = Parser(tokenize(text), vars)
    c = p.command()
    p.expect_eof()
    return c


def parse_formula(text: str, vars: VarTable, allow_logical: bool = False) -> Formula:
    p = Parser(tokenize(text), vars, allow_logical=allow_logical)
    phi = p.formula()
    p.expect_eof()
    return phi


def parse_bexp(text: str, vars: VarTable) -> BExp:
    p = Parser(tokenize(text), vars)
    b = p.formula(bexp=True)
    p.expect_eof()
    return b


def parse_aexp(text: str, vars: VarTable, allow_logical: bool = False) -> AExp:
    p = Parser(tokenize(text), vars, allow_logical=allow_logical)
    a = p.aexp()
    p.expect_eof()
    return a


def iter_commands(c: Cmd) -> Iterator[Cmd]:
    yield c
    if isinstance(c, Seq):
        yield from iter_commands(c.first)
        yield from iter_commands(c.second)
    elif isinstance(c, If):
        yield from iter_commands(c.then)
        yield from iter_commands(c.orelse)
