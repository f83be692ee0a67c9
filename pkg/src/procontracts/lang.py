"""Syntax of the toy procedural language and of Hoare-style contracts.

Program files::

    # comment
    domain 0..7 vars n, r
    proc even is if n = 0 then r := 1 else (n := n - 1; call odd);
    proc odd  is if n = 0 then r := 0 else (n := n - 1; call even)

Contract files::

    contract odd logical n0
      requires n >= 0 and n = n0
      ensures (n0 mod 2 = 0 => r = 0) and (n0 mod 2 = 1 => r = 1)

``mod`` is accepted in assertions only.  Logical variables exist only in
contract files, where they must be declared with ``logical``.
"""

from __future__ import annotations

import itertools
import re
import warnings
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterator, Mapping, Union

import numpy as np

from .errors import CapExceeded, DomainConflictWarning, ParseError, SemanticError

DEFAULT_STATE_CAP = 65536

# ---------------------------------------------------------------- domain


@dataclass(frozen=True)
class DomainConfig:
    lo: int
    hi: int
    variables: tuple[str, ...]
    cap: int = DEFAULT_STATE_CAP

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        if self.lo > self.hi:
            raise SemanticError(f"empty value domain {self.lo}..{self.hi}")
        if not self.variables:
            raise SemanticError("domain needs at least one variable")
        if len(set(self.variables)) != len(self.variables):
            raise SemanticError(f"duplicate variable in {self.variables}")
        if self.num_states > self.cap:
            raise CapExceeded(
                f"{self.width}^{len(self.variables)} = {self.num_states} states "
                f"exceeds the cap of {self.cap}"
            )

    @property
    def width(self) -> int:
        return self.hi - self.lo + 1

    @property
    def num_states(self) -> int:
        return self.width ** len(self.variables)

    @cached_property
    def strides(self) -> dict[str, int]:
        k = len(self.variables)
        return {v: self.width ** (k - 1 - i) for i, v in enumerate(self.variables)}

    @cached_property
    def columns(self) -> dict[str, np.ndarray]:
        """Value of each variable at every state index, as int64 arrays."""
        idx = np.arange(self.num_states, dtype=np.int64)
        cols = {}
        for v in self.variables:
            col = self.lo + (idx // self.strides[v]) % self.width
            col.flags.writeable = False
            cols[v] = col
        return cols

    def index(self, state: Mapping[str, int]) -> int:
        if set(state) != set(self.variables):
            raise SemanticError(f"state {dict(state)} is not total over {self.variables}")
        i = 0
        for v in self.variables:
            val = state[v]
            if not self.lo <= val <= self.hi:
                raise SemanticError(f"{v}={val} outside {self.lo}..{self.hi}")
            i += (val - self.lo) * self.strides[v]
        return i

    def state(self, index: int) -> dict[str, int]:
        return {v: self.lo + (index // self.strides[v]) % self.width for v in self.variables}

    def contains(self, value: int) -> bool:
        return self.lo <= value <= self.hi

    def to_dict(self) -> dict:
        return {"lo": self.lo, "hi": self.hi, "vars": list(self.variables)}

    @classmethod
    def from_dict(cls, d: Mapping, cap: int = DEFAULT_STATE_CAP) -> "DomainConfig":
        return cls(int(d["lo"]), int(d["hi"]), tuple(d["vars"]), cap)


def enumerate_states(domain: DomainConfig) -> list[dict[str, int]]:
    """All states in lexicographic order, first variable most significant."""
    values = range(domain.lo, domain.hi + 1)
    return [dict(zip(domain.variables, combo))
            for combo in itertools.product(values, repeat=len(domain.variables))]


# ---------------------------------------------------------------- AST


@dataclass(frozen=True)
class Num:
    value: int


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class LogicalVar:
    name: str


@dataclass(frozen=True)
class BinOp:
    op: str  # + - * mod
    left: "AExp"
    right: "AExp"


AExp = Union[Num, Var, LogicalVar, BinOp]


@dataclass(frozen=True)
class BoolConst:
    value: bool


@dataclass(frozen=True)
class Cmp:
    op: str  # = <= < >= >
    left: AExp
    right: AExp


@dataclass(frozen=True)
class Not:
    arg: "BExp"


@dataclass(frozen=True)
class BoolOp:
    op: str  # and or =>
    left: "BExp"
    right: "BExp"


BExp = Union[BoolConst, Cmp, Not, BoolOp]


@dataclass(frozen=True)
class Skip:
    pass


@dataclass(frozen=True)
class Assign:
    var: str
    expr: AExp


@dataclass(frozen=True)
class Seq:
    first: "Stmt"
    second: "Stmt"


@dataclass(frozen=True)
class If:
    cond: BExp
    then: "Stmt"
    orelse: "Stmt"


@dataclass(frozen=True)
class While:
    cond: BExp
    body: "Stmt"


@dataclass(frozen=True)
class Call:
    name: str


Stmt = Union[Skip, Assign, Seq, If, While, Call]


@dataclass(frozen=True)
class ProcDecl:
    name: str
    body: Stmt


@dataclass(frozen=True)
class Interface:
    required: frozenset[str]
    provided: frozenset[str]

    def __post_init__(self):
        object.__setattr__(self, "required", frozenset(self.required))
        object.__setattr__(self, "provided", frozenset(self.provided))
        overlap = self.required & self.provided
        if overlap:
            raise SemanticError(f"interface sets overlap on {sorted(overlap)}")

    def to_dict(self) -> dict:
        return {"required": sorted(self.required), "provided": sorted(self.provided)}


@dataclass(frozen=True)
class Program:
    decls: tuple[ProcDecl, ...]
    domain: DomainConfig | None = None

    def __post_init__(self):
        object.__setattr__(self, "decls", tuple(self.decls))
        seen = set()
        for d in self.decls:
            if d.name in seen:
                raise SemanticError(f"duplicate procedure {d.name!r}")
            seen.add(d.name)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(d.name for d in self.decls)

    def decl(self, name: str) -> ProcDecl:
        for d in self.decls:
            if d.name == name:
                return d
        raise SemanticError(f"no procedure named {name!r}")

    @property
    def interface(self) -> Interface:
        required, provided = static_interface(self)
        return Interface(required, provided)

    @property
    def is_closed(self) -> bool:
        return not self.interface.required

    def with_domain(self, domain: DomainConfig) -> "Program":
        return Program(self.decls, domain)

    def require_domain(self) -> DomainConfig:
        if self.domain is None:
            raise SemanticError("program has no value domain; add a `domain` header or pass --domain/--vars")
        return self.domain


@dataclass(frozen=True)
class Assertion:
    formula: BExp
    logicals: frozenset[str] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "logicals", frozenset(self.logicals))
        free = logical_vars(self.formula)
        if not free <= self.logicals:
            raise SemanticError(f"undeclared logical variables {sorted(free - self.logicals)}")


@dataclass(frozen=True)
class HoareContract:
    pre: Assertion
    post: Assertion

    def __post_init__(self):
        if self.pre.logicals != self.post.logicals:
            raise SemanticError("pre and post must share one set of logical variables")

    @property
    def logicals(self) -> frozenset[str]:
        return self.pre.logicals


# ---------------------------------------------------------------- traversals


def calls(stmt: Stmt) -> set[str]:
    if isinstance(stmt, Call):
        return {stmt.name}
    if isinstance(stmt, Seq):
        return calls(stmt.first) | calls(stmt.second)
    if isinstance(stmt, If):
        return calls(stmt.then) | calls(stmt.orelse)
    if isinstance(stmt, While):
        return calls(stmt.body)
    return set()


def called_names(decls) -> set[str]:
    out: set[str] = set()
    for d in decls:
        out |= calls(d.body)
    return out


def static_interface(program: Program) -> tuple[frozenset[str], frozenset[str]]:
    """(required, provided): called-but-undeclared names and declared names."""
    provided = frozenset(program.names)
    required = frozenset(called_names(program.decls)) - provided
    return required, provided


def _expr_nodes(e) -> Iterator:
    yield e
    if isinstance(e, (BinOp, Cmp, BoolOp)):
        yield from _expr_nodes(e.left)
        yield from _expr_nodes(e.right)
    elif isinstance(e, Not):
        yield from _expr_nodes(e.arg)


def _stmt_exprs(s: Stmt) -> Iterator:
    if isinstance(s, Assign):
        yield s.expr
    elif isinstance(s, Seq):
        yield from _stmt_exprs(s.first)
        yield from _stmt_exprs(s.second)
    elif isinstance(s, If):
        yield s.cond
        yield from _stmt_exprs(s.then)
        yield from _stmt_exprs(s.orelse)
    elif isinstance(s, While):
        yield s.cond
        yield from _stmt_exprs(s.body)


def _assigned(s: Stmt) -> Iterator[str]:
    if isinstance(s, Assign):
        yield s.var
    elif isinstance(s, Seq):
        yield from _assigned(s.first)
        yield from _assigned(s.second)
    elif isinstance(s, If):
        yield from _assigned(s.then)
        yield from _assigned(s.orelse)
    elif isinstance(s, While):
        yield from _assigned(s.body)


def expr_vars(e) -> set[str]:
    return {n.name for n in _expr_nodes(e) if isinstance(n, Var)}


def logical_vars(e) -> set[str]:
    return {n.name for n in _expr_nodes(e) if isinstance(n, LogicalVar)}


def program_variables(program_or_decls) -> list[str]:
    """Program variables in order of first occurrence."""
    decls = program_or_decls.decls if isinstance(program_or_decls, Program) else program_or_decls
    seen: dict[str, None] = {}
    for d in decls:
        for s in _walk_stmts(d.body):
            if isinstance(s, Assign):
                seen.setdefault(s.var)
                for n in _expr_nodes(s.expr):
                    if isinstance(n, Var):
                        seen.setdefault(n.name)
            elif isinstance(s, (If, While)):
                for n in _expr_nodes(s.cond):
                    if isinstance(n, Var):
                        seen.setdefault(n.name)
    return list(seen)


def _walk_stmts(s: Stmt) -> Iterator[Stmt]:
    yield s
    if isinstance(s, Seq):
        yield from _walk_stmts(s.first)
        yield from _walk_stmts(s.second)
    elif isinstance(s, If):
        yield from _walk_stmts(s.then)
        yield from _walk_stmts(s.orelse)
    elif isinstance(s, While):
        yield from _walk_stmts(s.body)


def check_program_domain(program: Program, domain: DomainConfig) -> None:
    missing = set(program_variables(program)) - set(domain.variables)
    if missing:
        raise SemanticError(f"variables {sorted(missing)} are not in the domain {list(domain.variables)}")


# ---------------------------------------------------------------- lexer

KEYWORDS = {
    "proc", "is", "skip", "if", "then", "else", "while", "do", "call",
    "true", "false", "not", "and", "or", "mod", "domain", "vars",
    "contract", "logical", "requires", "ensures",
}

_ALIASES = {"≤": "<=", "≥": ">=", "⇒": "=>", "¬": "not", "∧": "and", "∨": "or"}

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r]+)
  | (?P<nl>\n)
  | (?P<comment>\#[^\n]*)
  | (?P<int>\d+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<sym>:=|\.\.|<=|>=|=>|[<>=+\-*();,]|[≤≥⇒¬∧∨])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str  # int ident kw sym eof
    text: str
    line: int
    col: int


def tokenize(text: str) -> list[Token]:
    tokens = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        col = pos - line_start + 1
        value = m.group()
        if kind == "nl":
            line += 1
            line_start = m.end()
        elif kind == "int":
            tokens.append(Token("int", value, line, col))
        elif kind == "ident":
            tokens.append(Token("kw" if value in KEYWORDS else "ident", value, line, col))
        elif kind == "sym":
            value = _ALIASES.get(value, value)
            tokens.append(Token("kw" if value in KEYWORDS else "sym", value, line, col))
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens


# ---------------------------------------------------------------- parser

_CMP_OPS = ("=", "<=", "<", ">=", ">")


class _Parser:
    def __init__(self, text: str, *, assertion_mode: bool = False,
                 logicals: frozenset[str] = frozenset()):
        self.toks = tokenize(text)
        self.i = 0
        self.assertion_mode = assertion_mode
        self.logicals = logicals

    # token helpers
    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def at(self, text: str) -> bool:
        return self.tok.kind in ("kw", "sym") and self.tok.text == text

    def error(self, msg: str, tok: Token | None = None) -> ParseError:
        tok = tok or self.tok
        found = tok.text or "end of input"
        return ParseError(f"{msg} (found {found!r})", tok.line, tok.col)

    def expect(self, text: str) -> Token:
        if not self.at(text):
            raise self.error(f"expected {text!r}")
        t = self.tok
        self.i += 1
        return t

    def accept(self, text: str) -> bool:
        if self.at(text):
            self.i += 1
            return True
        return False

    def ident(self) -> str:
        if self.tok.kind != "ident":
            raise self.error("expected identifier")
        t = self.tok
        self.i += 1
        return t.text

    def integer(self) -> int:
        neg = self.accept("-")
        if self.tok.kind != "int":
            raise self.error("expected integer")
        v = int(self.tok.text)
        self.i += 1
        return -v if neg else v

    # programs
    def program(self) -> tuple[DomainConfig | None, list[ProcDecl]]:
        domain = None
        if self.at("domain"):
            domain = self.domain_header()
        decls = []
        seen: dict[str, Token] = {}
        while self.at("proc"):
            start = self.tok
            d = self.decl()
            if d.name in seen:
                raise ParseError(f"duplicate procedure {d.name!r}", start.line, start.col)
            seen[d.name] = start
            decls.append(d)
            self.accept(";")
        if self.tok.kind != "eof":
            raise self.error("expected 'proc' or end of input")
        return domain, decls

    def domain_header(self) -> DomainConfig:
        self.expect("domain")
        lo = self.integer()
        self.expect("..")
        hi = self.integer()
        self.expect("vars")
        names = [self.ident()]
        while self.accept(","):
            names.append(self.ident())
        return DomainConfig(lo, hi, tuple(names))

    def decl(self) -> ProcDecl:
        self.expect("proc")
        name = self.ident()
        self.expect("is")
        return ProcDecl(name, self.stmt())

    def stmt(self) -> Stmt:
        first = self.atom_stmt()
        if self.at(";") and not self.peek().text == "proc" and self.peek().kind != "eof":
            self.i += 1
            return Seq(first, self.stmt())
        return first

    def atom_stmt(self) -> Stmt:
        t = self.tok
        if self.accept("skip"):
            return Skip()
        if self.accept("call"):
            return Call(self.ident())
        if self.accept("if"):
            cond = self.bexp()
            self.expect("then")
            then = self.atom_stmt()
            self.expect("else")
            return If(cond, then, self.atom_stmt())
        if self.accept("while"):
            cond = self.bexp()
            self.expect("do")
            return While(cond, self.atom_stmt())
        if self.accept("("):
            s = self.stmt()
            self.expect(")")
            return s
        if t.kind == "ident":
            name = self.ident()
            if name in self.logicals:
                raise ParseError(f"logical variable {name!r} used in a statement", t.line, t.col)
            self.expect(":=")
            return Assign(name, self.aexp())
        raise self.error("expected statement")

    # expressions
    def aexp(self) -> AExp:
        e = self.term()
        while self.at("+") or self.at("-"):
            op = self.tok.text
            self.i += 1
            e = BinOp(op, e, self.term())
        return e

    def term(self) -> AExp:
        e = self.factor()
        while self.at("*") or self.at("mod"):
            t = self.tok
            if t.text == "mod" and not self.assertion_mode:
                raise ParseError("'mod' is only allowed in assertions", t.line, t.col)
            self.i += 1
            e = BinOp(t.text, e, self.factor())
        return e

    def factor(self) -> AExp:
        t = self.tok
        if t.kind == "int" or (self.at("-") and self.peek().kind == "int"):
            return Num(self.integer())
        if t.kind == "ident":
            self.i += 1
            if t.text in self.logicals:
                if not self.assertion_mode:
                    raise ParseError(f"logical variable {t.text!r} used in a statement", t.line, t.col)
                return LogicalVar(t.text)
            return Var(t.text)
        if self.accept("("):
            e = self.aexp()
            self.expect(")")
            return e
        raise self.error("expected arithmetic expression")

    def bexp(self) -> BExp:
        left = self.bor()
        if self.accept("=>"):
            return BoolOp("=>", left, self.bexp())
        return left

    def bor(self) -> BExp:
        e = self.band()
        while self.accept("or"):
            e = BoolOp("or", e, self.band())
        return e

    def band(self) -> BExp:
        e = self.bnot()
        while self.accept("and"):
            e = BoolOp("and", e, self.bnot())
        return e

    def bnot(self) -> BExp:
        if self.accept("not"):
            return Not(self.bnot())
        return self.batom()

    def batom(self) -> BExp:
        if self.accept("true"):
            return BoolConst(True)
        if self.accept("false"):
            return BoolConst(False)
        if self.at("("):
            # either a parenthesised boolean or the start of an arithmetic operand
            save = self.i
            try:
                self.i += 1
                e = self.bexp()
                self.expect(")")
                if not (self.tok.kind == "sym" and self.tok.text in _CMP_OPS + ("+", "-", "*")
                        or self.at("mod")):
                    return e
            except ParseError:
                pass
            self.i = save
        left = self.aexp()
        if not (self.tok.kind == "sym" and self.tok.text in _CMP_OPS):
            raise self.error("expected comparison operator")
        op = self.tok.text
        self.i += 1
        return Cmp(op, left, self.aexp())

    # contracts
    def contract_file(self) -> dict[str, HoareContract]:
        out: dict[str, HoareContract] = {}
        while self.at("contract"):
            start = self.tok
            self.i += 1
            name = self.ident()
            logicals: list[str] = []
            if self.accept("logical"):
                logicals.append(self.ident())
                while self.accept(","):
                    logicals.append(self.ident())
            self.logicals = frozenset(logicals)
            self.expect("requires")
            pre = self.bexp()
            self.expect("ensures")
            post = self.bexp()
            self.accept(";")
            if name in out:
                raise ParseError(f"duplicate contract for {name!r}", start.line, start.col)
            out[name] = HoareContract(Assertion(pre, self.logicals), Assertion(post, self.logicals))
            self.logicals = frozenset()
        if self.tok.kind != "eof":
            raise self.error("expected 'contract' or end of input")
        return out


def parse_program(text: str, domain: DomainConfig | None = None,
                  logicals: frozenset[str] = frozenset()) -> Program:
    """Parse a program file.

    ``domain`` is the fallback from the command line; a ``domain`` header in
    the file takes precedence (with a warning when both are given and differ).
    ``logicals`` lists names reserved as logical variables, which may not
    appear in statements.
    """
    header, decls = _Parser(text, logicals=frozenset(logicals)).program()
    chosen = header
    if header is None:
        chosen = domain
    elif domain is not None and (header.lo, header.hi, header.variables) != (
            domain.lo, domain.hi, domain.variables):
        warnings.warn(f"domain header {header.lo}..{header.hi} {list(header.variables)} "
                      f"overrides command-line domain", DomainConflictWarning, stacklevel=2)
    if chosen is not None and domain is not None and chosen.cap != domain.cap:
        chosen = DomainConfig(chosen.lo, chosen.hi, chosen.variables, domain.cap)
    program = Program(tuple(decls), chosen)
    if chosen is not None:
        check_program_domain(program, chosen)
    return program


def parse_contract_file(text: str) -> dict[str, HoareContract]:
    return _Parser(text, assertion_mode=True).contract_file()


def parse_bexp(text: str, logicals=frozenset(), assertion: bool = True) -> BExp:
    p = _Parser(text, assertion_mode=assertion, logicals=frozenset(logicals))
    e = p.bexp()
    if p.tok.kind != "eof":
        raise p.error("trailing input")
    return e


def parse_aexp(text: str, logicals=frozenset(), assertion: bool = True) -> AExp:
    p = _Parser(text, assertion_mode=assertion, logicals=frozenset(logicals))
    e = p.aexp()
    if p.tok.kind != "eof":
        raise p.error("trailing input")
    return e


def parse_stmt(text: str) -> Stmt:
    p = _Parser(text)
    s = p.stmt()
    if p.tok.kind != "eof":
        raise p.error("trailing input")
    return s


# ---------------------------------------------------------------- printer

_APREC = {"+": 1, "-": 1, "*": 2, "mod": 2}
_BPREC = {"=>": 1, "or": 2, "and": 3}


def pretty_aexp(e: AExp, parent: int = 0, right: bool = False) -> str:
    if isinstance(e, Num):
        return str(e.value)
    if isinstance(e, (Var, LogicalVar)):
        return e.name
    p = _APREC[e.op]
    s = f"{pretty_aexp(e.left, p)} {e.op} {pretty_aexp(e.right, p, True)}"
    if p < parent or (right and p == parent):
        return f"({s})"
    return s


def pretty_bexp(e: BExp, parent: int = 0, right: bool = False) -> str:
    if isinstance(e, BoolConst):
        return "true" if e.value else "false"
    if isinstance(e, Cmp):
        s = f"{pretty_aexp(e.left)} {e.op} {pretty_aexp(e.right)}"
        return f"({s})" if parent > 4 else s
    if isinstance(e, Not):
        return f"not {pretty_bexp(e.arg, 5)}"
    p = _BPREC[e.op]
    if e.op == "=>":
        # right-associative
        s = f"{pretty_bexp(e.left, p + 1)} => {pretty_bexp(e.right, p)}"
    else:
        s = f"{pretty_bexp(e.left, p)} {e.op} {pretty_bexp(e.right, p, True)}"
    if p < parent or (right and p == parent):
        return f"({s})"
    return s


def pretty_stmt(s: Stmt, nested: bool = False) -> str:
    if isinstance(s, Skip):
        return "skip"
    if isinstance(s, Assign):
        return f"{s.var} := {pretty_aexp(s.expr)}"
    if isinstance(s, Call):
        return f"call {s.name}"
    if isinstance(s, Seq):
        text = f"{pretty_stmt(s.first, True)}; {pretty_stmt(s.second)}"
        return f"({text})" if nested else text
    if isinstance(s, If):
        return (f"if {pretty_bexp(s.cond)} then {pretty_stmt(s.then, True)} "
                f"else {pretty_stmt(s.orelse, True)}")
    if isinstance(s, While):
        return f"while {pretty_bexp(s.cond)} do {pretty_stmt(s.body, True)}"
    raise TypeError(s)


def pretty_program(program: Program) -> str:
    lines = []
    if program.domain is not None:
        d = program.domain
        lines.append(f"domain {d.lo}..{d.hi} vars {', '.join(d.variables)}")
    lines.append(";\n".join(f"proc {d.name} is {pretty_stmt(d.body)}" for d in program.decls))
    return "\n".join(lines) + "\n"


def pretty_contract(name: str, c: HoareContract) -> str:
    head = f"contract {name}"
    if c.logicals:
        head += " logical " + ", ".join(sorted(c.logicals))
    return f"{head}\n  requires {pretty_bexp(c.pre.formula)}\n  ensures {pretty_bexp(c.post.formula)}\n"
