"""Big-step operational interpreter, used as ground truth for closed programs.

Divergence is decided exactly.  The language is deterministic and the state
space finite, so a run diverges iff it revisits a configuration:

* a procedure entered at a state while the same (procedure, state) call is
  still active on the call stack recurses forever;
* a loop head reached twice with the same state in one loop execution
  iterates forever.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass
from typing import Mapping

from .errors import SemanticError
from .lang import Assign, Call, If, Program, Seq, Skip, Stmt, While, static_interface
from .relation import Denotation
from .semantics import OUT_OF_DOMAIN, eval_aexp, eval_bexp


@dataclass(frozen=True)
class RunResult:
    final: dict | None

    @property
    def terminated(self) -> bool:
        return self.final is not None

    @property
    def diverges(self) -> bool:
        return self.final is None

    def __repr__(self) -> str:
        return f"terminated({self.final})" if self.terminated else "diverges"


DIVERGES = RunResult(None)


class _Diverge(Exception):
    pass


class _Machine:
    def __init__(self, program: Program):
        self.program = program
        self.domain = program.require_domain()
        self.vars = self.domain.variables
        self.bodies = {d.name: d.body for d in program.decls}
        self.active: set[tuple[str, tuple]] = set()
        self.memo: dict[tuple[str, tuple], tuple | None] = {}

    def as_dict(self, s: tuple) -> dict:
        return dict(zip(self.vars, s))

    def call(self, name: str, s: tuple) -> tuple:
        key = (name, s)
        if key in self.memo:
            out = self.memo[key]
            if out is None:
                raise _Diverge
            return out
        if key in self.active:
            raise _Diverge
        self.active.add(key)
        try:
            out = self.exec(self.bodies[name], s)
        except _Diverge:
            self.memo[key] = None
            raise
        finally:
            self.active.discard(key)
        self.memo[key] = out
        return out

    def exec(self, stmt: Stmt, s: tuple) -> tuple:
        if isinstance(stmt, Skip):
            return s
        if isinstance(stmt, Assign):
            v = eval_aexp(stmt.expr, self.as_dict(s), {}, self.domain)
            if v is OUT_OF_DOMAIN:
                raise _Diverge
            i = self.vars.index(stmt.var)
            return s[:i] + (v,) + s[i + 1:]
        if isinstance(stmt, Seq):
            return self.exec(stmt.second, self.exec(stmt.first, s))
        if isinstance(stmt, If):
            branch = stmt.then if eval_bexp(stmt.cond, self.as_dict(s), {}, self.domain) else stmt.orelse
            return self.exec(branch, s)
        if isinstance(stmt, While):
            seen = set()
            while eval_bexp(stmt.cond, self.as_dict(s), {}, self.domain):
                if s in seen:
                    raise _Diverge
                seen.add(s)
                s = self.exec(stmt.body, s)
            return s
        if isinstance(stmt, Call):
            if stmt.name not in self.bodies:
                raise SemanticError(f"call to undeclared procedure {stmt.name!r}")
            return self.call(stmt.name, s)
        raise TypeError(stmt)


def _check(program: Program, entry: str) -> None:
    required, provided = static_interface(program)
    if required:
        raise SemanticError(f"oracle needs a closed program; {sorted(required)} are required")
    if entry not in provided:
        raise SemanticError(f"entry {entry!r} is not declared")


def run_operational(program: Program, entry: str, state: Mapping[str, int],
                    _machine: _Machine | None = None) -> RunResult:
    _check(program, entry)
    m = _machine or _Machine(program)
    s = tuple(state[v] for v in m.vars)
    m.domain.index(state)
    limit = sys.getrecursionlimit()
    # each nested call uses a bounded number of Python frames
    needed = 64 * len(m.bodies) * m.domain.num_states + 1000
    if needed > limit:
        sys.setrecursionlimit(needed)
    try:
        return RunResult(m.as_dict(m.call(entry, s)))
    except _Diverge:
        return DIVERGES
    finally:
        if needed > limit:
            sys.setrecursionlimit(limit)


def oracle_denotation(program: Program, entry: str) -> Denotation:
    """{(s, s') | running ``entry`` from s terminates in s'}, by exhaustive execution."""
    _check(program, entry)
    domain = program.require_domain()
    machine = _Machine(program)
    pairs = []
    for i in range(domain.num_states):
        res = run_operational(program, entry, domain.state(i), machine)
        if res.terminated:
            pairs.append((i, domain.index(res.final)))
    return Denotation.from_pairs(domain, pairs)
