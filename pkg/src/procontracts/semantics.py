"""Relational denotational semantics over a finite value domain.

Statement meanings are ``Denotation`` relations; procedure environments are
``ProcEnv`` mappings from names to relations.  Recursion is resolved by Kleene
iteration from the bottom environment.

Finite-domain conventions:

* an arithmetic value outside ``[lo, hi]`` (including literals and any
  intermediate result) is *out of domain*;
* an assignment whose value is out of domain has no successor, i.e. the
  run is treated as divergent from that state;
* a comparison with an out-of-domain operand is false.
"""

from __future__ import annotations

import operator
from typing import Callable, Iterable, Iterator, Mapping

import numpy as np

from . import kernels
from .errors import DomainMismatch, FixpointDivergence, SemanticError, UnboundName
from .lang import (
    AExp, Assign, BExp, BinOp, BoolConst, BoolOp, Call, Cmp, DomainConfig, If,
    LogicalVar, Not, Num, ProcDecl, Program, Seq, Skip, Stmt, Var, While,
    static_interface,
)
from .relation import Denotation


class ProcEnv(Mapping[str, Denotation]):
    """Immutable map from a finite set of procedure names to relations."""

    __slots__ = ("domain", "_map", "_hash")

    def __init__(self, domain: DomainConfig, mapping: Mapping[str, Denotation] | None = None):
        self.domain = domain
        self._map = dict(sorted((mapping or {}).items()))
        self._hash = None
        for name, rel in self._map.items():
            if not isinstance(rel, Denotation):
                raise TypeError(f"{name!r} is bound to {type(rel).__name__}, not Denotation")
            if rel.domain != domain:
                raise DomainMismatch(f"{name!r} is a relation over a different domain")

    @property
    def scope(self) -> frozenset[str]:
        return frozenset(self._map)

    def __getitem__(self, name: str) -> Denotation:
        return self._map[name]

    def __iter__(self) -> Iterator[str]:
        return iter(self._map)

    def __len__(self) -> int:
        return len(self._map)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ProcEnv):
            return NotImplemented
        return self.domain == other.domain and self._map == other._map

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.domain, tuple(self._map.items())))
        return self._hash

    def __le__(self, other: "ProcEnv") -> bool:
        return env_leq(self, other)

    def __or__(self, other: "ProcEnv") -> "ProcEnv":
        return env_lub(self, other)

    def __and__(self, other: "ProcEnv") -> "ProcEnv":
        return env_glb(self, other)

    def restrict(self, names: Iterable[str]) -> "ProcEnv":
        names = set(names)
        return ProcEnv(self.domain, {p: r for p, r in self._map.items() if p in names})

    def updated(self, mapping: Mapping[str, Denotation]) -> "ProcEnv":
        merged = dict(self._map)
        merged.update(mapping)
        return ProcEnv(self.domain, merged)

    def __repr__(self) -> str:
        inner = ", ".join(f"{p}: {len(r)} pairs" for p, r in self._map.items())
        return f"ProcEnv({{{inner}}})"


# ---------------------------------------------------------------- lattice


def _same_domain(r1: ProcEnv, r2: ProcEnv) -> None:
    if r1.domain != r2.domain:
        raise DomainMismatch("environments over different domains")


def env_leq(r1: ProcEnv, r2: ProcEnv) -> bool:
    _same_domain(r1, r2)
    if not r1.scope <= r2.scope:
        return False
    return all(r1[p] <= r2[p] for p in r1)


def env_lub(r1: ProcEnv, r2: ProcEnv) -> ProcEnv:
    """Union of scopes, per-name union; a missing name counts as empty."""
    _same_domain(r1, r2)
    out = dict(r1)
    for p, rel in r2.items():
        out[p] = out[p] | rel if p in out else rel
    return ProcEnv(r1.domain, out)


def env_glb(r1: ProcEnv, r2: ProcEnv) -> ProcEnv:
    """Intersection of scopes, per-name intersection."""
    _same_domain(r1, r2)
    return ProcEnv(r1.domain, {p: r1[p] & r2[p] for p in r1.scope & r2.scope})


def top_env(names: Iterable[str], domain: DomainConfig) -> ProcEnv:
    full = Denotation.full(domain)
    return ProcEnv(domain, {p: full for p in names})


def bottom_env(names: Iterable[str], domain: DomainConfig) -> ProcEnv:
    empty = Denotation.empty(domain)
    return ProcEnv(domain, {p: empty for p in names})


# ---------------------------------------------------------------- expressions


class _OutOfDomain:
    def __repr__(self) -> str:
        return "OUT_OF_DOMAIN"

    def __bool__(self) -> bool:
        return False


OUT_OF_DOMAIN = _OutOfDomain()

_ARITH = {"+": operator.add, "-": operator.sub, "*": operator.mul}
_CMP = {"=": operator.eq, "<=": operator.le, "<": operator.lt,
        ">=": operator.ge, ">": operator.gt}


def eval_aexp(a: AExp, s: Mapping[str, int], interp: Mapping[str, int],
              domain: DomainConfig):
    """Value of ``a`` at state ``s``, or OUT_OF_DOMAIN."""
    if isinstance(a, Num):
        v = a.value
    elif isinstance(a, Var):
        if a.name not in s:
            raise UnboundName(f"unbound variable {a.name!r}")
        v = s[a.name]
    elif isinstance(a, LogicalVar):
        if a.name not in interp:
            raise UnboundName(f"uninterpreted logical variable {a.name!r}")
        v = interp[a.name]
    elif isinstance(a, BinOp):
        x = eval_aexp(a.left, s, interp, domain)
        y = eval_aexp(a.right, s, interp, domain)
        if x is OUT_OF_DOMAIN or y is OUT_OF_DOMAIN:
            return OUT_OF_DOMAIN
        if a.op == "mod":
            if y == 0:
                return OUT_OF_DOMAIN
            v = x % y
        else:
            v = _ARITH[a.op](x, y)
    else:
        raise TypeError(a)
    return v if domain.contains(v) else OUT_OF_DOMAIN


def eval_bexp(b: BExp, s: Mapping[str, int], interp: Mapping[str, int],
              domain: DomainConfig) -> bool:
    if isinstance(b, BoolConst):
        return b.value
    if isinstance(b, Cmp):
        x = eval_aexp(b.left, s, interp, domain)
        y = eval_aexp(b.right, s, interp, domain)
        if x is OUT_OF_DOMAIN or y is OUT_OF_DOMAIN:
            return False
        return _CMP[b.op](x, y)
    if isinstance(b, Not):
        return not eval_bexp(b.arg, s, interp, domain)
    if isinstance(b, BoolOp):
        x = eval_bexp(b.left, s, interp, domain)
        if b.op == "and":
            return x and eval_bexp(b.right, s, interp, domain)
        if b.op == "or":
            return x or eval_bexp(b.right, s, interp, domain)
        return (not x) or eval_bexp(b.right, s, interp, domain)
    raise TypeError(b)


# vectorised over every state index at once


def vec_aexp(a: AExp, domain: DomainConfig, interp: Mapping[str, int]) -> tuple[np.ndarray, np.ndarray]:
    """(values, ok) arrays over all state indices; ok is False where out of domain."""
    n = domain.num_states
    if isinstance(a, Num):
        vals = np.full(n, a.value, dtype=np.int64)
        ok = np.full(n, domain.contains(a.value))
        return vals, ok
    if isinstance(a, Var):
        if a.name not in domain.columns:
            raise UnboundName(f"unbound variable {a.name!r}")
        return domain.columns[a.name], np.ones(n, dtype=bool)
    if isinstance(a, LogicalVar):
        if a.name not in interp:
            raise UnboundName(f"uninterpreted logical variable {a.name!r}")
        v = interp[a.name]
        return np.full(n, v, dtype=np.int64), np.full(n, domain.contains(v))
    if isinstance(a, BinOp):
        x, okx = vec_aexp(a.left, domain, interp)
        y, oky = vec_aexp(a.right, domain, interp)
        ok = okx & oky
        if a.op == "mod":
            ok &= y != 0
            vals = np.mod(x, np.where(y == 0, 1, y))
        else:
            vals = _ARITH[a.op](x, y)
        ok &= (vals >= domain.lo) & (vals <= domain.hi)
        return vals, ok
    raise TypeError(a)


def vec_bexp(b: BExp, domain: DomainConfig, interp: Mapping[str, int]) -> np.ndarray:
    n = domain.num_states
    if isinstance(b, BoolConst):
        return np.full(n, b.value)
    if isinstance(b, Cmp):
        x, okx = vec_aexp(b.left, domain, interp)
        y, oky = vec_aexp(b.right, domain, interp)
        return okx & oky & _CMP[b.op](x, y)
    if isinstance(b, Not):
        return ~vec_bexp(b.arg, domain, interp)
    if isinstance(b, BoolOp):
        x = vec_bexp(b.left, domain, interp)
        y = vec_bexp(b.right, domain, interp)
        if b.op == "and":
            return x & y
        if b.op == "or":
            return x | y
        return ~x | y
    raise TypeError(b)


# ---------------------------------------------------------------- statements


def _while_fixpoint(guard: np.ndarray, body: Denotation) -> Denotation:
    """Least R with R = id|not guard  U  (id|guard ; body ; R)."""
    domain = body.domain
    n = domain.num_states
    exit_rows = Denotation.identity(domain).restrict_rows(~guard)
    step = body.restrict_rows(guard)
    bound = n * n + 1
    bits, iterations = kernels.while_lfp(exit_rows.bits, step.bits, bound)
    if iterations > bound:
        raise FixpointDivergence(f"while-loop iteration exceeded {bound} steps")
    return Denotation(domain, bits)


def denote_stmt(stmt: Stmt, r_minus: ProcEnv, r_plus: ProcEnv) -> Denotation:
    """Meaning of ``stmt`` with required calls read from ``r_minus`` and provided from ``r_plus``."""
    if r_minus.domain != r_plus.domain:
        raise DomainMismatch("r_minus and r_plus are over different domains")
    overlap = r_minus.scope & r_plus.scope
    if overlap:
        raise SemanticError(f"environment scopes overlap on {sorted(overlap)}")
    return _denote(stmt, r_minus, r_plus, r_minus.domain)


def _denote(stmt: Stmt, rm: ProcEnv, rp: ProcEnv, domain: DomainConfig) -> Denotation:
    if isinstance(stmt, Skip):
        return Denotation.identity(domain)
    if isinstance(stmt, Assign):
        if stmt.var not in domain.columns:
            raise UnboundName(f"assignment to unknown variable {stmt.var!r}")
        vals, ok = vec_aexp(stmt.expr, domain, {})
        old = domain.columns[stmt.var]
        idx = np.arange(domain.num_states, dtype=np.int64)
        succ = np.where(ok, idx + (vals - old) * domain.strides[stmt.var], -1)
        return Denotation.from_successors(domain, succ)
    if isinstance(stmt, Seq):
        return _denote(stmt.first, rm, rp, domain).then(_denote(stmt.second, rm, rp, domain))
    if isinstance(stmt, If):
        guard = vec_bexp(stmt.cond, domain, {})
        then = _denote(stmt.then, rm, rp, domain)
        orelse = _denote(stmt.orelse, rm, rp, domain)
        return Denotation(domain, np.where(guard[:, None], then.bits, orelse.bits))
    if isinstance(stmt, While):
        guard = vec_bexp(stmt.cond, domain, {})
        return _while_fixpoint(guard, _denote(stmt.body, rm, rp, domain))
    if isinstance(stmt, Call):
        if stmt.name in rm:
            return rm[stmt.name]
        if stmt.name in rp:
            return rp[stmt.name]
        raise UnboundName(f"call to {stmt.name!r} is bound in neither environment")
    raise TypeError(stmt)


def xi_step(decls: Iterable[ProcDecl], r_minus: ProcEnv, r_plus: ProcEnv) -> ProcEnv:
    """One application of the body functional: each p maps to its body's meaning."""
    return ProcEnv(r_plus.domain, {d.name: denote_stmt(d.body, r_minus, r_plus) for d in decls})


def lfp(f: Callable[[ProcEnv], ProcEnv], scope: Iterable[str], domain: DomainConfig,
        bound: int | None = None) -> ProcEnv:
    """Least fixed point of a monotone endofunction on environments over ``scope``.

    Kleene iteration from the all-empty environment. The default bound is the
    lattice height ``|scope| * |State|^2`` plus one.
    """
    scope = frozenset(scope)
    if bound is None:
        bound = len(scope) * domain.num_states ** 2 + 1
    x = bottom_env(scope, domain)
    for _ in range(bound + 1):
        y = f(x)
        if y.scope != scope:
            raise SemanticError(f"function maps scope {sorted(scope)} to {sorted(y.scope)}")
        if y == x:
            return x
        if not env_leq(x, y):
            raise FixpointDivergence("Kleene chain is not ascending; function is not monotone")
        x = y
    raise FixpointDivergence(f"no fixed point within {bound} iterations")


def least_provided_env(decls: Iterable[ProcDecl], r_minus: ProcEnv) -> ProcEnv:
    decls = tuple(decls)
    names = [d.name for d in decls]
    return lfp(lambda rp: xi_step(decls, r_minus, rp), names, r_minus.domain)


def standard_denotation(program: Program, r_minus: ProcEnv | None = None) -> ProcEnv:
    """The least provided environment of ``program`` relative to ``r_minus``."""
    domain = program.require_domain()
    required, _ = static_interface(program)
    if r_minus is None:
        if required:
            raise SemanticError(f"open program requires {sorted(required)}; supply an environment")
        r_minus = ProcEnv(domain)
    if r_minus.domain != domain:
        raise DomainMismatch("environment and program use different domains")
    if r_minus.scope != required:
        raise SemanticError(
            f"environment covers {sorted(r_minus.scope)}, program requires {sorted(required)}")
    return least_provided_env(program.decls, r_minus)


def standard_stmt_denotation(program: Program, stmt: Stmt,
                             r_minus: ProcEnv | None = None) -> Denotation:
    rho0 = standard_denotation(program, r_minus)
    rm = r_minus if r_minus is not None else ProcEnv(rho0.domain)
    return denote_stmt(stmt, rm, rho0)
