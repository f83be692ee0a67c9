"""Hoare contracts, contract-relative verification, and the algebra of
assume/guarantee denotational contracts."""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

from .components import Component, CompositeComponent, ConstantComponent, FunctionComponent, composable
from .errors import CapExceeded, MissingContract, NotComposable, SemanticError, UnusedContractWarning
from .lang import (
    DomainConfig, HoareContract, Interface, Program, Stmt, called_names, expr_vars,
    static_interface,
)
from .relation import Denotation, pack_bool
from .semantics import (
    ProcEnv, denote_stmt, env_glb, env_leq, env_lub, standard_denotation, top_env, vec_bexp,
)

MAX_WITNESSES = 5

# ---------------------------------------------------------------- Hoare side


def interpretations(logicals: Iterable[str], domain: DomainConfig) -> Iterable[dict[str, int]]:
    names = sorted(logicals)
    count = domain.width ** len(names)
    if count > domain.cap:
        raise CapExceeded(f"{count} interpretations of {names} exceed the cap of {domain.cap}")
    values = range(domain.lo, domain.hi + 1)
    for combo in itertools.product(values, repeat=len(names)):
        yield dict(zip(names, combo))


def hoare_denotation(contract: HoareContract, domain: DomainConfig) -> Denotation:
    """Pairs (s, s') such that, for every interpretation I of the logical
    variables over the value domain, s |=_I pre implies s' |=_I post."""
    unknown = (expr_vars(contract.pre.formula) | expr_vars(contract.post.formula)) - set(domain.variables)
    if unknown:
        raise SemanticError(f"contract mentions variables {sorted(unknown)} outside the domain")
    n = domain.num_states
    full = Denotation.full(domain).bits
    bits = full.copy()
    for interp in interpretations(contract.logicals, domain):
        pre = vec_bexp(contract.pre.formula, domain, interp)
        if not pre.any():
            continue
        post = pack_bool(vec_bexp(contract.post.formula, domain, interp)[None, :])
        bits[pre] &= post[0]
    return Denotation(domain, bits)


def contract_environment(table: Mapping[str, HoareContract], domain: DomainConfig) -> ProcEnv:
    return ProcEnv(domain, {p: hoare_denotation(c, domain) for p, c in table.items()})


def cr_denotation(stmt: Stmt, rc: ProcEnv) -> Denotation:
    """Statement meaning with every call read from the contract environment."""
    return denote_stmt(stmt, rc, ProcEnv(rc.domain))


@dataclass
class ProcVerdict:
    name: str
    verified: bool
    violations: int = 0
    witnesses: list[tuple[dict, dict]] = field(default_factory=list)


def _require_table(program: Program, table: Mapping[str, HoareContract]) -> None:
    required, provided = static_interface(program)
    missing = (required | provided) - set(table)
    if missing:
        raise MissingContract(f"no contract for {sorted(missing)}")
    extra = set(table) - required - provided
    if extra:
        warnings.warn(f"contracts for {sorted(extra)} match no declared or called procedure",
                      UnusedContractWarning, stacklevel=3)


def verify_modular(program: Program, table: Mapping[str, HoareContract],
                   max_witnesses: int = MAX_WITNESSES) -> dict[str, ProcVerdict]:
    """Per declared procedure: is the contract-relative body meaning inside its contract?"""
    domain = program.require_domain()
    _require_table(program, table)
    rc = contract_environment(table, domain)
    out = {}
    for d in program.decls:
        diff = cr_denotation(d.body, rc) - rc[d.name]
        witnesses = [(domain.state(i), domain.state(j)) for i, j in diff.pairs()[:max_witnesses]]
        out[d.name] = ProcVerdict(d.name, not diff, len(diff), witnesses)
    return out


def soundness_check(program: Program, table: Mapping[str, HoareContract]) -> bool:
    """Standard (inlining) semantics of each declared procedure lies inside its contract."""
    domain = program.require_domain()
    if not program.is_closed:
        raise SemanticError("soundness check needs a closed program")
    _require_table(program, table)
    rho0 = standard_denotation(program)
    return all(rho0[p] <= hoare_denotation(table[p], domain) for p in program.names)


# ---------------------------------------------------------------- denotational contracts


@dataclass(frozen=True)
class DenotContract:
    interface: Interface
    assume: ProcEnv
    guarantee: ProcEnv

    def __post_init__(self):
        if self.assume.scope != self.interface.required:
            raise SemanticError(
                f"assumption covers {sorted(self.assume.scope)}, interface requires {sorted(self.interface.required)}")
        if self.guarantee.scope != self.interface.provided:
            raise SemanticError(
                f"guarantee covers {sorted(self.guarantee.scope)}, interface provides {sorted(self.interface.provided)}")
        if self.assume.domain != self.guarantee.domain:
            raise SemanticError("assume and guarantee over different domains")

    @property
    def domain(self) -> DomainConfig:
        return self.guarantee.domain

    @property
    def required(self) -> frozenset[str]:
        return self.interface.required

    @property
    def provided(self) -> frozenset[str]:
        return self.interface.provided

    @classmethod
    def make(cls, assume: ProcEnv, guarantee: ProcEnv) -> "DenotContract":
        return cls(Interface(assume.scope, guarantee.scope), assume, guarantee)

    def __repr__(self) -> str:
        return f"DenotContract(assume={self.assume!r}, guarantee={self.guarantee!r})"


def abstract_contracts(procs: Iterable[str], table: Mapping[str, HoareContract],
                       called: Iterable[str], domain: DomainConfig) -> DenotContract:
    """Hoare contracts of ``procs`` as one denotational contract whose
    assumptions are the contracts of the called-but-not-provided names."""
    procs = frozenset(procs)
    required = frozenset(called) - procs
    missing = (procs | required) - set(table)
    if missing:
        raise MissingContract(f"no contract for {sorted(missing)}")
    rc = contract_environment({p: table[p] for p in procs | required}, domain)
    return DenotContract(Interface(required, procs), rc.restrict(required), rc.restrict(procs))


def abstract_contract(p: str, table: Mapping[str, HoareContract], called: Iterable[str],
                      domain: DomainConfig) -> DenotContract:
    return abstract_contracts([p], table, called, domain)


def implements(m: Component, c: DenotContract) -> bool:
    if not (c.required <= m.required and m.provided <= c.provided):
        return False
    if m.domain != c.domain:
        return False
    padded = env_lub(c.assume, top_env(m.required - c.required, c.domain))
    return env_leq(m.apply(padded), c.guarantee)


def max_implementation(c: DenotContract) -> ConstantComponent:
    """The constant map to the guarantee."""
    return ConstantComponent(c.interface, c.guarantee, label="max_impl")


def _within(rho: ProcEnv, bound: ProcEnv) -> bool:
    return all(rho[p] <= bound[p] for p in bound)


def greatest_implementation(c: DenotContract) -> FunctionComponent:
    """Pointwise-largest monotone implementation of ``c``.

    Returns the guarantee while the input respects the assumption and the
    full relation on every provided name once it does not.  Every
    implementation's output lies below this one's on every input.
    """
    top = top_env(c.provided, c.domain)

    def apply(rho: ProcEnv) -> ProcEnv:
        return c.guarantee if _within(rho, c.assume) else top

    return FunctionComponent(c.interface, c.domain, apply, label="greatest_impl")


def threshold_implementation(c: DenotContract, output: ProcEnv, threshold: ProcEnv) -> FunctionComponent:
    """``output`` while the input stays within ``threshold``, full relation otherwise.

    Implements ``c`` whenever output <= guarantee and assume <= threshold.
    """
    top = top_env(c.provided, c.domain)

    def apply(rho: ProcEnv) -> ProcEnv:
        return output if _within(rho, threshold) else top

    return FunctionComponent(c.interface, c.domain, apply, label="threshold_impl")


def _guarantee_respected(m: Component, impl: Component, c: DenotContract, r_minus: ProcEnv) -> bool:
    out = CompositeComponent(m, impl).apply(r_minus)
    return env_leq(out.restrict(c.provided), c.guarantee)


def is_environment(m: Component, c: DenotContract, samples: int = 0,
                   rng: np.random.Generator | None = None) -> bool:
    """Does ``m`` keep every implementation of ``c`` within its guarantee?

    Decided by composing with ``greatest_implementation(c)`` at the top
    input environment: implementations are pointwise below it, and the
    composite is monotone in both its parts and its input, so this is the
    binding case.  ``samples`` > 0 additionally tries random implementations
    and random inputs as a refuter.
    """
    if m.domain != c.domain or not composable(m, max_implementation(c)):
        return False
    greatest = greatest_implementation(c)
    composite_required = (m.required | c.required) - (m.provided | c.provided)
    top = top_env(composite_required, c.domain)
    if not _guarantee_respected(m, greatest, c, top):
        return False
    if samples:
        from .sampling import random_env, random_implementation
        rng = rng or np.random.default_rng(0)
        for _ in range(samples):
            impl = random_implementation(c, rng)
            rho = random_env(composite_required, c.domain, rng)
            if not _guarantee_respected(m, impl, c, rho):
                return False
    return True


def refines(c1: DenotContract, c2: DenotContract) -> bool:
    """c1 refines c2: weaker assumptions and stronger guarantees."""
    return env_leq(c2.assume, c1.assume) and env_leq(c1.guarantee, c2.guarantee)


def conjoin(c1: DenotContract, c2: DenotContract) -> DenotContract:
    assume = env_lub(c1.assume, c2.assume)
    guarantee = env_glb(c1.guarantee, c2.guarantee)
    return DenotContract(Interface(assume.scope, guarantee.scope), assume, guarantee)


def contracts_composable(c1: DenotContract, c2: DenotContract) -> bool:
    if c1.domain != c2.domain:
        return False
    if c1.provided & c2.provided:
        return False
    if any(not c2.guarantee[p] <= c1.assume[p] for p in c1.required & c2.provided):
        return False
    return all(c1.guarantee[p] <= c2.assume[p] for p in c2.required & c1.provided)


def _meet_assumptions(envs: Iterable[ProcEnv], names: frozenset[str], domain: DomainConfig) -> ProcEnv:
    # per name, intersect the assumptions of the contracts that mention it
    out = {}
    for p in names:
        rels = [e[p] for e in envs if p in e]
        rel = rels[0]
        for r in rels[1:]:
            rel = rel & r
        out[p] = rel
    return ProcEnv(domain, out)


def compose_contracts(c1: DenotContract, c2: DenotContract) -> DenotContract:
    if not contracts_composable(c1, c2):
        raise NotComposable("contracts are not composable")
    provided = c1.provided | c2.provided
    required = (c1.required | c2.required) - provided
    assume = _meet_assumptions([c1.assume, c2.assume], required, c1.domain)
    return DenotContract(Interface(required, provided), assume, env_lub(c1.guarantee, c2.guarantee))


def compose_many(contracts: Iterable[DenotContract]) -> DenotContract:
    """n-ary composition; defined when every pair is composable."""
    cs = list(contracts)
    for a, b in itertools.combinations(cs, 2):
        if not contracts_composable(a, b):
            raise NotComposable("contracts are not pairwise composable")
    provided = frozenset().union(*(c.provided for c in cs))
    required = frozenset().union(*(c.required for c in cs)) - provided
    assume = _meet_assumptions([c.assume for c in cs], required, cs[0].domain)
    guarantee = cs[0].guarantee
    for c in cs[1:]:
        guarantee = env_lub(guarantee, c.guarantee)
    return DenotContract(Interface(required, provided), assume, guarantee)


def contracts_equal(c1: DenotContract, c2: DenotContract) -> bool:
    return c1.interface == c2.interface and c1.assume == c2.assume and c1.guarantee == c2.guarantee
