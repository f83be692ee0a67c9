"""Random case generation and executable checks of the contract meta-theory.

Every law is a conditional property.  A sample whose guard does not hold is
counted as skipped, so vacuous passes show up in the report.  Operators are
always reached through their module (``contracts.conjoin`` rather than a
bound name) so that a patched operator is exercised by every check.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from . import contracts as C
from .components import (
    BaseComponent, Component, CompositeComponent, ConstantComponent, FunctionComponent,
)
from .errors import ProcContractsError
from .lang import (
    Assign, BinOp, BoolConst, BoolOp, Call, Cmp, DomainConfig, If, Interface, Not, Num,
    ProcDecl, Program, Seq, Skip, Stmt, Var, While,
)
from .sampling import grow_env, random_env, random_relation, shrink_env
from .semantics import ProcEnv, env_glb, top_env

PASS, SKIP, FAIL = "pass", "skip", "fail"
NAME_POOL = ("a", "b", "c", "d")
VARIABLE_POOL = ("x", "y", "z")


@dataclass(frozen=True)
class CaseGenConfig:
    seed: int = 42
    samples: int = 200
    max_width: int = 5
    max_vars: int = 2
    max_procs: int = 3
    max_depth: int = 4
    call_prob: float = 0.3
    composable_bias: float = 0.7
    contract_width: int = 3
    candidates: int = 4
    env_samples: int = 20

    def __post_init__(self):
        for name in ("max_width", "max_vars", "max_procs", "contract_width", "candidates", "env_samples"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        if self.max_width < 2 or self.contract_width < 2:
            raise ValueError("domains need at least two values")
        if self.max_vars > len(VARIABLE_POOL):
            raise ValueError(f"at most {len(VARIABLE_POOL)} variables")
        if self.samples < 0 or self.max_depth < 0:
            raise ValueError("samples and max_depth must be non-negative")
        if not (0.0 <= self.call_prob <= 1.0 and 0.0 <= self.composable_bias <= 1.0):
            raise ValueError("probabilities must lie in [0, 1]")

    def rng(self) -> np.random.Generator:
        return np.random.default_rng(self.seed)


@dataclass(frozen=True)
class Verdict:
    status: str
    detail: str = ""

    @property
    def ok(self) -> bool:
        return self.status != FAIL


@dataclass
class LawResult:
    law: str
    samples: int = 0
    passed: int = 0
    skipped: int = 0
    failed: int = 0
    failing_seeds: list[int] = field(default_factory=list)

    def record(self, verdict: Verdict, seed: int) -> None:
        self.samples += 1
        if verdict.status == PASS:
            self.passed += 1
        elif verdict.status == SKIP:
            self.skipped += 1
        else:
            self.failed += 1
            self.failing_seeds.append(seed)

    @property
    def skip_rate(self) -> float:
        return self.skipped / self.samples if self.samples else 0.0

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class SuiteReport:
    laws: list[LawResult]

    @property
    def ok(self) -> bool:
        return all(r.failed == 0 for r in self.laws)

    def __getitem__(self, law: str) -> LawResult:
        for r in self.laws:
            if r.law == law:
                return r
        raise KeyError(law)

    def to_dict(self) -> dict:
        return {"ok": self.ok, "laws": [r.to_dict() for r in self.laws]}


def sample_seed(seed: int, law_index: int, i: int) -> int:
    """Seed of sample ``i`` of law number ``law_index``; reruns one sample alone."""
    return int(np.random.SeedSequence([seed, law_index, i]).generate_state(1)[0])


def run_laws(laws: Sequence[tuple[str, Callable[[np.random.Generator, CaseGenConfig], Verdict]]],
             cfg: CaseGenConfig, offset: int = 0) -> SuiteReport:
    results = []
    for k, (name, law) in enumerate(laws):
        res = LawResult(name)
        for i in range(cfg.samples):
            s = sample_seed(cfg.seed, offset + k, i)
            try:
                verdict = law(np.random.default_rng(s), cfg)
            except ProcContractsError as exc:
                verdict = Verdict(FAIL, f"{type(exc).__name__}: {exc}")
            res.record(verdict, s)
        results.append(res)
    return SuiteReport(results)


# ---------------------------------------------------------------- programs


def gen_domain(cfg: CaseGenConfig, rng: np.random.Generator, max_width: int | None = None) -> DomainConfig:
    width = int(rng.integers(2, (max_width or cfg.max_width) + 1))
    lo = int(rng.integers(-1, 1))
    k = int(rng.integers(1, cfg.max_vars + 1))
    return DomainConfig(lo, lo + width - 1, VARIABLE_POOL[:k])


def _literal(rng, domain: DomainConfig) -> Num:
    return Num(int(rng.integers(domain.lo, domain.hi + 1)))


def gen_aexp(rng, domain: DomainConfig, depth: int = 1):
    if depth <= 0 or rng.random() < 0.55:
        if rng.random() < 0.65:
            return Var(str(rng.choice(domain.variables)))
        return _literal(rng, domain)
    op = str(rng.choice(["+", "-", "*"], p=[0.45, 0.4, 0.15]))
    return BinOp(op, gen_aexp(rng, domain, depth - 1), gen_aexp(rng, domain, depth - 1))


def gen_bexp(rng, domain: DomainConfig, depth: int = 1):
    roll = rng.random()
    if depth <= 0 or roll < 0.6:
        op = str(rng.choice(["=", "<", "<=", ">", ">="]))
        return Cmp(op, gen_aexp(rng, domain, 1), gen_aexp(rng, domain, 0))
    if roll < 0.7:
        return Not(gen_bexp(rng, domain, depth - 1))
    if roll < 0.75:
        return BoolConst(bool(rng.random() < 0.5))
    op = str(rng.choice(["and", "or"]))
    return BoolOp(op, gen_bexp(rng, domain, depth - 1), gen_bexp(rng, domain, depth - 1))


def gen_stmt(rng, domain: DomainConfig, callees: Sequence[str], depth: int, call_prob: float) -> Stmt:
    if depth <= 0:
        return Skip()
    if rng.random() < 0.45:
        if callees and rng.random() < call_prob:
            return Call(str(rng.choice(list(callees))))
        if rng.random() < 0.2:
            return Skip()
        return Assign(str(rng.choice(domain.variables)), gen_aexp(rng, domain, 1))
    kind = rng.choice(["seq", "if", "while"], p=[0.5, 0.32, 0.18])
    sub = lambda: gen_stmt(rng, domain, callees, depth - 1, call_prob)  # noqa: E731
    if kind == "seq":
        return Seq(sub(), sub())
    if kind == "if":
        return If(gen_bexp(rng, domain), sub(), sub())
    return While(gen_bexp(rng, domain), sub())


def gen_decls(rng, domain: DomainConfig, names: Sequence[str], callees: Sequence[str],
              depth: int, call_prob: float, self_calls: bool = True) -> list[ProcDecl]:
    out = []
    for p in names:
        allowed = [q for q in callees if self_calls or q != p]
        out.append(ProcDecl(p, gen_stmt(rng, domain, allowed, depth, call_prob)))
    return out


def gen_program(cfg: CaseGenConfig, rng: np.random.Generator | None = None, *,
                external: Sequence[str] = (), self_calls: bool = True,
                domain: DomainConfig | None = None, min_procs: int = 1) -> Program:
    """A random program.  Calls target its own procedures and ``external``;
    the program is closed exactly when no external name gets called."""
    rng = rng if rng is not None else cfg.rng()
    domain = domain or gen_domain(cfg, rng)
    k = int(rng.integers(min(min_procs, cfg.max_procs), cfg.max_procs + 1))
    names = [f"p{i}" for i in range(k)]
    decls = gen_decls(rng, domain, names, names + list(external), cfg.max_depth, cfg.call_prob, self_calls)
    return Program(tuple(decls), domain)


# ---------------------------------------------------------------- contracts


def gen_interface(rng, pool: Sequence[str] = NAME_POOL, forbid_provided: Iterable[str] = ()) -> Interface:
    forbid = set(forbid_provided)
    required, provided = set(), set()
    for p in pool:
        roll = rng.random()
        if roll < 0.35 and p not in forbid:
            provided.add(p)
        elif roll < 0.7:
            required.add(p)
    if not provided:
        choices = [p for p in pool if p not in forbid]
        if choices:
            p = str(rng.choice(choices))
            provided.add(p)
            required.discard(p)
    return Interface(frozenset(required), frozenset(provided))


def gen_contract(cfg: CaseGenConfig, iface: Interface, rng: np.random.Generator | None = None,
                 domain: DomainConfig | None = None, vacuous: bool = False) -> C.DenotContract:
    """Random assumption and guarantee over ``iface``; ``vacuous`` makes the guarantee full."""
    rng = rng if rng is not None else cfg.rng()
    domain = domain or gen_domain(cfg, rng, cfg.contract_width)
    assume = random_env(iface.required, domain, rng)
    guarantee = top_env(iface.provided, domain) if vacuous else random_env(iface.provided, domain, rng)
    return C.DenotContract(iface, assume, guarantee)


def _with_assume(c: C.DenotContract, assume: ProcEnv) -> C.DenotContract:
    return C.DenotContract(c.interface, assume, c.guarantee)


def make_composable(c1: C.DenotContract, c2: C.DenotContract) -> tuple[C.DenotContract, C.DenotContract]:
    """Widen each assumption by the partner's guarantee where they meet."""
    a1 = c1.assume.updated({p: c1.assume[p] | c2.guarantee[p] for p in c1.required & c2.provided})
    a2 = c2.assume.updated({p: c2.assume[p] | c1.guarantee[p] for p in c2.required & c1.provided})
    return _with_assume(c1, a1), _with_assume(c2, a2)


def gen_contract_family(cfg: CaseGenConfig, rng: np.random.Generator, k: int,
                        domain: DomainConfig | None = None) -> list[C.DenotContract]:
    """``k`` contracts with pairwise disjoint provided names; with probability
    ``composable_bias`` every pair is made composable."""
    domain = domain or gen_domain(cfg, rng, cfg.contract_width)
    taken: set[str] = set()
    out = []
    for _ in range(k):
        iface = gen_interface(rng, forbid_provided=taken)
        taken |= iface.provided
        out.append(gen_contract(cfg, iface, rng, domain))
    if rng.random() < cfg.composable_bias:
        for i in range(k):
            for j in range(i + 1, k):
                out[i], out[j] = make_composable(out[i], out[j])
    return out


def perturb_refining(c: C.DenotContract, rng: np.random.Generator) -> C.DenotContract:
    """A random refinement of ``c``: larger assumption, smaller guarantee."""
    return C.DenotContract(c.interface, grow_env(c.assume, rng), shrink_env(c.guarantee, rng))


# ---------------------------------------------------------------- components


def _within(rho: ProcEnv, bound: ProcEnv) -> bool:
    return all(rho[p] <= bound[p] for p in bound)


def program_implementation(c: C.DenotContract, rng: np.random.Generator, cfg: CaseGenConfig) -> FunctionComponent:
    """A program-derived implementation: the base component of random
    declarations for the provided names, cut down to the guarantee."""
    names = sorted(c.provided)
    decls = gen_decls(rng, c.domain, names, names + sorted(c.required),
                      min(cfg.max_depth, 3), cfg.call_prob)
    base = BaseComponent(decls, c.domain, callers=c.required)
    top = top_env(c.provided, c.domain)

    def apply(rho: ProcEnv) -> ProcEnv:
        return env_glb(base.apply(rho), c.guarantee) if _within(rho, c.assume) else top

    return FunctionComponent(c.interface, c.domain, apply, label="program_impl")


def implementation_candidates(c: C.DenotContract, rng: np.random.Generator,
                              cfg: CaseGenConfig) -> list[Component]:
    """Components implementing ``c`` by construction."""
    out: list[Component] = [C.max_implementation(c), C.greatest_implementation(c)]
    for _ in range(cfg.candidates):
        if rng.random() < 0.5:
            out.append(program_implementation(c, rng, cfg))
        else:
            out.append(C.threshold_implementation(c, shrink_env(c.guarantee, rng), grow_env(c.assume, rng)))
    return out


def environment_candidates(c: C.DenotContract, rng: np.random.Generator,
                           cfg: CaseGenConfig) -> list[Component]:
    """Components composable with implementations of ``c`` that feed its
    required names; some are environments of ``c`` and some are not."""
    iface = Interface(frozenset(), c.required)
    domain = c.domain
    out: list[Component] = [ConstantComponent(iface, shrink_env(c.assume, rng), "env_const")]
    reads = c.provided
    react_iface = Interface(reads, c.required)
    for _ in range(cfg.candidates):
        roll = rng.random()
        if roll < 0.3:
            out.append(ConstantComponent(iface, random_env(c.required, domain, rng), "env_const"))
        elif roll < 0.65:
            good = shrink_env(c.assume, rng)
            threshold = grow_env(c.guarantee, rng) if rng.random() < 0.7 else shrink_env(c.guarantee, rng)
            bad = good | random_env(c.required, domain, rng)

            def react(rho, good=good, threshold=threshold, bad=bad):
                return good if _within(rho, threshold) else bad

            out.append(FunctionComponent(react_iface, domain, react, label="env_react"))
        else:
            names = sorted(c.required)
            decls = gen_decls(rng, domain, names, names + sorted(reads), 2, cfg.call_prob)
            base = BaseComponent(decls, domain, callers=reads)
            cap = grow_env(c.assume, rng)

            def derived(rho, base=base, cap=cap):
                return env_glb(base.apply(rho), cap)

            out.append(FunctionComponent(react_iface, domain, derived, label="env_program"))
    return out


@dataclass(frozen=True)
class InducedContract:
    """A denotational contract seen as its environment and implementation predicates."""
    base: C.DenotContract

    def environments(self, m: Component) -> bool:
        return C.is_environment(m, self.base)

    def implementations(self, m: Component) -> bool:
        return C.implements(m, self.base)


# ---------------------------------------------------------------- law checks


def check_consistency(c: C.DenotContract) -> Verdict:
    if not C.implements(C.max_implementation(c), c):
        return Verdict(FAIL, "max implementation does not implement its contract")
    return Verdict(PASS)


def check_meta_refinement(c1: C.DenotContract, c2: C.DenotContract,
                          impls: Iterable[Component], envs: Iterable[Component]) -> Verdict:
    """If c1 refines c2: implementations of c1 implement c2 and environments
    of c2 are environments of c1."""
    if not C.refines(c1, c2):
        return Verdict(SKIP, "c1 does not refine c2")
    i1, i2 = InducedContract(c1), InducedContract(c2)
    for m in impls:
        if not i1.implementations(m):
            return Verdict(FAIL, f"constructed {m!r} does not implement c1")
        if not i2.implementations(m):
            return Verdict(FAIL, f"{m!r} implements c1 but not c2")
    for e in envs:
        if i2.environments(e) and not i1.environments(e):
            return Verdict(FAIL, f"{e!r} is an environment of c2 but not of c1")
    return Verdict(PASS)


def check_shared_refinement(c1: C.DenotContract, c2: C.DenotContract, impls: Iterable[Component],
                            envs: Iterable[Component], refiners: Iterable[C.DenotContract]) -> Verdict:
    """Implementations of the conjunction are shared implementations, shared
    environments are environments of the conjunction, and whatever refines
    the conjunction refines both parts."""
    if c1.interface != c2.interface:
        return Verdict(SKIP, "different interfaces")
    both = C.conjoin(c1, c2)
    for m in impls:
        if C.implements(m, both) and not (C.implements(m, c1) and C.implements(m, c2)):
            return Verdict(FAIL, f"{m!r} implements the conjunction but not both parts")
    for e in envs:
        if C.is_environment(e, c1) and C.is_environment(e, c2) and not C.is_environment(e, both):
            return Verdict(FAIL, f"{e!r} is a shared environment but not one of the conjunction")
    for c in refiners:
        if C.refines(c, both) and not (C.refines(c, c1) and C.refines(c, c2)):
            return Verdict(FAIL, "a refinement of the conjunction misses a part")
    return Verdict(PASS)


def check_composition(c1: C.DenotContract, c2: C.DenotContract, impls1: Sequence[Component],
                      impls2: Sequence[Component], envs: Iterable[Component]) -> Verdict:
    """Composed implementations implement the composition, and an environment
    of the composition completed by one implementation is an environment of
    the other contract."""
    if not C.contracts_composable(c1, c2):
        return Verdict(SKIP, "not composable")
    c12 = C.compose_contracts(c1, c2)
    for m1, m2 in zip(impls1, impls2):
        if not C.implements(m1, c1) or not C.implements(m2, c2):
            return Verdict(FAIL, "constructed implementation does not implement its contract")
        if not C.implements(CompositeComponent(m1, m2), c12):
            return Verdict(FAIL, f"{m1!r} x {m2!r} does not implement the composition")
    envs = list(envs)
    m1, m2 = impls1[0], impls2[0]
    for m in envs:
        if not C.is_environment(m, c12):
            continue
        if not C.is_environment(CompositeComponent(m1, m), c2):
            return Verdict(FAIL, f"{m1!r} x {m!r} is not an environment of c2")
        if not C.is_environment(CompositeComponent(m, m2), c1):
            return Verdict(FAIL, f"{m!r} x {m2!r} is not an environment of c1")
    return Verdict(PASS)


def check_composition_laws(c1: C.DenotContract, c2: C.DenotContract, c3: C.DenotContract) -> Verdict:
    """Commutativity exactly; sub-associativity as a refinement."""
    if not C.contracts_composable(c1, c2):
        return Verdict(SKIP, "c1, c2 not composable")
    if not C.contracts_equal(C.compose_contracts(c1, c2), C.compose_contracts(c2, c1)):
        return Verdict(FAIL, "composition is not commutative")
    if not (C.contracts_composable(c1, c3) and C.contracts_composable(c2, c3)):
        return Verdict(SKIP, "triple not pairwise composable")
    c12 = C.compose_contracts(c1, c2)
    if not C.contracts_composable(c12, c3):
        return Verdict(FAIL, "pairwise composable triple whose partial composition does not compose")
    if not C.refines(C.compose_many([c1, c2, c3]), C.compose_contracts(c12, c3)):
        return Verdict(FAIL, "sub-associativity violated")
    return Verdict(PASS)


def check_sub_distributivity(c11: C.DenotContract, c21: C.DenotContract,
                             c12: C.DenotContract, c22: C.DenotContract) -> Verdict:
    """(c11 and c21) composed with (c12 and c22) refines (c11 x c12) and (c21 x c22)."""
    if not (C.contracts_composable(c11, c12) and C.contracts_composable(c21, c22)):
        return Verdict(SKIP, "a column pair is not composable")
    left1, left2 = C.conjoin(c11, c21), C.conjoin(c12, c22)
    if not C.contracts_composable(left1, left2):
        return Verdict(SKIP, "conjunctions not composable")
    left = C.compose_contracts(left1, left2)
    right = C.conjoin(C.compose_contracts(c11, c12), C.compose_contracts(c21, c22))
    if not C.refines(left, right):
        return Verdict(FAIL, "sub-distributivity violated")
    return Verdict(PASS)


# ---------------------------------------------------------------- sampled laws


def _contract_domain(cfg, rng) -> DomainConfig:
    return gen_domain(cfg, rng, cfg.contract_width)


def _law_consistency(rng, cfg) -> Verdict:
    domain = _contract_domain(cfg, rng)
    return check_consistency(gen_contract(cfg, gen_interface(rng), rng, domain))


def _law_refinement(rng, cfg) -> Verdict:
    domain = _contract_domain(cfg, rng)
    iface = gen_interface(rng)
    c2 = gen_contract(cfg, iface, rng, domain)
    if c2.guarantee == top_env(iface.provided, domain):
        # full guarantee: every component is an environment of c2, see the
        # corner case test; resample the guarantee
        sparse = {p: random_relation(domain, rng, "sparse") for p in iface.provided}
        c2 = C.DenotContract(iface, c2.assume, ProcEnv(domain, sparse))
    if rng.random() < 0.8:
        c1 = perturb_refining(c2, rng)
    else:
        c1 = gen_contract(cfg, iface, rng, domain)
    return check_meta_refinement(c1, c2, implementation_candidates(c1, rng, cfg),
                                 environment_candidates(c2, rng, cfg))


def _law_shared_refinement(rng, cfg) -> Verdict:
    domain = _contract_domain(cfg, rng)
    iface = gen_interface(rng)
    c1 = gen_contract(cfg, iface, rng, domain)
    c2 = perturb_refining(c1, rng) if rng.random() < 0.3 else gen_contract(cfg, iface, rng, domain)
    both = C.DenotContract(iface, c1.assume | c2.assume, c1.guarantee & c2.guarantee)
    impls = implementation_candidates(both, rng, cfg) + implementation_candidates(c1, rng, cfg)
    envs = environment_candidates(c1, rng, cfg) + environment_candidates(c2, rng, cfg)
    refiners = [perturb_refining(both, rng) for _ in range(cfg.candidates)]
    return check_shared_refinement(c1, c2, impls, envs, refiners)


def _law_composition(rng, cfg) -> Verdict:
    c1, c2 = gen_contract_family(cfg, rng, 2)
    impls1 = implementation_candidates(c1, rng, cfg)
    impls2 = implementation_candidates(c2, rng, cfg)
    rng.shuffle(impls1)
    rng.shuffle(impls2)
    envs = []
    if C.contracts_composable(c1, c2):
        envs = environment_candidates(C.compose_contracts(c1, c2), rng, cfg)
    return check_composition(c1, c2, impls1, impls2, envs)


def _law_composition_algebra(rng, cfg) -> Verdict:
    return check_composition_laws(*gen_contract_family(cfg, rng, 3))


def _law_sub_distributivity(rng, cfg) -> Verdict:
    domain = _contract_domain(cfg, rng)
    i1 = gen_interface(rng)
    i2 = gen_interface(rng, forbid_provided=i1.provided)
    c11, c21 = gen_contract(cfg, i1, rng, domain), gen_contract(cfg, i1, rng, domain)
    c12, c22 = gen_contract(cfg, i2, rng, domain), gen_contract(cfg, i2, rng, domain)
    if rng.random() < cfg.composable_bias:
        c11, c12 = make_composable(c11, c12)
        c21, c22 = make_composable(c21, c22)
    return check_sub_distributivity(c11, c21, c12, c22)


META_LAWS = (
    ("consistency", _law_consistency),
    ("refinement", _law_refinement),
    ("shared_refinement", _law_shared_refinement),
    ("composition", _law_composition),
    ("composition_algebra", _law_composition_algebra),
    ("sub_distributivity", _law_sub_distributivity),
)


def run_meta_suite(cfg: CaseGenConfig) -> SuiteReport:
    """All meta-theory laws over ``cfg.samples`` seeded samples each."""
    return run_laws(META_LAWS, cfg)
