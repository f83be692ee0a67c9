"""Seeded property suites for the environment lattice, the fixed-point
semantics, the operational oracle and contract abstraction."""

from __future__ import annotations

import numpy as np

from . import contracts as C
from . import semantics as S
from .components import BaseComponent, CompositeComponent, extensionally_equal
from .lang import (
    Assertion, BoolConst, BoolOp, Cmp, HoareContract, If, LogicalVar, Program, Seq, Skip,
    Var, While, called_names, calls, parse_program, pretty_program, static_interface,
)
from .metacheck import (
    FAIL, NAME_POOL, PASS, SKIP, CaseGenConfig, SuiteReport, Verdict, gen_bexp, gen_decls,
    gen_domain, gen_program, gen_stmt, run_laws,
)
from .oracle import oracle_denotation
from .sampling import comparable_pair, random_env

EXTERNAL = ("e0", "e1")


def _scope(rng, pool=NAME_POOL) -> list[str]:
    return [p for p in pool if rng.random() < 0.5]


def _law_lattice(rng, cfg) -> Verdict:
    domain = gen_domain(cfg, rng, 3)
    r1, r2, r3 = (random_env(_scope(rng), domain, rng) for _ in range(3))
    lub, glb = S.env_lub, S.env_glb
    checks = {
        "lub commutes": lub(r1, r2) == lub(r2, r1),
        "glb commutes": glb(r1, r2) == glb(r2, r1),
        "lub associates": lub(lub(r1, r2), r3) == lub(r1, lub(r2, r3)),
        "glb associates": glb(glb(r1, r2), r3) == glb(r1, glb(r2, r3)),
        "lub idempotent": lub(r1, r1) == r1,
        "glb idempotent": glb(r1, r1) == r1,
        "absorption": lub(r1, glb(r1, r2)) == r1 and glb(r1, lub(r1, r2)) == r1,
        "lub is an upper bound": S.env_leq(r1, lub(r1, r2)) and S.env_leq(r2, lub(r1, r2)),
        "glb is a lower bound": S.env_leq(glb(r1, r2), r1) and S.env_leq(glb(r1, r2), r2),
    }
    scope = r1.scope
    low, high = comparable_pair(scope, domain, rng)
    top = S.top_env(scope, domain)
    checks["order agrees with lub"] = lub(low, high) == high and glb(low, high) == low
    checks["top is greatest"] = S.env_leq(r1, top) and lub(r1, top) == top
    checks["bottom is least"] = S.env_leq(S.bottom_env(scope, domain), r1)
    checks["top over a larger scope"] = S.env_leq(r1, S.top_env(scope | {"zz"}, domain))
    bad = [k for k, ok in checks.items() if not ok]
    return Verdict(FAIL, ", ".join(bad)) if bad else Verdict(PASS)


def _open_program(rng, cfg) -> tuple[Program, S.ProcEnv]:
    program = gen_program(cfg, rng, external=EXTERNAL)
    required, _ = static_interface(program)
    return program, random_env(required, program.domain, rng)


def _law_fixed_point(rng, cfg) -> Verdict:
    program, rm = _open_program(rng, cfg)
    xi = lambda rp: S.xi_step(program.decls, rm, rp)  # noqa: E731
    rho0 = S.standard_denotation(program, rm)
    if xi(rho0) != rho0:
        return Verdict(FAIL, "least solution is not a fixed point")
    # prefixed points: the descending chain from the top, and random joins
    x = S.top_env(program.names, program.domain)
    prefixed = [x]
    for _ in range(3):
        x = xi(x)
        prefixed.append(x)
    for _ in range(3):
        y = S.env_lub(rho0, random_env(program.names, program.domain, rng))
        if S.env_leq(xi(y), y):
            prefixed.append(y)
    for y in prefixed:
        if not S.env_leq(xi(y), y):
            return Verdict(FAIL, "descending chain left the prefixed points")
        if not S.env_leq(rho0, y):
            return Verdict(FAIL, "least fixed point is above a prefixed point")
    return Verdict(PASS)


def _law_monotone(rng, cfg) -> Verdict:
    domain = gen_domain(cfg, rng)
    names = ["p0", "p1", "e0"]
    stmt = gen_stmt(rng, domain, names, cfg.max_depth, max(cfg.call_prob, 0.3))
    called = sorted(calls(stmt))
    minus = [p for p in called if p.startswith("e")]
    plus = [p for p in called if not p.startswith("e")]
    m1, m2 = comparable_pair(minus, domain, rng)
    p1, p2 = comparable_pair(plus, domain, rng)
    if not S.denote_stmt(stmt, m1, p1) <= S.denote_stmt(stmt, m2, p2):
        return Verdict(FAIL, "statement meaning is not monotone")
    return Verdict(PASS)


def _law_while_unrolling(rng, cfg) -> Verdict:
    domain = gen_domain(cfg, rng)
    loop = While(gen_bexp(rng, domain), gen_stmt(rng, domain, ["e0"], max(cfg.max_depth - 1, 0), cfg.call_prob))
    unrolled = If(loop.cond, Seq(loop.body, loop), Skip())
    rm = random_env(sorted(calls(loop)), domain, rng)
    empty = S.ProcEnv(domain)
    if S.denote_stmt(loop, rm, empty) != S.denote_stmt(unrolled, rm, empty):
        return Verdict(FAIL, "loop differs from its unrolling")
    return Verdict(PASS)


def _law_oracle(rng, cfg) -> Verdict:
    program = gen_program(cfg, rng)
    rho0 = S.standard_denotation(program)
    for p in program.names:
        if rho0[p] != oracle_denotation(program, p):
            return Verdict(FAIL, f"denotation and execution disagree on {p}")
    return Verdict(PASS)


def _law_roundtrip(rng, cfg) -> Verdict:
    program = gen_program(cfg, rng, external=EXTERNAL)
    again = parse_program(pretty_program(program))
    return Verdict(PASS) if again == program else Verdict(FAIL, "printing and parsing changed the program")


def _base(decls, domain) -> BaseComponent:
    return BaseComponent(decls, domain, called_names(decls))


def _law_bekic(rng, cfg) -> Verdict:
    """base(D1) x base(D2) equals base(D1 + D2)."""
    program = gen_program(cfg, rng, external=EXTERNAL[:1] if rng.random() < 0.5 else (), min_procs=2)
    decls = list(program.decls)
    if len(decls) < 2:
        return Verdict(SKIP, "single procedure")
    domain = program.domain
    mask = rng.permutation([True] + [False] + [bool(rng.random() < 0.5) for _ in decls[2:]])
    d1 = [d for d, m in zip(decls, mask) if m]
    d2 = [d for d, m in zip(decls, mask) if not m]
    whole = _base(decls, domain)
    split = CompositeComponent(_base(d1, domain), _base(d2, domain))
    if split.interface != whole.interface:
        return Verdict(FAIL, "interfaces differ")
    req = sorted(whole.required)
    if req:
        envs = [S.bottom_env(req, domain), S.top_env(req, domain)]
        envs += [random_env(req, domain, rng) for _ in range(max(cfg.env_samples - 2, 0))]
    else:
        envs = [S.ProcEnv(domain)]
    if not extensionally_equal(split, whole, envs):
        return Verdict(FAIL, "composed components differ from the whole")
    return Verdict(PASS)


def gen_hoare_contract(rng, domain) -> HoareContract:
    """Random pre/post pair, often relating the post-state to a logical snapshot."""
    if rng.random() < 0.5:
        v = str(rng.choice(domain.variables))
        snap = Cmp("=", Var(v), LogicalVar("l0"))
        pre = snap if rng.random() < 0.5 else BoolOp("and", snap, gen_bexp(rng, domain, 0))
        op = str(rng.choice(["=", "<=", ">=", "<", ">"]))
        post = Cmp(op, Var(str(rng.choice(domain.variables))), LogicalVar("l0"))
        if rng.random() < 0.3:
            post = BoolOp("or", post, gen_bexp(rng, domain, 0))
        return HoareContract(Assertion(pre, {"l0"}), Assertion(post, {"l0"}))
    pre = gen_bexp(rng, domain, 1) if rng.random() < 0.7 else BoolConst(True)
    post = gen_bexp(rng, domain, 1) if rng.random() < 0.8 else BoolConst(True)
    return HoareContract(Assertion(pre), Assertion(post))


def _law_abstraction(rng, cfg) -> Verdict:
    """verify_modular accepts p iff base({p}) implements p's abstract contract.

    Restricted to procedures that do not call themselves: a self-calling
    procedure whose body only diverges implements any abstract contract.
    """
    domain = gen_domain(cfg, rng)
    names = [f"p{i}" for i in range(int(rng.integers(1, cfg.max_procs + 1)))]
    decls = gen_decls(rng, domain, names, names + ["e0"], cfg.max_depth,
                      max(cfg.call_prob, 0.3), self_calls=False)
    program = Program(tuple(decls), domain)
    required, provided = static_interface(program)
    table = {p: gen_hoare_contract(rng, domain) for p in sorted(required | provided)}
    d = decls[int(rng.integers(len(decls)))]
    verified = C.verify_modular(program, table)[d.name].verified
    base = BaseComponent([d], domain, calls(d.body))
    abstract = C.abstract_contract(d.name, table, calls(d.body), domain)
    if verified != C.implements(base, abstract):
        return Verdict(FAIL, f"verification of {d.name} and implementation disagree")
    return Verdict(PASS)


def derived_contracts(m1, m2, rng) -> tuple[C.DenotContract, C.DenotContract]:
    """Contracts met exactly by m1 and m2 and composable with each other.

    Starting from random assumptions, each assumption is widened by the
    partner's output until nothing changes; the guarantees are the outputs.
    """
    domain = m1.domain
    a1 = random_env(m1.required, domain, rng)
    a2 = random_env(m2.required, domain, rng)
    while True:
        g1, g2 = m1.apply(a1), m2.apply(a2)
        n1 = a1.updated({p: a1[p] | g2[p] for p in m1.required & m2.provided})
        n2 = a2.updated({p: a2[p] | g1[p] for p in m2.required & m1.provided})
        if n1 == a1 and n2 == a2:
            return C.DenotContract.make(a1, g1), C.DenotContract.make(a2, g2)
        a1, a2 = n1, n2


def _law_composition_programs(rng, cfg) -> Verdict:
    """Program components with derived contracts: m1 x m2 implements c1 (x) c2."""
    domain = gen_domain(cfg, rng, 4)
    k = int(rng.integers(2, max(cfg.max_procs, 2) + 2))
    names = [f"p{i}" for i in range(k)]
    cut = int(rng.integers(1, k))
    callees = names + ["e0"]
    decls = gen_decls(rng, domain, names, callees, min(cfg.max_depth, 3), max(cfg.call_prob, 0.4))
    m1 = _base(decls[:cut], domain)
    m2 = _base(decls[cut:], domain)
    c1, c2 = derived_contracts(m1, m2, rng)
    if not C.contracts_composable(c1, c2):
        return Verdict(SKIP, "derived contracts not composable")
    if not (C.implements(m1, c1) and C.implements(m2, c2)):
        return Verdict(FAIL, "derived contract not met by its component")
    if not C.implements(CompositeComponent(m1, m2), C.compose_contracts(c1, c2)):
        return Verdict(FAIL, "composed programs do not implement the composed contract")
    return Verdict(PASS)


SEMANTIC_LAWS = (
    ("lattice", _law_lattice),
    ("fixed_point", _law_fixed_point),
    ("monotone", _law_monotone),
    ("while_unrolling", _law_while_unrolling),
    ("roundtrip", _law_roundtrip),
    ("oracle", _law_oracle),
    ("bekic", _law_bekic),
    ("abstraction", _law_abstraction),
    ("composition_programs", _law_composition_programs),
)


def run_semantic_suite(cfg: CaseGenConfig, laws=None) -> SuiteReport:
    """Semantic laws over ``cfg.samples`` seeded samples each; ``laws``
    selects a subset by name."""
    chosen = [(n, f) for n, f in SEMANTIC_LAWS if laws is None or n in laws]
    offset = 100
    report = SuiteReport([])
    for n, f in chosen:
        k = [name for name, _ in SEMANTIC_LAWS].index(n)
        report.laws.extend(run_laws([(n, f)], cfg, offset + k).laws)
    return report


def run_all(cfg: CaseGenConfig) -> SuiteReport:
    from .metacheck import run_meta_suite
    return SuiteReport(run_meta_suite(cfg).laws + run_semantic_suite(cfg).laws)
