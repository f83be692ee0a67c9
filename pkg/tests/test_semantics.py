from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, strategies as st

from procontracts import semantics as S
from procontracts.errors import FixpointDivergence, SemanticError
from procontracts.lang import (
    DomainConfig, If, Seq, Skip, While, calls, parse_aexp, parse_bexp, parse_program, parse_stmt,
)
from procontracts.metacheck import CaseGenConfig, gen_aexp, gen_bexp, gen_program, gen_stmt
from procontracts.relation import Denotation
from procontracts.sampling import comparable_pair, random_env, random_relation

D1 = DomainConfig(0, 1, ("x",))
NR = DomainConfig(0, 7, ("n", "r"))


def _env(domain, **rels):
    return S.ProcEnv(domain, rels)


def parity_golden(domain, even_entry: bool) -> Denotation:
    # s(n) even: s' = {n:0, r:1} for even, r:0 for odd; s(n) odd: swapped
    def pred(s, t):
        r = 1 if (s["n"] % 2 == 0) == even_entry else 0
        return t == {"n": 0, "r": r}
    return Denotation.from_predicate(domain, pred)


# ---------------------------------------------------------------- lattice


def test_env_leq_examples():
    r = _env(D1, p=Denotation.from_pairs(D1, [(0, 1)]))
    assert S.env_leq(r, r)
    assert S.env_leq(S.ProcEnv(D1), r)
    assert not S.env_leq(r, _env(D1, p=Denotation.empty(D1)))


def test_env_lub_glb_examples():
    p = _env(D1, p=Denotation.identity(D1))
    q = _env(D1, q=Denotation.full(D1))
    assert S.env_lub(p, p) == p and S.env_glb(p, p) == p
    assert S.env_lub(p, q) == _env(D1, p=Denotation.identity(D1), q=Denotation.full(D1))
    assert S.env_glb(p, q).scope == frozenset()
    top = S.top_env({"p", "q"}, D1)
    assert S.env_lub(p, top) == top
    assert S.env_glb(p, S.top_env({"p"}, D1)) == p


def test_top_env():
    assert S.top_env(set(), D1).scope == frozenset()
    assert len(S.top_env({"p"}, D1)["p"]) == 4


@given(st.integers(0, 2**32 - 1))
def test_any_env_below_top(seed):
    rng = np.random.default_rng(seed)
    r = random_env(["a", "b"], D1, rng)
    assert S.env_leq(r, S.top_env(["a", "b"], D1))
    assert S.env_leq(S.bottom_env(["a", "b"], D1), r)


# ---------------------------------------------------------------- expressions


def test_eval_aexp_examples():
    assert S.eval_aexp(parse_aexp("n - 1"), {"n": 3, "r": 0}, {}, NR) == 2
    assert S.eval_aexp(parse_aexp("n - 1"), {"n": 0, "r": 0}, {}, NR) is S.OUT_OF_DOMAIN
    assert S.eval_aexp(parse_aexp("n0", {"n0"}), {"n": 0, "r": 0}, {"n0": 5}, NR) == 5


def test_eval_bexp_examples():
    assert S.eval_bexp(parse_bexp("n = 0"), {"n": 0, "r": 0}, {}, NR)
    assert S.eval_bexp(parse_bexp("n0 mod 2 = 1", {"n0"}), {"n": 0, "r": 0}, {"n0": 3}, NR)
    assert not S.eval_bexp(parse_bexp("(n - 1) >= 0"), {"n": 0, "r": 0}, {}, NR)
    assert not S.eval_bexp(parse_bexp("9 = 9"), {"n": 0, "r": 0}, {}, NR)


def test_floor_mod_on_negative_domain():
    d = DomainConfig(-3, 3, ("x",))
    assert S.eval_aexp(parse_aexp("x mod 2"), {"x": -3}, {}, d) == 1


@given(st.integers(0, 2**32 - 1))
def test_vectorized_matches_scalar(seed):
    rng = np.random.default_rng(seed)
    d = DomainConfig(-1, 2, ("x", "y"))
    a, b = gen_aexp(rng, d, 2), gen_bexp(rng, d, 2)
    vals, ok = S.vec_aexp(a, d, {})
    truth = S.vec_bexp(b, d, {})
    for i in range(d.num_states):
        s = d.state(i)
        v = S.eval_aexp(a, s, {}, d)
        assert (v is S.OUT_OF_DOMAIN) == (not ok[i])
        if ok[i]:
            assert v == vals[i]
        assert S.eval_bexp(b, s, {}, d) == truth[i]


# ---------------------------------------------------------------- statements


def test_skip_is_identity():
    assert S.denote_stmt(parse_stmt("skip"), S.ProcEnv(NR), S.ProcEnv(NR)) == Denotation.identity(NR)


def test_while_true_skip_is_empty():
    assert not S.denote_stmt(parse_stmt("while true do skip"), S.ProcEnv(NR), S.ProcEnv(NR))


def test_countdown_loop():
    d = DomainConfig(0, 3, ("n",))
    rel = S.denote_stmt(parse_stmt("while n > 0 do n := n - 1"), S.ProcEnv(d), S.ProcEnv(d))
    assert rel.pairs() == [(k, 0) for k in range(4)]


def test_assignment_leaving_domain_has_no_successor():
    d = DomainConfig(0, 3, ("n",))
    rel = S.denote_stmt(parse_stmt("n := n + 1"), S.ProcEnv(d), S.ProcEnv(d))
    assert rel.pairs() == [(0, 1), (1, 2), (2, 3)]


def test_xi_at_bottom(even_odd):
    out = S.xi_step(even_odd.decls, S.ProcEnv(NR), S.bottom_env(["even", "odd"], NR))
    zero = lambda s: s["n"] == 0  # noqa: E731
    assert out["even"] == Denotation.from_predicate(NR, lambda s, t: zero(s) and t == {**s, "r": 1})
    assert out["odd"] == Denotation.from_predicate(NR, lambda s, t: zero(s) and t == {**s, "r": 0})


def test_xi_constant_without_calls():
    decls = parse_program("proc p is skip").decls
    for rp in (S.bottom_env(["p"], D1), S.top_env(["p"], D1)):
        assert S.xi_step(decls, S.ProcEnv(D1), rp)["p"] == Denotation.identity(D1)


def test_lfp_examples():
    rho0 = S.top_env(["p"], D1)
    assert S.lfp(lambda r: rho0, ["p"], D1) == rho0
    assert S.lfp(lambda r: r, ["p"], D1) == S.bottom_env(["p"], D1)


def test_lfp_rejects_non_monotone():
    flip = lambda r: S.ProcEnv(D1, {"p": r["p"].complement()})  # noqa: E731
    with pytest.raises(FixpointDivergence):
        S.lfp(flip, ["p"], D1)


def test_standard_denotation_even_odd(even_odd):
    rho0 = S.standard_denotation(even_odd)
    assert rho0["even"] == parity_golden(NR, True)
    assert rho0["odd"] == parity_golden(NR, False)
    assert len(rho0["even"]) == 64


def test_pure_recursion_diverges():
    d = DomainConfig(0, 2, ("x",))
    prog = parse_program("proc p is call p", d)
    assert not S.standard_denotation(prog)["p"]


def test_open_program_needs_environment():
    prog = parse_program("proc p is call q", D1)
    with pytest.raises(SemanticError):
        S.standard_denotation(prog)
    rm = S.ProcEnv(D1, {"q": Denotation.full(D1)})
    assert S.standard_denotation(prog, rm)["p"].is_full()


@given(st.integers(0, 2**32 - 1))
def test_denote_monotone(seed):
    rng = np.random.default_rng(seed)
    d = DomainConfig(0, 2, ("x", "y"))
    stmt = gen_stmt(rng, d, ["a", "b"], 3, 0.4)
    m1, m2 = comparable_pair(["a"], d, rng)
    p1, p2 = comparable_pair(["b"], d, rng)
    assert S.denote_stmt(stmt, m1, p1) <= S.denote_stmt(stmt, m2, p2)


@given(st.integers(0, 2**32 - 1))
def test_while_unrolling(seed):
    rng = np.random.default_rng(seed)
    d = DomainConfig(0, 3, ("x",))
    body = gen_stmt(rng, d, [], 2, 0.0)
    loop = While(parse_bexp("x < 3"), body)
    unrolled = If(loop.cond, Seq(body, loop), Skip())
    e = S.ProcEnv(d)
    assert S.denote_stmt(loop, e, e) == S.denote_stmt(unrolled, e, e)


@given(st.integers(0, 2**32 - 1))
def test_least_solution_is_fixed_point(seed):
    rng = np.random.default_rng(seed)
    prog = gen_program(CaseGenConfig(), rng, external=("e0",))
    req = sorted({"e0"} & set().union(*(calls(d.body) for d in prog.decls)))
    rm = random_env(req, prog.domain, rng)
    rho0 = S.standard_denotation(prog, rm)
    assert S.xi_step(prog.decls, rm, rho0) == rho0


def test_program_denotations_are_functional():
    rng = np.random.default_rng(5)
    for _ in range(30):
        prog = gen_program(CaseGenConfig(), rng)
        for rel in S.standard_denotation(prog).values():
            assert rel.out_degrees().max() <= 1


def test_relation_kinds_cover_extremes():
    rng = np.random.default_rng(0)
    assert random_relation(D1, rng, "full").is_full()
    assert not random_relation(D1, rng, "empty")
