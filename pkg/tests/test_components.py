from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, strategies as st

from procontracts.components import (
    BaseComponent, CompositeComponent, FunctionComponent, base_component, check_monotone, compose,
    composable, extensionally_equal,
)
from procontracts.errors import NotComposable, SemanticError
from procontracts.lang import DomainConfig, Interface, parse_program
from procontracts.metacheck import gen_decls
from procontracts.relation import Denotation
from procontracts.sampling import comparable_pair, random_env
from procontracts.semantics import ProcEnv, bottom_env, denote_stmt, standard_denotation, top_env


def test_base_even_interface(m_even, even_odd, domain):
    assert m_even.interface == Interface(frozenset({"odd"}), frozenset({"even"}))
    rho = random_env(["odd"], domain, np.random.default_rng(1))
    assert m_even(rho)["even"] == denote_stmt(even_odd.decl("even").body, rho, ProcEnv(domain))


def test_closed_component_is_standard_semantics(even_odd, domain):
    m = base_component(even_odd.decls, None, domain)
    assert m.interface == Interface(frozenset(), frozenset({"even", "odd"}))
    assert m(ProcEnv(domain)) == standard_denotation(even_odd)


def test_skip_component_is_constant():
    d = DomainConfig(0, 1, ("x",))
    m = BaseComponent(parse_program("proc p is skip").decls, d)
    assert m(ProcEnv(d))["p"] == Denotation.identity(d)


def test_m_even_at_empty_odd(m_even, domain):
    out = m_even(bottom_env(["odd"], domain))["even"]
    assert out == Denotation.from_predicate(domain, lambda s, t: s["n"] == 0 and t == {**s, "r": 1})


def test_m_even_at_top(m_even, domain):
    out = m_even(top_env(["odd"], domain))["even"]
    expected = Denotation.from_predicate(
        domain, lambda s, t: t == {**s, "r": 1} if s["n"] == 0 else True)
    assert out == expected


def test_composability(m_even, m_odd, domain):
    assert composable(m_even, m_odd)
    assert not composable(m_even, m_even)
    d = DomainConfig(0, 1, ("x",))
    a = BaseComponent(parse_program("proc a is skip").decls, d)
    b = BaseComponent(parse_program("proc b is skip").decls, d)
    assert composable(a, b)
    with pytest.raises(NotComposable):
        compose(m_even, m_even)


def test_even_times_odd_is_joint(m_even, m_odd, even_odd, domain):
    joint = BaseComponent(even_odd.decls, domain)
    both = compose(m_even, m_odd)
    assert both.interface == joint.interface
    assert both(ProcEnv(domain)) == joint(ProcEnv(domain))


def test_compose_with_fresh_closed_component(even_odd, domain):
    m = BaseComponent(even_odd.decls, domain)
    fresh = BaseComponent(parse_program("proc z is skip").decls, domain)
    both = compose(m, fresh)
    assert both.provided == {"even", "odd", "z"}
    out = both(ProcEnv(domain))
    assert out.restrict(["even", "odd"]) == m(ProcEnv(domain))
    assert out["z"] == Denotation.identity(domain)


def test_scope_is_enforced(m_even, domain):
    with pytest.raises(SemanticError):
        m_even(ProcEnv(domain))
    with pytest.raises(SemanticError):
        m_even(top_env(["odd", "even"], domain))


def test_callers_must_cover_calls(even_odd, domain):
    with pytest.raises(SemanticError):
        BaseComponent([even_odd.decl("even")], domain, callers=[])


def _random_components(seed):
    rng = np.random.default_rng(seed)
    d = DomainConfig(0, 2, ("x",))
    decls = gen_decls(rng, d, ["a", "b", "c"], ["a", "b", "c", "e"], 3, 0.5)
    return rng, d, [BaseComponent([x], d, None) for x in decls]


@given(st.integers(0, 2**32 - 1))
def test_composition_commutes_and_associates(seed):
    rng, d, (ma, mb, mc) = _random_components(seed)
    ab, ba = compose(ma, mb), compose(mb, ma)
    envs = [random_env(ab.required, d, rng) for _ in range(4)]
    assert extensionally_equal(ab, ba, envs)
    left, right = compose(compose(ma, mb), mc), compose(ma, compose(mb, mc))
    envs = [random_env(left.required, d, rng) for _ in range(4)]
    assert extensionally_equal(left, right, envs)


@given(st.integers(0, 2**32 - 1))
def test_components_are_monotone(seed):
    rng, d, (ma, mb, mc) = _random_components(seed)
    for m in (ma, compose(ma, mb), compose(compose(ma, mb), mc)):
        pairs = [comparable_pair(m.required, d, rng) for _ in range(3)]
        pairs.append((bottom_env(m.required, d), top_env(m.required, d)))
        assert check_monotone(m, pairs)


def test_monotonicity_refuter(domain):
    iface = Interface(frozenset({"q"}), frozenset({"p"}))
    antitone = FunctionComponent(iface, domain, lambda r: ProcEnv(domain, {"p": r["q"].complement()}))
    assert not check_monotone(antitone, [(bottom_env(["q"], domain), top_env(["q"], domain))])


def test_m_even_nested_envs_monotone(m_even, domain):
    low, high = comparable_pair(["odd"], domain, np.random.default_rng(3))
    assert check_monotone(m_even, [(low, high)])


def test_describe_is_serializable(m_even, m_odd):
    desc = CompositeComponent(m_even, m_odd).describe()
    assert desc["kind"] == "composite"
    assert desc["parts"][0]["decls"]["even"].startswith("if n = 0")
