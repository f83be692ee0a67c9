from __future__ import annotations

import numpy as np
import pytest

from procontracts import contracts as C
from procontracts import mutants
from procontracts.lang import Interface
from procontracts.metacheck import (
    FAIL, META_LAWS, PASS, SKIP, CaseGenConfig, InducedContract, check_composition_laws, check_meta_refinement,
    check_shared_refinement, check_sub_distributivity, environment_candidates, gen_contract,
    gen_contract_family, gen_interface, implementation_candidates, run_meta_suite,
)
from procontracts.properties import run_semantic_suite
from procontracts.relation import Denotation
from procontracts.semantics import ProcEnv

CFG = CaseGenConfig(seed=11, samples=40)


def test_identical_contracts_refine_trivially(c_even):
    rng = np.random.default_rng(0)
    v = check_meta_refinement(c_even, c_even, implementation_candidates(c_even, rng, CFG),
                              environment_candidates(c_even, rng, CFG))
    assert v.status == PASS


def test_one_pair_strict_refinement(c_even, domain):
    pairs = c_even.guarantee["even"].pairs()
    c1 = C.DenotContract(c_even.interface, c_even.assume,
                         ProcEnv(domain, {"even": Denotation.from_pairs(domain, pairs[1:])}))
    rng = np.random.default_rng(1)
    v = check_meta_refinement(c1, c_even, implementation_candidates(c1, rng, CFG),
                              environment_candidates(c_even, rng, CFG))
    assert v.status == PASS


def test_non_refining_pair_skipped(c_even, c_odd):
    assert check_meta_refinement(c_even, c_odd, [], []).status == SKIP


def test_shared_refinement_guards(c_even, c_odd):
    assert check_shared_refinement(c_even, c_even, [C.max_implementation(c_even)], [], [c_even]).status == PASS
    assert check_shared_refinement(c_even, c_odd, [], [], []).status == SKIP


def test_composition_laws_even_odd(c_even, c_odd, domain):
    fresh = C.DenotContract.make(ProcEnv(domain), ProcEnv(domain, {"z": Denotation.identity(domain)}))
    assert check_composition_laws(c_even, c_odd, fresh).status == PASS
    assert C.contracts_equal(C.compose_contracts(c_even, c_odd), C.compose_contracts(c_odd, c_even))
    assert C.refines(C.compose_many([c_even, c_odd, fresh]),
                     C.compose_contracts(C.compose_contracts(c_even, c_odd), fresh))
    assert check_composition_laws(c_even, c_even, fresh).status == SKIP


def test_sub_distributivity_guard(c_even, c_odd):
    assert check_sub_distributivity(c_even, c_even, c_odd, c_odd).status == PASS
    assert check_sub_distributivity(c_even, c_even, c_even, c_even).status == SKIP


def test_induced_contract(c_even, m_even, m_odd):
    ic = InducedContract(c_even)
    assert ic.implementations(m_even)
    assert ic.environments(m_odd)
    assert not ic.environments(m_even)


def test_empty_required_gives_empty_assume():
    rng = np.random.default_rng(0)
    c = gen_contract(CFG, Interface(frozenset(), frozenset({"a"})), rng)
    assert c.assume.scope == frozenset()


def test_vacuous_bias():
    c = gen_contract(CFG, Interface(frozenset({"b"}), frozenset({"a"})), np.random.default_rng(0), vacuous=True)
    assert c.guarantee["a"].is_full()


def test_biased_pairs_mostly_composable():
    rng = np.random.default_rng(5)
    hits = sum(C.contracts_composable(*gen_contract_family(CFG, rng, 2)) for _ in range(300))
    assert hits / 300 >= CFG.composable_bias


def test_interfaces_are_disjoint():
    rng = np.random.default_rng(2)
    for _ in range(100):
        i = gen_interface(rng)
        assert not (i.required & i.provided) and i.provided


def test_meta_suite_passes():
    report = run_meta_suite(CFG)
    assert report.ok, report.to_dict()
    for law in report.laws:
        assert law.samples == CFG.samples
        assert law.skip_rate < 0.5


def test_zero_samples():
    report = run_meta_suite(CaseGenConfig(samples=0))
    assert report.ok
    assert all(r.samples == 0 for r in report.laws)


def test_deterministic_report():
    assert run_meta_suite(CFG).to_dict() == run_meta_suite(CFG).to_dict()


def test_invalid_config():
    with pytest.raises(ValueError):
        CaseGenConfig(max_width=1)
    with pytest.raises(ValueError):
        CaseGenConfig(composable_bias=1.5)


@pytest.mark.parametrize("mutant, law, runner", [
    ("conjoin-meet", "shared_refinement", run_meta_suite),
    ("compose-no-cross", "composition", run_meta_suite),
    ("while-gfp", "oracle", run_semantic_suite),
])
def test_mutants_detected(mutant, law, runner):
    cfg = CaseGenConfig(seed=3, samples=60)
    with mutants.active(mutant):
        report = runner(cfg)
    assert report[law].failed > 0
    assert report[law].failing_seeds
    # the patch is undone afterwards
    assert runner(cfg)[law].failed == 0


def test_failing_seed_reproduces():
    cfg = CaseGenConfig(seed=3, samples=60)
    with mutants.active("conjoin-meet"):
        seed = run_meta_suite(cfg)["shared_refinement"].failing_seeds[0]
        law = dict(META_LAWS)["shared_refinement"]
        assert law(np.random.default_rng(seed), cfg).status == FAIL


def test_unknown_mutant():
    with pytest.raises(KeyError):
        mutants.active("nope")
