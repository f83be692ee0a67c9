"""Denotational semantics, procedure contracts and an assume/guarantee
contract algebra for a small imperative language with recursive procedures."""

from __future__ import annotations

__version__ = "0.1.0"

from .components import BaseComponent, CompositeComponent, base_component, compose  # noqa: E402
from .contracts import (  # noqa: E402
    DenotContract, abstract_contract, abstract_contracts, compose_contracts, conjoin,
    contracts_composable, hoare_denotation, implements, is_environment, refines,
    soundness_check, verify_modular,
)
from .lang import DomainConfig, Interface, parse_contract_file, parse_program  # noqa: E402
from .oracle import oracle_denotation, run_operational  # noqa: E402
from .relation import Denotation  # noqa: E402
from .semantics import ProcEnv, denote_stmt, standard_denotation  # noqa: E402

__all__ = [
    "BaseComponent", "CompositeComponent", "Denotation", "DenotContract", "DomainConfig",
    "Interface", "ProcEnv", "abstract_contract", "abstract_contracts", "base_component",
    "compose", "compose_contracts", "conjoin", "contracts_composable", "denote_stmt",
    "hoare_denotation", "implements", "is_environment", "oracle_denotation", "parse_contract_file",
    "parse_program", "refines", "run_operational", "soundness_check", "standard_denotation",
    "verify_modular",
]
