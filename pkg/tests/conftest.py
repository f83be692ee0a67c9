from __future__ import annotations

from pathlib import Path

import pytest
from hypothesis import settings

from procontracts import contracts as C
from procontracts.components import BaseComponent
from procontracts.lang import parse_contract_file, parse_program

settings.register_profile("repo", max_examples=60, deadline=None)
settings.load_profile("repo")

SAMPLES = Path(__file__).resolve().parent.parent / "samples"


@pytest.fixture(scope="session")
def samples_dir() -> Path:
    return SAMPLES


@pytest.fixture(scope="session")
def even_odd():
    return parse_program((SAMPLES / "even_odd.proc").read_text())


@pytest.fixture(scope="session")
def table():
    return parse_contract_file((SAMPLES / "even_odd.contracts").read_text())


@pytest.fixture(scope="session")
def domain(even_odd):
    return even_odd.domain


@pytest.fixture(scope="session")
def m_even(even_odd, domain):
    return BaseComponent([even_odd.decl("even")], domain)


@pytest.fixture(scope="session")
def m_odd(even_odd, domain):
    return BaseComponent([even_odd.decl("odd")], domain)


@pytest.fixture(scope="session")
def c_even(table, domain):
    return C.abstract_contract("even", table, {"odd"}, domain)


@pytest.fixture(scope="session")
def c_odd(table, domain):
    return C.abstract_contract("odd", table, {"even"}, domain)


@pytest.fixture(scope="session")
def c_top(table, domain):
    return C.abstract_contracts(["even", "odd"], table, {"even", "odd"}, domain)
