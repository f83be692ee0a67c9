"""Deliberately broken operators, for checking that the law suites notice.

Each mutant is a context manager that swaps one function in place; every
suite calls operators through their module, so the swap is seen everywhere.
"""

from __future__ import annotations

import contextlib
from typing import Iterator

import numpy as np

from . import contracts, semantics
from .lang import Interface
from .relation import Denotation


def _conjoin_meet(c1, c2):
    # assumptions intersected instead of joined
    assume = semantics.env_glb(c1.assume, c2.assume)
    guarantee = semantics.env_glb(c1.guarantee, c2.guarantee)
    return contracts.DenotContract(Interface(assume.scope, guarantee.scope), assume, guarantee)


def _composable_no_cross(c1, c2):
    return c1.domain == c2.domain and not (c1.provided & c2.provided)


def _while_greatest(guard: np.ndarray, body: Denotation) -> Denotation:
    # iterate downward from the full relation
    domain = body.domain
    exit_rows = Denotation.identity(domain).restrict_rows(~guard)
    step = body.restrict_rows(guard)
    r = Denotation.full(domain)
    while True:
        nxt = exit_rows | step.then(r)
        if nxt == r:
            return r
        r = nxt


@contextlib.contextmanager
def _patched(module, name: str, replacement) -> Iterator[None]:
    original = getattr(module, name)
    setattr(module, name, replacement)
    try:
        yield
    finally:
        setattr(module, name, original)


MUTANTS = {
    "conjoin-meet": lambda: _patched(contracts, "conjoin", _conjoin_meet),
    "compose-no-cross": lambda: _patched(contracts, "contracts_composable", _composable_no_cross),
    "while-gfp": lambda: _patched(semantics, "_while_fixpoint", _while_greatest),
}


def active(name: str | None):
    """Context manager installing mutant ``name`` (or nothing for None)."""
    if name is None:
        return contextlib.nullcontext()
    if name not in MUTANTS:
        raise KeyError(f"unknown mutant {name!r}; choose from {sorted(MUTANTS)}")
    return MUTANTS[name]()
