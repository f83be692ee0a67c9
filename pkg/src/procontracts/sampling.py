"""Seeded random relations, environments and implementations."""

from __future__ import annotations

from typing import Iterable

import numpy as np

from .lang import DomainConfig
from .relation import Denotation
from .semantics import ProcEnv


def random_relation(domain: DomainConfig, rng: np.random.Generator, kind: str | None = None) -> Denotation:
    n = domain.num_states
    kind = kind or rng.choice(["sparse", "dense", "functional", "partial", "empty", "full"],
                              p=[0.3, 0.2, 0.2, 0.2, 0.05, 0.05])
    if kind == "empty":
        return Denotation.empty(domain)
    if kind == "full":
        return Denotation.full(domain)
    if kind in ("functional", "partial"):
        succ = rng.integers(0, n, size=n)
        if kind == "partial":
            succ[rng.random(n) < 0.3] = -1
        return Denotation.from_successors(domain, succ)
    density = rng.uniform(0.02, 0.2) if kind == "sparse" else rng.uniform(0.4, 0.95)
    return Denotation.from_matrix(domain, rng.random((n, n)) < density)


def random_env(names: Iterable[str], domain: DomainConfig, rng: np.random.Generator) -> ProcEnv:
    return ProcEnv(domain, {p: random_relation(domain, rng) for p in sorted(names)})


def random_subrelation(rel: Denotation, rng: np.random.Generator, keep: float = 0.8) -> Denotation:
    n = rel.domain.num_states
    return rel & Denotation.from_matrix(rel.domain, rng.random((n, n)) < keep)


def random_superrelation(rel: Denotation, rng: np.random.Generator, add: float = 0.1) -> Denotation:
    n = rel.domain.num_states
    return rel | Denotation.from_matrix(rel.domain, rng.random((n, n)) < add)


def shrink_env(env: ProcEnv, rng: np.random.Generator) -> ProcEnv:
    return ProcEnv(env.domain, {p: random_subrelation(r, rng, rng.uniform(0.5, 1.0)) for p, r in env.items()})


def grow_env(env: ProcEnv, rng: np.random.Generator) -> ProcEnv:
    return ProcEnv(env.domain, {p: random_superrelation(r, rng, rng.uniform(0.0, 0.3)) for p, r in env.items()})


def random_implementation(c, rng: np.random.Generator):
    """A random monotone implementation of contract ``c``."""
    from .contracts import greatest_implementation, max_implementation, threshold_implementation
    roll = rng.random()
    if roll < 0.2:
        return greatest_implementation(c)
    if roll < 0.35:
        return max_implementation(c)
    return threshold_implementation(c, shrink_env(c.guarantee, rng), grow_env(c.assume, rng))


def comparable_pair(names: Iterable[str], domain: DomainConfig, rng: np.random.Generator) -> tuple[ProcEnv, ProcEnv]:
    """Random r1 <= r2 over the same scope."""
    r2 = random_env(names, domain, rng)
    return shrink_env(r2, rng), r2
