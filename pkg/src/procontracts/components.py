"""Components: monotone maps from required-procedure environments to
provided-procedure environments, built from declarations or by composition."""

from __future__ import annotations

from typing import Callable, Iterable

from .errors import NotComposable, SemanticError
from .lang import DomainConfig, Interface, ProcDecl, called_names, pretty_stmt
from .semantics import ProcEnv, env_leq, least_provided_env, lfp


class Component:
    """Base class. Subclasses implement ``_apply`` on a scope-checked input."""

    interface: Interface
    domain: DomainConfig

    @property
    def required(self) -> frozenset[str]:
        return self.interface.required

    @property
    def provided(self) -> frozenset[str]:
        return self.interface.provided

    def apply(self, r_minus: ProcEnv) -> ProcEnv:
        if r_minus.scope != self.required:
            raise SemanticError(
                f"component requires {sorted(self.required)}, got environment over {sorted(r_minus.scope)}")
        if r_minus.domain != self.domain:
            raise SemanticError("environment domain differs from the component's")
        out = self._apply(r_minus)
        if out.scope != self.provided:
            raise SemanticError(f"component produced {sorted(out.scope)}, expected {sorted(self.provided)}")
        return out

    __call__ = apply

    def _apply(self, r_minus: ProcEnv) -> ProcEnv:
        raise NotImplementedError

    def describe(self) -> dict:
        raise NotImplementedError


class BaseComponent(Component):
    """The standard denotation of a set of declarations, as a function of
    the environment for the procedures they call but do not declare."""

    def __init__(self, decls: Iterable[ProcDecl], domain: DomainConfig,
                 callers: Iterable[str] | None = None):
        self.decls = tuple(sorted(decls, key=lambda d: d.name))
        names = [d.name for d in self.decls]
        if len(set(names)) != len(names):
            raise SemanticError(f"duplicate procedure names in {names}")
        provided = frozenset(names)
        called = called_names(self.decls)
        if callers is None:
            callers = called
        callers = set(callers)
        unbound = called - callers - provided
        if unbound:
            raise SemanticError(f"calls to {sorted(unbound)} are neither provided nor listed as callers")
        self.interface = Interface(frozenset(callers) - provided, provided)
        self.domain = domain

    def _apply(self, r_minus: ProcEnv) -> ProcEnv:
        return least_provided_env(self.decls, r_minus)

    def describe(self) -> dict:
        return {
            "kind": "base",
            "interface": self.interface.to_dict(),
            "decls": {d.name: pretty_stmt(d.body) for d in self.decls},
        }

    def __repr__(self) -> str:
        return f"base({', '.join(d.name for d in self.decls)})"


class CompositeComponent(Component):
    def __init__(self, m1: Component, m2: Component):
        if not composable(m1, m2):
            raise NotComposable(
                f"components both provide {sorted(m1.provided & m2.provided)}")
        if m1.domain != m2.domain:
            raise SemanticError("cannot compose components over different domains")
        self.m1, self.m2 = m1, m2
        provided = m1.provided | m2.provided
        required = (m1.required | m2.required) - provided
        self.interface = Interface(required, provided)
        self.domain = m1.domain

    def _route(self, m: Component, inner: ProcEnv, outer: ProcEnv) -> ProcEnv:
        # a required name of m is read from the partner when it provides it,
        # otherwise from the composite's own input
        return ProcEnv(self.domain, {p: inner[p] if p in inner else outer[p] for p in m.required})

    def chi(self, r_minus: ProcEnv) -> Callable[[ProcEnv], ProcEnv]:
        def step(rho: ProcEnv) -> ProcEnv:
            out1 = self.m1.apply(self._route(self.m1, rho.restrict(self.m2.provided), r_minus))
            out2 = self.m2.apply(self._route(self.m2, rho.restrict(self.m1.provided), r_minus))
            return out1 | out2
        return step

    def _apply(self, r_minus: ProcEnv) -> ProcEnv:
        return lfp(self.chi(r_minus), self.provided, self.domain)

    def describe(self) -> dict:
        return {"kind": "composite", "interface": self.interface.to_dict(),
                "parts": [self.m1.describe(), self.m2.describe()]}

    def __repr__(self) -> str:
        return f"({self.m1!r} x {self.m2!r})"


class ConstantComponent(Component):
    """Ignores its input and always returns ``output``."""

    def __init__(self, interface: Interface, output: ProcEnv, label: str = "const"):
        if output.scope != interface.provided:
            raise SemanticError("constant output must cover exactly the provided names")
        self.interface = interface
        self.domain = output.domain
        self.output = output
        self.label = label

    def _apply(self, r_minus: ProcEnv) -> ProcEnv:
        return self.output

    def describe(self) -> dict:
        return {"kind": self.label, "interface": self.interface.to_dict(),
                "output_pairs": {p: len(r) for p, r in self.output.items()}}

    def __repr__(self) -> str:
        return f"{self.label}({sorted(self.provided)})"


class FunctionComponent(Component):
    """Wraps an arbitrary callable; monotonicity is the caller's promise."""

    def __init__(self, interface: Interface, domain: DomainConfig,
                 fn: Callable[[ProcEnv], ProcEnv], label: str = "fn"):
        self.interface = interface
        self.domain = domain
        self.fn = fn
        self.label = label

    def _apply(self, r_minus: ProcEnv) -> ProcEnv:
        return self.fn(r_minus)

    def describe(self) -> dict:
        return {"kind": self.label, "interface": self.interface.to_dict()}

    def __repr__(self) -> str:
        return self.label


def base_component(decls: Iterable[ProcDecl], callers: Iterable[str] | None,
                   domain: DomainConfig) -> BaseComponent:
    return BaseComponent(decls, domain, callers)


def apply_component(m: Component, r_minus: ProcEnv) -> ProcEnv:
    return m.apply(r_minus)


def composable(m1: Component, m2: Component) -> bool:
    return not (m1.provided & m2.provided)


def compose(m1: Component, m2: Component) -> CompositeComponent:
    return CompositeComponent(m1, m2)


def check_monotone(m: Component, samples: Iterable[tuple[ProcEnv, ProcEnv]]) -> bool:
    """False iff some sampled r1 <= r2 has m(r1) not <= m(r2)."""
    for r1, r2 in samples:
        if r1.scope != m.required or r2.scope != m.required:
            raise SemanticError("sample environments must cover exactly the required names")
        if not env_leq(r1, r2):
            raise ValueError("monotonicity samples must be ordered pairs r1 <= r2")
        if not env_leq(m.apply(r1), m.apply(r2)):
            return False
    return True


def extensionally_equal(m1: Component, m2: Component, envs: Iterable[ProcEnv]) -> bool:
    if m1.interface != m2.interface:
        return False
    return all(m1.apply(r) == m2.apply(r) for r in envs)
