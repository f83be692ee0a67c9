"""Exception hierarchy. Each class carries the CLI exit code it maps to."""

from __future__ import annotations


class ProcContractsError(Exception):
    exit_code = 3


class ParseError(ProcContractsError):
    exit_code = 2

    def __init__(self, message: str, line: int = 0, column: int = 0):
        self.message = message
        self.line = line
        self.column = column
        where = f"{line}:{column}: " if line else ""
        super().__init__(f"{where}{message}")


class SemanticError(ProcContractsError):
    exit_code = 3


class CapExceeded(SemanticError):
    pass


class DomainMismatch(SemanticError):
    pass


class UnboundName(SemanticError):
    pass


class FixpointDivergence(SemanticError):
    """Kleene iteration ran past the lattice-height bound."""


class MissingContract(ProcContractsError):
    exit_code = 4


class NotComposable(ProcContractsError):
    exit_code = 5


class UnusedContractWarning(UserWarning):
    pass


class DomainConflictWarning(UserWarning):
    pass
