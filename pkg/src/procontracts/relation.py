"""Finite binary relations on the states of one DomainConfig."""

from __future__ import annotations

from typing import Iterable, Mapping

import numpy as np

from . import kernels
from .errors import DomainMismatch
from .lang import DomainConfig


def _words(n: int) -> int:
    return max(1, (n + 63) // 64)


def _row_mask(n: int) -> np.ndarray:
    """One row with bits 0..n-1 set."""
    w = _words(n)
    row = np.full(w, np.uint64(0xFFFFFFFFFFFFFFFF), dtype="<u8")
    tail = n - 64 * (w - 1)
    if tail < 64:
        row[-1] = np.uint64((1 << tail) - 1)
    return row


def pack_bool(matrix: np.ndarray) -> np.ndarray:
    n_rows, n = matrix.shape
    w = _words(n)
    packed = np.packbits(matrix.astype(bool), axis=1, bitorder="little")
    out = np.zeros((n_rows, w * 8), dtype=np.uint8)
    out[:, :packed.shape[1]] = packed
    return np.ascontiguousarray(out).view("<u8")


class Denotation:
    """A set of (state, state) pairs, stored as packed bit rows.

    Instances are immutable. States are addressed by their index in
    ``enumerate_states(domain)`` order; the ``*_states`` helpers translate.
    """

    __slots__ = ("domain", "bits", "_hash")

    def __init__(self, domain: DomainConfig, bits: np.ndarray):
        n = domain.num_states
        bits = np.ascontiguousarray(bits, dtype="<u8")
        if bits.shape != (n, _words(n)):
            raise ValueError(f"bit matrix shape {bits.shape} does not fit {n} states")
        if bits.flags.writeable:
            bits = bits.copy()
            bits.flags.writeable = False
        self.domain = domain
        self.bits = bits
        self._hash = None

    # construction
    @classmethod
    def empty(cls, domain: DomainConfig) -> "Denotation":
        n = domain.num_states
        return cls(domain, np.zeros((n, _words(n)), dtype="<u8"))

    @classmethod
    def full(cls, domain: DomainConfig) -> "Denotation":
        n = domain.num_states
        return cls(domain, np.tile(_row_mask(n), (n, 1)))

    @classmethod
    def identity(cls, domain: DomainConfig) -> "Denotation":
        n = domain.num_states
        return cls.from_successors(domain, np.arange(n))

    @classmethod
    def from_successors(cls, domain: DomainConfig, succ: np.ndarray) -> "Denotation":
        """Functional relation i -> succ[i]; negative entries mean no successor."""
        n = domain.num_states
        bits = np.zeros((n, _words(n)), dtype="<u8")
        succ = np.asarray(succ, dtype=np.int64)
        rows = np.flatnonzero(succ >= 0)
        cols = succ[rows]
        bits[rows, cols // 64] = np.left_shift(np.uint64(1), (cols % 64).astype(np.uint64))
        return cls(domain, bits)

    @classmethod
    def from_pairs(cls, domain: DomainConfig, pairs: Iterable[tuple[int, int]]) -> "Denotation":
        n = domain.num_states
        bits = np.zeros((n, _words(n)), dtype="<u8")
        for i, j in pairs:
            if not (0 <= i < n and 0 <= j < n):
                raise IndexError(f"pair ({i}, {j}) outside 0..{n - 1}")
            bits[i, j // 64] |= np.uint64(1 << (j % 64))
        return cls(domain, bits)

    @classmethod
    def from_state_pairs(cls, domain: DomainConfig,
                         pairs: Iterable[tuple[Mapping[str, int], Mapping[str, int]]]) -> "Denotation":
        return cls.from_pairs(domain, ((domain.index(s), domain.index(t)) for s, t in pairs))

    @classmethod
    def from_predicate(cls, domain: DomainConfig, pred) -> "Denotation":
        """All pairs (s, t) of state dicts with ``pred(s, t)``; for tests and goldens."""
        from .lang import enumerate_states
        states = enumerate_states(domain)
        return cls.from_pairs(domain, ((i, j) for i, s in enumerate(states)
                                       for j, t in enumerate(states) if pred(s, t)))

    @classmethod
    def from_matrix(cls, domain: DomainConfig, matrix: np.ndarray) -> "Denotation":
        return cls(domain, pack_bool(matrix))

    # algebra
    def _check(self, other: "Denotation") -> None:
        if self.domain != other.domain:
            raise DomainMismatch(f"relations over different domains: {self.domain} vs {other.domain}")

    def __or__(self, other: "Denotation") -> "Denotation":
        self._check(other)
        return Denotation(self.domain, self.bits | other.bits)

    def __and__(self, other: "Denotation") -> "Denotation":
        self._check(other)
        return Denotation(self.domain, self.bits & other.bits)

    def __sub__(self, other: "Denotation") -> "Denotation":
        self._check(other)
        return Denotation(self.domain, self.bits & ~other.bits)

    def __le__(self, other: "Denotation") -> bool:
        self._check(other)
        return not np.any(self.bits & ~other.bits)

    def __ge__(self, other: "Denotation") -> bool:
        return other <= self

    def __lt__(self, other: "Denotation") -> bool:
        return self <= other and self != other

    def __eq__(self, other) -> bool:
        if not isinstance(other, Denotation):
            return NotImplemented
        return self.domain == other.domain and np.array_equal(self.bits, other.bits)

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.domain, self.bits.tobytes()))
        return self._hash

    def then(self, other: "Denotation") -> "Denotation":
        """Diagrammatic composition: first self, then other."""
        self._check(other)
        return Denotation(self.domain, kernels.compose(self.bits, other.bits))

    def restrict_rows(self, mask: np.ndarray) -> "Denotation":
        """Keep only pairs whose start state index has ``mask`` set."""
        return Denotation(self.domain, np.where(np.asarray(mask, bool)[:, None], self.bits, 0))

    def complement(self) -> "Denotation":
        n = self.domain.num_states
        return Denotation(self.domain, ~self.bits & _row_mask(n))

    # inspection
    def __len__(self) -> int:
        return int(np.bitwise_count(self.bits).sum())

    def __bool__(self) -> bool:
        return bool(np.any(self.bits))

    def __contains__(self, pair) -> bool:
        s, t = pair
        i = s if isinstance(s, (int, np.integer)) else self.domain.index(s)
        j = t if isinstance(t, (int, np.integer)) else self.domain.index(t)
        return bool((int(self.bits[i, j // 64]) >> (j % 64)) & 1)

    def matrix(self) -> np.ndarray:
        return kernels.unpack(self.bits, self.domain.num_states)

    def pairs(self) -> list[tuple[int, int]]:
        """Index pairs in ascending (start, end) order."""
        rows, cols = np.nonzero(self.matrix())
        return list(zip(rows.tolist(), cols.tolist()))

    def state_pairs(self) -> list[tuple[dict, dict]]:
        st = self.domain.state
        return [(st(i), st(j)) for i, j in self.pairs()]

    def successors(self, i: int) -> list[int]:
        return np.flatnonzero(self.matrix()[i]).tolist()

    def out_degrees(self) -> np.ndarray:
        return np.bitwise_count(self.bits).sum(axis=1)

    def is_functional(self) -> bool:
        return bool(np.all(self.out_degrees() <= 1))

    def is_full(self) -> bool:
        return self == Denotation.full(self.domain)

    def __repr__(self) -> str:
        return f"Denotation({len(self)} pairs over {self.domain.num_states} states)"
