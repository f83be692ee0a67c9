"""numpy implementations of the relation kernels.

A relation over ``n`` states is an ``(n, w)`` array of little-endian uint64
words, ``w = ceil(n / 64)``; bit ``j`` of row ``i`` is set iff ``(i, j)`` is in
the relation.
"""

from __future__ import annotations

import numpy as np

# rows gathered per block, bounds the temporary in compose()
_BLOCK_PAIRS = 1 << 20


def unpack(bits: np.ndarray, n: int) -> np.ndarray:
    return np.unpackbits(bits.view(np.uint8), axis=1, bitorder="little")[:, :n].astype(bool)


def compose(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Diagrammatic composition: (i, k) iff some j has (i, j) in a and (j, k) in b."""
    n_mid = b.shape[0]
    out = np.zeros((a.shape[0], b.shape[1]), dtype="<u8")
    rows, cols = np.nonzero(unpack(a, n_mid))
    if rows.size == 0:
        return out
    start = 0
    while start < rows.size:
        stop = min(rows.size, start + max(1, _BLOCK_PAIRS // max(1, b.shape[1])))
        # extend to a row boundary so each row is reduced in one block
        while stop < rows.size and rows[stop] == rows[stop - 1]:
            stop += 1
        r, c = rows[start:stop], cols[start:stop]
        firsts = np.flatnonzero(np.r_[True, r[1:] != r[:-1]])
        out[r[firsts]] |= np.bitwise_or.reduceat(b[c], firsts, axis=0)
        start = stop
    return out


def while_lfp(exit_rows: np.ndarray, step: np.ndarray, max_iter: int) -> tuple[np.ndarray, int]:
    """Least R with R = exit_rows | step;R, by Kleene iteration from the empty relation.

    Returns ``(R, iterations)``; ``iterations > max_iter`` signals that the
    bound was hit before stabilising.
    """
    r = np.zeros_like(exit_rows)
    for it in range(1, max_iter + 2):
        nxt = exit_rows | compose(step, r)
        if np.array_equal(nxt, r):
            return r, it
        r = nxt
    return r, max_iter + 1
