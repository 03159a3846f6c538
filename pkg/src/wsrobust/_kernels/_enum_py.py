"""Pure-Python enumeration kernel (fallback for the compiled version).

Produces candidate-index assignment rows for the radius-bounded substitution
space in canonical order: nondecreasing substitution count, then combination
order over the given column sequence, then candidate order. Row value 0 keeps
the original word at that column; value j in 1..counts[col] selects the j-th
alternative.
"""

from __future__ import annotations

import itertools
from typing import Iterator, Sequence

import numpy as np


def assignment_chunks(
    counts: Sequence[int],
    radius: int,
    chunk: int = 1024,
    order: Sequence[int] | None = None,
) -> Iterator[np.ndarray]:
    """Yield int32 arrays of shape (k, m), k <= chunk, covering every
    assignment with at most `radius` substituted columns exactly once.

    `counts[i]` is the number of non-original candidates at column i; columns
    with zero alternatives are never substituted. `order` permutes which
    columns lead the combination ordering (default: ascending column index).
    """
    m = len(counts)
    if chunk < 1:
        raise ValueError("chunk must be >= 1")
    cols = list(range(m)) if order is None else list(order)
    if sorted(cols) != list(range(m)):
        raise ValueError("order must be a permutation of the columns")
    eff = [i for i in cols if counts[i] > 0]
    depth = min(max(radius, 0), len(eff))

    buf = np.zeros((chunk, m), dtype=np.int32)
    k = 1  # row 0 is the unmodified assignment (distance 0)
    for d in range(1, depth + 1):
        for combo in itertools.combinations(eff, d):
            ranges = [range(1, counts[i] + 1) for i in combo]
            for choice in itertools.product(*ranges):
                if k == chunk:
                    yield buf
                    buf = np.zeros((chunk, m), dtype=np.int32)
                    k = 0
                for i, v in zip(combo, choice):
                    buf[k, i] = v
                k += 1
    yield buf[:k]
