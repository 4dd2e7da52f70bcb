"""Set partition enumeration by restricted growth strings."""

from __future__ import annotations

from functools import lru_cache
from typing import Iterator

import numpy as np


def iter_rgs(m: int) -> Iterator[tuple[int, ...]]:
    """Yield every restricted growth string of length ``m`` in lexicographic order.

    A string ``a`` is restricted growth when ``a[0] = 0`` and
    ``a[p] <= 1 + max(a[:p])``; strings and set partitions of ``m`` ordered
    elements are in bijection.
    """
    if m == 0:
        yield ()
        return
    a = [0] * m
    ceiling = [0] * m  # ceiling[p] = max(a[:p+1])
    p = m - 1
    while True:
        yield tuple(a)
        # rightmost position that can still be incremented
        while p > 0 and a[p] > ceiling[p - 1]:
            p -= 1
        if p == 0:
            return
        a[p] += 1
        ceiling[p] = max(ceiling[p - 1], a[p])
        for q in range(p + 1, m):
            a[q] = 0
            ceiling[q] = ceiling[p]
        p = m - 1


@lru_cache(maxsize=16)
def rgs_array(m: int) -> np.ndarray:
    """All restricted growth strings of length ``m`` as a ``(Bell(m), m)`` array."""
    strings = list(iter_rgs(m))
    out = np.array(strings, dtype=np.int8).reshape(len(strings), m)
    out.setflags(write=False)
    return out
