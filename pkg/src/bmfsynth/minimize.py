"""
Two-level minimization: tabular Quine-McCluskey with a greedy prime cover.

Cubes are ``(mask, value)`` pairs over ``n`` variables; a set bit in ``mask`` marks a
don't-care position and ``value`` holds the fixed bits (zero wherever ``mask`` is set).
Variable ``i`` sits at bit ``n - 1 - i`` so that variable 0 is the most significant bit
of a minterm index.
"""

from __future__ import annotations

import logging
from typing import List, Sequence, Tuple

import numpy as np

from .errors import BudgetError

logger = logging.getLogger(__name__)

MAX_INPUTS = 12

Cube = Tuple[int, int]


def cube_to_string(cube: Cube, n: int) -> str:
    mask, value = cube
    chars = []
    for i in range(n):
        bit = 1 << (n - 1 - i)
        if mask & bit:
            chars.append("-")
        else:
            chars.append("1" if value & bit else "0")
    return "".join(chars)


def string_to_cube(text: str) -> Cube:
    n = len(text)
    mask = value = 0
    for i, ch in enumerate(text):
        bit = 1 << (n - 1 - i)
        if ch == "-":
            mask |= bit
        elif ch == "1":
            value |= bit
    return mask, value


def cube_literals(cube: Cube, n: int) -> int:
    return n - bin(cube[0]).count("1")


def _implicant_table(onset: np.ndarray, n: int) -> np.ndarray:
    """table[mask, v] is True when every minterm of cube (mask, v & ~mask) is in the on-set."""
    size = 1 << n
    index = np.arange(size)
    table = np.zeros((size, size), dtype=bool)
    table[0] = onset
    for mask in range(1, size):
        low = mask & -mask
        previous = table[mask ^ low]
        table[mask] = previous & previous[index | low]
    return table


def prime_implicants(onset: Sequence[bool] | np.ndarray, n: int) -> List[Cube]:
    onset = np.asarray(onset, dtype=bool)
    if n > MAX_INPUTS:
        raise BudgetError(f"Two-level minimization of {n} inputs exceeds the limit of {MAX_INPUTS}")
    size = 1 << n
    if onset.shape != (size,):
        raise ValueError(f"On-set of length {onset.size} does not match {n} inputs")
    if not onset.any():
        return []
    table = _implicant_table(onset, n)
    index = np.arange(size)
    masks = np.arange(size)
    canonical = (index[None, :] & masks[:, None]) == 0
    prime = table & canonical
    for b in range(n):
        bit = 1 << b
        without = masks[(masks & bit) == 0]
        # expanding position b must fail for the cube to stay prime
        expandable = table[without | bit][:, index & ~bit]
        prime[without] &= ~expandable
    mask_idx, value_idx = np.nonzero(prime)
    return [(int(m), int(v)) for m, v in zip(mask_idx, value_idx)]


def _coverage(cubes: Sequence[Cube], n: int) -> np.ndarray:
    index = np.arange(1 << n)
    masks = np.array([c[0] for c in cubes], dtype=np.int64)
    values = np.array([c[1] for c in cubes], dtype=np.int64)
    return (index[None, :] & ~masks[:, None]) == values[:, None]


def minimize(onset: Sequence[bool] | np.ndarray, n: int) -> List[Cube]:
    """Minimized sum-of-products cover of a truth column (index bit n-1-i is variable i)."""
    onset = np.asarray(onset, dtype=bool)
    primes = prime_implicants(onset, n)
    if not primes:
        return []
    if onset.all():
        return [((1 << n) - 1, 0)]
    primes.sort(key=lambda cube: (-bin(cube[0]).count("1"), cube_to_string(cube, n)))
    coverage = _coverage(primes, n)[:, onset]
    chosen: List[int] = []
    uncovered = np.ones(coverage.shape[1], dtype=bool)

    per_minterm = coverage.sum(axis=0)
    for column in np.nonzero(per_minterm == 1)[0]:
        essential = int(np.nonzero(coverage[:, column])[0][0])
        if essential not in chosen:
            chosen.append(essential)
            uncovered &= ~coverage[essential]

    while uncovered.any():
        gains = (coverage & uncovered).sum(axis=1)
        best = int(np.argmax(gains))
        chosen.append(best)
        uncovered &= ~coverage[best]

    cover = [primes[i] for i in chosen]
    cover.sort(key=lambda cube: cube_to_string(cube, n))
    return cover
