"""Power-sum evaluation for jump-kernel constants.

All kernel constants are tails or full sums of z**-s over the positive
integers.  They are evaluated by partial summation plus an Euler-Maclaurin
tail correction, which keeps the absolute error far below the requested
tolerance without reaching for special functions.
"""

from __future__ import annotations

import numpy as np

_BLOCK = 1 << 20


def _em_tail(s: float, Z: int) -> float:
    """Euler-Maclaurin estimate of sum_{z > Z} z**-s, error O(Z**-(s+5))."""
    return (
        Z ** (1.0 - s) / (s - 1.0)
        - 0.5 * Z ** (-s)
        + (s / 12.0) * Z ** (-s - 1.0)
        - (s * (s + 1.0) * (s + 2.0) / 720.0) * Z ** (-s - 3.0)
    )


def power_tail(s: float, start: int = 1, tol: float = 1e-12, max_terms: int = 10**6) -> float:
    """Sum of z**-s for z >= start, to absolute error <= tol (requires s > 1)."""
    if s <= 1.0:
        raise ValueError(f"power sum diverges for s={s} <= 1")
    if start < 1:
        raise ValueError("start must be >= 1")
    if tol <= 0:
        raise ValueError("tol must be positive")
    Z = start + max_terms - 1
    total = 0.0
    lo = start
    while lo <= Z:
        hi = min(lo + _BLOCK - 1, Z)
        z = np.arange(lo, hi + 1, dtype=np.float64)
        total += float(np.sum(z ** (-s)))
        lo = hi + 1
    return total + _em_tail(s, Z)


def power_tails(s: float, x_max: int, extra_terms: int = 10**5) -> np.ndarray:
    """Array T with T[x-1] = sum_{z >= x} z**-s for x = 1..x_max (s > 1).

    Single vectorized pass: explicit terms up to x_max + extra_terms, suffix
    sums, shared Euler-Maclaurin remainder beyond the cut.
    """
    if s <= 1.0:
        raise ValueError(f"power sum diverges for s={s} <= 1")
    Z = x_max + extra_terms
    z = np.arange(1, Z + 1, dtype=np.float64)
    terms = z ** (-s)
    suffix = np.cumsum(terms[::-1])[::-1]
    return suffix[:x_max] + _em_tail(s, Z)
