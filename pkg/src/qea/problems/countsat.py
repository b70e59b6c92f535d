"""COUNTSAT: number of satisfied clauses among all 3-variable Horn clauses.

The value depends on the input only through its ones count s:

    f(s) = s + n(n-1)(n-2) - 2(n-2)*C(s,2) + 6*C(s,3)

with the unique maximum at s = n.  Values reach ~1e9 at n = 1000, so the
arithmetic is kept in integers.
"""
from __future__ import annotations

import numpy as np

from .base import ProblemInstance


def countsat_value(s: int, n: int) -> int:
    """Exact objective for a solution with s ones out of n variables."""
    s = int(s)
    n = int(n)
    return s + n * (n - 1) * (n - 2) - (n - 2) * s * (s - 1) + s * (s - 1) * (s - 2)


class Countsat(ProblemInstance):
    name = "countsat"

    def __init__(self, n: int):
        if n < 3:
            raise ValueError("countsat needs n >= 3")
        super().__init__(n)
        self.known_optimum = float(countsat_value(n, n))
        self.name = f"countsat-n{n}"

    def _evaluate(self, bits: np.ndarray) -> np.ndarray:
        s = bits.sum(axis=1, dtype=np.int64)
        n = np.int64(self.n)
        vals = s + n * (n - 1) * (n - 2) - (n - 2) * s * (s - 1) + s * (s - 1) * (s - 2)
        return vals.astype(np.float64)


def countsat_eval(bits) -> int:
    arr = np.asarray(bits, dtype=np.uint8)
    if arr.ndim != 1 or arr.size < 3:
        raise ValueError("countsat needs a bit vector with n >= 3")
    return countsat_value(int(arr.sum()), arr.size)
