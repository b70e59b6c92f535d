"""Massively multimodal deceptive problem: sums of deceptive 6-bit subfunctions."""
from __future__ import annotations

import numpy as np

from .base import ProblemInstance

# Subfunction value by unitation (ones count of a 6-bit block).  Bipolar and
# deceptive: the two global optima of a block sit at unitation 0 and 6 while
# the strong local attractor is at 3.
SUBFUNCTION = np.array([1.0, 0.0, 0.360384, 0.640576, 0.360384, 0.0, 1.0])


class Mmdp(ProblemInstance):
    """k deceptive 6-bit blocks; global optimum k at all-zeros/all-ones blocks."""

    name = "mmdp"

    def __init__(self, k: int):
        if k < 1:
            raise ValueError("block count must be >= 1")
        super().__init__(6 * k)
        self.k = int(k)
        self.known_optimum = float(k)
        self.name = f"mmdp-k{k}"

    def _evaluate(self, bits: np.ndarray) -> np.ndarray:
        unitation = bits.reshape(bits.shape[0], self.k, 6).sum(axis=2)
        return SUBFUNCTION[unitation].sum(axis=1)


def mmdp_eval(bits) -> float:
    """Evaluate a bit vector whose length must be a multiple of 6."""
    arr = np.asarray(bits, dtype=np.uint8)
    if arr.ndim != 1 or arr.size == 0 or arr.size % 6 != 0:
        raise ValueError("bit vector length must be a positive multiple of 6")
    return Mmdp(arr.size // 6).evaluate(arr)
