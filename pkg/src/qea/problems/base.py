"""Common interface for binary optimization problems fed to the engine."""
from __future__ import annotations

import numpy as np


class InfeasibleError(ValueError):
    """Raised when a constrained objective is evaluated on an infeasible point."""


class ProblemInstance:
    """A problem over bit vectors of fixed length.

    Subclasses implement `_evaluate(bits2d) -> values` on a (m, n) batch; the
    public `evaluate` also accepts single vectors.  Problems with a feasibility
    constraint override `_repair(bits2d)` and set `has_repair`; repaired output
    must always be feasible and repair must be idempotent.
    """

    name = "problem"
    maximize = True
    has_repair = False
    known_optimum = None

    def __init__(self, n: int):
        if n < 1:
            raise ValueError("bit count must be >= 1")
        self.n = int(n)

    def _evaluate(self, bits: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _repair(self, bits: np.ndarray) -> np.ndarray:
        return bits

    def _as_batch(self, bits):
        arr = np.asarray(bits, dtype=np.uint8)
        single = arr.ndim == 1
        if single:
            arr = arr[None, :]
        if arr.ndim != 2 or arr.shape[1] != self.n:
            raise ValueError(f"expected bit vectors of length {self.n}")
        return arr, single

    def evaluate(self, bits):
        arr, single = self._as_batch(bits)
        vals = self._evaluate(arr)
        return float(vals[0]) if single else np.asarray(vals, dtype=np.float64)

    def repair(self, bits):
        arr, single = self._as_batch(bits)
        out = self._repair(arr)
        return out[0] if single else out

    def __repr__(self):
        return f"<{type(self).__name__} {self.name} n={self.n}>"
