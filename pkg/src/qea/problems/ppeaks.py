"""P-PEAKS multimodal generator: fitness is closeness to the nearest peak."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .base import ProblemInstance


@dataclass
class PPeaksInstance:
    """P random N-bit strings marking peak locations."""

    peaks: np.ndarray  # (P, N) uint8
    seed: int = -1

    def __post_init__(self):
        self.peaks = np.asarray(self.peaks, dtype=np.uint8)
        if self.peaks.ndim != 2 or self.peaks.shape[0] < 1 or self.peaks.shape[1] < 1:
            raise ValueError("peaks must be a non-empty (P, N) bit matrix")

    @property
    def p(self) -> int:
        return self.peaks.shape[0]

    @property
    def n(self) -> int:
        return self.peaks.shape[1]


def gen_ppeaks(p: int, n: int, rng) -> PPeaksInstance:
    """P independent uniform N-bit strings; deterministic for an int seed."""
    if p < 1 or n < 1:
        raise ValueError("need p >= 1 and n >= 1")
    seed = rng if isinstance(rng, (int, np.integer)) else -1
    gen = np.random.default_rng(rng) if not isinstance(rng, np.random.Generator) else rng
    return PPeaksInstance(gen.integers(0, 2, size=(p, n), dtype=np.uint8), int(seed))


class PPeaks(ProblemInstance):
    """Fitness in [0, 1]: (N - Hamming distance to the closest peak) / N."""

    name = "ppeaks"
    known_optimum = 1.0

    def __init__(self, instance: PPeaksInstance):
        super().__init__(instance.n)
        self.instance = instance
        self.name = f"ppeaks-p{instance.p}-n{instance.n}"
        # N - hamming(x, peak) = N - sum(x) - sum(peak) + 2*x.peak
        self._peak_sums = instance.peaks.sum(axis=1, dtype=np.int64)
        self._peaks_t = instance.peaks.astype(np.int64).T

    def _evaluate(self, bits: np.ndarray) -> np.ndarray:
        ones = bits.sum(axis=1, dtype=np.int64)
        dots = bits.astype(np.int64) @ self._peaks_t
        closeness = self.n - ones[:, None] - self._peak_sums[None, :] + 2 * dots
        return closeness.max(axis=1) / self.n


def ppeaks_eval(bits, instance: PPeaksInstance) -> float:
    arr = np.asarray(bits, dtype=np.uint8)
    if arr.ndim != 1 or arr.size != instance.n:
        raise ValueError(f"expected a bit vector of length {instance.n}")
    return PPeaks(instance).evaluate(arr)


def save_ppeaks(instance: PPeaksInstance, path) -> None:
    """Text format: header `P N seed`, then one 0/1 row per peak."""
    with open(path, "w") as f:
        f.write(f"{instance.p} {instance.n} {instance.seed}\n")
        for row in instance.peaks:
            f.write("".join("1" if v else "0" for v in row) + "\n")


def load_ppeaks(path) -> PPeaksInstance:
    with open(path) as f:
        p, n, seed = (int(v) for v in f.readline().split())
        peaks = np.array([[int(ch) for ch in f.readline().strip()] for _ in range(p)],
                         dtype=np.uint8)
    if peaks.shape != (p, n):
        raise ValueError("peak rows do not match header")
    return PPeaksInstance(peaks, seed)
