"""0-1 knapsack: eleven random instance classes, greedy repair, brute-force oracle.

Profit maximization subject to the strict capacity constraint

    sum(w_i * x_i) < C

(strict `<` as the source formulation prints it; most of the knapsack
literature uses `<=`).  Weights are drawn uniformly from [1, 1000] except for
the similar-weights class; profits follow the class rule.  Capacity is a fixed
fraction of the total weight.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .base import InfeasibleError, ProblemInstance

GENERATOR_CLASSES = (
    "uncorrelated",
    "weakly_correlated",
    "strongly_correlated",
    "inverse_strongly_correlated",
    "almost_strongly_correlated",
    "subset_sum",
    "similar_weights",
    "spanner",
    "multiple_strongly_correlated",
    "profit_ceiling",
    "circle",
)

# Fixed class parameters: spanner(2, 10), mstr(300, 200, 6), pceil(3),
# circle(2/3); weight range [1, 1000] (similar-weights: [100000, 100100]).
SPANNER_SET_SIZE = 2
SPANNER_MULTIPLIER_LIMIT = 10
MSTR_K1, MSTR_K2, MSTR_D = 300, 200, 6
PCEIL_D = 3
CIRCLE_D = 2.0 / 3.0

CAPACITY_FRACTION_PRESETS = (0.01, 0.05, 0.10, 0.20, 0.50)


@dataclass
class KnapsackInstance:
    profits: np.ndarray
    weights: np.ndarray
    capacity: float
    generator_class: str = "unspecified"
    generator_params: dict = field(default_factory=dict)
    seed: int = -1

    def __post_init__(self):
        self.profits = np.asarray(self.profits, dtype=np.float64)
        self.weights = np.asarray(self.weights, dtype=np.float64)
        self.capacity = float(self.capacity)
        if self.profits.shape != self.weights.shape or self.profits.ndim != 1:
            raise ValueError("profits and weights must be 1-D arrays of equal length")
        if self.profits.size == 0:
            raise ValueError("empty instance")
        if np.any(self.weights <= 0) or np.any(self.profits < 0):
            raise ValueError("weights must be positive and profits non-negative")
        if not 0.0 < self.capacity < float(self.weights.sum()):
            raise ValueError("capacity must satisfy 0 < C < total weight")

    @property
    def n(self) -> int:
        return self.profits.size


def gen_knapsack(generator_class: str, n: int, capacity_fraction: float, rng) -> KnapsackInstance:
    """Random instance of one of the eleven classes with C = fraction * sum(w)."""
    if generator_class not in GENERATOR_CLASSES:
        raise ValueError(f"unknown generator class {generator_class!r}")
    if n < 1:
        raise ValueError("item count must be >= 1")
    if not 0.0 < capacity_fraction < 1.0:
        raise ValueError("capacity fraction must lie in (0, 1)")
    seed = int(rng) if isinstance(rng, (int, np.integer)) else -1
    gen = rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)

    def weights_std():
        return gen.integers(1, 1001, n).astype(np.float64)

    params = {}
    if generator_class == "uncorrelated":
        w = weights_std()
        p = gen.integers(1, 1001, n).astype(np.float64)
    elif generator_class == "weakly_correlated":
        w = weights_std()
        p = np.maximum(1.0, w + gen.integers(-100, 101, n))
    elif generator_class == "strongly_correlated":
        w = weights_std()
        p = w + 100.0
    elif generator_class == "inverse_strongly_correlated":
        p = gen.integers(1, 1001, n).astype(np.float64)
        w = p + 100.0
    elif generator_class == "almost_strongly_correlated":
        w = weights_std()
        p = w + gen.integers(98, 103, n)
    elif generator_class == "subset_sum":
        w = weights_std()
        p = w.copy()
    elif generator_class == "similar_weights":
        w = gen.integers(100_000, 100_101, n).astype(np.float64)
        p = gen.integers(1, 1001, n).astype(np.float64)
    elif generator_class == "spanner":
        # Strongly correlated spanner set of 2 items normalized by m+1 = 11;
        # each item is an integer multiple (1..10) of a spanner item.
        ws = gen.integers(1, 1001, SPANNER_SET_SIZE).astype(np.float64)
        ps = ws + 100.0
        ws /= SPANNER_MULTIPLIER_LIMIT + 1
        ps /= SPANNER_MULTIPLIER_LIMIT + 1
        which = gen.integers(0, SPANNER_SET_SIZE, n)
        mult = gen.integers(1, SPANNER_MULTIPLIER_LIMIT + 1, n).astype(np.float64)
        w = mult * ws[which]
        p = mult * ps[which]
        params = {"v": SPANNER_SET_SIZE, "m": SPANNER_MULTIPLIER_LIMIT}
    elif generator_class == "multiple_strongly_correlated":
        w = weights_std()
        p = w + np.where(w % MSTR_D == 0, MSTR_K1, MSTR_K2)
        params = {"k1": MSTR_K1, "k2": MSTR_K2, "d": MSTR_D}
    elif generator_class == "profit_ceiling":
        w = weights_std()
        p = PCEIL_D * np.floor(w / PCEIL_D)
        params = {"d": PCEIL_D}
    else:  # circle
        w = weights_std()
        p = np.rint(CIRCLE_D * np.sqrt(2000.0 ** 2 - (w - 2000.0) ** 2))
        params = {"d": CIRCLE_D, "rounded": True}
    params["capacity_fraction"] = capacity_fraction
    capacity = capacity_fraction * float(w.sum())
    return KnapsackInstance(p, w, capacity, generator_class, params, seed)


class Knapsack(ProblemInstance):
    """Engine-facing wrapper with cached greedy orders for the repair operator."""

    name = "knapsack"
    has_repair = True

    def __init__(self, instance: KnapsackInstance, optimum: float | None = None):
        super().__init__(instance.n)
        self.instance = instance
        self.known_optimum = optimum
        self.name = f"knapsack-{instance.generator_class}-n{instance.n}"
        ratio = instance.profits / instance.weights
        idx = np.arange(instance.n)
        # Drop the worst ratio first (ties: lower index); add the best ratio
        # first (ties: lower index).
        self._drop_order = np.lexsort((idx, ratio))
        self._add_order = np.lexsort((idx, -ratio))
        # Repair tracks weights incrementally; this margin keeps its feasibility
        # decisions safe against float-summation-order differences.  It is far
        # below the smallest real weight gap of any generator class.
        self._guard = 1e-12 * max(1.0, instance.capacity)

    def _evaluate(self, bits: np.ndarray) -> np.ndarray:
        dense = bits.astype(np.float64)
        w = dense @ self.instance.weights
        if np.any(w >= self.instance.capacity):
            raise InfeasibleError("selection weight reaches capacity; repair first")
        return dense @ self.instance.profits

    def _repair(self, bits: np.ndarray) -> np.ndarray:
        inst = self.instance
        cap = inst.capacity - self._guard
        drop = self._drop_order
        selected = bits[:, drop].astype(bool)
        w_drop = inst.weights[drop]
        total = selected @ w_drop
        # Drop phase: remove selected items in drop order until weight < C.
        # The minimal prefix length L satisfies cum[L-1] > total - C.
        cum = np.cumsum(selected * w_drop, axis=1)
        thresh = total - cap
        prefix = (cum <= thresh[:, None]).sum(axis=1) + 1
        prefix[thresh < 0] = 0
        keep = selected & (np.arange(inst.n)[None, :] >= prefix[:, None])
        out = np.zeros(bits.shape, dtype=np.float64)
        out[:, drop] = keep
        weight = out @ inst.weights
        # Add phase: greedily insert anything that still fits strictly.
        for j in self._add_order:
            fits = (out[:, j] == 0) & (weight + inst.weights[j] < cap)
            if np.any(fits):
                out[fits, j] = 1.0
                weight[fits] += inst.weights[j]
        return out.astype(np.uint8)


def knapsack_eval(bits, instance: KnapsackInstance) -> float:
    """Profit of a feasible selection; raises InfeasibleError on weight >= C."""
    return Knapsack(instance).evaluate(bits)


def knapsack_repair(bits, instance: KnapsackInstance):
    """Ratio-greedy drop-then-add projection into the feasible region."""
    return Knapsack(instance).repair(bits)


def brute_force_optimum(instance: KnapsackInstance, limit: int = 24):
    """Exhaustive optimum over all 2^n selections (test oracle, n <= limit)."""
    n = instance.n
    if n > limit:
        raise ValueError(f"brute force limited to {limit} items")
    best_profit = 0.0
    best_bits = np.zeros(n, dtype=np.uint8)
    chunk = 1 << min(n, 16)
    shifts = np.arange(n, dtype=np.uint32)
    for start in range(0, 1 << n, chunk):
        codes = np.arange(start, min(start + chunk, 1 << n), dtype=np.uint32)
        bits = ((codes[:, None] >> shifts[None, :]) & 1).astype(np.float64)
        feasible = bits @ instance.weights < instance.capacity
        if not np.any(feasible):
            continue
        profits = bits @ instance.profits
        profits[~feasible] = -1.0
        i = int(np.argmax(profits))
        if profits[i] > best_profit:
            best_profit = float(profits[i])
            best_bits = bits[i].astype(np.uint8)
    return best_profit, best_bits


def save_knapsack(instance: KnapsackInstance, path) -> None:
    """Text format: `n C generator_class seed`, then `index profit weight` rows.

    Floats use repr so the file round-trips bit-exactly.
    """
    with open(path, "w") as f:
        f.write(f"{instance.n} {float(instance.capacity)!r} {instance.generator_class} "
                f"{instance.seed}\n")
        for i in range(instance.n):
            f.write(f"{i} {float(instance.profits[i])!r} {float(instance.weights[i])!r}\n")


def load_knapsack(path) -> KnapsackInstance:
    with open(path) as f:
        n_s, cap_s, cls, seed_s = f.readline().split()
        n = int(n_s)
        profits = np.empty(n)
        weights = np.empty(n)
        for _ in range(n):
            idx_s, p_s, w_s = f.readline().split()
            profits[int(idx_s)] = float(p_s)
            weights[int(idx_s)] = float(w_s)
    return KnapsackInstance(profits, weights, float(cap_s), cls, seed=int(seed_s))
