"""Benchmark problem families: MMDP, COUNTSAT, P-PEAKS and 0-1 knapsack."""
from .base import InfeasibleError, ProblemInstance
from .countsat import Countsat, countsat_eval, countsat_value
from .knapsack import (
    CAPACITY_FRACTION_PRESETS,
    GENERATOR_CLASSES,
    Knapsack,
    KnapsackInstance,
    brute_force_optimum,
    gen_knapsack,
    knapsack_eval,
    knapsack_repair,
    load_knapsack,
    save_knapsack,
)
from .mmdp import Mmdp, mmdp_eval
from .ppeaks import PPeaks, PPeaksInstance, gen_ppeaks, load_ppeaks, ppeaks_eval, save_ppeaks

__all__ = [
    "CAPACITY_FRACTION_PRESETS",
    "Countsat",
    "GENERATOR_CLASSES",
    "InfeasibleError",
    "Knapsack",
    "KnapsackInstance",
    "Mmdp",
    "PPeaks",
    "PPeaksInstance",
    "ProblemInstance",
    "brute_force_optimum",
    "countsat_eval",
    "countsat_value",
    "gen_knapsack",
    "gen_ppeaks",
    "knapsack_eval",
    "knapsack_repair",
    "load_knapsack",
    "load_ppeaks",
    "mmdp_eval",
    "ppeaks_eval",
    "save_knapsack",
    "save_ppeaks",
]
