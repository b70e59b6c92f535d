"""The eleven-dimensional engine parameter space and named parameter sets.

A parameter vector holds, in order: the eight rotation-angle magnitudes as
multiples of pi, then population size, number of groups and global migration
period.  Angles are kept as pi-multiples everywhere outside the engine; the
conversion to radians happens when a vector is realized as an EngineConfig.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .engine import EngineConfig, StopCriteria, raise_to_multiple, run
from .qbits import RotationPolicy

PARAM_NAMES = (
    "theta1", "theta2", "theta3", "theta4", "theta5", "theta6", "theta7", "theta8",
    "population", "groups", "migration",
)
N_PARAMS = len(PARAM_NAMES)
_POP, _GROUPS, _MIGRATION = 8, 9, 10


@dataclass(frozen=True)
class ParamSpec:
    """Bounds and kind of one tunable parameter."""

    name: str
    lower: float
    upper: float
    integer: bool = False
    unit: str = ""

    def __post_init__(self):
        if not self.lower < self.upper:
            raise ValueError(f"{self.name}: lower bound must be < upper bound")

    def round(self, x: float) -> float:
        # integers round half-up, then everything clamps to the bounds
        v = float(np.floor(x + 0.5)) if self.integer else float(x)
        return min(max(v, self.lower), self.upper)


def qea_param_specs(theta_side=0.05, theta_main=0.5, pop=(5, 200),
                    groups=(1, 20), migration=(1, 500)) -> tuple:
    """Specs for the 11 engine parameters.

    `theta_main` bounds the two large-step angles (cases 3 and 5, the
    bit-mismatch attractor-better cases); `theta_side` bounds the other six.
    """
    specs = []
    for i in range(8):
        hi = theta_main if i in (2, 4) else theta_side
        specs.append(ParamSpec(PARAM_NAMES[i], 0.0, hi, unit="pi"))
    specs.append(ParamSpec("population", pop[0], pop[1], integer=True))
    specs.append(ParamSpec("groups", groups[0], groups[1], integer=True))
    specs.append(ParamSpec("migration", migration[0], migration[1], integer=True))
    return tuple(specs)


# Bound presets used by the tuning campaigns: 'wide' for the deceptive /
# peak-matching families, 'narrow' for knapsack (small angles, small groups).
SPEC_PRESETS = {
    "wide": qea_param_specs(),
    "narrow": qea_param_specs(theta_side=0.001, theta_main=0.05, pop=(5, 100),
                              groups=(1, 10), migration=(1, 200)),
}

# Named parameter sets: the untuned defaults and the outcomes of the tuning
# campaigns on each benchmark family (angles as pi-multiples).
PARAMETER_SETS = {
    "canonical": np.array([0, 0, 0.01, 0, 0.01, 0, 0, 0, 50, 10, 100], dtype=float),
    "tuned-mmdp": np.array([0.000147, 0.0282, 0.205, 0.0485, 0.002, 0.0205,
                            0.035, 0.033, 28, 4, 6], dtype=float),
    "tuned-knapsack": np.array([0.00035, 0.00026, 0.01423, 0.0003, 0.01405,
                                0.00070, 0.00067, 0.00088, 80, 10, 197], dtype=float),
    "tuned-ppeaks": np.array([0.0184, 0, 0.169, 0.0784, 0.0768, 0,
                              0.0163, 0.0818, 132, 4, 125], dtype=float),
}


def normalize_parameters(values, specs) -> np.ndarray:
    """Clamp to bounds and round integer-kind entries."""
    vals = np.asarray(values, dtype=np.float64)
    if vals.shape != (len(specs),):
        raise ValueError(f"expected {len(specs)} parameter values")
    return np.array([spec.round(v) for spec, v in zip(specs, vals)])


def qea_normalizer(specs):
    """Normalizer for the 11-parameter engine space.

    On top of clamping/rounding, the population is raised to the next multiple
    of the group count (the engine's group partition needs it); when that would
    exceed the population upper bound it drops to the largest multiple that
    still fits, so the recorded vector is exactly what runs.
    """
    if len(specs) != N_PARAMS:
        raise ValueError(f"the engine space has {N_PARAMS} parameters")

    def normalize(values):
        vals = normalize_parameters(values, specs)
        groups = max(1, int(vals[_GROUPS]))
        pop = raise_to_multiple(int(vals[_POP]), groups)
        upper = specs[_POP].upper
        if pop > upper:
            pop = max(groups, int(upper // groups) * groups)
        vals[_POP] = pop
        vals[_GROUPS] = groups
        return vals

    return normalize


def engine_config_from_parameters(values, stop: StopCriteria, maximize=True,
                                  init_mode="equal", no_migration=False) -> EngineConfig:
    vals = np.asarray(values, dtype=np.float64)
    if vals.shape != (N_PARAMS,):
        raise ValueError(f"expected {N_PARAMS} parameter values")
    policy = RotationPolicy.from_pi_multiples(vals[:8], maximize)
    return EngineConfig(
        population_size=int(round(vals[_POP])),
        group_count=int(round(vals[_GROUPS])),
        migration_period=max(1, int(round(vals[_MIGRATION]))),
        rotation=policy,
        init_mode=init_mode,
        stop=stop,
        no_migration=no_migration,
    )


def make_qea_evaluator(problem, stop: StopCriteria, init_mode="equal",
                       no_migration=False, binary_controls_init=False):
    """Objective for the tuner: one engine run's best objective value.

    When `binary_controls_init` is set, the design's 2-level column switches
    the initialization between equal-probability (level 0) and random (1).
    """

    def evaluate(values, seed, binary_level=0):
        mode = init_mode
        if binary_controls_init:
            mode = "equal" if binary_level == 0 else "random"
        config = engine_config_from_parameters(values, stop, problem.maximize, mode,
                                               no_migration)
        return run(problem, config, seed).best_objective

    return evaluate


def save_parameters(path, values, init_mode="equal") -> None:
    """Flat key = value text; angles as pi-multiples, floats via repr."""
    vals = np.asarray(values, dtype=np.float64)
    with open(path, "w") as f:
        for name, v in zip(PARAM_NAMES, vals):
            rendered = repr(int(v)) if name in ("population", "groups", "migration") else repr(float(v))
            f.write(f"{name} = {rendered}\n")
        f.write(f"init_mode = {init_mode}\n")


def load_parameters(path):
    """Returns (values, init_mode); accepts a named set or a parameter file."""
    if isinstance(path, str) and path in PARAMETER_SETS:
        return PARAMETER_SETS[path].copy(), "equal"
    entries = {}
    with open(path) as f:
        for line in f:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, _, value = line.partition("=")
            entries[key.strip()] = value.strip()
    missing = [n for n in PARAM_NAMES if n not in entries]
    if missing:
        raise ValueError(f"parameter file missing: {', '.join(missing)}")
    values = np.array([float(entries[n]) for n in PARAM_NAMES])
    return values, entries.get("init_mode", "equal")
