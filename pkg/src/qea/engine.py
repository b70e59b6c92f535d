"""The grouped-population evolutionary loop driven by Q-bit rotation updates.

One run keeps N Q-bit strings split into M static groups.  Every generation
each individual picks an attractor (the group best, or the global best on
migration generations), rotates each Q-bit toward/away from the attractor's
bit depending on the lookup case, then observes, repairs and evaluates a fresh
binary solution.  Individual, group and global bests are elitist, so the
best-so-far trace never worsens.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .problems.base import ProblemInstance
from .qbits import RotationPolicy, delta_theta_arrays, observe_amplitudes, rotate_arrays

SQRT_HALF = 2.0 ** -0.5


class BinarySolution(NamedTuple):
    bits: np.ndarray
    objective: float
    feasible: bool = True


@dataclass
class StopCriteria:
    """Run termination: evaluation budget, generation budget, optional target.

    At least one of the two budgets must be finite.  When `target` is set the
    run stops (and is flagged successful) as soon as the global best reaches it
    under the problem's sense.
    """

    max_evaluations: int | None = None
    max_generations: int | None = None
    target: float | None = None

    def __post_init__(self):
        if self.max_evaluations is None and self.max_generations is None:
            raise ValueError("need max_evaluations and/or max_generations")
        if self.max_evaluations is not None and self.max_evaluations < 1:
            raise ValueError("max_evaluations must be >= 1")
        if self.max_generations is not None and self.max_generations < 0:
            raise ValueError("max_generations must be >= 0")


def raise_to_multiple(n: int, m: int) -> int:
    """Smallest multiple of m that is >= max(n, m)."""
    return max(1, -(-int(n) // int(m))) * int(m)


@dataclass
class EngineConfig:
    population_size: int
    group_count: int
    migration_period: int
    rotation: RotationPolicy
    init_mode: str = "equal"            # "equal" | "random"
    stop: StopCriteria = None
    no_migration: bool = False          # attractor = own individual best

    def __post_init__(self):
        if self.stop is None:
            raise ValueError("stop criteria are required")
        if self.group_count < 1:
            raise ValueError("group count must be >= 1")
        if self.population_size < 1:
            raise ValueError("population size must be >= 1")
        if self.migration_period < 1:
            raise ValueError("migration period must be >= 1")
        if self.init_mode not in ("equal", "random"):
            raise ValueError("init_mode must be 'equal' or 'random'")
        # The group partition requires an integral group size; a population
        # that is not a multiple of the group count is raised to the next one.
        self.population_size = raise_to_multiple(self.population_size, self.group_count)

    @property
    def group_size(self) -> int:
        return self.population_size // self.group_count


@dataclass
class RunRecord:
    best: BinarySolution
    evaluations: int
    generations: int
    success: bool
    trace: list = field(default_factory=list)  # (generation, best objective)

    @property
    def best_objective(self) -> float:
        return self.best.objective


def select_attractor(index: int, state: "PopulationState", config: EngineConfig) -> BinarySolution:
    """Attractor for one individual at the state's current generation.

    Global best on migration generations (t divisible by the period), the
    group best otherwise; the individual's own best in no-migration mode.
    """
    if not 0 <= index < config.population_size:
        raise ValueError("individual index out of range")
    if config.no_migration:
        return BinarySolution(state.ib_bits[index].copy(), float(state.ib_obj[index]))
    if state.generation % config.migration_period == 0:
        return BinarySolution(state.gb_bits.copy(), float(state.gb_obj))
    g = index // config.group_size
    return BinarySolution(state.lb_bits[g].copy(), float(state.lb_obj[g]))


@dataclass
class PopulationState:
    """Full engine state between generations (amplitudes plus elitist records)."""

    alpha: np.ndarray      # (N, n)
    beta: np.ndarray
    bits: np.ndarray       # last observed solutions (N, n)
    obj: np.ndarray        # their objectives (N,)
    ib_bits: np.ndarray    # individual bests
    ib_obj: np.ndarray
    lb_bits: np.ndarray    # group bests (M, n)
    lb_obj: np.ndarray
    gb_bits: np.ndarray    # global best (n,)
    gb_obj: float
    generation: int
    evaluations: int
    group_size: int

    @property
    def population_size(self) -> int:
        return self.alpha.shape[0]


def _argbest(values: np.ndarray, maximize: bool) -> int:
    return int(np.argmax(values) if maximize else np.argmin(values))


def _better(a, b, maximize: bool):
    return a > b if maximize else a < b


def _observe_repair_evaluate(problem, alpha, rng):
    bits = observe_amplitudes(alpha, rng)
    if problem.has_repair:
        bits = problem.repair(bits)
    return bits, problem.evaluate(bits)


def init_state(problem: ProblemInstance, config: EngineConfig,
               rng: np.random.Generator) -> PopulationState:
    """Initial generation: amplitudes, first observation, elitist bookkeeping."""
    n_pop, n = config.population_size, problem.n
    if config.init_mode == "equal":
        alpha = np.full((n_pop, n), SQRT_HALF)
        beta = np.full((n_pop, n), SQRT_HALF)
    else:
        phi = rng.uniform(0.0, 2.0 * math.pi, (n_pop, n))
        alpha, beta = np.cos(phi), np.sin(phi)
    bits, obj = _observe_repair_evaluate(problem, alpha, rng)
    maximize = problem.maximize
    gs = config.group_size
    lb_idx = [g * gs + _argbest(obj[g * gs:(g + 1) * gs], maximize)
              for g in range(config.group_count)]
    gb = _argbest(obj, maximize)
    return PopulationState(
        alpha=alpha, beta=beta, bits=bits, obj=obj.copy(),
        ib_bits=bits.copy(), ib_obj=obj.copy(),
        lb_bits=bits[lb_idx].copy(), lb_obj=obj[lb_idx].copy(),
        gb_bits=bits[gb].copy(), gb_obj=float(obj[gb]),
        generation=0, evaluations=n_pop, group_size=gs,
    )


def step_generation(state: PopulationState, problem: ProblemInstance,
                    config: EngineConfig, rng: np.random.Generator) -> PopulationState:
    """Advance the state by one generation in place (also returns it)."""
    maximize = problem.maximize
    n_pop = state.population_size
    group_of = np.arange(n_pop) // state.group_size

    state.generation += 1
    if config.no_migration:
        att_bits, att_obj = state.ib_bits, state.ib_obj
    elif state.generation % config.migration_period == 0:
        att_bits = np.broadcast_to(state.gb_bits, state.bits.shape)
        att_obj = np.full(n_pop, state.gb_obj)
    else:
        att_bits = state.lb_bits[group_of]
        att_obj = state.lb_obj[group_of]

    # Rotate toward each individual's attractor, comparing the attractor with
    # the individual's most recent observation (strictly better wins).
    better = _better(att_obj, state.obj, maximize)
    dtheta = delta_theta_arrays(state.bits, att_bits, better,
                                state.alpha, state.beta, config.rotation, rng)
    state.alpha, state.beta = rotate_arrays(state.alpha, state.beta, dtheta)

    state.bits, state.obj = _observe_repair_evaluate(problem, state.alpha, rng)
    state.evaluations += n_pop

    improved = _better(state.obj, state.ib_obj, maximize)
    state.ib_bits[improved] = state.bits[improved]
    state.ib_obj[improved] = state.obj[improved]

    by_group = state.ib_obj.reshape(config.group_count, state.group_size)
    in_group = by_group.argmax(axis=1) if maximize else by_group.argmin(axis=1)
    cand = by_group[np.arange(config.group_count), in_group]
    upd = _better(cand, state.lb_obj, maximize)
    if np.any(upd):
        rows = np.flatnonzero(upd)
        state.lb_obj[rows] = cand[rows]
        state.lb_bits[rows] = state.ib_bits[rows * state.group_size + in_group[rows]]
    gb = _argbest(state.ib_obj, maximize)
    if _better(state.ib_obj[gb], state.gb_obj, maximize):
        state.gb_bits = state.ib_bits[gb].copy()
        state.gb_obj = float(state.ib_obj[gb])
    return state


def run(problem: ProblemInstance, config: EngineConfig, seed) -> RunRecord:
    """Execute one full run; deterministic for a fixed seed.

    The evaluation counter advances by exactly the population size per
    generation (the initial generation included), so a run never exceeds its
    evaluation budget mid-generation.
    """
    if config.rotation.maximize != problem.maximize:
        raise ValueError("rotation policy sense does not match the problem")
    stop = config.stop
    rng = np.random.default_rng(seed)
    state = init_state(problem, config, rng)
    trace = [(0, state.gb_obj)]

    def reached_target():
        return stop.target is not None and (
            state.gb_obj >= stop.target if problem.maximize else state.gb_obj <= stop.target)

    while True:
        if reached_target():
            break
        if stop.max_generations is not None and state.generation >= stop.max_generations:
            break
        if stop.max_evaluations is not None and \
                state.evaluations + config.population_size > stop.max_evaluations:
            break
        step_generation(state, problem, config, rng)
        trace.append((state.generation, state.gb_obj))

    return RunRecord(
        best=BinarySolution(state.gb_bits.copy(), state.gb_obj),
        evaluations=state.evaluations,
        generations=state.generation,
        success=bool(reached_target()),
        trace=trace,
    )
