"""Two-stage iterative parameter tuning driven by orthogonal-array experiments.

The search alternates designed experiment batches with an elitist incumbent
update.  Stage one (exploration) spreads several levels per parameter across
the full bounds and regenerates them around the incumbent each iteration;
stage two (exploitation) samples a +/-10% neighborhood of the incumbent that
shrinks as 1/i while no improvement is seen.  Each batch is analyzed two ways:
the main-effects winner (assembled from per-column best levels) and the raw
best row; whichever strictly beats the incumbent replaces it, so the incumbent
objective never worsens over a campaign.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .doe import ExperimentResponse, OrthogonalArray, assemble_best, builtin_l27, builtin_l50, main_effects
from .params import ParamSpec, normalize_parameters

_LEVEL_STREAM = 2      # seed-tuple tags, keeping every random stream distinct
_ROW_RUN = 0
_VECTOR_RUN = 1
_INITIAL_STAGE = 2     # stage codes: 0 exploration, 1 exploitation, 2 initial pivot


@dataclass
class TunerConfig:
    """Stage budgets, stagnation limits, level counts and run budget.

    `explore_levels` must be odd (the levels split evenly below/above the
    incumbent) and match the multi-level columns of the exploration array;
    `exploit_levels` likewise for the exploitation array.
    """

    explore_iterations: int = 3
    exploit_iterations: int = 3
    explore_stall_limit: int = 2
    exploit_stall_limit: int = 2
    explore_levels: int = 5
    exploit_levels: int = 3
    runs_per_experiment: int = 30
    response_stat: str = "best"         # "best" | "mean" of the per-run objectives
    oa_explore: OrthogonalArray = None
    oa_exploit: OrthogonalArray = None
    binary_column: str = "dummy"        # "dummy" | "init_mode"

    def __post_init__(self):
        if self.oa_explore is None:
            self.oa_explore = builtin_l50()
        if self.oa_exploit is None:
            self.oa_exploit = builtin_l27()
        for label, v in (("explore_iterations", self.explore_iterations),
                         ("exploit_iterations", self.exploit_iterations),
                         ("explore_stall_limit", self.explore_stall_limit),
                         ("exploit_stall_limit", self.exploit_stall_limit),
                         ("runs_per_experiment", self.runs_per_experiment)):
            if v < 1:
                raise ValueError(f"{label} must be >= 1")
        for label, v in (("explore_levels", self.explore_levels),
                         ("exploit_levels", self.exploit_levels)):
            if v < 3 or v % 2 == 0:
                raise ValueError(f"{label} must be odd and >= 3")
        if self.response_stat not in ("best", "mean"):
            raise ValueError("response_stat must be 'best' or 'mean'")
        if self.binary_column not in ("dummy", "init_mode"):
            raise ValueError("binary_column must be 'dummy' or 'init_mode'")


@dataclass
class HistoryRecord:
    stage: str
    index: int                  # 1-based across the whole campaign
    values: np.ndarray
    objective: float
    binary_level: int = 0


@dataclass
class TuningState:
    incumbent: np.ndarray = None
    objective: float = None
    binary_level: int = 0
    stage: str = "exploration"
    iteration: int = 0
    stall: int = 0
    history: list = field(default_factory=list)


@dataclass
class TuningResult:
    values: np.ndarray
    objective: float
    binary_level: int
    history: list
    explore_first_responses: list
    exploit_first_responses: list


@dataclass
class RobustnessReport:
    """RMS deviation of batch responses from a reference objective.

    Large variation: the first exploration batch (levels spread over the full
    bounds).  Small variation: the first exploitation batch (levels within the
    10% neighborhood of the incumbent).
    """

    large_variation: float
    small_variation: float


def _better(a, b, maximize):
    return a > b if maximize else a < b


# ---------------------------------------------------------------------------
# Level generation


def _draw(rng, spec: ParamSpec, lo: float, hi: float, count: int, taken: list) -> list:
    """Uniform draws in [lo, hi], rounded per the spec, re-drawn on duplicates
    where the interval allows."""
    out = []
    for _ in range(count):
        value = None
        for _attempt in range(40):
            cand = spec.round(rng.uniform(lo, hi))
            if cand not in taken and cand not in out:
                value = cand
                break
        if value is None:
            value = spec.round(rng.uniform(lo, hi))
        out.append(value)
    return out


def initial_levels(specs, count: int, rng) -> list:
    """`count` sorted values per parameter, uniform over the full bounds."""
    if count < 2:
        raise ValueError("need at least 2 levels")
    levels = []
    for spec in specs:
        if spec.integer and spec.upper - spec.lower + 1 < count:
            warnings.warn(f"{spec.name}: fewer than {count} distinct integer values; "
                          f"levels will repeat")
        levels.append(sorted(_draw(rng, spec, spec.lower, spec.upper, count, [])))
    return levels


def levels_around_incumbent(incumbent, specs, count: int, rng) -> list:
    """The incumbent value plus (count-1)/2 draws on each side of it."""
    half = (count - 1) // 2
    levels = []
    for spec, pivot in zip(specs, np.asarray(incumbent, dtype=float)):
        pivot = spec.round(pivot)
        vals = [pivot]
        vals += _draw(rng, spec, spec.lower, pivot, half, vals)
        vals += _draw(rng, spec, pivot, spec.upper, half, vals)
        levels.append(sorted(vals))
    return levels


def neighborhood_levels(incumbent, specs, count: int, rng, radius: float = 0.1) -> list:
    """Levels inside [pivot - r*(pivot-lower), pivot + r*(upper-pivot)]."""
    half = (count - 1) // 2
    levels = []
    for spec, pivot in zip(specs, np.asarray(incumbent, dtype=float)):
        pivot = spec.round(pivot)
        lo = pivot - radius * (pivot - spec.lower)
        hi = pivot + radius * (spec.upper - pivot)
        vals = [pivot]
        vals += _draw(rng, spec, lo, pivot, half, vals)
        vals += _draw(rng, spec, pivot, hi, half, vals)
        levels.append(sorted(vals))
    return levels


def refine_levels(current, previous, improved: bool, iteration: int, specs,
                  count: int, rng) -> list:
    """Next exploitation levels.

    After an improvement the levels bracket the last two incumbents with the
    remaining draws strictly between them; while stalled they shrink to a
    0.1/iteration neighborhood of the incumbent.  A parameter whose two
    incumbent values coincide falls back to the shrinking neighborhood.
    """
    if iteration < 1:
        raise ValueError("iteration must be >= 1")
    radius = 0.1 / iteration
    cur = np.asarray(current, dtype=float)
    prev = np.asarray(previous, dtype=float)
    levels = []
    for j, spec in enumerate(specs):
        pivot = spec.round(cur[j])
        if improved and spec.round(prev[j]) != pivot:
            a, b = sorted((pivot, spec.round(prev[j])))
            vals = [a, b] + _draw(rng, spec, a, b, count - 2, [a, b])
        else:
            lo = pivot - radius * (pivot - spec.lower)
            hi = pivot + radius * (spec.upper - pivot)
            half = (count - 1) // 2
            vals = [pivot]
            vals += _draw(rng, spec, lo, pivot, half, vals)
            vals += _draw(rng, spec, pivot, hi, half, vals)
        levels.append(sorted(vals))
    return levels


# ---------------------------------------------------------------------------
# Experiment batches


def _response_of(objectives: np.ndarray, stat: str, maximize: bool) -> float:
    if stat == "mean":
        return float(objectives.mean())
    return float(objectives.max() if maximize else objectives.min())


def run_experiment_batch(oa: OrthogonalArray, level_values, column_map, evaluator,
                         runs: int, seed: tuple, maximize: bool = True,
                         stat: str = "best", normalize=None, binary_column=None):
    """Execute every design row `runs` times.

    Returns (responses, row_values, row_binary, best_row).  Row parameter
    vectors are normalized before running so the reported vectors are exactly
    the executed ones.  Per-cell seeds derive from (seed, row, run), making
    results independent of execution order.
    """
    if len(column_map) != len(level_values):
        raise ValueError("need one OA column per tuned parameter")
    if len(set(column_map)) != len(column_map):
        raise ValueError("OA columns must be distinct per parameter")
    for p, col in enumerate(column_map):
        if len(level_values[p]) != oa.levels[col]:
            raise ValueError(f"parameter {p}: {len(level_values[p])} levels for an "
                             f"OA column with {oa.levels[col]}")
    responses = []
    row_values = np.empty((oa.rows, len(column_map)))
    row_binary = np.zeros(oa.rows, dtype=int)
    for row in range(oa.rows):
        values = np.array([level_values[p][oa.matrix[row, col]]
                           for p, col in enumerate(column_map)], dtype=float)
        if normalize is not None:
            values = normalize(values)
        b = int(oa.matrix[row, binary_column]) if binary_column is not None else 0
        objs = np.array([evaluator(values, (*seed, _ROW_RUN, row, r), b)
                         for r in range(runs)])
        responses.append(ExperimentResponse(row, _response_of(objs, stat, maximize), objs))
        row_values[row] = values
        row_binary[row] = b
    resp = np.array([r.response for r in responses])
    best_row = int(np.argmax(resp) if maximize else np.argmin(resp))
    return responses, row_values, row_binary, best_row


def measure_vector(values, binary_level, evaluator, runs: int, seed: tuple,
                   maximize: bool = True, stat: str = "best") -> float:
    """Fresh runs for an assembled vector, same budget/statistic as a design row."""
    objs = np.array([evaluator(np.asarray(values, dtype=float),
                               (*seed, _VECTOR_RUN, 0, r), binary_level)
                     for r in range(runs)])
    return _response_of(objs, stat, maximize)


def update_incumbent(state: TuningState, analysis_values, analysis_objective,
                     best_row_values, best_row_objective, maximize: bool = True,
                     analysis_binary: int = 0, best_row_binary: int = 0) -> bool:
    """Elitist three-way comparison; returns True when the incumbent changed.

    The raw best row wins only if strictly better than both the main-effects
    winner and the incumbent; otherwise the main-effects winner must strictly
    beat the incumbent.  On the campaign's very first batch there is no
    incumbent and the better of the two candidates is taken unconditionally.
    Ties never replace the incumbent and count toward stagnation.
    """
    if state.incumbent is None:
        if _better(best_row_objective, analysis_objective, maximize):
            state.incumbent, state.objective, state.binary_level = \
                np.array(best_row_values, dtype=float), float(best_row_objective), best_row_binary
        else:
            state.incumbent, state.objective, state.binary_level = \
                np.array(analysis_values, dtype=float), float(analysis_objective), analysis_binary
        state.stall = 0
        return True
    if _better(best_row_objective, analysis_objective, maximize) and \
            _better(best_row_objective, state.objective, maximize):
        state.incumbent = np.array(best_row_values, dtype=float)
        state.objective = float(best_row_objective)
        state.binary_level = best_row_binary
        state.stall = 0
        return True
    if _better(analysis_objective, state.objective, maximize):
        state.incumbent = np.array(analysis_values, dtype=float)
        state.objective = float(analysis_objective)
        state.binary_level = analysis_binary
        state.stall = 0
        return True
    state.stall += 1
    return False


# ---------------------------------------------------------------------------
# The campaign


def _stage_columns(oa: OrthogonalArray, level_count: int, n_params: int,
                   stage: str) -> list:
    cols = oa.columns_with_levels(level_count)
    if len(cols) < n_params:
        raise ValueError(f"{stage}: design offers {len(cols)} columns with "
                         f"{level_count} levels for {n_params} parameters")
    return cols[:n_params]


def _run_iteration(oa, levels, column_map, evaluator, config, seed, maximize,
                   normalize, binary_column, state):
    """One batch + analysis + incumbent update; returns (improved, responses)."""
    responses, row_values, row_binary, best_row = run_experiment_batch(
        oa, levels, column_map, evaluator, config.runs_per_experiment, seed,
        maximize, config.response_stat, normalize, binary_column)
    effects = main_effects(oa, responses, maximize)
    per_column = [None] * oa.columns
    for p, col in enumerate(column_map):
        per_column[col] = levels[p]
    analysis_binary = 0
    if binary_column is not None:
        analysis_binary = effects.best_levels[binary_column]
    assembled = np.array(assemble_best(effects, per_column), dtype=float)
    if normalize is not None:
        assembled = normalize(assembled)
    analysis_objective = measure_vector(assembled, analysis_binary, evaluator,
                                        config.runs_per_experiment, seed,
                                        maximize, config.response_stat)
    improved = update_incumbent(state, assembled, analysis_objective,
                                row_values[best_row], responses[best_row].response,
                                maximize, analysis_binary, int(row_binary[best_row]))
    return improved, responses


def tune(evaluator, specs, config: TunerConfig, seed: int, maximize: bool = True,
         initial=None, initial_objective=None, normalize=None) -> TuningResult:
    """Run a full two-stage campaign; byte-reproducible for a fixed seed.

    `evaluator(values, seed, binary_level)` scores one parameter vector with
    one run.  Passing `initial` re-enters exploration around a known incumbent
    (its objective is measured fresh unless supplied), as used when a finished
    campaign is continued by hand.
    """
    if normalize is None:
        normalize = lambda v: normalize_parameters(v, specs)
    seed = int(seed)
    level_rng = np.random.default_rng((seed, _LEVEL_STREAM))
    state = TuningState()
    explore_first = None
    exploit_first = None
    n_params = len(specs)

    # Exploration: levels over the full bounds, re-centered on the incumbent.
    oa1 = config.oa_explore
    explore_cols = _stage_columns(oa1, config.explore_levels, n_params, "exploration")
    binary_col = None
    if config.binary_column == "init_mode":
        two_level = oa1.columns_with_levels(2)
        if not two_level:
            raise ValueError("init_mode binary column requested but the "
                             "exploration design has no 2-level column")
        binary_col = two_level[0]
    if initial is not None:
        state.incumbent = normalize(np.asarray(initial, dtype=float))
        state.objective = (float(initial_objective) if initial_objective is not None
                           else measure_vector(state.incumbent, 0, evaluator,
                                               config.runs_per_experiment,
                                               (seed, _INITIAL_STAGE, 0), maximize,
                                               config.response_stat))
        levels = levels_around_incumbent(state.incumbent, specs,
                                         config.explore_levels, level_rng)
    else:
        levels = initial_levels(specs, config.explore_levels, level_rng)

    iteration = 0
    while True:
        improved, responses = _run_iteration(
            oa1, levels, explore_cols, evaluator, config, (seed, 0, iteration),
            maximize, normalize, binary_col, state)
        if explore_first is None:
            explore_first = [r.response for r in responses]
        state.iteration += 1
        state.history.append(HistoryRecord("exploration", len(state.history) + 1,
                                           state.incumbent.copy(), state.objective,
                                           state.binary_level))
        iteration += 1
        if iteration == config.explore_iterations or state.stall >= config.explore_stall_limit:
            break
        levels = levels_around_incumbent(state.incumbent, specs,
                                         config.explore_levels, level_rng)

    # Exploitation: shrinking neighborhood of the incumbent.
    state.stage = "exploitation"
    state.stall = 0
    oa2 = config.oa_exploit
    exploit_cols = _stage_columns(oa2, config.exploit_levels, n_params, "exploitation")
    levels = neighborhood_levels(state.incumbent, specs, config.exploit_levels,
                                 level_rng, radius=0.1)
    iteration = 0
    while True:
        entering = state.incumbent.copy()
        improved, responses = _run_iteration(
            oa2, levels, exploit_cols, evaluator, config, (seed, 1, iteration),
            maximize, normalize, None, state)
        if exploit_first is None:
            exploit_first = [r.response for r in responses]
        state.iteration += 1
        state.history.append(HistoryRecord("exploitation", len(state.history) + 1,
                                           state.incumbent.copy(), state.objective,
                                           state.binary_level))
        iteration += 1
        if iteration == config.exploit_iterations or state.stall >= config.exploit_stall_limit:
            break
        levels = refine_levels(state.incumbent, entering, improved, iteration,
                               specs, config.exploit_levels, level_rng)

    return TuningResult(state.incumbent.copy(), state.objective, state.binary_level,
                        state.history, explore_first, exploit_first)


def robustness_metrics(explore_responses, exploit_responses, reference: float) -> RobustnessReport:
    """RMS deviation of first-iteration batch responses from a reference value."""

    def rms(responses):
        vals = np.array([r.response if isinstance(r, ExperimentResponse) else float(r)
                         for r in responses])
        if vals.size == 0:
            raise ValueError("empty response batch")
        return float(np.sqrt(np.mean((vals - reference) ** 2)))

    return RobustnessReport(rms(explore_responses), rms(exploit_responses))
