"""Run matrices, comparison statistics and reproducible CSV emission.

Every float written to disk uses 17 significant digits so files round-trip
bit-exactly; nothing time- or host-dependent is ever written, which makes
output files byte-identical across repeat invocations with the same seed.
"""
from __future__ import annotations

import csv
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .engine import EngineConfig, RunRecord, run
from .problems.base import ProblemInstance


def fmt(value) -> str:
    """Render a number for CSV: ints verbatim, floats with 17 significant digits."""
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    v = float(value)
    if v.is_integer() and abs(v) < 1e16:
        return str(int(v))
    return f"{v:.17g}"


@dataclass
class StatsSummary:
    """Order statistics of per-run best objectives plus success/effort columns."""

    best: float
    worst: float
    mean: float
    median: float
    std: float
    success_pct: float
    avg_evaluations: float
    avg_generations: float
    runs: int


def _reached(objective: float, optimum: float, maximize: bool) -> bool:
    if float(optimum).is_integer() and float(objective).is_integer():
        return objective >= optimum if maximize else objective <= optimum
    tol = 1e-9 * max(1.0, abs(optimum))
    return objective >= optimum - tol if maximize else objective <= optimum + tol


def aggregate(records, optimum=None, maximize: bool = True) -> StatsSummary:
    """Summarize a list of run records; success means the optimum was reached."""
    if not records:
        raise ValueError("need at least one run record")
    objs = np.array([r.best_objective for r in records])
    if optimum is None:
        success = 100.0 * np.mean([r.success for r in records])
    else:
        success = 100.0 * np.mean([_reached(o, optimum, maximize) for o in objs])
    return StatsSummary(
        best=float(objs.max() if maximize else objs.min()),
        worst=float(objs.min() if maximize else objs.max()),
        mean=float(objs.mean()),
        median=float(np.median(objs)),
        std=float(objs.std(ddof=1)) if len(objs) > 1 else 0.0,
        success_pct=float(success),
        avg_evaluations=float(np.mean([r.evaluations for r in records])),
        avg_generations=float(np.mean([r.generations for r in records])),
        runs=len(records),
    )


def _run_cell(args):
    problem, config, seed = args
    return run(problem, config, seed)


def run_matrix(problem: ProblemInstance, config: EngineConfig, runs: int,
               master_seed: int, workers: int = 1) -> list:
    """`runs` independent runs seeded by (master_seed, run index).

    Results do not depend on scheduling: each run's stream is fully determined
    by its index, and records are collected in index order.
    """
    if runs < 1:
        raise ValueError("need at least one run")
    jobs = [(problem, config, (int(master_seed), i)) for i in range(runs)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_run_cell, jobs))
    return [_run_cell(j) for j in jobs]


SUMMARY_COLUMNS = ("problem", "algo", "best", "worst", "average", "median",
                   "std", "success_pct", "avg_nfe", "avg_generations")


def summary_row(problem_name: str, algo: str, stats: StatsSummary) -> dict:
    return {
        "problem": problem_name,
        "algo": algo,
        "best": stats.best,
        "worst": stats.worst,
        "average": stats.mean,
        "median": stats.median,
        "std": stats.std,
        "success_pct": stats.success_pct,
        "avg_nfe": stats.avg_evaluations,
        "avg_generations": stats.avg_generations,
    }


def write_summary_csv(path, rows) -> None:
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(SUMMARY_COLUMNS)
        for row in rows:
            writer.writerow([row[c] if c in ("problem", "algo") else fmt(row[c])
                             for c in SUMMARY_COLUMNS])


def write_trace_csv(path, record: RunRecord, full_resolution: bool = False) -> None:
    """Convergence trace (generation, best-so-far); beyond 10^4 generations
    only every 10th row is kept unless full resolution is requested."""
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(("generation", "best"))
        for gen, best in record.trace:
            if not full_resolution and gen > 10_000 and gen % 10 != 0:
                continue
            writer.writerow((gen, fmt(best)))


def write_history_csv(path, history, param_names) -> None:
    """Tuning history: one row per iteration with the incumbent vector."""
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(("stage", "iteration", *param_names, "init_mode", "objective"))
        for rec in history:
            writer.writerow((rec.stage, rec.index,
                             *(fmt(v) for v in rec.values),
                             "random" if rec.binary_level else "equal",
                             fmt(rec.objective)))
