"""Command-line front end: instance generation, runs, tuning and comparisons.

Subcommands: run, tune, compare, gen, validate-oa.  Every command that uses
randomness requires an explicit --seed; outputs are byte-identical for
identical invocations.
"""
from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import doe, harness, params, tuner
from .engine import StopCriteria
from .problems import (
    GENERATOR_CLASSES,
    Countsat,
    Knapsack,
    Mmdp,
    PPeaks,
    brute_force_optimum,
    gen_knapsack,
    gen_ppeaks,
    load_knapsack,
    load_ppeaks,
    save_knapsack,
    save_ppeaks,
)


def _add_problem_args(p: argparse.ArgumentParser, multi: bool = True):
    nargs = "+" if multi else None
    p.add_argument("--problem", required=True,
                   choices=("mmdp", "countsat", "ppeaks", "knapsack"))
    p.add_argument("--blocks", type=int, nargs=nargs, help="mmdp: 6-bit block count(s)")
    p.add_argument("--bits", type=int, nargs=nargs, help="countsat/ppeaks: bit count(s)")
    p.add_argument("--peaks", type=int, nargs=nargs, help="ppeaks: peak count(s)")
    p.add_argument("--instance", nargs=nargs, help="instance file(s) (ppeaks/knapsack)")
    p.add_argument("--class", dest="gen_class", nargs=nargs, choices=GENERATOR_CLASSES,
                   help="knapsack: generator class(es)")
    p.add_argument("--items", type=int, help="knapsack: item count")
    p.add_argument("--fraction", type=float, help="knapsack: capacity fraction of total weight")
    p.add_argument("--instance-seed", type=int, help="seed for generated instances")
    p.add_argument("--brute-optimum", action="store_true",
                   help="knapsack: compute the exact optimum (n <= 24) for success stats")


def _listify(v):
    if v is None:
        return None
    return v if isinstance(v, list) else [v]


def _build_problems(args) -> list:
    """Problem instances selected by the CLI flags."""
    problems = []
    if args.problem == "mmdp":
        for k in _listify(args.blocks) or _fail("--blocks is required for mmdp"):
            problems.append(Mmdp(k))
    elif args.problem == "countsat":
        for n in _listify(args.bits) or _fail("--bits is required for countsat"):
            problems.append(Countsat(n))
    elif args.problem == "ppeaks":
        if args.instance:
            for path in _listify(args.instance):
                problems.append(PPeaks(load_ppeaks(path)))
        else:
            if not (args.peaks and args.bits):
                _fail("ppeaks needs --instance or --peaks and --bits")
            if args.instance_seed is None:
                _fail("--instance-seed is required when generating instances")
            n = _listify(args.bits)[0]
            for p in _listify(args.peaks):
                problems.append(PPeaks(gen_ppeaks(p, n, args.instance_seed)))
    else:
        if args.instance:
            for path in _listify(args.instance):
                inst = load_knapsack(path)
                opt = brute_force_optimum(inst)[0] if args.brute_optimum else None
                problems.append(Knapsack(inst, optimum=opt))
        else:
            if not (args.gen_class and args.items and args.fraction):
                _fail("knapsack needs --instance or --class, --items and --fraction")
            if args.instance_seed is None:
                _fail("--instance-seed is required when generating instances")
            for cls in _listify(args.gen_class):
                inst = gen_knapsack(cls, args.items, args.fraction, args.instance_seed)
                opt = brute_force_optimum(inst)[0] if args.brute_optimum else None
                problems.append(Knapsack(inst, optimum=opt))
    return problems


def _fail(message: str):
    raise SystemExit(f"error: {message}")


def _stop_criteria(args, problem) -> StopCriteria:
    target = None
    if not args.no_target:
        target = args.target if args.target is not None else problem.known_optimum
    if args.max_evals is None and args.max_gens is None:
        _fail("need --max-evals and/or --max-gens")
    return StopCriteria(max_evaluations=args.max_evals,
                        max_generations=args.max_gens, target=target)


def _add_budget_args(p):
    p.add_argument("--max-evals", type=int, help="evaluation budget per run")
    p.add_argument("--max-gens", type=int, help="generation budget per run")
    p.add_argument("--target", type=float,
                   help="stop when this objective is reached (default: known optimum)")
    p.add_argument("--no-target", action="store_true",
                   help="never stop early on reaching the optimum")


def _load_params(spec: str):
    try:
        return params.load_parameters(spec)
    except OSError:
        _fail(f"cannot read parameter set {spec!r} "
              f"(named sets: {', '.join(sorted(params.PARAMETER_SETS))})")


def _run_param_set(problem, values, init_mode, args, label):
    stop = _stop_criteria(args, problem)
    init = args.init or init_mode
    config = params.engine_config_from_parameters(
        values, stop, problem.maximize, init, args.no_migration)
    records = harness.run_matrix(problem, config, args.runs, args.seed, args.workers)
    stats = harness.aggregate(records, problem.known_optimum, problem.maximize)
    return records, harness.summary_row(problem.name, label, stats)


def cmd_run(args):
    os.makedirs(args.out, exist_ok=True)
    values, init_mode = _load_params(args.params)
    rows = []
    for problem in _build_problems(args):
        records, row = _run_param_set(problem, values, init_mode, args, args.label)
        rows.append(row)
        if args.traces:
            for i, rec in enumerate(records):
                harness.write_trace_csv(
                    os.path.join(args.out, f"trace-{problem.name}-{i}.csv"),
                    rec, args.full_traces)
    path = os.path.join(args.out, "summary.csv")
    harness.write_summary_csv(path, rows)
    for row in rows:
        print(f"{row['problem']} [{row['algo']}] best={harness.fmt(row['best'])} "
              f"success={row['success_pct']:.1f}% avg_nfe={row['avg_nfe']:.1f}")
    print(f"wrote {path}")
    return 0


def cmd_compare(args):
    os.makedirs(args.out, exist_ok=True)
    values_a, init_a = _load_params(args.params_a)
    values_b, init_b = _load_params(args.params_b)
    rows = []
    for problem in _build_problems(args):
        _, row_a = _run_param_set(problem, values_a, init_a, args, args.label_a)
        _, row_b = _run_param_set(problem, values_b, init_b, args, args.label_b)
        rows.extend((row_a, row_b))
    path = os.path.join(args.out, "summary.csv")
    harness.write_summary_csv(path, rows)
    for row in rows:
        print(f"{row['problem']} [{row['algo']}] best={harness.fmt(row['best'])} "
              f"worst={harness.fmt(row['worst'])} success={row['success_pct']:.1f}% "
              f"avg_nfe={row['avg_nfe']:.1f}")
    print(f"wrote {path}")
    return 0


def cmd_tune(args):
    os.makedirs(args.out, exist_ok=True)
    problems = _build_problems(args)
    if len(problems) != 1:
        _fail("tune expects exactly one problem instance")
    problem = problems[0]
    specs = params.SPEC_PRESETS[args.spec_preset or
                                ("narrow" if args.problem == "knapsack" else "wide")]
    stop = _stop_criteria(args, problem)
    evaluator = params.make_qea_evaluator(
        problem, stop, binary_controls_init=args.binary == "init-mode")
    config = tuner.TunerConfig(
        explore_iterations=args.explore_iters,
        exploit_iterations=args.exploit_iters,
        explore_stall_limit=args.explore_stall,
        exploit_stall_limit=args.exploit_stall,
        runs_per_experiment=args.runs_per_experiment,
        response_stat=args.response_stat,
        binary_column="init_mode" if args.binary == "init-mode" else "dummy",
    )
    initial = None
    if args.pivot:
        initial, _ = _load_params(args.pivot)
    result = tuner.tune(evaluator, specs, config, args.seed, problem.maximize,
                        initial=initial, normalize=params.qea_normalizer(specs))

    for rec in result.history:
        print(f"{rec.stage}-{rec.index}: objective={harness.fmt(rec.objective)} "
              f"values=[{', '.join(harness.fmt(v) for v in rec.values)}]")
    history_path = os.path.join(args.out, "history.csv")
    harness.write_history_csv(history_path, result.history, params.PARAM_NAMES)
    params_path = os.path.join(args.out, "tuned.params")
    params.save_parameters(params_path, result.values,
                           "random" if result.binary_level else "equal")
    reference = problem.known_optimum
    if reference is not None:
        rob = tuner.robustness_metrics(result.explore_first_responses,
                                       result.exploit_first_responses, reference)
        print(f"deviation from optimum, wide parameter variation: "
              f"{harness.fmt(rob.large_variation)}")
        print(f"deviation from optimum, narrow parameter variation: "
              f"{harness.fmt(rob.small_variation)}")
    print(f"final objective: {harness.fmt(result.objective)}")
    print(f"wrote {history_path} and {params_path}")
    return 0


def cmd_gen(args):
    if args.problem == "knapsack":
        if not (args.gen_class and args.items and args.fraction):
            _fail("gen knapsack needs --class, --items and --fraction")
        inst = gen_knapsack(args.gen_class, args.items, args.fraction, args.seed)
        save_knapsack(inst, args.out)
    elif args.problem == "ppeaks":
        if not (args.peaks and args.bits):
            _fail("gen ppeaks needs --peaks and --bits")
        inst = gen_ppeaks(args.peaks, args.bits, args.seed)
        save_ppeaks(inst, args.out)
    else:
        _fail("gen supports knapsack and ppeaks (mmdp/countsat need no instance files)")
    print(f"wrote {args.out}")
    return 0


def cmd_validate_oa(args):
    if args.file:
        oa = doe.load_oa(args.file)
        label = args.file
    else:
        oa = doe.builtin_l27() if args.array == "l27" else doe.builtin_l50()
        label = args.array
    report = doe.validate_strength2(oa)
    print(f"{label}: {report.summary()}")
    return 0 if report.ok else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qea", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one parameter set over a problem list")
    _add_problem_args(p_run)
    _add_budget_args(p_run)
    p_run.add_argument("--params", default="canonical",
                       help="named parameter set or parameter file")
    p_run.add_argument("--label", default="qea", help="algorithm label in the summary")
    p_run.add_argument("--runs", type=int, default=30)
    p_run.add_argument("--seed", type=int, required=True)
    p_run.add_argument("--out", default=".")
    p_run.add_argument("--workers", type=int, default=1)
    p_run.add_argument("--init", choices=("equal", "random"))
    p_run.add_argument("--no-migration", action="store_true")
    p_run.add_argument("--traces", action="store_true", help="write per-run convergence traces")
    p_run.add_argument("--full-traces", action="store_true",
                       help="no trace subsampling beyond 10^4 generations")
    p_run.set_defaults(func=cmd_run)

    p_cmp = sub.add_parser("compare", help="run two parameter sets side by side")
    _add_problem_args(p_cmp)
    _add_budget_args(p_cmp)
    p_cmp.add_argument("--params-a", default="canonical")
    p_cmp.add_argument("--params-b", required=True)
    p_cmp.add_argument("--label-a", default="untuned")
    p_cmp.add_argument("--label-b", default="tuned")
    p_cmp.add_argument("--runs", type=int, default=30)
    p_cmp.add_argument("--seed", type=int, required=True)
    p_cmp.add_argument("--out", default=".")
    p_cmp.add_argument("--workers", type=int, default=1)
    p_cmp.add_argument("--init", choices=("equal", "random"))
    p_cmp.add_argument("--no-migration", action="store_true")
    p_cmp.set_defaults(func=cmd_compare)

    p_tune = sub.add_parser("tune", help="run a two-stage tuning campaign")
    _add_problem_args(p_tune, multi=False)
    _add_budget_args(p_tune)
    p_tune.add_argument("--seed", type=int, required=True)
    p_tune.add_argument("--out", default=".")
    p_tune.add_argument("--spec-preset", choices=tuple(params.SPEC_PRESETS))
    p_tune.add_argument("--explore-iters", type=int, default=3)
    p_tune.add_argument("--exploit-iters", type=int, default=3)
    p_tune.add_argument("--explore-stall", type=int, default=2)
    p_tune.add_argument("--exploit-stall", type=int, default=2)
    p_tune.add_argument("--runs-per-experiment", type=int, default=30)
    p_tune.add_argument("--response-stat", choices=("best", "mean"), default="best")
    p_tune.add_argument("--binary", choices=("dummy", "init-mode"), default="dummy",
                        help="role of the exploration design's 2-level column")
    p_tune.add_argument("--pivot", help="parameter set to re-enter exploration around")
    p_tune.set_defaults(func=cmd_tune)

    p_gen = sub.add_parser("gen", help="write a problem instance file")
    p_gen.add_argument("--problem", required=True, choices=("knapsack", "ppeaks"))
    p_gen.add_argument("--class", dest="gen_class", choices=GENERATOR_CLASSES)
    p_gen.add_argument("--items", type=int)
    p_gen.add_argument("--fraction", type=float)
    p_gen.add_argument("--peaks", type=int)
    p_gen.add_argument("--bits", type=int)
    p_gen.add_argument("--seed", type=int, required=True)
    p_gen.add_argument("--out", required=True)
    p_gen.set_defaults(func=cmd_gen)

    p_val = sub.add_parser("validate-oa", help="strength-2 pair-balance report")
    p_val.add_argument("--array", choices=("l27", "l50"))
    p_val.add_argument("--file")
    p_val.set_defaults(func=cmd_validate_oa)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "validate-oa" and not (args.array or args.file):
        parser.error("validate-oa needs --array or --file")
    try:
        return args.func(args)
    except SystemExit:
        raise
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
