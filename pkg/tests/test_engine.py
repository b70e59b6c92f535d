import numpy as np
import pytest

from qea.engine import (
    BinarySolution,
    EngineConfig,
    StopCriteria,
    init_state,
    raise_to_multiple,
    run,
    select_attractor,
    step_generation,
)
from qea.problems import Countsat, Mmdp
from qea.problems.base import ProblemInstance
from qea.qbits import RotationPolicy


class OneMax(ProblemInstance):
    name = "onemax"

    def __init__(self, n):
        super().__init__(n)
        self.known_optimum = float(n)

    def _evaluate(self, bits):
        return bits.sum(axis=1).astype(np.float64)


def small_config(**kw):
    defaults = dict(population_size=10, group_count=2, migration_period=5,
                    rotation=RotationPolicy.canonical(),
                    stop=StopCriteria(max_generations=50))
    defaults.update(kw)
    return EngineConfig(**defaults)


class TestConfig:
    def test_population_raised_to_group_multiple(self):
        cfg = small_config(population_size=7, group_count=3)
        assert cfg.population_size == 9
        assert cfg.group_size == 3

    def test_raise_to_multiple(self):
        assert raise_to_multiple(7, 3) == 9
        assert raise_to_multiple(9, 3) == 9
        assert raise_to_multiple(1, 4) == 4

    def test_requires_stop(self):
        with pytest.raises(ValueError):
            EngineConfig(10, 2, 5, RotationPolicy.canonical())

    def test_stop_criteria_need_a_budget(self):
        with pytest.raises(ValueError):
            StopCriteria()

    def test_sense_mismatch_rejected(self):
        cfg = small_config(rotation=RotationPolicy.canonical(maximize=False))
        with pytest.raises(ValueError):
            run(OneMax(4), cfg, 0)


class TestAttractor:
    def test_global_on_migration_generations(self):
        cfg = small_config(population_size=10, group_count=2, migration_period=100)
        rng = np.random.default_rng(0)
        state = init_state(OneMax(6), cfg, rng)
        state.generation = 100
        att = select_attractor(3, state, cfg)
        assert att.objective == state.gb_obj
        assert np.array_equal(att.bits, state.gb_bits)

    def test_local_otherwise(self):
        cfg = small_config(population_size=10, group_count=2, migration_period=100)
        state = init_state(OneMax(6), cfg, np.random.default_rng(0))
        state.generation = 101
        att = select_attractor(7, state, cfg)  # individual 7 -> group 1
        assert att.objective == state.lb_obj[1]

    def test_no_migration_returns_own_best(self):
        cfg = small_config(no_migration=True)
        state = init_state(OneMax(6), cfg, np.random.default_rng(0))
        state.generation = 5  # would be a migration generation otherwise
        for i in (0, 4, 9):
            att = select_attractor(i, state, cfg)
            assert att.objective == state.ib_obj[i]

    def test_index_validation(self):
        cfg = small_config()
        state = init_state(OneMax(6), cfg, np.random.default_rng(0))
        with pytest.raises(ValueError):
            select_attractor(10, state, cfg)


class TestRun:
    def test_zero_generations_returns_initial_observation(self):
        cfg = EngineConfig(1, 1, 1, RotationPolicy.canonical(),
                           stop=StopCriteria(max_generations=0))
        rec = run(OneMax(8), cfg, 3)
        assert rec.generations == 0
        assert rec.evaluations == 1
        assert rec.best.objective == rec.best.bits.sum()

    def test_same_seed_identical_records(self):
        cfg = small_config()
        a = run(Mmdp(3), cfg, 99)
        b = run(Mmdp(3), cfg, 99)
        assert a.trace == b.trace
        assert np.array_equal(a.best.bits, b.best.bits)
        assert (a.evaluations, a.generations, a.success) == \
               (b.evaluations, b.generations, b.success)

    def test_evaluation_accounting_exact(self):
        cfg = small_config(stop=StopCriteria(max_generations=20))
        rec = run(OneMax(30), cfg, 1)
        assert rec.evaluations == cfg.population_size * (rec.generations + 1)

    def test_evaluation_budget_never_exceeded(self):
        cfg = small_config(stop=StopCriteria(max_evaluations=57))
        rec = run(OneMax(30), cfg, 1)
        assert rec.evaluations <= 57
        assert rec.evaluations == 50  # 10 initial + 4 generations of 10

    def test_trace_monotone_and_success_flag(self):
        prob = OneMax(24)
        cfg = small_config(stop=StopCriteria(max_evaluations=20000, target=24.0))
        rec = run(prob, cfg, 5)
        best = [v for _, v in rec.trace]
        assert all(b2 >= b1 for b1, b2 in zip(best, best[1:]))
        assert rec.success and rec.best.objective == 24.0

    def test_success_false_without_target(self):
        cfg = small_config(stop=StopCriteria(max_generations=5))
        assert not run(OneMax(10), cfg, 2).success

    def test_rotation_walk_drives_single_bit(self):
        # two individuals, one-bit maximization: the attractor bit 1 pulls the
        # other individual's amplitude across within ~(pi/4)/(0.01*pi) steps
        prob = OneMax(1)
        cfg = EngineConfig(2, 1, 1000, RotationPolicy.canonical(),
                           stop=StopCriteria(max_generations=200, target=1.0))
        successes = sum(run(prob, cfg, (31, i)).success for i in range(50))
        assert successes == 50

    def test_zero_angles_freeze_the_distribution(self):
        prob = OneMax(16)
        cfg = small_config(rotation=RotationPolicy((0.0,) * 8),
                           stop=StopCriteria(max_generations=40))
        rng = np.random.default_rng(17)
        state = init_state(prob, cfg, rng)
        alpha0 = state.alpha.copy()
        for _ in range(40):
            step_generation(state, prob, cfg, rng)
        assert np.array_equal(np.abs(state.alpha), np.abs(alpha0))

    def test_zero_angles_match_pure_random_sampling(self):
        # with all angles zero the run is pure uniform sampling, so the
        # best-of-run distribution must match a direct sampler statistically
        prob = OneMax(12)
        budget = 600
        cfg = EngineConfig(10, 1, 100, RotationPolicy((0.0,) * 8),
                           stop=StopCriteria(max_evaluations=budget))
        engine_best = [run(prob, cfg, (401, i)).best_objective for i in range(80)]
        rng = np.random.default_rng(77)
        direct_best = [rng.integers(0, 2, (budget, 12)).sum(axis=1).max()
                       for _ in range(80)]
        assert abs(np.mean(engine_best) - np.mean(direct_best)) < 0.25

    def test_group_partition_static_and_groups_isolated(self):
        # with no migration ever (huge period), one group cannot see another's
        # best: per-group bests only improve from their own individuals
        prob = OneMax(10)
        cfg = EngineConfig(8, 4, 10_000, RotationPolicy.canonical(),
                           stop=StopCriteria(max_generations=30))
        rng = np.random.default_rng(23)
        state = init_state(prob, cfg, rng)
        for _ in range(30):
            prev_lb = state.lb_obj.copy()
            step_generation(state, prob, cfg, rng)
            assert np.all(state.lb_obj >= prev_lb)

    def test_self_attraction_keeps_global_best(self):
        prob = OneMax(6)
        cfg = small_config(stop=StopCriteria(max_generations=3))
        rng = np.random.default_rng(2)
        state = init_state(prob, cfg, rng)
        gb = state.gb_obj
        step_generation(state, prob, cfg, rng)
        assert state.gb_obj >= gb


class TestPaperScaleBehavior:
    def test_tuned_parameters_solve_mmdp_quickly(self):
        policy = RotationPolicy.from_pi_multiples(
            (0.000147, 0.0282, 0.205, 0.0485, 0.002, 0.0205, 0.035, 0.033))
        cfg = EngineConfig(28, 4, 6, policy,
                           stop=StopCriteria(max_evaluations=50_000, target=20.0))
        recs = [run(Mmdp(20), cfg, (12, i)) for i in range(10)]
        assert sum(r.success for r in recs) >= 9
        assert np.mean([r.evaluations for r in recs]) < 2000

    def test_countsat_tuned_reaches_optimum(self):
        prob = Countsat(20)
        policy = RotationPolicy.from_pi_multiples(
            (0.000147, 0.0282, 0.205, 0.0485, 0.002, 0.0205, 0.035, 0.033))
        cfg = EngineConfig(28, 4, 6, policy,
                           stop=StopCriteria(max_evaluations=50_000,
                                             target=prob.known_optimum))
        recs = [run(prob, cfg, (13, i)) for i in range(10)]
        assert sum(r.success for r in recs) >= 8

    @pytest.mark.xfail(reason="the printed algorithm stalls on the deceptive "
                              "plateau one bit above all-zeros with the default "
                              "parameters; the comparison tables' untuned column "
                              "is not reproducible from the stated update rules",
                       strict=True)
    def test_countsat_default_parameters_reach_optimum(self):
        prob = Countsat(20)
        cfg = EngineConfig(50, 10, 100, RotationPolicy.canonical(),
                           stop=StopCriteria(max_evaluations=50_000,
                                             target=prob.known_optimum))
        recs = [run(prob, cfg, (14, i)) for i in range(10)]
        assert sum(r.success for r in recs) >= 8
