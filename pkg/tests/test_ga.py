"""Tests for the genetic algorithm: encoding, operators and the engine."""

import numpy as np
import pytest

from milling_ga.constants import SUCCESS_TOLERANCE
from milling_ga.cutting_model import CuttingModel
from milling_ga.ga import (
    GeneticAlgorithm,
    GenomeLayout,
    best_run,
    decode_batch,
    decode_genome,
    decode_index,
    decode_real,
    elitist_replace,
    index_bits_for,
    mutate,
    random_genomes,
    tournament_select,
    two_point_crossover,
)
from milling_ga.lookup import enumerate_pairs
from milling_ga.models import (
    GaConfig,
    Individual,
    InvalidInputError,
    Plan,
    Population,
    ProblemData,
    RunResult,
)


def _bits(value: int, width: int) -> list[int]:
    return [int(c) for c in format(value, f"0{width}b")]


def _population(unit_cost: list[float], cv: list[float]) -> Population:
    size = len(unit_cost)
    genomes = np.arange(size, dtype=np.uint8)[:, None] * np.ones((1, 4), dtype=np.uint8)
    return Population(genomes, np.array(unit_cost, float), np.array(cv, float))


class TestDecoding:
    """Tests for decode_real, decode_index and decode_genome."""

    def test_decode_real_midrange(self) -> None:
        assert decode_real(_bits(16383, 15), 50.0, 300.0) == pytest.approx(174.996, abs=1e-3)

    def test_decode_real_extremes(self) -> None:
        assert decode_real([0] * 15, 50.0, 300.0) == 50.0
        assert decode_real([1] * 15, 50.0, 300.0) == 300.0

    def test_decode_index_scaled_rounding(self) -> None:
        assert decode_index(_bits(16, 5), 9) == 5

    def test_decode_index_covers_table(self) -> None:
        assert decode_index([0] * 4, 9) == 1
        assert decode_index([1] * 4, 9) == 9
        values = {decode_index(_bits(v, 4), 9) for v in range(16)}
        assert values == set(range(1, 10))

    def test_index_bits(self) -> None:
        assert index_bits_for(9) == 4
        assert index_bits_for(20) == 5
        assert index_bits_for(1) == 1
        assert index_bits_for(9, override=6) == 6

    def test_all_ones_genome(self, coarse_problem: ProblemData) -> None:
        """Test that the all-ones genome decodes to every upper bound and the last pair."""
        table = enumerate_pairs(6.0, coarse_problem)
        plan = decode_genome(np.ones(64, dtype=np.uint8), table, coarse_problem)
        assert plan.V_s == 300.0
        assert plan.V_r == 300.0
        assert plan.f_s == pytest.approx(0.2790728, rel=1e-6)
        assert plan.f_r == 0.6
        assert (plan.d_s, plan.d_r, plan.n) == (2.0, 4.0, 1)

    def test_layout_length(self, problem: ProblemData) -> None:
        table = enumerate_pairs(6.0, problem)
        layout = GenomeLayout.build(problem, table, GaConfig())
        assert layout.index_bits == 5
        assert layout.length == 65

    def test_random_genomes_decode_within_bounds(self, problem: ProblemData) -> None:
        table = enumerate_pairs(11.5, problem)
        layout = GenomeLayout.build(problem, table, GaConfig())
        genomes = random_genomes(2000, layout.length, np.random.default_rng(21))
        batch = decode_batch(genomes, layout, table)
        for name in ("V_s", "f_s", "V_r", "f_r"):
            lb, ub = getattr(layout, name)
            values = getattr(batch, name)
            assert np.all((values >= lb) & (values <= ub)), name
        assert layout.f_s[1] <= problem.f_s_max
        assert layout.f_r[1] <= problem.f_r_max
        assert np.all((batch.index >= 1) & (batch.index <= len(table)))
        assert np.allclose(batch.d_s + batch.n * batch.d_r, 11.5)

    def test_wrong_genome_length(self, coarse_problem: ProblemData) -> None:
        table = enumerate_pairs(6.0, coarse_problem)
        with pytest.raises(ValueError):
            decode_genome(np.ones(63, dtype=np.uint8), table, coarse_problem)


class TestOperators:
    """Tests for selection, crossover, mutation and replacement."""

    def test_two_point_crossover_swaps_middle(self) -> None:
        rng = np.random.default_rng(0)
        child_a, child_b = two_point_crossover([0] * 8, [1] * 8, 1.0, rng, cuts=(2, 5))
        assert child_a.tolist() == [0, 0, 1, 1, 1, 0, 0, 0]
        assert child_b.tolist() == [1, 1, 0, 0, 0, 1, 1, 1]

    def test_crossover_skipped(self) -> None:
        rng = np.random.default_rng(0)
        child_a, child_b = two_point_crossover([0] * 8, [1] * 8, 0.0, rng)
        assert child_a.tolist() == [0] * 8
        assert child_b.tolist() == [1] * 8

    def test_crossover_preserves_bit_counts(self) -> None:
        rng = np.random.default_rng(3)
        a = rng.integers(0, 2, 30)
        b = rng.integers(0, 2, 30)
        child_a, child_b = two_point_crossover(a, b, 1.0, rng)
        assert (child_a + child_b).tolist() == (a + b).tolist()

    def test_mutation_extremes(self) -> None:
        rng = np.random.default_rng(0)
        genome = np.array([0, 1, 0, 1], dtype=np.uint8)
        assert mutate(genome, 0.0, rng).tolist() == [0, 1, 0, 1]
        assert mutate(genome, 1.0, rng).tolist() == [1, 0, 1, 0]

    def test_mutation_rate(self) -> None:
        rng = np.random.default_rng(11)
        flipped = mutate(np.zeros(100_000, dtype=np.uint8), 0.05, rng).mean()
        assert flipped == pytest.approx(0.05, abs=0.005)

    def test_tournament_prefers_feasible(self) -> None:
        """Test that a feasible member beats an infeasible one whatever its cost."""
        population = _population([5.0, 1.0], [0.0, 0.3])
        winners = tournament_select(population, np.random.default_rng(0))
        assert winners.size == 2
        assert np.all(winners.cv == 0.0)
        assert np.all(winners.unit_cost == 5.0)

    def test_tournament_every_member_competes_twice(self) -> None:
        costs = [float(c) for c in range(40)]
        population = _population(costs, [0.0] * 40)
        winners = tournament_select(population, np.random.default_rng(5))
        counts = np.bincount(winners.unit_cost.astype(int), minlength=40)
        assert winners.size == 40
        assert counts[0] == 2
        assert counts[39] == 0
        assert np.all(counts <= 2)

    def test_tournament_does_not_keep_rank_order(self) -> None:
        """Test that a ranked population is not paired top half against bottom half."""
        population = _population([float(c) for c in range(40)], [0.0] * 40)
        winners = tournament_select(population, np.random.default_rng(5))
        assert winners.unit_cost[:20].tolist() != [float(c) for c in range(20)]

    def test_tournament_compares_violation(self) -> None:
        population = _population([1.0, 2.0], [0.5, 0.1])
        winners = tournament_select(population, np.random.default_rng(0))
        assert np.all(winners.cv == 0.1)

    def test_elitist_replace_keeps_cheapest_feasible(self) -> None:
        original = _population([3.0, 2.0, 9.0, 9.0], [0.0, 0.0, 0.4, 0.2])
        offspring = _population([1.0, 4.0, 0.5, 8.0], [0.0, 0.0, 0.1, 0.0])
        survivors = elitist_replace(original, offspring)
        assert survivors.size == 4
        assert survivors.unit_cost.tolist() == [1.0, 2.0, 3.0, 4.0]
        assert np.all(survivors.feasible)

    def test_elitist_replace_fills_with_least_violating(self) -> None:
        original = _population([3.0, 2.0], [0.0, 0.4])
        offspring = _population([1.0, 4.0], [0.3, 0.2])
        survivors = elitist_replace(original, offspring)
        assert survivors.cv.tolist() == [0.0, 0.2]


class TestGeneticAlgorithm:
    """Tests for the GA engine."""

    def test_initial_bit_mean(self, problem: ProblemData) -> None:
        """Test that initial bits are fair coin flips (mean within a 3-sigma band of 0.5)."""
        engine = GeneticAlgorithm(problem, GaConfig(population=1000))
        table = enumerate_pairs(6.0, problem)
        layout = GenomeLayout.build(problem, table, engine.config)
        population = engine.initialize(table, layout, np.random.default_rng(3))
        bits = population.genomes.size
        assert population.genomes.shape == (1000, 65)
        assert abs(population.genomes.mean() - 0.5) <= 3 * 0.5 / np.sqrt(bits)

    def test_invalid_config_rejected(self, problem: ProblemData) -> None:
        with pytest.raises(InvalidInputError) as exc:
            GeneticAlgorithm(problem, GaConfig(population=15))
        assert exc.value.field == "population"

    def test_same_seed_same_trace(self, problem: ProblemData, small_ga_config: GaConfig) -> None:
        model = CuttingModel(problem, log_findings=False)
        first = GeneticAlgorithm(problem, small_ga_config, model=model).run(6.0)
        second = GeneticAlgorithm(problem, small_ga_config, model=model).run(6.0)
        assert first.best.bitstring == second.best.bitstring
        assert [s.best for s in first.history] == [s.best for s in second.history]
        assert [s.average for s in first.history] == [s.average for s in second.history]

    def test_history_and_evaluations(self, problem: ProblemData, small_ga_config: GaConfig) -> None:
        result = GeneticAlgorithm(problem, small_ga_config).run(6.0)
        assert len(result.history) == small_ga_config.generations + 1
        assert result.history[0].generation == 0
        assert result.evaluations == small_ga_config.population * (small_ga_config.generations + 1)
        assert result.seed == small_ga_config.seed

    def test_best_never_gets_worse(self, problem: ProblemData, small_ga_config: GaConfig) -> None:
        result = GeneticAlgorithm(problem, small_ga_config).run(8.0)
        feasible = [s.best for s in result.history if s.best_cv == 0.0]
        assert feasible == sorted(feasible, reverse=True)
        cvs = [s.best_cv for s in result.history]
        first_feasible = next((i for i, cv in enumerate(cvs) if cv == 0.0), len(cvs))
        assert all(cv == 0.0 for cv in cvs[first_feasible:])

    def test_best_plan_matches_total_depth(
        self, problem: ProblemData, small_ga_config: GaConfig
    ) -> None:
        result = GeneticAlgorithm(problem, small_ga_config).run(11.5)
        assert result.best.plan.total_depth == pytest.approx(11.5)
        model = CuttingModel(problem, log_findings=False)
        assert result.best.unit_cost == pytest.approx(model.unit_cost(result.best.plan))

    def test_zero_generations(self, problem: ProblemData) -> None:
        result = GeneticAlgorithm(problem, GaConfig(population=10, generations=0)).run(6.0)
        assert len(result.history) == 1
        assert result.evaluations == 10

    def test_reaches_global_optimum(self, problem: ProblemData) -> None:
        """Test that default-size runs at d_t = 6 mm land on the oracle optimum."""
        model = CuttingModel(problem, log_findings=False)
        engine = GeneticAlgorithm(problem, GaConfig(), model=model)
        target = 1.410545
        hits = 0
        for seed in range(20):
            best = engine.run(6.0, seed=seed).best
            if best.feasible and (best.unit_cost - target) / target <= SUCCESS_TOLERANCE:
                hits += 1
                assert (best.plan.d_s, best.plan.d_r, best.plan.n) == (2.0, 4.0, 1)
                assert best.plan.V_r == pytest.approx(60.1, abs=1.0)
        assert hits >= 19


def _result(seed: int, unit_cost: float, cv: float) -> RunResult:
    plan = Plan(100.0, 0.2, 2.0, 60.0, 0.3, 4.0, 1)
    best = Individual(np.zeros(4, dtype=np.uint8), plan, unit_cost, cv, pair_index=1)
    return RunResult(d_t=6.0, seed=seed, best=best)


class TestBestRun:
    """Tests for best_run."""

    def test_feasible_cheapest_wins(self) -> None:
        results = [_result(0, 1.2, 0.0), _result(1, 0.9, 0.2), _result(2, 1.1, 0.0)]
        assert best_run(results).seed == 2

    def test_least_violation_when_none_feasible(self) -> None:
        results = [_result(0, 1.0, 0.4), _result(1, 2.0, 0.1)]
        assert best_run(results).seed == 1

    def test_tie_keeps_earlier_run(self) -> None:
        results = [_result(0, 1.0, 0.0), _result(1, 1.0, 0.0)]
        assert best_run(results).seed == 0

    def test_empty(self) -> None:
        with pytest.raises(ValueError):
            best_run([])
