"""Elitist binary-coded genetic algorithm over (V_s, f_s, V_r, f_r, table index).

Constraints are handled by feasibility dominance: feasible members always beat
infeasible ones, feasible members compare on unit cost, infeasible members on
constraint violation. One seeded numpy Generator drives a run and is consumed
in a fixed order (initialization, then per generation: tournament shuffles,
crossover, mutation), so a seed fixes the whole trace.
"""

import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt

from .cutting_model import CuttingModel, feed_upper_bound
from .lookup import enumerate_pairs, pair_at
from .models import (
    GaConfig,
    GenerationStats,
    Individual,
    PairTable,
    PassKind,
    Plan,
    Population,
    ProblemData,
    RunResult,
)

logger = logging.getLogger("milling-ga")

Genomes = npt.NDArray[np.uint8]


# ==================== Encoding ====================


def _block_value(bits: npt.ArrayLike) -> npt.NDArray[np.int64]:
    """Unsigned value of each bit block (most significant bit first)."""
    block = np.asarray(bits, dtype=np.int64)
    weights = 1 << np.arange(block.shape[-1] - 1, -1, -1, dtype=np.int64)
    return np.asarray(block @ weights)


def decode_real(bits: npt.ArrayLike, lb: float, ub: float) -> float | npt.NDArray[np.float64]:
    """Map a bit block linearly onto [lb, ub]; all zeros give lb and all ones give ub."""
    block = np.asarray(bits)
    levels = (1 << block.shape[-1]) - 1
    value = np.clip(lb + _block_value(block) * (ub - lb) / levels, lb, ub)
    return float(value) if value.ndim == 0 else value


def decode_index(bits: npt.ArrayLike, table_size: int) -> int | npt.NDArray[np.int64]:
    """Map a bit block onto a 1-based table position with scaled rounding."""
    block = np.asarray(bits)
    levels = (1 << block.shape[-1]) - 1
    index = 1 + np.floor(_block_value(block) * (table_size - 1) / levels + 0.5).astype(np.int64)
    return int(index) if index.ndim == 0 else index


def index_bits_for(table_size: int, override: int | None = None) -> int:
    """Bits for the table-index block: ceil(log2(size)), at least one."""
    if override is not None:
        return override
    return max(1, math.ceil(math.log2(table_size)))


@dataclass(frozen=True)
class GenomeLayout:
    """Block widths and decoding bounds of a genome for one lookup table."""

    bits: int
    index_bits: int
    V_s: tuple[float, float]
    f_s: tuple[float, float]
    V_r: tuple[float, float]
    f_r: tuple[float, float]

    @property
    def length(self) -> int:
        return 4 * self.bits + self.index_bits

    @classmethod
    def build(cls, problem: ProblemData, table: PairTable, config: GaConfig) -> "GenomeLayout":
        f_s_min, _ = problem.feed_bounds(PassKind.FINISH)
        f_r_min, _ = problem.feed_bounds(PassKind.ROUGH)
        return cls(
            bits=config.bits,
            index_bits=index_bits_for(len(table), config.index_bits),
            V_s=problem.speed_bounds(PassKind.FINISH),
            f_s=(f_s_min, feed_upper_bound(problem, PassKind.FINISH)),
            V_r=problem.speed_bounds(PassKind.ROUGH),
            f_r=(f_r_min, feed_upper_bound(problem, PassKind.ROUGH)),
        )


@dataclass(frozen=True)
class DecodedBatch:
    """Decoded decision variables of a batch of genomes, one entry per genome."""

    V_s: npt.NDArray[np.float64]
    f_s: npt.NDArray[np.float64]
    V_r: npt.NDArray[np.float64]
    f_r: npt.NDArray[np.float64]
    index: npt.NDArray[np.int64]
    d_s: npt.NDArray[np.float64]
    d_r: npt.NDArray[np.float64]
    n: npt.NDArray[np.int64]

    def plan(self, row: int) -> Plan:
        return Plan(
            V_s=float(self.V_s[row]),
            f_s=float(self.f_s[row]),
            d_s=float(self.d_s[row]),
            V_r=float(self.V_r[row]),
            f_r=float(self.f_r[row]),
            d_r=float(self.d_r[row]),
            n=int(self.n[row]),
        )


def decode_batch(genomes: Genomes, layout: GenomeLayout, table: PairTable) -> DecodedBatch:
    genomes = np.atleast_2d(genomes)
    if genomes.shape[1] != layout.length:
        raise ValueError(f"genome length {genomes.shape[1]} does not match layout {layout.length}")
    b = layout.bits
    index = np.asarray(decode_index(genomes[:, 4 * b :], len(table)))
    d_s = np.array([e.d_s for e in table.entries])
    d_r = np.array([e.d_r for e in table.entries])
    n = np.array([e.n for e in table.entries], dtype=np.int64)
    return DecodedBatch(
        V_s=np.asarray(decode_real(genomes[:, 0:b], *layout.V_s)),
        f_s=np.asarray(decode_real(genomes[:, b : 2 * b], *layout.f_s)),
        V_r=np.asarray(decode_real(genomes[:, 2 * b : 3 * b], *layout.V_r)),
        f_r=np.asarray(decode_real(genomes[:, 3 * b : 4 * b], *layout.f_r)),
        index=index,
        d_s=d_s[index - 1],
        d_r=d_r[index - 1],
        n=n[index - 1],
    )


def decode_genome(
    genome: npt.ArrayLike,
    table: PairTable,
    problem: ProblemData,
    config: GaConfig | None = None,
) -> Plan:
    """Decode one genome into a complete Plan. Every bitstring decodes."""
    layout = GenomeLayout.build(problem, table, config or GaConfig())
    batch = decode_batch(np.asarray(genome, dtype=np.uint8), layout, table)
    entry = pair_at(table, int(batch.index[0]))
    return Plan(
        V_s=float(batch.V_s[0]),
        f_s=float(batch.f_s[0]),
        d_s=entry.d_s,
        V_r=float(batch.V_r[0]),
        f_r=float(batch.f_r[0]),
        d_r=entry.d_r,
        n=entry.n,
    )


# ==================== Operators ====================


def random_genomes(count: int, length: int, rng: np.random.Generator) -> Genomes:
    """Each bit is 0 when its uniform draw is at most 0.5, otherwise 1."""
    return (rng.random((count, length)) > 0.5).astype(np.uint8)


def _first_wins(
    uc_a: npt.NDArray[np.float64],
    cv_a: npt.NDArray[np.float64],
    uc_b: npt.NDArray[np.float64],
    cv_b: npt.NDArray[np.float64],
) -> npt.NDArray[np.bool_]:
    """Feasibility-dominance comparison; exact ties go to the first argument."""
    feasible_a = cv_a == 0.0
    feasible_b = cv_b == 0.0
    return np.where(
        feasible_a & feasible_b,
        uc_a <= uc_b,
        np.where(~feasible_a & ~feasible_b, cv_a <= cv_b, feasible_a),
    )


def tournament_select(population: Population, rng: np.random.Generator) -> Population:
    """Binary tournament in two passes of midway pairing.

    Each pass shuffles the population and pairs member i with member i + N/2,
    yielding N/2 winners, so every member competes exactly twice. Winners come
    out in shuffled order and crossover mates them as they stand.
    """
    size = population.size
    half = size // 2
    winners = []
    for order in (rng.permutation(size), rng.permutation(size)):
        first, second = order[:half], order[half : 2 * half]
        first_wins = _first_wins(
            population.unit_cost[first],
            population.cv[first],
            population.unit_cost[second],
            population.cv[second],
        )
        winners.append(np.where(first_wins, first, second))
    return population.take(np.concatenate(winners))


def _cut_points(
    rng: np.random.Generator, length: int, count: int
) -> tuple[npt.NDArray[np.int64], npt.NDArray[np.int64]]:
    """Two distinct interior cut points per pair, ordered low to high."""
    if length < 3:
        raise ValueError(f"two-point crossover needs at least 3 bits, got {length}")
    first = rng.integers(1, length, size=count)
    second = rng.integers(1, length - 1, size=count)
    second = second + (second >= first)
    return np.minimum(first, second), np.maximum(first, second)


def two_point_crossover(
    parent_a: npt.ArrayLike,
    parent_b: npt.ArrayLike,
    p_c: float,
    rng: np.random.Generator,
    cuts: tuple[int, int] | None = None,
) -> tuple[Genomes, Genomes]:
    """With probability p_c swap the segment between two cut points; otherwise copy."""
    a = np.array(parent_a, dtype=np.uint8)
    b = np.array(parent_b, dtype=np.uint8)
    if a.shape != b.shape:
        raise ValueError("parents must have equal length")
    if cuts is None:
        if rng.random() >= p_c:
            return a, b
        lo_arr, hi_arr = _cut_points(rng, a.shape[0], 1)
        lo, hi = int(lo_arr[0]), int(hi_arr[0])
    else:
        lo, hi = sorted(cuts)
    child_a, child_b = a.copy(), b.copy()
    child_a[lo:hi], child_b[lo:hi] = b[lo:hi], a[lo:hi]
    return child_a, child_b


def crossover_population(genomes: Genomes, p_c: float, rng: np.random.Generator) -> Genomes:
    """Apply two-point crossover to consecutive pairs (0, 1), (2, 3), ..."""
    count, length = genomes.shape
    pairs = count // 2
    mates = rng.random(pairs) < p_c
    lo, hi = _cut_points(rng, length, pairs)
    loci = np.arange(length)
    swap = mates[:, None] & (loci >= lo[:, None]) & (loci < hi[:, None])
    first, second = genomes[0 : 2 * pairs : 2], genomes[1 : 2 * pairs : 2]
    children = genomes.copy()
    children[0 : 2 * pairs : 2] = np.where(swap, second, first)
    children[1 : 2 * pairs : 2] = np.where(swap, first, second)
    return children


def mutate(genome: npt.ArrayLike, p_m: float, rng: np.random.Generator) -> Genomes:
    """Flip each bit independently with probability p_m."""
    bits = np.asarray(genome, dtype=np.uint8)
    flips = rng.random(bits.shape) < p_m
    return np.asarray(bits ^ flips.astype(np.uint8))


def _ranking(population: Population) -> npt.NDArray[np.intp]:
    """Feasible members by unit cost, then infeasible members by violation (stable)."""
    feasible = np.flatnonzero(population.feasible)
    infeasible = np.flatnonzero(~population.feasible)
    by_cost = feasible[np.argsort(population.unit_cost[feasible], kind="stable")]
    by_cv = infeasible[np.argsort(population.cv[infeasible], kind="stable")]
    return np.concatenate([by_cost, by_cv])


def elitist_replace(original: Population, offspring: Population) -> Population:
    """Keep the best N of the 2N merged members.

    More than N feasible: the N cheapest. Fewer: every feasible member plus the
    least-violating infeasible ones. Exactly N: the feasible set.
    """
    merged = Population.concat(original, offspring)
    return merged.take(_ranking(merged)[: original.size])


# ==================== Engine ====================


class GeneticAlgorithm:
    """Runs the GA for one problem; construct once, call run() per total depth."""

    def __init__(
        self,
        problem: ProblemData,
        config: GaConfig | None = None,
        model: CuttingModel | None = None,
    ):
        self.config = config or GaConfig()
        self.config.validate()
        self.problem = problem
        self.model = model or CuttingModel(problem)

    def evaluate(self, genomes: Genomes, layout: GenomeLayout, table: PairTable) -> Population:
        batch = decode_batch(genomes, layout, table)
        unit_cost = self.model.unit_cost_batch(
            batch.V_s, batch.f_s, batch.d_s, batch.V_r, batch.f_r, batch.d_r, batch.n
        )
        cv = self.model.constraint_violation_batch(
            batch.V_s, batch.f_s, batch.d_s, batch.V_r, batch.f_r, batch.d_r
        )
        return Population(genomes, unit_cost, cv)

    def initialize(
        self, table: PairTable, layout: GenomeLayout, rng: np.random.Generator
    ) -> Population:
        genomes = random_genomes(self.config.population, layout.length, rng)
        return self.evaluate(genomes, layout, table)

    def _stats(self, generation: int, population: Population) -> GenerationStats:
        best = int(_ranking(population)[0])
        feasible = population.feasible
        costs = population.unit_cost[feasible] if feasible.any() else population.unit_cost
        best_uc = float(population.unit_cost[best])
        average = float(costs.mean())
        return GenerationStats(
            generation=generation,
            best=best_uc,
            average=average,
            gap=(average - best_uc) / best_uc,
            best_cv=float(population.cv[best]),
        )

    def run(self, d_t: float, seed: int | None = None) -> RunResult:
        """Evolve a population for the configured number of generations at total depth d_t."""
        config = self.config
        seed = config.seed if seed is None else seed
        table = enumerate_pairs(d_t, self.problem)
        layout = GenomeLayout.build(self.problem, table, config)
        rng = np.random.default_rng(seed)

        logger.info(
            "GA run: d_t=%g mm, seed=%d, N=%d, generations=%d, genome=%d bits, pairs=%d",
            d_t,
            seed,
            config.population,
            config.generations,
            layout.length,
            len(table),
        )

        population = self.initialize(table, layout, rng)
        history = [self._stats(0, population)]
        evaluations = population.size

        for generation in range(1, config.generations + 1):
            parents = tournament_select(population, rng)
            children = crossover_population(parents.genomes, config.p_c, rng)
            children = mutate(children, config.p_m, rng)
            offspring = self.evaluate(children, layout, table)
            evaluations += offspring.size
            population = elitist_replace(population, offspring)
            stats = self._stats(generation, population)
            history.append(stats)
            logger.debug(
                "gen %d: best=%.6f avg=%.6f gap=%.4f%% cv=%.3g",
                generation,
                stats.best,
                stats.average,
                100 * stats.gap,
                stats.best_cv,
            )

        converged_at = next(
            (s.generation for s in history if s.gap < config.gap_threshold), None
        )
        best_row = int(_ranking(population)[0])
        batch = decode_batch(population.genomes[best_row : best_row + 1], layout, table)
        best = Individual(
            genome=population.genomes[best_row].copy(),
            plan=batch.plan(0),
            unit_cost=float(population.unit_cost[best_row]),
            cv=float(population.cv[best_row]),
            pair_index=int(batch.index[0]),
        )
        logger.info(
            "GA run finished: d_t=%g mm, seed=%d, UC=%.6f, CV=%.3g, pair=%d",
            d_t,
            seed,
            best.unit_cost,
            best.cv,
            best.pair_index,
        )
        return RunResult(
            d_t=d_t,
            seed=seed,
            best=best,
            history=history,
            converged_at=converged_at,
            evaluations=evaluations,
        )


def run(problem: ProblemData, d_t: float, config: GaConfig | None = None) -> RunResult:
    """Run the GA once with the configured seed."""
    return GeneticAlgorithm(problem, config).run(d_t)


def best_run(results: Sequence[RunResult]) -> RunResult:
    """The result whose best member wins under feasibility dominance; ties keep the earlier run."""
    if not results:
        raise ValueError("no GA results to choose from")
    winner = results[0]
    for result in results[1:]:
        a, b = winner.best, result.best
        first_wins = _first_wins(
            np.array([a.unit_cost]), np.array([a.cv]), np.array([b.unit_cost]), np.array([b.cv])
        )
        if not first_wins[0]:
            winner = result
    return winner
