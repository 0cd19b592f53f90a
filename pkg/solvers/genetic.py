"""Genetic-algorithm placement solver.

염색체 = 비고정 정점(위상 순서)마다 자원 인덱스 [0, |R|-1] 를 담은 정수 벡터.
한 세대 = 선택 → 교차 → 돌연변이 → 적합도 평가. 모집단 전체를 한 번의
배치로 평가한다. 최적해(best-fit)는 모집단 밖에서 (valid, F) 사전식으로 추적한다.
"""
from __future__ import annotations

import logging
from dataclasses import asdict, dataclass
from typing import Any, Mapping, Optional

import numpy as np

from dataflow.dag import QueryDag
from placement.model import BatchEvaluation, PlacementModel
from schemas.units import ms_to_seconds
from simulation.resources import ResourcePool
from simulation.scenario import RuntimeScenario
from solvers.base import STATUS_INVALID, STATUS_OK, BaseSolver, SolveResult, SolverConfig
from solvers.registry import registry
from solvers.selection import ROULETTE, SELECTIONS, select

logger = logging.getLogger(__name__)

FITNESS_FLOOR = 1e-6


@dataclass(slots=True)
class GaConfig:
    population: int = 50
    crossover_prob: float = 0.50
    mutation_prob: float = 0.15
    min_generations: int = 15_000
    max_generations: int = 1_000_000
    convergence_window_frac: float = 0.5
    fitness_constant: float = ms_to_seconds(1_000_000.0)  # K, seconds
    penalty_gamma: float = 1.5
    selection: str = ROULETTE
    penalty_per_violation: bool = False
    convergence_tolerance: float = 0.0
    seed: Optional[int] = None

    def __post_init__(self) -> None:
        if self.population < 2:
            raise ValueError("population must be at least 2")
        if not 0.0 <= self.crossover_prob <= 1.0:
            raise ValueError("crossover_prob must be within [0, 1]")
        if not 0.0 <= self.mutation_prob <= 1.0:
            raise ValueError("mutation_prob must be within [0, 1]")
        if self.min_generations < 0 or self.min_generations > self.max_generations:
            raise ValueError("min_generations must be within [0, max_generations]")
        if not 0.0 < self.convergence_window_frac <= 1.0:
            raise ValueError("convergence_window_frac must be within (0, 1]")
        if self.fitness_constant <= 0:
            raise ValueError("fitness_constant must be positive")
        if self.penalty_gamma < 0:
            raise ValueError("penalty_gamma must be non-negative")
        if self.selection not in SELECTIONS:
            raise ValueError(f"selection must be one of {SELECTIONS}")
        if self.convergence_tolerance < 0:
            raise ValueError("convergence_tolerance must be non-negative")

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_mapping(cls, data: Mapping[str, Any]) -> "GaConfig":
        defaults = cls()
        constant = data.get("fitness_constant")
        if constant is None and data.get("fitness_constant_ms") is not None:
            constant = ms_to_seconds(float(data["fitness_constant_ms"]))
        seed = data.get("seed")
        return cls(
            population=int(data.get("population", defaults.population)),
            crossover_prob=float(data.get("crossover_prob", defaults.crossover_prob)),
            mutation_prob=float(data.get("mutation_prob", defaults.mutation_prob)),
            min_generations=int(data.get("min_generations", defaults.min_generations)),
            max_generations=int(data.get("max_generations", defaults.max_generations)),
            convergence_window_frac=float(data.get("convergence_window_frac", defaults.convergence_window_frac)),
            fitness_constant=float(constant if constant is not None else defaults.fitness_constant),
            penalty_gamma=float(data.get("penalty_gamma", defaults.penalty_gamma)),
            selection=str(data.get("selection", defaults.selection)),
            penalty_per_violation=bool(data.get("penalty_per_violation", defaults.penalty_per_violation)),
            convergence_tolerance=float(data.get("convergence_tolerance", defaults.convergence_tolerance)),
            seed=int(seed) if seed is not None else None,
        )


def penalized_fitness(makespan: np.ndarray, penalties: np.ndarray, cfg: GaConfig) -> np.ndarray:
    """F = K - L - k·log2(1 + γ·F_raw), floored at a small positive value."""
    raw = cfg.fitness_constant - np.asarray(makespan, dtype=float)
    penalty = np.log2(1.0 + cfg.penalty_gamma * np.maximum(raw, 0.0))
    return np.maximum(raw - np.asarray(penalties) * penalty, FITNESS_FLOOR)


def batch_fitness(batch: BatchEvaluation, cfg: GaConfig) -> tuple[np.ndarray, np.ndarray]:
    verdict = batch.verdict
    penalties = verdict.violation_count if cfg.penalty_per_violation else verdict.violated_classes
    return penalized_fitness(batch.makespan, penalties, cfg), verdict.valid


def fitness(genes: np.ndarray, model: PlacementModel, cfg: GaConfig) -> tuple[float, bool]:
    """Fitness and validity of one chromosome."""
    values, valid = batch_fitness(model.evaluate_genes(np.asarray(genes)[None, :]), cfg)
    return float(values[0]), bool(valid[0])


def crossover_pair(first: np.ndarray, second: np.ndarray, point: int) -> tuple[np.ndarray, np.ndarray]:
    """Single-point crossover: genes 0..point are swapped between the parents."""
    head = slice(0, point + 1)
    child_first = np.concatenate([second[head], first[point + 1 :]])
    child_second = np.concatenate([first[head], second[point + 1 :]])
    return child_first, child_second


def crossover(population: np.ndarray, prob: float, rng: np.random.Generator) -> np.ndarray:
    """Offspring replace their parents; an odd leftover member is dropped from mating."""
    population = np.array(population, copy=True)
    p, n = population.shape
    if n == 0:
        return population
    members = np.flatnonzero(rng.random(p) < prob)
    if members.size % 2:
        members = members[:-1]
    if members.size == 0:
        return population
    rng.shuffle(members)
    pairs = members.reshape(-1, 2)
    points = rng.integers(0, n, size=pairs.shape[0])
    left, right = population[pairs[:, 0]], population[pairs[:, 1]]
    swap = np.arange(n)[None, :] <= points[:, None]
    population[pairs[:, 0]] = np.where(swap, right, left)
    population[pairs[:, 1]] = np.where(swap, left, right)
    return population


def mutate(population: np.ndarray, prob: float, n_resources: int, rng: np.random.Generator) -> np.ndarray:
    """Each gene independently becomes a uniform resource index with probability ``prob``."""
    population = np.asarray(population)
    mask = rng.random(population.shape) < prob
    draws = rng.integers(0, n_resources, size=population.shape)
    return np.where(mask, draws, population)


def _generation_best(values: np.ndarray, valid: np.ndarray) -> int:
    if valid.any():
        return int(np.argmax(np.where(valid, values, -np.inf)))
    return int(np.argmax(values))


class GeneticSolver(BaseSolver):
    """GA placement; ``config.parameters`` holds :class:`GaConfig` fields."""

    def solve(self, model: PlacementModel) -> SolveResult:
        cfg = GaConfig.from_mapping(self.config.parameters)
        seed = cfg.seed if cfg.seed is not None else self.config.seed
        rng = np.random.default_rng(seed)
        n, r = model.n_genes, model.n_resources

        population = rng.integers(0, r, size=(cfg.population, n))
        values, valid = batch_fitness(model.evaluate_genes(population), cfg)
        pick = _generation_best(values, valid)
        best_genes = population[pick].copy()
        best_valid, best_f = bool(valid[pick]), float(values[pick])
        trace: list[tuple[int, bool, float]] = [(0, best_valid, best_f)]
        evaluations = cfg.population
        last_improve = 0
        generation = 0

        if n > 0:
            for generation in range(1, cfg.max_generations + 1):
                population = select(cfg.selection, population, values, rng)
                population = crossover(population, cfg.crossover_prob, rng)
                population = mutate(population, cfg.mutation_prob, r, rng)
                values, valid = batch_fitness(model.evaluate_genes(population), cfg)
                evaluations += cfg.population

                pick = _generation_best(values, valid)
                cand_valid, cand_f = bool(valid[pick]), float(values[pick])
                if (cand_valid, cand_f) > (best_valid, best_f):
                    if cand_valid != best_valid or cand_f - best_f > cfg.convergence_tolerance:
                        last_improve = generation
                    best_genes = population[pick].copy()
                    best_valid, best_f = cand_valid, cand_f
                trace.append((generation, best_valid, best_f))

                if (
                    generation >= cfg.min_generations
                    and generation - last_improve >= cfg.convergence_window_frac * generation
                ):
                    break

        row = model.expand(best_genes)[0]
        status = STATUS_OK if best_valid else STATUS_INVALID
        if not best_valid:
            logger.warning("GA best placement violates constraints after %d generations", generation)
        return self.result_for_row(
            model,
            row,
            status,
            evaluations=evaluations,
            generations=generation,
            fitness_trace=trace,
            metadata={"best_fitness": best_f, "seed": seed, "selection": cfg.selection},
        )


def solve_ga(
    dag: QueryDag,
    scenario: RuntimeScenario,
    pool: ResourcePool,
    cfg: GaConfig | None = None,
    *,
    include_sink_compute: bool = False,
    dag_id: str = "",
) -> SolveResult:
    cfg = cfg or GaConfig()
    config = SolverConfig(
        name="ga",
        dag_id=dag_id,
        seed=cfg.seed or 0,
        include_sink_compute=include_sink_compute,
        parameters=cfg.to_dict(),
    )
    return GeneticSolver(config).run(dag, scenario, pool)


registry.register("ga", GeneticSolver, description="Genetic algorithm with penalty fitness")
