"""Parent selection strategies for the genetic solver.

All strategies draw ``p`` parents with replacement from a population of ``p``
and only consume the caller's seeded generator.
"""
from __future__ import annotations

from typing import Callable

import numpy as np
from scipy.stats import rankdata

ROULETTE = "roulette"
RANK = "rank"
TOURNAMENT = "tournament"
SELECTIONS = (ROULETTE, RANK, TOURNAMENT)

RANK_PRESSURE = 1.5


def roulette_probabilities(fitness: np.ndarray) -> np.ndarray:
    fitness = np.asarray(fitness, dtype=float)
    if (fitness <= 0).any():
        raise ValueError("roulette selection needs strictly positive fitness")
    return fitness / fitness.sum()


def rank_probabilities(fitness: np.ndarray, pressure: float = RANK_PRESSURE) -> np.ndarray:
    """Linear ranking; the worst gets (2-s)/p, the best s/p. Ties share the average rank."""
    fitness = np.asarray(fitness, dtype=float)
    p = fitness.shape[0]
    if p == 1:
        return np.ones(1)
    if not 1.0 <= pressure <= 2.0:
        raise ValueError("rank selection pressure must be within [1, 2]")
    ranks = rankdata(fitness, method="average")
    return (2.0 - pressure) / p + 2.0 * (ranks - 1.0) * (pressure - 1.0) / (p * (p - 1.0))


def _spin(probabilities: np.ndarray, rng: np.random.Generator, size: int) -> np.ndarray:
    # j 가 선택되는 조건: δ_{j-1} < x <= δ_j
    cumulative = np.cumsum(probabilities)
    cumulative /= cumulative[-1]
    picks = np.searchsorted(cumulative, rng.random(size), side="left")
    return np.minimum(picks, probabilities.shape[0] - 1)


def roulette_select(fitness: np.ndarray, rng: np.random.Generator, size: int | None = None) -> np.ndarray:
    """Indices of the selected chromosomes; duplicates allowed."""
    probabilities = roulette_probabilities(fitness)
    return _spin(probabilities, rng, size or probabilities.shape[0])


def rank_select(fitness: np.ndarray, rng: np.random.Generator, size: int | None = None) -> np.ndarray:
    probabilities = rank_probabilities(fitness)
    return _spin(probabilities, rng, size or probabilities.shape[0])


def tournament_select(fitness: np.ndarray, rng: np.random.Generator, size: int | None = None) -> np.ndarray:
    """Binary tournament; the first contender wins ties."""
    fitness = np.asarray(fitness, dtype=float)
    p = fitness.shape[0]
    contenders = rng.integers(0, p, size=(size or p, 2))
    first, second = contenders[:, 0], contenders[:, 1]
    return np.where(fitness[second] > fitness[first], second, first)


SELECTORS: dict[str, Callable[..., np.ndarray]] = {
    ROULETTE: roulette_select,
    RANK: rank_select,
    TOURNAMENT: tournament_select,
}


def select(method: str, population: np.ndarray, fitness: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """The next mating pool as a copy of the selected rows."""
    try:
        selector = SELECTORS[method]
    except KeyError:
        raise ValueError(f"unknown selection '{method}'; choose from {SELECTIONS}") from None
    return np.asarray(population)[selector(fitness, rng)].copy()
