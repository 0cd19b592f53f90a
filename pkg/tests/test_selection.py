"""Parent selection probabilities and sampling frequencies."""
import numpy as np
import pytest

from solvers.selection import (
    rank_probabilities,
    rank_select,
    roulette_probabilities,
    roulette_select,
    select,
    tournament_select,
)


class TestRoulette:
    def test_proportional(self):
        assert roulette_probabilities(np.array([3.0, 1.0])) == pytest.approx([0.75, 0.25])

    def test_frequencies(self):
        picks = roulette_select(np.array([3.0, 1.0]), np.random.default_rng(0), size=20_000)
        assert abs((picks == 0).mean() - 0.75) < 0.02

    def test_uniform(self):
        assert roulette_probabilities(np.full(4, 2.0)) == pytest.approx([0.25] * 4)

    def test_rejects_non_positive(self):
        with pytest.raises(ValueError):
            roulette_probabilities(np.array([1.0, 0.0]))


class TestRank:
    def test_two_members(self):
        assert rank_probabilities(np.array([10.0, 1.0])) == pytest.approx([0.75, 0.25])

    def test_ties_share(self):
        assert rank_probabilities(np.full(5, 7.0)) == pytest.approx([0.2] * 5)

    def test_sums_to_one(self):
        probs = rank_probabilities(np.array([5.0, 1.0, 3.0, 9.0]))
        assert probs.sum() == pytest.approx(1.0)
        assert np.argmax(probs) == 3 and np.argmin(probs) == 1

    def test_ignores_scale(self):
        picks = rank_select(np.array([1e9, 1.0]), np.random.default_rng(1), size=20_000)
        assert abs((picks == 0).mean() - 0.75) < 0.02

    def test_pressure_range(self):
        with pytest.raises(ValueError):
            rank_probabilities(np.array([1.0, 2.0]), pressure=2.5)


def test_tournament_frequencies():
    # 최고 개체는 두 참가자 중 하나만 되면 이긴다: 1 - (2/3)^2
    picks = tournament_select(np.array([1.0, 5.0, 3.0]), np.random.default_rng(2), size=30_000)
    assert abs((picks == 1).mean() - 5 / 9) < 0.02
    assert abs((picks == 0).mean() - 1 / 9) < 0.02


def test_select_copies_rows():
    population = np.array([[0, 0], [1, 1]])
    pool = select("roulette", population, np.array([1.0, 1.0]), np.random.default_rng(3))
    assert pool.shape == population.shape
    pool[0, 0] = 9
    assert population.max() == 1


def test_select_unknown_method():
    with pytest.raises(ValueError):
        select("lottery", np.zeros((2, 1)), np.ones(2), np.random.default_rng(0))
