"""Genetic solver operators, fitness and end-to-end behaviour."""
import numpy as np
import pytest

from builders import FIL, HALF, chain, make_pool, make_scenario
from placement.model import PlacementModel
from solvers.base import STATUS_OK
from solvers.brute_force import solve_bf
from solvers.genetic import GaConfig, crossover, crossover_pair, fitness, mutate, penalized_fitness, solve_ga


def _small_cfg(**overrides):
    values = dict(population=20, min_generations=30, max_generations=300, seed=7)
    values.update(overrides)
    return GaConfig(**values)


class TestFitness:
    def test_valid(self):
        assert penalized_fitness(np.array([0.1]), np.array([0]), GaConfig())[0] == pytest.approx(999.9)

    def test_one_violated_class(self):
        value = penalized_fitness(np.array([0.1]), np.array([1]), GaConfig())[0]
        assert value == pytest.approx(999.9 - 10.55, abs=0.01)

    def test_chromosome(self):
        dag = chain(FIL, FIL)
        model = PlacementModel(dag, make_scenario(dag, rate=10, lam_edge={"q0": 0.010}), make_pool(1))
        value, valid = fitness(np.array([0]), model, GaConfig())
        assert valid
        assert value == pytest.approx(1000.0 - 0.08677)

    def test_floor(self):
        cfg = GaConfig(fitness_constant=0.05)
        assert penalized_fitness(np.array([0.1]), np.array([2]), cfg)[0] > 0


class TestCrossover:
    def test_single_point(self):
        first, second = crossover_pair(np.zeros(4, dtype=int), np.ones(4, dtype=int), 1)
        assert first.tolist() == [1, 1, 0, 0]
        assert second.tolist() == [0, 0, 1, 1]

    def test_identical_parents(self):
        parent = np.array([2, 0, 1])
        for point in range(3):
            first, second = crossover_pair(parent, parent, point)
            assert first.tolist() == second.tolist() == parent.tolist()

    def test_zero_probability(self):
        population = np.arange(12).reshape(4, 3)
        assert np.array_equal(crossover(population, 0.0, np.random.default_rng(0)), population)

    def test_preserves_gene_multiset_per_column(self):
        population = np.random.default_rng(1).integers(0, 5, size=(10, 6))
        children = crossover(population, 1.0, np.random.default_rng(2))
        for column in range(6):
            assert sorted(children[:, column]) == sorted(population[:, column])


class TestMutation:
    def test_zero_probability(self):
        population = np.ones((5, 4), dtype=int)
        assert np.array_equal(mutate(population, 0.0, 3, np.random.default_rng(0)), population)

    def test_single_resource(self):
        population = np.zeros((5, 4), dtype=int)
        assert np.array_equal(mutate(population, 1.0, 1, np.random.default_rng(0)), population)

    def test_expected_count(self):
        population = np.zeros((50, 100), dtype=int)
        mutated = mutate(population, 0.15, 1000, np.random.default_rng(3))
        assert 650 < np.count_nonzero(mutated) < 850


class TestConfig:
    @pytest.mark.parametrize(
        "field, value",
        [("population", 1), ("crossover_prob", 1.5), ("mutation_prob", -0.1), ("selection", "lottery")],
    )
    def test_rejects(self, field, value):
        with pytest.raises(ValueError):
            GaConfig(**{field: value})

    def test_fitness_constant_in_ms(self):
        assert GaConfig.from_mapping({"fitness_constant_ms": 2_000}).fitness_constant == pytest.approx(2.0)


class TestSolve:
    def test_matches_brute_force_on_tiny_instance(self):
        dag = chain(FIL, FIL)
        scenario = make_scenario(dag, rate=10, lam_edge={"q0": 0.01}, lam_cloud={"q0": 0.2})
        pool = make_pool(1)
        ga = solve_ga(dag, scenario, pool, _small_cfg())
        bf = solve_bf(dag, scenario, pool)
        assert ga.status == STATUS_OK
        assert ga.evaluation.makespan == pytest.approx(bf.evaluation.makespan)

    def test_trace_never_decreases(self):
        dag = chain(FIL, HALF, FIL, FIL)
        scenario = make_scenario(dag, rate=500, lam_edge=0.003, lam_cloud=0.001)
        result = solve_ga(dag, scenario, make_pool(3), _small_cfg())
        keys = [(valid, value) for _, valid, value in result.fitness_trace]
        assert keys == sorted(keys)
        assert result.fitness_trace[0][0] == 0

    def test_same_seed_same_result(self):
        dag = chain(FIL, HALF, FIL, FIL)
        scenario = make_scenario(dag, rate=500, lam_edge=0.003, lam_cloud=0.001)
        first = solve_ga(dag, scenario, make_pool(3), _small_cfg())
        again = solve_ga(dag, scenario, make_pool(3), _small_cfg())
        assert first.placement == again.placement
        assert first.fitness_trace == again.fitness_trace

    def test_stops_after_convergence(self):
        dag = chain(FIL, FIL)
        scenario = make_scenario(dag, rate=10)
        result = solve_ga(dag, scenario, make_pool(1), _small_cfg(min_generations=10, max_generations=10_000))
        assert 10 <= result.generations < 10_000
        assert result.evaluations == 20 * (result.generations + 1)

    @pytest.mark.parametrize("selection", ["rank", "tournament"])
    def test_other_selections(self, selection):
        dag = chain(FIL, FIL)
        scenario = make_scenario(dag, rate=10)
        result = solve_ga(dag, scenario, make_pool(2), _small_cfg(selection=selection))
        assert result.valid and result.metadata["selection"] == selection
