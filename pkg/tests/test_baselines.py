"""Random-search and cloud-only baselines plus the solver registry."""
import pytest

from builders import FIL, HALF, chain, make_pool, make_scenario
from solvers.base import STATUS_INFEASIBLE, STATUS_INVALID, STATUS_OK, SolverConfig
from solvers.baselines import RandomSolver, solve_cloud_only, solve_random
from solvers.brute_force import solve_bf
from solvers.registry import UnknownSolver, discover_solvers


def _instance():
    dag = chain(FIL, HALF, FIL, FIL)
    scenario = make_scenario(dag, rate=500, lam_edge=0.003, lam_cloud=0.001)
    return dag, scenario, make_pool(3)


class TestCloudOnly:
    def test_everything_but_sources_on_cloud(self):
        dag, scenario, pool = _instance()
        result = solve_cloud_only(dag, scenario, pool)
        assert result.status == STATUS_OK
        assert result.placement.assignment["s"] == "edge-0"
        assert {result.placement.assignment[v] for v in ("q0", "q1", "q2", "q3")} == {"cloud-0"}

    def test_overloaded_cloud_is_invalid(self):
        dag = chain(FIL, FIL, FIL)
        scenario = make_scenario(dag, rate=100, lam_cloud=0.004)
        result = solve_cloud_only(dag, scenario, make_pool())
        assert result.status == STATUS_INVALID and not result.valid


class TestRandom:
    def test_never_beats_the_optimum(self):
        dag, scenario, pool = _instance()
        optimum = solve_bf(dag, scenario, pool)
        result = solve_random(dag, scenario, pool, trials=200, rng=5)
        assert result.valid
        assert result.evaluation.makespan >= optimum.evaluation.makespan - 1e-12

    def test_seeded(self):
        dag, scenario, pool = _instance()
        first = solve_random(dag, scenario, pool, trials=50, rng=9)
        again = solve_random(dag, scenario, pool, trials=50, rng=9)
        assert first.placement == again.placement and first.evaluations == 50

    def test_infeasible(self):
        dag = chain(FIL, FIL)
        scenario = make_scenario(dag, rate=100, lam_cloud={"q0": 1.0}, energy={"q0": 1.0})
        result = solve_random(dag, scenario, make_pool(), trials=30, rng=1)
        assert result.status == STATUS_INFEASIBLE and result.placement is None

    def test_rejects_zero_trials(self):
        dag, scenario, pool = _instance()
        with pytest.raises(ValueError):
            RandomSolver(SolverConfig(name="random", parameters={"trials": 0})).run(dag, scenario, pool)


def test_registry_knows_every_solver():
    registry = discover_solvers()
    assert list(registry.available()) == ["bf", "cloud_only", "ga", "random"]
    assert registry.metadata("ga").module == "solvers.genetic"
    assert "bf" in registry and "annealing" not in registry


def test_registry_unknown_key():
    registry = discover_solvers()
    with pytest.raises(UnknownSolver):
        registry.create("annealing", SolverConfig(name="annealing"))


def test_registry_describe():
    rows = discover_solvers().describe(["bf", "ga"])
    assert [row["key"] for row in rows] == ["bf", "ga"]
    assert rows[0]["description"]
