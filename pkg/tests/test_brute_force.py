"""Exhaustive search: optimality, evaluation counts and terminal statuses."""
import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from builders import FIL, HALF, chain, make_pool, make_scenario
from dataflow.dag import QueryDag
from placement.model import PlacementModel
from schemas.query import SOURCE_VARIANT
from solvers.base import (
    STATUS_BUDGET_EXCEEDED,
    STATUS_INFEASIBLE,
    STATUS_OK,
    STATUS_SKIPPED,
    SolverConfig,
)
from solvers.brute_force import BruteForceSolver, solve_bf


def _instance():
    # 비고정 정점 3개, 자원 4개(엣지 3 + 클라우드 1)
    dag = chain(FIL, HALF, FIL, FIL)
    scenario = make_scenario(
        dag,
        rate=500,
        lam_edge={"q0": 0.004, "q1": 0.002, "q2": 0.003},
        lam_cloud={"q0": 0.001, "q1": 0.001, "q2": 0.001},
        energy=1e-6,
    )
    return dag, scenario, make_pool(3)


def test_enumerates_the_whole_space():
    dag, scenario, pool = _instance()
    result = solve_bf(dag, scenario, pool, prune=False)
    assert result.status == STATUS_OK
    assert result.evaluations == 64
    assert result.metadata["search_space"] == 64


def test_optimum_beats_every_sampled_placement():
    dag, scenario, pool = _instance()
    best = solve_bf(dag, scenario, pool)
    model = PlacementModel(dag, scenario, pool)
    genes = np.random.default_rng(4).integers(0, model.n_resources, size=(500, model.n_genes))
    batch = model.evaluate_genes(genes)
    assert best.valid
    assert best.evaluation.makespan <= batch.makespan[batch.valid].min() + 1e-12


def test_pruning_keeps_the_optimum():
    dag, scenario, pool = _instance()
    pruned = solve_bf(dag, scenario, pool, prune=True)
    full = solve_bf(dag, scenario, pool, prune=False)
    assert pruned.placement == full.placement
    assert pruned.evaluation.makespan == full.evaluation.makespan


def test_workers_agree_with_single_thread():
    # 비고정 9개, 자원 3개: 앞 2개 유전자는 DFS 접두
    dag = chain(*[FIL] * 10)
    scenario = make_scenario(dag, rate=100, lam_edge=0.003, lam_cloud=0.001)
    pool = make_pool(2)
    single = solve_bf(dag, scenario, pool)
    threaded = solve_bf(dag, scenario, pool, workers=2)
    assert threaded.placement == single.placement


def test_infeasible():
    # q0: 엣지는 에너지 초과, 클라우드는 처리량 초과
    dag = chain(FIL, FIL)
    scenario = make_scenario(dag, rate=100, lam_cloud={"q0": 1.0}, energy={"q0": 1.0})
    result = solve_bf(dag, scenario, make_pool(2))
    assert result.status == STATUS_INFEASIBLE
    assert result.placement is None and not result.valid


def test_skipped_above_cap():
    dag, scenario, pool = _instance()
    solver = BruteForceSolver(SolverConfig(name="bf", parameters={"max_unpinned": 2}))
    result = solver.run(dag, scenario, pool)
    assert result.status == STATUS_SKIPPED
    assert result.evaluations == 0 and result.metadata["unpinned"] == 3


def test_budget_exceeded():
    dag, scenario, pool = _instance()
    result = solve_bf(dag, scenario, pool, budget=0.0)
    assert result.status == STATUS_BUDGET_EXCEEDED
    assert result.metadata["exhausted"] is False


def test_sink_compute_changes_the_reported_makespan():
    dag = chain(FIL, FIL)
    scenario = make_scenario(dag, rate=10, lam_edge={"q0": 0.01}, lam_cloud={"q0": 0.05, "q1": 0.002})
    base = solve_bf(dag, scenario, make_pool(1))
    with_sink = solve_bf(dag, scenario, make_pool(1), include_sink_compute=True)
    assert with_sink.evaluation.makespan == pytest.approx(base.evaluation.makespan + 0.002)


@st.composite
def _small_instances(draw):
    """Layered DAG with at most 5 unpinned vertices and at most 4 resources."""
    widths = draw(st.lists(st.integers(1, 2), min_size=1, max_size=3))
    vertices = [("s", SOURCE_VARIANT)]
    edges = []
    previous = ["s"]
    for depth, width in enumerate(widths):
        layer = []
        for k in range(width):
            vid = f"v{depth}_{k}"
            vertices.append((vid, draw(st.sampled_from([FIL, HALF]))))
            parents = draw(st.lists(st.sampled_from(previous), min_size=1, max_size=len(previous), unique=True))
            edges.extend((p, vid) for p in parents)
            layer.append(vid)
        previous = layer
    dag = QueryDag(vertices, edges)
    placeable = [vid for vid, variant in vertices if not variant.is_source]
    # rate 100 에서 λ 가 0.01 을 넘으면 단독 배치도 처리량 위반이 된다
    scenario = make_scenario(
        dag,
        rate=100,
        lam_edge={vid: draw(st.floats(1e-4, 2e-2)) for vid in placeable},
        lam_cloud={vid: draw(st.floats(1e-5, 5e-3)) for vid in placeable},
        energy={vid: draw(st.floats(0.0, 4e-4)) for vid in placeable},
    )
    return dag, scenario, make_pool(draw(st.integers(1, 3))), draw(st.integers(0, 2**32 - 1))


@settings(max_examples=200, deadline=None)
@given(_small_instances())
def test_optimum_over_random_small_instances(instance):
    dag, scenario, pool, seed = instance
    model = PlacementModel(dag, scenario, pool)
    n, r = model.n_genes, model.n_resources
    assume(1 <= n <= 5)

    full = solve_bf(dag, scenario, pool, prune=False)
    assert full.evaluations == r**n

    genes = np.random.default_rng(seed).integers(0, r, size=(10_000, n))
    batch = model.evaluate_genes(genes)
    if not batch.valid.any():
        assert full.status in (STATUS_OK, STATUS_INFEASIBLE)
        return
    assert full.status == STATUS_OK and full.valid
    assert full.evaluation.makespan <= batch.makespan[batch.valid].min() + 1e-12

    pruned = solve_bf(dag, scenario, pool, prune=True)
    assert pruned.evaluation.makespan == full.evaluation.makespan
