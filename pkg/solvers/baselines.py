"""Baseline placements: uniform random search and cloud-only."""
from __future__ import annotations

import logging

import numpy as np

from dataflow.dag import QueryDag
from placement.model import PlacementModel
from simulation.resources import ResourcePool
from simulation.scenario import RuntimeScenario
from solvers.base import STATUS_INFEASIBLE, STATUS_INVALID, STATUS_OK, BaseSolver, SolveResult, SolverConfig
from solvers.registry import registry

logger = logging.getLogger(__name__)

DEFAULT_TRIALS = 15_000
TRIAL_CHUNK = 2_048


class RandomSolver(BaseSolver):
    """Best valid placement among independent uniform random trials.

    Trials are drawn and evaluated in chunks; the earliest trial wins ties.
    """

    def solve(self, model: PlacementModel) -> SolveResult:
        trials = int(self.config.parameters.get("trials", DEFAULT_TRIALS))
        if trials < 1:
            raise ValueError("trials must be at least 1")
        rng = self.config.rng()
        n, r = model.n_genes, model.n_resources

        best_genes: np.ndarray | None = None
        best_makespan = np.inf
        done = 0
        while done < trials:
            size = min(TRIAL_CHUNK, trials - done)
            genes = rng.integers(0, r, size=(size, n))
            batch = model.evaluate_genes(genes)
            valid = batch.valid
            if valid.any():
                makespan = np.where(valid, batch.makespan, np.inf)
                pick = int(np.argmin(makespan))
                if makespan[pick] < best_makespan:
                    best_makespan = float(makespan[pick])
                    best_genes = genes[pick].copy()
            done += size

        metadata = {"trials": trials}
        if best_genes is None:
            return SolveResult(
                solver=self.config.name, status=STATUS_INFEASIBLE, evaluations=trials, metadata=metadata
            )
        row = model.expand(best_genes)[0]
        return self.result_for_row(model, row, STATUS_OK, evaluations=trials, metadata=metadata)


class CloudOnlySolver(BaseSolver):
    """Every non-source vertex on the VM; sources stay pinned to their edges."""

    def solve(self, model: PlacementModel) -> SolveResult:
        genes = np.full(model.n_genes, model.cloud_index, dtype=np.int64)
        row = model.expand(genes)[0]
        result = self.result_for_row(model, row, STATUS_OK, evaluations=1)
        if not result.valid:
            result.status = STATUS_INVALID
        return result


def solve_random(
    dag: QueryDag,
    scenario: RuntimeScenario,
    pool: ResourcePool,
    trials: int = DEFAULT_TRIALS,
    rng: np.random.Generator | int | None = None,
    *,
    include_sink_compute: bool = False,
    dag_id: str = "",
) -> SolveResult:
    seed = rng if isinstance(rng, int) else 0
    if isinstance(rng, np.random.Generator):
        seed = int(rng.integers(0, 2**63 - 1))
    config = SolverConfig(
        name="random",
        dag_id=dag_id,
        seed=seed,
        include_sink_compute=include_sink_compute,
        parameters={"trials": trials},
    )
    return RandomSolver(config).run(dag, scenario, pool)


def solve_cloud_only(
    dag: QueryDag,
    scenario: RuntimeScenario,
    pool: ResourcePool,
    *,
    include_sink_compute: bool = False,
    dag_id: str = "",
) -> SolveResult:
    config = SolverConfig(name="cloud_only", dag_id=dag_id, include_sink_compute=include_sink_compute)
    return CloudOnlySolver(config).run(dag, scenario, pool)


registry.register("random", RandomSolver, description="Best of uniform random placements")
registry.register("cloud_only", CloudOnlySolver, description="All queries on the cloud VM")
