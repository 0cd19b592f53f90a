"""Optimal placement by exhaustive enumeration of the unpinned vertices.

탐색 순서: 유전자(위상 순서의 비고정 정점)별 자원 인덱스의 사전식 순서.
앞쪽 유전자는 DFS(접두 가지치기), 뒤쪽 유전자는 ``itertools.product`` 블록으로
한 번에 벡터 평가한다. 가지치기는 반환되는 최적해를 바꾸지 않는다.
"""
from __future__ import annotations

import itertools
import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from dataflow.dag import QueryDag
from placement.model import PlacementModel
from simulation.resources import ResourcePool
from simulation.scenario import RuntimeScenario
from solvers.base import (
    STATUS_BUDGET_EXCEEDED,
    STATUS_INFEASIBLE,
    STATUS_OK,
    STATUS_SKIPPED,
    BaseSolver,
    SolveResult,
    SolverConfig,
)
from solvers.registry import registry

logger = logging.getLogger(__name__)

BLOCK_ROWS = 4096


@dataclass(slots=True)
class _Best:
    makespan: float = float("inf")
    rank: int = -1
    genes: Optional[np.ndarray] = None

    def offer(self, makespan: float, rank: int, genes: np.ndarray) -> None:
        if self.genes is None or (makespan, rank) < (self.makespan, self.rank):
            self.makespan, self.rank, self.genes = makespan, rank, genes


@dataclass(slots=True)
class _PartitionOutcome:
    best: _Best = field(default_factory=_Best)
    evaluations: int = 0
    exhausted: bool = True


def _suffix_length(n_genes: int, n_resources: int) -> int:
    length = 0
    while length < n_genes and n_resources ** (length + 1) <= BLOCK_ROWS:
        length += 1
    return max(length, min(1, n_genes))


class BruteForceSolver(BaseSolver):
    """Exhaustive search over |R|^n assignments with optional prefix pruning.

    Parameters (``config.parameters``): ``budget_secs``, ``prune`` (default
    True), ``workers`` (default 1), ``max_unpinned`` (skip larger problems).
    """

    def solve(self, model: PlacementModel) -> SolveResult:
        params = self.config.parameters
        budget = params.get("budget_secs")
        prune = bool(params.get("prune", True)) and model.overhead_monotone
        workers = max(1, int(params.get("workers", 1)))
        max_unpinned = params.get("max_unpinned")

        n, r = model.n_genes, model.n_resources
        if max_unpinned is not None and n > int(max_unpinned):
            logger.warning("Skipping brute force: %d unpinned vertices exceeds cap %s", n, max_unpinned)
            return SolveResult(solver=self.config.name, status=STATUS_SKIPPED, metadata={"unpinned": n})

        deadline = time.perf_counter() + float(budget) if budget is not None else None
        suffix = _suffix_length(n, r)
        prefix = n - suffix
        block = np.array(list(itertools.product(range(r), repeat=suffix)), dtype=np.int64).reshape(r**suffix, suffix)

        if prefix == 0 or workers == 1:
            partitions: list[Sequence[int] | None] = [None]
        else:
            partitions = [list(range(r))[w::workers] for w in range(workers) if list(range(r))[w::workers]]

        def search(first_values: Sequence[int] | None) -> _PartitionOutcome:
            return self._search(model, block, prefix, prune, deadline, first_values)

        if len(partitions) == 1:
            outcomes = [search(partitions[0])]
        else:
            with ThreadPoolExecutor(max_workers=len(partitions)) as pool:
                outcomes = list(pool.map(search, partitions))

        best = _Best()
        for outcome in outcomes:
            if outcome.best.genes is not None:
                best.offer(outcome.best.makespan, outcome.best.rank, outcome.best.genes)
        evaluations = sum(o.evaluations for o in outcomes)
        exhausted = all(o.exhausted for o in outcomes)
        metadata = {"search_space": r**n, "unpinned": n, "pruned": prune, "exhausted": exhausted}

        status = STATUS_OK if exhausted else STATUS_BUDGET_EXCEEDED
        if best.genes is None:
            if exhausted:
                return SolveResult(
                    solver=self.config.name, status=STATUS_INFEASIBLE, evaluations=evaluations, metadata=metadata
                )
            return SolveResult(
                solver=self.config.name, status=STATUS_BUDGET_EXCEEDED, evaluations=evaluations, metadata=metadata
            )
        row = model.expand(best.genes)[0]
        return self.result_for_row(model, row, status, evaluations=evaluations, metadata=metadata)

    def _search(
        self,
        model: PlacementModel,
        block: np.ndarray,
        prefix_len: int,
        prune: bool,
        deadline: Optional[float],
        first_values: Sequence[int] | None,
    ) -> _PartitionOutcome:
        outcome = _PartitionOutcome()
        r = model.n_resources
        suffix_len = block.shape[1]
        block_rows = block.shape[0]
        genes = np.zeros(model.n_genes, dtype=np.int64)
        assigned = np.zeros(model.n_vertices, dtype=bool)
        for pos in model.pinned:
            assigned[pos] = True

        def prefix_ok() -> bool:
            if not prune:
                return True
            row = model.expand(genes)[0]
            verdict = model.check(row[None, :], mask=assigned)
            return bool(verdict.valid[0])

        def evaluate_block(prefix_rank: int) -> None:
            rows = np.repeat(genes[None, :], block_rows, axis=0)
            if suffix_len:
                rows[:, prefix_len:] = block
            batch = model.evaluate(model.expand(rows))
            outcome.evaluations += block_rows
            valid = batch.valid
            if not valid.any():
                return
            makespan = np.where(valid, batch.makespan, np.inf)
            pick = int(np.argmin(makespan))
            outcome.best.offer(float(makespan[pick]), prefix_rank * block_rows + pick, rows[pick].copy())

        def descend(depth: int, prefix_rank: int) -> bool:
            """Return False once the wall-clock budget is spent."""
            if not prefix_ok():
                return True
            if depth == prefix_len:
                if deadline is not None and time.perf_counter() > deadline:
                    outcome.exhausted = False
                    return False
                evaluate_block(prefix_rank)
                return True
            values = first_values if (depth == 0 and first_values is not None) else range(r)
            vertex = model.gene_index[depth]
            for value in values:
                genes[depth] = value
                assigned[vertex] = True
                keep_going = descend(depth + 1, prefix_rank * r + value)
                assigned[vertex] = False
                if not keep_going:
                    return False
            genes[depth] = 0
            return True

        descend(0, 0)
        return outcome


def solve_bf(
    dag: QueryDag,
    scenario: RuntimeScenario,
    pool: ResourcePool,
    budget: Optional[float] = None,
    *,
    prune: bool = True,
    workers: int = 1,
    include_sink_compute: bool = False,
    dag_id: str = "",
) -> SolveResult:
    """Exhaustive optimum; ``status`` is ok, infeasible or budget_exceeded."""
    config = SolverConfig(
        name="bf",
        dag_id=dag_id,
        include_sink_compute=include_sink_compute,
        parameters={"budget_secs": budget, "prune": prune, "workers": workers},
    )
    return BruteForceSolver(config).run(dag, scenario, pool)


registry.register("bf", BruteForceSolver, description="Exhaustive brute-force optimum")
