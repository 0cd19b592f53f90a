"""Core abstractions shared by all placement solvers."""
from __future__ import annotations

import abc
import asyncio
import logging
import time
from dataclasses import dataclass, field
from typing import Any, List, Optional

import numpy as np

from dataflow.dag import QueryDag
from placement.evaluation import Evaluation, Placement, evaluation_from_batch
from placement.model import PlacementModel
from simulation.resources import ResourcePool
from simulation.scenario import RuntimeScenario

logger = logging.getLogger(__name__)

# 솔버 결과 상태. 예외가 아니라 값으로 다룬다(셀 실패와 구분).
STATUS_OK = "ok"
STATUS_INVALID = "invalid"
STATUS_INFEASIBLE = "infeasible"
STATUS_BUDGET_EXCEEDED = "budget_exceeded"
STATUS_SKIPPED = "skipped"
STATUSES = (STATUS_OK, STATUS_INVALID, STATUS_INFEASIBLE, STATUS_BUDGET_EXCEEDED, STATUS_SKIPPED)


@dataclass(slots=True)
class SolverConfig:
    """Configuration passed to every solver implementation."""

    name: str
    dag_id: str = ""
    seed: int = 0
    include_sink_compute: bool = False
    parameters: dict[str, Any] = field(default_factory=dict)

    def rng(self) -> np.random.Generator:
        return np.random.default_rng(self.seed)


@dataclass(slots=True)
class SolveResult:
    solver: str
    status: str
    placement: Optional[Placement] = None
    evaluation: Optional[Evaluation] = None
    evaluations: int = 0
    generations: Optional[int] = None
    wall_time_s: float = 0.0
    # (generation, best_valid, best_fitness)
    fitness_trace: List[tuple[int, bool, float]] = field(default_factory=list)
    headroom_pct: Optional[float] = None
    metadata: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.status not in STATUSES:
            raise ValueError(f"invalid solver status: {self.status}")
        if self.evaluations < 0:
            raise ValueError("evaluations must be non-negative")

    @property
    def valid(self) -> bool:
        return self.evaluation is not None and self.evaluation.valid

    @property
    def makespan_ms(self) -> Optional[float]:
        return self.evaluation.makespan_ms if self.evaluation is not None else None

    def to_dict(self) -> dict[str, Any]:
        return {
            "solver": self.solver,
            "status": self.status,
            "valid": self.valid,
            "placement": self.placement.to_dict() if self.placement is not None else None,
            "evaluation": self.evaluation.to_dict() if self.evaluation is not None else None,
            "evaluations": self.evaluations,
            "generations": self.generations,
            "wall_time_s": self.wall_time_s,
            "headroom_pct": self.headroom_pct,
            "metadata": self.metadata,
        }


class BaseSolver(abc.ABC):
    """Base class that defines the life-cycle for all solvers."""

    def __init__(self, config: SolverConfig) -> None:
        self.config = config

    def run(self, dag: QueryDag, scenario: RuntimeScenario, pool: ResourcePool) -> SolveResult:
        """Compile the model, solve it and time the whole call."""
        logger.info("Starting solver", extra={"solver": self.config.name, "dag_id": self.config.dag_id})
        start = time.perf_counter()
        model = PlacementModel(dag, scenario, pool, include_sink_compute=self.config.include_sink_compute)
        result = self.solve(model)
        result.wall_time_s = time.perf_counter() - start
        logger.info(
            "Solver finished",
            extra={
                "solver": self.config.name,
                "dag_id": self.config.dag_id,
                "status": result.status,
                "duration_seconds": result.wall_time_s,
                "evaluations": result.evaluations,
                "generations": result.generations,
            },
        )
        if result.status in (STATUS_INVALID, STATUS_INFEASIBLE, STATUS_BUDGET_EXCEEDED):
            logger.warning("Solver %s ended with status %s on %s", self.config.name, result.status, self.config.dag_id)
        return result

    async def run_async(self, dag: QueryDag, scenario: RuntimeScenario, pool: ResourcePool) -> SolveResult:
        """Run the CPU-bound solve without blocking the event loop."""
        return await asyncio.to_thread(self.run, dag, scenario, pool)

    @abc.abstractmethod
    def solve(self, model: PlacementModel) -> SolveResult:
        """Search the placement space described by ``model``."""

    def result_for_row(self, model: PlacementModel, row: np.ndarray, status: str, **kwargs: Any) -> SolveResult:
        """Build a :class:`SolveResult` around one full assignment row."""
        row = np.asarray(row, dtype=np.int64)
        batch = model.evaluate(row[None, :])
        return SolveResult(
            solver=self.config.name,
            status=status,
            placement=Placement(assignment=model.mapping_of(row)),
            evaluation=evaluation_from_batch(model, batch, 0, row),
            **kwargs,
        )
