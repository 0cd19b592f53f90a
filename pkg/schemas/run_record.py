"""One row of the experiment run table (``runs.csv``)."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Optional

RUN_STATUS_ERROR = "error"
RUN_STATUSES = ("ok", "invalid", "infeasible", "budget_exceeded", "skipped", RUN_STATUS_ERROR)

RUN_COLUMNS = (
    "cell",
    "dag_id",
    "dataset",
    "rate",
    "setup",
    "solver",
    "status",
    "valid",
    "makespan_ms",
    "edge_used_pct",
    "violations",
    "evaluations",
    "generations",
    "population",
    "wall_time_s",
    "n_vertices",
    "n_edges",
    "n_unpinned",
    "n_resources",
    "headroom_pct",
    "seed",
    "error",
)


@dataclass(slots=True)
class RunRecord:
    """Outcome of one solver on one experiment cell.

    실패한 셀도 행으로 남긴다(``status=error``). 결측 수치는 0 이 아니라 None.
    """

    dag_id: str
    dataset: str
    rate: float
    setup: str
    solver: str
    status: str
    valid: bool = False
    makespan_ms: Optional[float] = None
    edge_used_pct: Optional[float] = None
    violations: str = ""  # "throughput;energy"
    evaluations: int = 0
    generations: Optional[int] = None
    population: Optional[int] = None
    wall_time_s: Optional[float] = None
    n_vertices: int = 0
    n_edges: int = 0
    n_unpinned: int = 0
    n_resources: int = 0
    headroom_pct: Optional[float] = None
    seed: Optional[int] = None
    error: Optional[str] = None
    metadata: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not self.dag_id:
            raise ValueError("dag_id is required")
        if not self.solver:
            raise ValueError("solver is required")
        if self.status not in RUN_STATUSES:
            raise ValueError(f"invalid status: {self.status}")
        if self.rate <= 0:
            raise ValueError("rate must be positive")
        if self.makespan_ms is not None and self.makespan_ms < 0:
            raise ValueError("makespan_ms must be non-negative")
        if self.valid and self.makespan_ms is None:
            raise ValueError("a valid run needs a makespan")

    @property
    def cell(self) -> str:
        return cell_key(self.dag_id, self.dataset, self.rate, self.setup)

    def to_dict(self) -> dict[str, Any]:
        return {
            "cell": self.cell,
            "dag_id": self.dag_id,
            "dataset": self.dataset,
            "rate": self.rate,
            "setup": self.setup,
            "solver": self.solver,
            "status": self.status,
            "valid": self.valid,
            "makespan_ms": self.makespan_ms,
            "edge_used_pct": self.edge_used_pct,
            "violations": self.violations,
            "evaluations": self.evaluations,
            "generations": self.generations,
            "population": self.population,
            "wall_time_s": self.wall_time_s,
            "n_vertices": self.n_vertices,
            "n_edges": self.n_edges,
            "n_unpinned": self.n_unpinned,
            "n_resources": self.n_resources,
            "headroom_pct": self.headroom_pct,
            "seed": self.seed,
            "error": self.error,
        }


def cell_key(dag_id: str, dataset: str, rate: float, setup: str) -> str:
    return f"{dag_id}|{dataset}|{rate:g}|{setup}"
