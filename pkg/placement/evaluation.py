"""Scalar evaluation of one placement: makespan, constraints and rate headroom."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Mapping, Optional

import numpy as np

from dataflow.dag import QueryDag
from dataflow.rates import RateMap
from placement.model import (
    BatchEvaluation,
    ConstraintVerdict,
    PinningViolation,
    PlacementModel,
    UnplacedVertex,
)
from schemas.units import seconds_to_ms
from simulation.resources import ResourcePool
from simulation.scenario import RuntimeScenario

logger = logging.getLogger(__name__)

THROUGHPUT = "throughput"
ENERGY = "energy"

HEADROOM_RESOLUTION_PCT = 0.1
HEADROOM_CEILING_PCT = 1e7

__all__ = [
    "ENERGY",
    "THROUGHPUT",
    "Evaluation",
    "InvalidBase",
    "PinningViolation",
    "Placement",
    "ResourceLoad",
    "UnplacedVertex",
    "Violation",
    "check_constraints",
    "end_to_end_latency",
    "evaluate",
    "evaluation_from_batch",
    "rate_headroom",
]


class InvalidBase(ValueError):
    """Raised when headroom is requested for a placement that is invalid at its base rate."""


@dataclass(frozen=True, slots=True)
class Placement:
    """The mapping M: V → R as vertex-id → resource-id."""

    assignment: Dict[str, str]

    def resource_of(self, vertex_id: str) -> str:
        try:
            return self.assignment[vertex_id]
        except KeyError:
            raise UnplacedVertex(f"vertex {vertex_id} has no resource") from None

    def used_resources(self) -> set[str]:
        return set(self.assignment.values())

    def to_dict(self) -> dict[str, str]:
        return dict(self.assignment)

    @classmethod
    def from_mapping(cls, data: Mapping[str, Any]) -> "Placement":
        return cls(assignment={str(k): str(v) for k, v in data.items()})


@dataclass(frozen=True, slots=True)
class Violation:
    kind: str  # THROUGHPUT | ENERGY
    resource_id: str
    detail: str

    def to_dict(self) -> dict[str, str]:
        return {"kind": self.kind, "resource_id": self.resource_id, "detail": self.detail}


@dataclass(frozen=True, slots=True)
class ResourceLoad:
    queries: int
    consumed_energy_mah: Optional[float] = None  # edges only

    def to_dict(self) -> dict[str, Any]:
        return {"queries": self.queries, "consumed_energy_mah": self.consumed_energy_mah}


@dataclass(slots=True)
class Evaluation:
    makespan: float  # seconds
    critical_path: List[str]
    violations: List[Violation] = field(default_factory=list)
    per_resource: Dict[str, ResourceLoad] = field(default_factory=dict)

    @property
    def valid(self) -> bool:
        return not self.violations

    @property
    def makespan_ms(self) -> float:
        return seconds_to_ms(self.makespan)

    def violated_kinds(self) -> set[str]:
        return {v.kind for v in self.violations}

    def to_dict(self) -> dict[str, Any]:
        return {
            "makespan_ms": self.makespan_ms,
            "valid": self.valid,
            "critical_path": list(self.critical_path),
            "violations": [v.to_dict() for v in self.violations],
            "per_resource": {rid: load.to_dict() for rid, load in self.per_resource.items()},
        }


def _violations(
    model: PlacementModel, batch_row: int, verdict: ConstraintVerdict, omega: np.ndarray, row: np.ndarray
) -> List[Violation]:
    ids = model.pool.resource_ids
    found: List[Violation] = []
    counts = verdict.queries[batch_row]
    for res in np.flatnonzero(verdict.throughput[batch_row]):
        on_res = np.flatnonzero((row == res) & model.placeable)
        load = float(model.lam[on_res, res].sum())
        worst = on_res[np.argmax(omega[on_res])]
        m = int(counts[res])
        found.append(
            Violation(
                kind=THROUGHPUT,
                resource_id=ids[res],
                detail=(
                    f"{model.vertex_ids[worst]} input {omega[worst]:.2f} e/s with {m} co-located "
                    f"queries exceeds capacity {1.0 / load if load else float('inf'):.2f} e/s before overhead"
                ),
            )
        )
    for res in np.flatnonzero(verdict.energy[batch_row]):
        found.append(
            Violation(
                kind=ENERGY,
                resource_id=ids[res],
                detail=(
                    f"consumes {verdict.consumed_mah[batch_row, res]:.1f} mAh over the recharge period, "
                    f"capacity {model.capacity[res]:.1f} mAh"
                ),
            )
        )
    return found


def evaluation_from_batch(
    model: PlacementModel, batch: BatchEvaluation, row_index: int, assignment: np.ndarray
) -> Evaluation:
    """Materialize one row of a batch as an :class:`Evaluation`."""
    verdict = batch.verdict
    ids = model.pool.resource_ids
    per_resource: dict[str, ResourceLoad] = {}
    for res, rid in enumerate(ids):
        energy = float(verdict.consumed_mah[row_index, res]) if model.is_edge[res] else None
        per_resource[rid] = ResourceLoad(queries=int(verdict.queries[row_index, res]), consumed_energy_mah=energy)
    return Evaluation(
        makespan=float(batch.makespan[row_index]),
        critical_path=model.critical_path(batch, row_index),
        violations=_violations(model, row_index, verdict, model.omega_in * batch.rate_factor, assignment),
        per_resource=per_resource,
    )


def _model(dag, scenario, pool, include_sink_compute: bool = False) -> PlacementModel:
    return PlacementModel(dag, scenario, pool, include_sink_compute=include_sink_compute)


def end_to_end_latency(
    dag: QueryDag,
    scenario: RuntimeScenario,
    placement: Placement,
    pool: ResourcePool,
    *,
    include_sink_compute: bool = False,
) -> tuple[float, list[str]]:
    """Makespan L_G in seconds and the critical path achieving it."""
    model = _model(dag, scenario, pool, include_sink_compute)
    row = model.assignment_row(placement.assignment)
    batch = model.evaluate(row[None, :])
    return float(batch.makespan[0]), model.critical_path(batch, 0)


def check_constraints(
    dag: QueryDag,
    scenario: RuntimeScenario,
    placement: Placement,
    pool: ResourcePool,
    rate_map: RateMap | None = None,
) -> List[Violation]:
    """Throughput and energy violations, at most one per resource and kind."""
    model = _model(dag, scenario, pool)
    row = model.assignment_row(placement.assignment)
    omega = model.omega_in
    if rate_map is not None:
        omega = np.array([rate_map.omega_in[vid] for vid in model.vertex_ids], dtype=float)
    verdict = model.check(row[None, :], omega_in=omega)
    return _violations(model, 0, verdict, omega, row)


def evaluate(
    dag: QueryDag,
    scenario: RuntimeScenario,
    placement: Placement,
    pool: ResourcePool,
    *,
    include_sink_compute: bool = False,
) -> Evaluation:
    model = _model(dag, scenario, pool, include_sink_compute)
    row = model.assignment_row(placement.assignment)
    return evaluation_from_batch(model, model.evaluate(row[None, :]), 0, row)


def headroom_of_row(
    model: PlacementModel,
    row: np.ndarray,
    *,
    resolution: float = HEADROOM_RESOLUTION_PCT,
    ceiling: float = HEADROOM_CEILING_PCT,
) -> float:
    """Bisection on the % rate increase that keeps ``row`` violation-free."""
    row = np.asarray(row, dtype=np.int64)[None, :]

    def valid_at(pct: float) -> bool:
        return bool(model.check(row, rate_factor=1.0 + pct / 100.0).valid[0])

    if not valid_at(0.0):
        raise InvalidBase("placement violates constraints at its base rate")
    lo, hi = 0.0, 100.0
    while valid_at(hi):
        lo, hi = hi, hi * 2.0
        if hi > ceiling:
            logger.warning("Rate headroom exceeds %.0f%%; reporting the ceiling", ceiling)
            return ceiling
    while hi - lo > resolution:
        mid = (lo + hi) / 2.0
        if valid_at(mid):
            lo = mid
        else:
            hi = mid
    return lo


def rate_headroom(
    dag: QueryDag,
    scenario: RuntimeScenario,
    placement: Placement,
    pool: ResourcePool,
    *,
    resolution: float = HEADROOM_RESOLUTION_PCT,
) -> float:
    """Largest % increase of the DAG input before the placement violates a constraint.

    Latency is not re-evaluated; only the rate-linear constraint checks move.
    """
    model = _model(dag, scenario, pool)
    row = model.assignment_row(placement.assignment)
    return headroom_of_row(model, row, resolution=resolution)
