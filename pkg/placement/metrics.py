"""Quality metrics used to compare solvers across a DAG suite."""
from __future__ import annotations

from collections import Counter
from typing import Any, Iterable, Mapping, Sequence

import numpy as np

from placement.evaluation import Placement
from simulation.resources import ResourcePool


class EmptyInput(ValueError):
    """Raised when a metric is asked for over no data."""


def latency_deviation(better: Sequence[float], worse: Sequence[float]) -> float:
    """Mean excess latency of ``worse`` over ``better``, in % of the better mean.

    Both sequences hold makespans for the same DAGs, restricted to pairs where
    both solutions are valid.
    """
    if len(better) != len(worse):
        raise ValueError(f"latency lists differ in length: {len(better)} vs {len(worse)}")
    if not better:
        raise EmptyInput("latency deviation needs at least one pair")
    base = np.asarray(better, dtype=float)
    other = np.asarray(worse, dtype=float)
    mean = base.mean()
    if mean <= 0:
        raise ValueError("mean latency of the better solver must be positive")
    return float((other - base).sum() / (len(base) * mean) * 100.0)


def edge_used_pct(placement: Placement, pool: ResourcePool) -> float:
    """Share of edge devices hosting at least one vertex (sources included)."""
    if not pool.edges:
        return 0.0
    used = placement.used_resources()
    hosting = sum(1 for edge in pool.edges if edge.id in used)
    return hosting / len(pool.edges) * 100.0


def _is_valid(result: Any) -> bool:
    if isinstance(result, Mapping):
        return bool(result.get("valid"))
    return bool(getattr(result, "valid", result))


def invalid_pct(results: Iterable[Any]) -> float:
    """Share of runs without a valid solution.

    Items may be booleans, mappings with a ``valid`` key, or objects with a
    ``valid`` attribute.
    """
    flags = [_is_valid(result) for result in results]
    if not flags:
        raise EmptyInput("invalid percentage needs at least one result")
    return (len(flags) - sum(flags)) / len(flags) * 100.0


def occupancy_histogram(placements: Iterable[Placement], pool: ResourcePool) -> dict[str, Any]:
    """How many edge devices host 1, 2, 3, … vertices, and the cloud load per placement.

    엣지 장치당 쿼리 수 분포(0개는 제외)와 배치별 클라우드 VM 쿼리 수.
    """
    edge_ids = {edge.id for edge in pool.edges}
    cloud_ids = {cloud.id for cloud in pool.clouds}
    per_edge: Counter[int] = Counter()
    cloud_counts: list[int] = []
    for placement in placements:
        hosted = Counter(placement.assignment.values())
        for rid, count in hosted.items():
            if rid in edge_ids:
                per_edge[count] += 1
        cloud_counts.append(sum(hosted[rid] for rid in cloud_ids))
    return {"edge": dict(sorted(per_edge.items())), "cloud": cloud_counts}


def headroom_violation_curve(headrooms: Sequence[float], steps: Sequence[float]) -> list[tuple[float, float]]:
    """Fraction of DAGs whose placement violates at each % rate increase.

    A placement with headroom h stays valid up to h% and violates beyond it.
    """
    if not len(headrooms):
        raise EmptyInput("headroom curve needs at least one placement")
    values = np.asarray(headrooms, dtype=float)
    return [(float(step), float((values < step).mean())) for step in steps]
