"""One concrete runtime scenario for a DAG, sampled from a benchmark dataset.

시나리오는 한 번 샘플링되면 불변이며, 같은 셀의 모든 솔버가 공유한다.
Values are stored in SI units: seconds/event, mAh/event, seconds, bits/second.
"""
from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Mapping, Tuple

import numpy as np

from dataflow.dag import QueryDag
from dataflow.rates import RateMap, propagate_rates
from profiles.dataset import (
    CLOUD,
    DEFAULT_OVERHEAD,
    EDGE,
    EDGE_CLOUD,
    EDGE_EDGE,
    BenchmarkDataset,
    OverheadFit,
    energy_per_event,
)
from profiles.sampling import sample
from schemas.units import mbps_to_bps, ms_to_seconds

logger = logging.getLogger(__name__)


@dataclass(frozen=True, slots=True)
class VertexProfile:
    """Sampled compute and energy cost of one vertex."""

    lambda_edge: float
    lambda_cloud: float
    energy_edge: float = 0.0

    def __post_init__(self) -> None:
        if self.lambda_edge < 0 or self.lambda_cloud < 0 or self.energy_edge < 0:
            raise ValueError("vertex costs must be non-negative")

    def compute_latency(self, resource_class: str) -> float:
        return self.lambda_edge if resource_class == EDGE else self.lambda_cloud


SOURCE_PROFILE = VertexProfile(lambda_edge=0.0, lambda_cloud=0.0, energy_edge=0.0)


@dataclass(frozen=True, slots=True)
class LinkProfile:
    """Sampled network tuple of one DAG edge; the endpoints' classes pick the pair."""

    latency_ee: float
    latency_ec: float
    bandwidth_ee: float
    bandwidth_ec: float

    def __post_init__(self) -> None:
        if min(self.latency_ee, self.latency_ec) <= 0:
            raise ValueError("link latencies must be positive")
        if min(self.bandwidth_ee, self.bandwidth_ec) <= 0:
            raise ValueError("link bandwidths must be positive")

    def to_dict(self) -> dict[str, float]:
        return {
            "latency_ee": self.latency_ee,
            "latency_ec": self.latency_ec,
            "bandwidth_ee": self.bandwidth_ee,
            "bandwidth_ec": self.bandwidth_ec,
        }


@dataclass(frozen=True, slots=True)
class RuntimeScenario:
    vertices: Dict[str, VertexProfile]
    links: Dict[Tuple[str, str], LinkProfile]
    rate_map: RateMap
    overhead: Dict[str, OverheadFit] = field(default_factory=lambda: dict(DEFAULT_OVERHEAD))
    dataset: str | None = None

    def vertex(self, vertex_id: str) -> VertexProfile:
        return self.vertices[vertex_id]

    def link(self, tail: str, head: str) -> LinkProfile:
        return self.links[(tail, head)]

    def at_rate(self, dag_input: float) -> "RuntimeScenario":
        """Same sampled costs, rates rescaled to a new DAG input."""
        factor = dag_input / self.rate_map.dag_input
        return RuntimeScenario(
            vertices=self.vertices,
            links=self.links,
            rate_map=self.rate_map.scaled(factor),
            overhead=self.overhead,
            dataset=self.dataset,
        )

    def to_dict(self) -> dict[str, Any]:
        return {
            "dataset": self.dataset,
            "vertices": {
                vid: {
                    "lambda_edge": prof.lambda_edge,
                    "lambda_cloud": prof.lambda_cloud,
                    "energy_edge": prof.energy_edge,
                }
                for vid, prof in self.vertices.items()
            },
            "links": [
                {"tail": tail, "head": head, **link.to_dict()} for (tail, head), link in self.links.items()
            ],
            "rate_map": self.rate_map.to_dict(),
            "overhead": {
                cls: {"slope": fit.slope, "intercept": fit.intercept} for cls, fit in self.overhead.items()
            },
        }

    @classmethod
    def from_mapping(cls, data: Mapping[str, Any]) -> "RuntimeScenario":
        links = {}
        for entry in data.get("links", []):
            links[(str(entry["tail"]), str(entry["head"]))] = LinkProfile(
                latency_ee=float(entry["latency_ee"]),
                latency_ec=float(entry["latency_ec"]),
                bandwidth_ee=float(entry["bandwidth_ee"]),
                bandwidth_ec=float(entry["bandwidth_ec"]),
            )
        overhead = dict(DEFAULT_OVERHEAD)
        for res_cls, fit in (data.get("overhead") or {}).items():
            overhead[str(res_cls)] = OverheadFit(slope=float(fit["slope"]), intercept=float(fit["intercept"]))
        return cls(
            vertices={
                str(vid): VertexProfile(
                    lambda_edge=float(prof["lambda_edge"]),
                    lambda_cloud=float(prof["lambda_cloud"]),
                    energy_edge=float(prof.get("energy_edge", 0.0)),
                )
                for vid, prof in data["vertices"].items()
            },
            links=links,
            rate_map=RateMap.from_mapping(data["rate_map"]),
            overhead=overhead,
            dataset=data.get("dataset"),
        )


def materialize(
    dag: QueryDag, dataset: BenchmarkDataset, dag_input: float, rng: np.random.Generator
) -> RuntimeScenario:
    """Sample λ/ε per vertex and ⟨l, β⟩ per edge.

    Draw order is fixed (vertices in declaration order, then edges in
    declaration order) so a seed reproduces the scenario exactly.
    """
    dataset.require_variants(variant.id for _, variant in dag.vertices if not variant.is_source)
    rate_map = propagate_rates(dag, dag_input)

    vertices: dict[str, VertexProfile] = {}
    for vid, variant in dag.vertices:
        if variant.is_source:
            vertices[vid] = SOURCE_PROFILE
            continue
        profile = dataset.profile(variant.id)
        peak_edge = sample(profile.peak_rate[EDGE], rng)
        peak_cloud = sample(profile.peak_rate[CLOUD], rng)
        if profile.energy_mah_per_event is not None:
            energy = sample(profile.energy_mah_per_event, rng)
        else:
            current = max(sample(profile.current_ma, rng), dataset.base_load_ma)
            energy = energy_per_event(current, dataset.base_load_ma, peak_edge)
        vertices[vid] = VertexProfile(lambda_edge=1.0 / peak_edge, lambda_cloud=1.0 / peak_cloud, energy_edge=energy)

    ee = dataset.network[EDGE_EDGE]
    ec = dataset.network[EDGE_CLOUD]
    links: dict[tuple[str, str], LinkProfile] = {}
    for tail, head in dag.edges:
        links[(tail, head)] = LinkProfile(
            latency_ee=ms_to_seconds(sample(ee.latency_ms, rng)),
            latency_ec=ms_to_seconds(sample(ec.latency_ms, rng)),
            bandwidth_ee=mbps_to_bps(sample(ee.bandwidth_mbps, rng)),
            bandwidth_ec=mbps_to_bps(sample(ec.bandwidth_mbps, rng)),
        )
    logger.debug("Materialized scenario", extra={"dataset": dataset.name, "vertices": len(vertices)})
    return RuntimeScenario(
        vertices=vertices, links=links, rate_map=rate_map, overhead=dict(dataset.overhead), dataset=dataset.name
    )


def save_scenario(scenario: RuntimeScenario, path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(scenario.to_dict(), ensure_ascii=False, indent=2), encoding="utf-8")
    return path


def load_scenario(path: Path) -> RuntimeScenario:
    return RuntimeScenario.from_mapping(json.loads(Path(path).read_text(encoding="utf-8")))
