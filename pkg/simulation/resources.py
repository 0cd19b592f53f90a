"""Edge devices and cloud VMs available for placement."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Any, Mapping

from profiles.dataset import CLOUD, EDGE

DEFAULT_CAPACITY_MAH = 8600.0
DEFAULT_RECHARGE_PERIOD_S = 86_400.0


class Setup(str, enum.Enum):
    LIBERAL = "liberal"
    CENTRIST = "centrist"
    CONSERVATIVE = "conservative"


@dataclass(frozen=True, slots=True)
class EnergyProfile:
    """Battery parameters per edge device; the base load comes from the dataset."""

    capacity_mah: float = DEFAULT_CAPACITY_MAH
    recharge_period_s: float = DEFAULT_RECHARGE_PERIOD_S

    def __post_init__(self) -> None:
        if self.capacity_mah <= 0:
            raise ValueError("capacity_mah must be positive")
        if self.recharge_period_s <= 0:
            raise ValueError("recharge_period_s must be positive")

    @classmethod
    def from_mapping(cls, data: Mapping[str, Any]) -> "EnergyProfile":
        return cls(
            capacity_mah=float(data.get("capacity_mah", DEFAULT_CAPACITY_MAH)),
            recharge_period_s=float(data.get("recharge_period_s", DEFAULT_RECHARGE_PERIOD_S)),
        )


# 배터리 용량·충전 주기 대안 구성
BATTERY_PRESETS = {
    "default": EnergyProfile(8600.0, 86_400.0),
    "half-day": EnergyProfile(8600.0, 43_200.0),
    "double": EnergyProfile(17_200.0, 86_400.0),
}


@dataclass(frozen=True, slots=True)
class EdgeDevice:
    id: str
    capacity_mah: float
    recharge_period_s: float
    base_load_ma: float

    resource_class = EDGE


@dataclass(frozen=True, slots=True)
class CloudVm:
    id: str

    resource_class = CLOUD


@dataclass(frozen=True, slots=True)
class ResourcePool:
    """Edge devices followed by cloud VMs; list position is the gene value."""

    edges: tuple[EdgeDevice, ...]
    clouds: tuple[CloudVm, ...]

    def __post_init__(self) -> None:
        if not self.clouds:
            raise ValueError("a resource pool needs at least one cloud VM")
        edge_ids = {e.id for e in self.edges}
        cloud_ids = {c.id for c in self.clouds}
        if len(edge_ids) != len(self.edges) or len(cloud_ids) != len(self.clouds):
            raise ValueError("resource ids must be unique")
        if edge_ids & cloud_ids:
            raise ValueError("edge and cloud resources must be disjoint")

    @property
    def resources(self) -> tuple[EdgeDevice | CloudVm, ...]:
        return self.edges + self.clouds

    @property
    def resource_ids(self) -> list[str]:
        return [r.id for r in self.resources]

    def __len__(self) -> int:
        return len(self.edges) + len(self.clouds)

    def index_of(self, resource_id: str) -> int:
        for pos, resource in enumerate(self.resources):
            if resource.id == resource_id:
                return pos
        raise KeyError(resource_id)

    def is_edge(self, index: int) -> bool:
        return index < len(self.edges)

    def describe(self) -> dict[str, Any]:
        return {"edges": len(self.edges), "clouds": len(self.clouds), "ids": self.resource_ids}


def edge_count(setup: Setup | str, n_vertices: int) -> int:
    setup = Setup(setup)
    if setup is Setup.LIBERAL:
        return n_vertices - 1
    if setup is Setup.CENTRIST:
        return math.ceil(n_vertices / 2)
    return math.ceil(n_vertices / 4)


def build_pool(
    setup: Setup | str,
    n_vertices: int,
    energy: EnergyProfile | None = None,
    *,
    base_load_ma: float,
) -> ResourcePool:
    """One cloud VM plus an edge pool sized by the availability scenario.

    ``base_load_ma`` is the dataset's measured idle draw, the same figure the
    per-event energy is computed against.
    """
    if n_vertices < 4:
        raise ValueError("resource scenarios are defined for DAGs with at least 4 vertices")
    if base_load_ma < 0:
        raise ValueError("base_load_ma must be non-negative")
    energy = energy or EnergyProfile()
    edges = tuple(
        EdgeDevice(
            id=f"edge-{k}",
            capacity_mah=energy.capacity_mah,
            recharge_period_s=energy.recharge_period_s,
            base_load_ma=base_load_ma,
        )
        for k in range(edge_count(setup, n_vertices))
    )
    return ResourcePool(edges=edges, clouds=(CloudVm(id="cloud-0"),))
