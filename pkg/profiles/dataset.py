"""Benchmark distributions for compute, energy and network behaviour.

Dataset files keep the measurement units (peak rate in e/sec, current in mA,
latency in ms, bandwidth in Mbps). Quartile entries may be given in full
(``min/q1/q2/q3/max``) or as a median only, in which case ``q1``/``q3`` are
``median * (1 -/+ spread)`` with the dataset-level ``spread``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Iterable, Mapping, Optional

import jsonschema

from schemas.query import QueryKind, QueryVariant
from schemas.units import charge_mah

EDGE = "edge"
CLOUD = "cloud"
RESOURCE_CLASSES = (EDGE, CLOUD)
EDGE_EDGE = "edge-edge"
EDGE_CLOUD = "edge-cloud"
LINK_CLASSES = (EDGE_EDGE, EDGE_CLOUD)

DEFAULT_SPREAD = 0.05
DATA_DIR = Path(__file__).resolve().parent / "data"
BUNDLED_DATASETS = {
    "campus": DATA_DIR / "campus-lan.json",
    "planetlab": DATA_DIR / "planetlab-wan.json",
}

# 합성 DAG 생성 대상 17종: 처리량이 급감하는 Pat3/Pat5 의 σ∈{0.5, 0.0} 4종 제외
ELIGIBLE_VARIANT_IDS = (
    "Fil 1.0", "Fil 0.5", "Fil 0.0",
    "Seq3 1.0", "Seq3 0.5", "Seq3 0.0",
    "Seq5 1.0", "Seq5 0.5", "Seq5 0.0",
    "Pat3 1.0", "Pat5 1.0",
    "Agg B 60", "Agg B 600", "Agg B 6000",
    "Agg S 60", "Agg S 600", "Agg S 6000",
)


class DatasetError(ValueError):
    """Base class for dataset loading problems."""


class ParseError(DatasetError):
    pass


class MissingVariant(DatasetError):
    pass


class NonMonotoneQuartiles(DatasetError):
    pass


class NonPositiveRate(ValueError):
    pass


_QUARTILE_SCHEMA = {
    "type": "object",
    "required": ["q2"],
    "properties": {k: {"type": "number"} for k in ("min", "q1", "q2", "q3", "max")},
}

DATASET_SCHEMA: dict[str, Any] = {
    "type": "object",
    "required": ["name", "base_load_ma", "variants", "network"],
    "properties": {
        "name": {"type": "string"},
        "spread": {"type": "number", "minimum": 0, "exclusiveMaximum": 1},
        "base_load_ma": {"type": "number", "minimum": 0},
        "overhead": {"type": "object"},
        "variants": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["id", "kind"],
                "properties": {
                    "id": {"type": "string"},
                    "kind": {"enum": [k.value for k in QueryKind.placeable()]},
                    "peak_rate": {"type": "object", "additionalProperties": _QUARTILE_SCHEMA},
                    "current_ma": _QUARTILE_SCHEMA,
                    "energy_mah_per_event": _QUARTILE_SCHEMA,
                },
            },
        },
        "network": {
            "type": "object",
            "additionalProperties": {
                "type": "object",
                "required": ["latency_ms", "bandwidth_mbps"],
                "properties": {"latency_ms": _QUARTILE_SCHEMA, "bandwidth_mbps": _QUARTILE_SCHEMA},
            },
        },
    },
}


@dataclass(frozen=True, slots=True)
class QuartileDistribution:
    """Box-plot summary of a measured quantity."""

    min: float
    q1: float
    q2: float
    q3: float
    max: float

    def __post_init__(self) -> None:
        if not (self.min <= self.q1 <= self.q2 <= self.q3 <= self.max):
            raise NonMonotoneQuartiles(
                f"quartiles must satisfy min<=q1<=q2<=q3<=max, got "
                f"{self.min}, {self.q1}, {self.q2}, {self.q3}, {self.max}"
            )

    @classmethod
    def from_median(cls, median: float, spread: float) -> "QuartileDistribution":
        q1 = median * (1.0 - spread)
        q3 = median * (1.0 + spread)
        return cls(min=q1, q1=q1, q2=median, q3=q3, max=q3)

    @classmethod
    def from_mapping(cls, data: Mapping[str, Any], spread: float) -> "QuartileDistribution":
        median = float(data["q2"])
        if "q1" not in data and "q3" not in data:
            derived = cls.from_median(median, spread)
            lo = float(data.get("min", derived.q1))
            hi = float(data.get("max", derived.q3))
            return cls(min=min(lo, derived.q1), q1=derived.q1, q2=median, q3=derived.q3, max=max(hi, derived.q3))
        q1 = float(data.get("q1", median))
        q3 = float(data.get("q3", median))
        return cls(
            min=float(data.get("min", q1)),
            q1=q1,
            q2=median,
            q3=q3,
            max=float(data.get("max", q3)),
        )

    def to_dict(self) -> dict[str, float]:
        return {"min": self.min, "q1": self.q1, "q2": self.q2, "q3": self.q3, "max": self.max}


@dataclass(frozen=True, slots=True)
class OverheadFit:
    """Linear fit of the parallelism overhead, in percent: a*(m-1) + b."""

    slope: float
    intercept: float


DEFAULT_OVERHEAD = {
    EDGE: OverheadFit(slope=-1.12, intercept=-5.68),
    CLOUD: OverheadFit(slope=-0.35, intercept=-3.80),
}


@dataclass(frozen=True, slots=True)
class VariantProfile:
    variant: QueryVariant
    peak_rate: Dict[str, QuartileDistribution]
    current_ma: QuartileDistribution
    energy_mah_per_event: Optional[QuartileDistribution] = None

    def __post_init__(self) -> None:
        missing = [cls for cls in RESOURCE_CLASSES if cls not in self.peak_rate]
        if missing:
            raise MissingVariant(f"[{self.variant.id}] no peak-rate entry for {', '.join(missing)}")
        for cls, dist in self.peak_rate.items():
            if dist.q1 <= 0:
                raise NonPositiveRate(f"[{self.variant.id}] {cls} peak rate must be positive")


@dataclass(frozen=True, slots=True)
class NetworkProfile:
    latency_ms: QuartileDistribution
    bandwidth_mbps: QuartileDistribution

    def __post_init__(self) -> None:
        if self.latency_ms.q1 <= 0 or self.bandwidth_mbps.q1 <= 0:
            raise ParseError("network latency and bandwidth quartiles must be positive")


@dataclass(frozen=True, slots=True)
class BenchmarkDataset:
    name: str
    base_load_ma: float
    variants: Dict[str, VariantProfile]
    network: Dict[str, NetworkProfile]
    overhead: Dict[str, OverheadFit] = field(default_factory=lambda: dict(DEFAULT_OVERHEAD))
    spread: float = DEFAULT_SPREAD
    notes: Optional[str] = None

    def __post_init__(self) -> None:
        missing_links = [pair for pair in LINK_CLASSES if pair not in self.network]
        if missing_links:
            raise ParseError(f"dataset '{self.name}' lacks network entries for {missing_links}")
        missing_overhead = [cls for cls in RESOURCE_CLASSES if cls not in self.overhead]
        if missing_overhead:
            raise ParseError(f"dataset '{self.name}' lacks overhead fits for {missing_overhead}")

    @property
    def query_variants(self) -> dict[str, QueryVariant]:
        return {vid: profile.variant for vid, profile in self.variants.items()}

    def profile(self, variant_id: str) -> VariantProfile:
        try:
            return self.variants[variant_id]
        except KeyError:
            raise MissingVariant(f"dataset '{self.name}' has no variant '{variant_id}'") from None

    def require_variants(self, variant_ids: Iterable[str]) -> None:
        missing = sorted({vid for vid in variant_ids if vid not in self.variants})
        if missing:
            raise MissingVariant(f"dataset '{self.name}' has no entries for {missing}")

    def eligible_variants(self) -> list[QueryVariant]:
        return [self.variants[vid].variant for vid in ELIGIBLE_VARIANT_IDS if vid in self.variants]

    def to_dict(self) -> dict[str, Any]:
        variants = []
        for profile in self.variants.values():
            entry = profile.variant.to_dict()
            entry["peak_rate"] = {cls: dist.to_dict() for cls, dist in profile.peak_rate.items()}
            entry["current_ma"] = profile.current_ma.to_dict()
            if profile.energy_mah_per_event is not None:
                entry["energy_mah_per_event"] = profile.energy_mah_per_event.to_dict()
            variants.append(entry)
        payload: dict[str, Any] = {
            "name": self.name,
            "spread": self.spread,
            "base_load_ma": self.base_load_ma,
            "overhead": {
                cls: {"slope": fit.slope, "intercept": fit.intercept} for cls, fit in self.overhead.items()
            },
            "variants": variants,
            "network": {
                pair: {
                    "latency_ms": profile.latency_ms.to_dict(),
                    "bandwidth_mbps": profile.bandwidth_mbps.to_dict(),
                }
                for pair, profile in self.network.items()
            },
        }
        if self.notes:
            payload["notes"] = self.notes
        return payload

    @classmethod
    def from_mapping(cls, data: Mapping[str, Any]) -> "BenchmarkDataset":
        try:
            jsonschema.validate(data, DATASET_SCHEMA)
        except jsonschema.ValidationError as exc:
            raise ParseError(f"dataset does not match schema: {exc.message}") from exc
        spread = float(data.get("spread", DEFAULT_SPREAD))
        variants: dict[str, VariantProfile] = {}
        for entry in data["variants"]:
            variant = QueryVariant.from_mapping(entry)
            if "peak_rate" not in entry or "current_ma" not in entry:
                raise MissingVariant(f"[{variant.id}] needs both 'peak_rate' and 'current_ma'")
            energy = entry.get("energy_mah_per_event")
            variants[variant.id] = VariantProfile(
                variant=variant,
                peak_rate={
                    str(k): QuartileDistribution.from_mapping(v, spread) for k, v in entry["peak_rate"].items()
                },
                current_ma=QuartileDistribution.from_mapping(entry["current_ma"], spread),
                energy_mah_per_event=(
                    QuartileDistribution.from_mapping(energy, spread) if energy is not None else None
                ),
            )
        network = {
            str(pair): NetworkProfile(
                latency_ms=QuartileDistribution.from_mapping(profile["latency_ms"], spread),
                bandwidth_mbps=QuartileDistribution.from_mapping(profile["bandwidth_mbps"], spread),
            )
            for pair, profile in data["network"].items()
        }
        overhead = dict(DEFAULT_OVERHEAD)
        for res_cls, fit in (data.get("overhead") or {}).items():
            overhead[str(res_cls)] = OverheadFit(slope=float(fit["slope"]), intercept=float(fit["intercept"]))
        return cls(
            name=str(data["name"]),
            base_load_ma=float(data["base_load_ma"]),
            variants=variants,
            network=network,
            overhead=overhead,
            spread=spread,
            notes=data.get("notes"),
        )


def load_dataset(path: Path) -> BenchmarkDataset:
    """Load and validate a dataset file."""
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ParseError(f"Invalid JSON in dataset file '{path}': {exc}") from exc
    return BenchmarkDataset.from_mapping(data)


def dump_dataset(dataset: BenchmarkDataset, path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(dataset.to_dict(), ensure_ascii=False, indent=2), encoding="utf-8")
    return path


def bundled_dataset(name: str) -> BenchmarkDataset:
    """Load one of the bundled datasets by short name or file stem."""
    for key, path in BUNDLED_DATASETS.items():
        if name in (key, path.stem, path.name):
            return load_dataset(path)
    raise KeyError(f"unknown bundled dataset '{name}'; choose from {sorted(BUNDLED_DATASETS)}")


def energy_per_event(current_ma: float, base_ma: float, rate: float) -> float:
    """Incremental charge (mAh) drawn per event above the base load."""
    if rate <= 0:
        raise NonPositiveRate(f"rate must be positive, got {rate}")
    if current_ma < base_ma:
        raise ValueError(f"query current {current_ma} mA is below the base load {base_ma} mA")
    # 한 이벤트 처리 시간(1/rate) 동안 base 를 넘는 전류분
    return charge_mah(current_ma - base_ma, 1.0 / rate)


def parallelism_overhead(
    resource_class: str, m: int, overhead: Mapping[str, OverheadFit] | None = None
) -> float:
    """Throughput overhead fraction (<= 0) when ``m`` queries share a resource.

    A single query runs exclusively and pays no overhead.
    """
    if m < 1:
        raise ValueError("m must be at least 1")
    if m == 1:
        return 0.0
    fit = (overhead or DEFAULT_OVERHEAD)[resource_class]
    return (fit.slope * (m - 1) + fit.intercept) / 100.0
