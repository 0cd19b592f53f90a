"""Synthetic CEP DAG generation, feasibility screening and the DAG suite.

레이어 방식 생성기: 레이어 0 = 소스, 이후 레이어 폭은 무작위, 간선은 앞 레이어에서
뒤 레이어로만 향하므로 항상 비순환이다. 마지막 레이어가 싱크가 된다.
"""
from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Mapping, Optional, Sequence

import numpy as np

from dataflow.dag import QueryDag, load_dag, save_dag, validate_dag
from dataflow.rates import propagate_rates
from profiles.dataset import CLOUD, BenchmarkDataset
from schemas.query import SOURCE_VARIANT, QueryKind, QueryVariant

logger = logging.getLogger(__name__)

DEFAULT_SIZES = (4, 6, 8, 10, 12, 20, 30, 40, 50)
DEFAULT_INSTANCES = 3
DEFAULT_SOURCE_COUNTS = (1, 4)
FOUR_SOURCE_MIN_SIZE = 10
MAX_OUT_DEGREE_RANGE = (1, 5)
SCREEN_RATE = 1000.0
MAX_ATTEMPTS = 10_000

REJECT_RATE_TOO_HIGH = "rate_too_high"
REJECT_ZERO_SELECTIVITY = "zero_selectivity"


class UnsatisfiableShape(ValueError):
    """Raised when the requested DAG shape cannot be built."""


class GiveUp(RuntimeError):
    """Raised when screening keeps rejecting generated DAGs."""


@dataclass(frozen=True, slots=True)
class Reject:
    reason: str  # REJECT_*
    detail: str = ""


def _variants_by_kind(dataset: BenchmarkDataset) -> dict[QueryKind, list[QueryVariant]]:
    grouped: dict[QueryKind, list[QueryVariant]] = {kind: [] for kind in QueryKind.placeable()}
    for variant in dataset.eligible_variants():
        grouped[variant.kind].append(variant)
    empty = [kind.value for kind, variants in grouped.items() if not variants]
    if empty:
        raise UnsatisfiableShape(f"dataset '{dataset.name}' has no eligible variants for {empty}")
    return grouped


def _layers(n_vertices: int, n_sources: int, max_width: int, rng: np.random.Generator) -> list[list[int]]:
    layers = [list(range(n_sources))]
    nxt = n_sources
    while nxt < n_vertices:
        width = min(int(rng.integers(1, max_width + 1)), n_vertices - nxt)
        layers.append(list(range(nxt, nxt + width)))
        nxt += width
    return layers


def generate_dag(
    n_vertices: int,
    n_sources: int,
    max_out_degree: int,
    dataset: BenchmarkDataset,
    rng: np.random.Generator,
) -> QueryDag:
    """Random layered DAG with capped out-degree and uniformly drawn query kinds."""
    lo, hi = MAX_OUT_DEGREE_RANGE
    if n_vertices < 4:
        raise UnsatisfiableShape("DAGs need at least 4 vertices")
    if not 1 <= n_sources < n_vertices:
        raise UnsatisfiableShape(f"need 1 <= sources < vertices, got {n_sources} of {n_vertices}")
    if not lo <= max_out_degree <= hi:
        raise UnsatisfiableShape(f"max out-degree must be within [{lo}, {hi}]")
    by_kind = _variants_by_kind(dataset)

    layers = _layers(n_vertices, n_sources, max_out_degree, rng)
    layer_of = {v: depth for depth, members in enumerate(layers) for v in members}
    last = len(layers) - 1
    children: list[list[int]] = [[] for _ in range(n_vertices)]

    def add_edge(tail: int, head: int) -> None:
        children[tail].append(head)

    # 1) 모든 비소스 정점에 부모 하나(직전 레이어 우선, 없으면 더 앞 레이어)
    for depth in range(1, len(layers)):
        for head in layers[depth]:
            near = [v for v in layers[depth - 1] if len(children[v]) < max_out_degree]
            if not near:
                near = [v for d in range(depth - 1) for v in layers[d] if len(children[v]) < max_out_degree]
            if not near:
                raise UnsatisfiableShape("out-degree cap leaves a vertex without a parent")
            add_edge(near[int(rng.integers(len(near)))], head)

    # 2) 마지막 레이어 외 정점은 자식 하나 이상
    for depth in range(last):
        for tail in layers[depth]:
            if not children[tail]:
                nxt = layers[depth + 1]
                add_edge(tail, nxt[int(rng.integers(len(nxt)))])

    # 3) 목표 out-degree 까지 뒤쪽 레이어로 간선 추가
    for depth in range(last):
        later = [v for d in range(depth + 1, len(layers)) for v in layers[d]]
        for tail in layers[depth]:
            target = int(rng.integers(1, max_out_degree + 1))
            while len(children[tail]) < target:
                free = [v for v in later if v not in children[tail]]
                if not free:
                    break
                add_edge(tail, free[int(rng.integers(len(free)))])

    kinds = QueryKind.placeable()
    vertices: list[tuple[str, QueryVariant]] = []
    for v in range(n_vertices):
        if layer_of[v] == 0:
            vertices.append((f"v{v}", SOURCE_VARIANT))
            continue
        kind = kinds[int(rng.integers(len(kinds)))]
        options = by_kind[kind]
        vertices.append((f"v{v}", options[int(rng.integers(len(options)))]))
    edges = [(f"v{tail}", f"v{head}") for tail in range(n_vertices) for head in sorted(children[tail])]
    dag = QueryDag(vertices, edges)
    validate_dag(dag)
    return dag


def screen_dag(dag: QueryDag, dataset: BenchmarkDataset, dag_input: float = SCREEN_RATE) -> Optional[Reject]:
    """None when the DAG passes both feasibility screens, otherwise the rejection."""
    rates = propagate_rates(dag, dag_input)
    for vid, variant in dag.vertices:
        if variant.is_source:
            continue
        ceiling = dataset.profile(variant.id).peak_rate[CLOUD].q3
        if rates.omega_in[vid] > ceiling:
            return Reject(
                REJECT_RATE_TOO_HIGH,
                f"{vid} ({variant.id}) input {rates.omega_in[vid]:.1f} e/s exceeds cloud q3 {ceiling:.1f} e/s",
            )
    if rates.dag_output == 0.0:
        return Reject(REJECT_ZERO_SELECTIVITY, "DAG selectivity is zero")
    return None


def generate_screened(
    n_vertices: int,
    n_sources: int,
    max_out_degree: int,
    dataset: BenchmarkDataset,
    rng: np.random.Generator,
    *,
    max_attempts: int = MAX_ATTEMPTS,
    dag_input: float = SCREEN_RATE,
) -> tuple[QueryDag, int]:
    """Generate until a DAG passes screening; returns the DAG and the attempt count."""
    reasons: dict[str, int] = {}
    for attempt in range(1, max_attempts + 1):
        dag = generate_dag(n_vertices, n_sources, max_out_degree, dataset, rng)
        reject = screen_dag(dag, dataset, dag_input)
        if reject is None:
            if attempt > 1:
                logger.info("Accepted DAG after %d attempts (rejections: %s)", attempt, reasons)
            return dag, attempt
        reasons[reject.reason] = reasons.get(reject.reason, 0) + 1
    raise GiveUp(
        f"no DAG with {n_vertices} vertices / {n_sources} sources passed screening "
        f"in {max_attempts} attempts: {reasons}"
    )


@dataclass(slots=True)
class SuiteEntry:
    dag_id: str
    n_vertices: int
    n_sources: int
    max_out_degree: int
    seed: int
    path: Optional[str] = None
    attempts: int = 1

    def to_dict(self) -> dict[str, Any]:
        return {
            "dag_id": self.dag_id,
            "n_vertices": self.n_vertices,
            "n_sources": self.n_sources,
            "max_out_degree": self.max_out_degree,
            "seed": self.seed,
            "path": self.path,
            "attempts": self.attempts,
        }

    @classmethod
    def from_mapping(cls, data: Mapping[str, Any]) -> "SuiteEntry":
        return cls(
            dag_id=str(data["dag_id"]),
            n_vertices=int(data["n_vertices"]),
            n_sources=int(data["n_sources"]),
            max_out_degree=int(data["max_out_degree"]),
            seed=int(data["seed"]),
            path=data.get("path"),
            attempts=int(data.get("attempts", 1)),
        )


@dataclass(slots=True)
class SuiteManifest:
    dataset: str
    seed: int
    entries: list[SuiteEntry] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.entries)

    def ids(self) -> list[str]:
        return [entry.dag_id for entry in self.entries]

    def to_dict(self) -> dict[str, Any]:
        return {"dataset": self.dataset, "seed": self.seed, "dags": [e.to_dict() for e in self.entries]}

    @classmethod
    def from_mapping(cls, data: Mapping[str, Any]) -> "SuiteManifest":
        return cls(
            dataset=str(data.get("dataset", "")),
            seed=int(data.get("seed", 0)),
            entries=[SuiteEntry.from_mapping(entry) for entry in data.get("dags", [])],
        )

    def save(self, path: Path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(self.to_dict(), ensure_ascii=False, indent=2), encoding="utf-8")
        return path

    @classmethod
    def load(cls, path: Path) -> "SuiteManifest":
        return cls.from_mapping(json.loads(Path(path).read_text(encoding="utf-8")))


def member_seed(seed: int, n_vertices: int, n_sources: int, instance: int) -> int:
    """Per-DAG seed; independent of generation order."""
    return int(np.random.SeedSequence([seed, n_vertices, n_sources, instance]).generate_state(1)[0])


def _build_member(entry: SuiteEntry, dataset: BenchmarkDataset, max_attempts: int) -> tuple[QueryDag, int]:
    rng = np.random.default_rng(entry.seed)
    return generate_screened(
        entry.n_vertices, entry.n_sources, entry.max_out_degree, dataset, rng, max_attempts=max_attempts
    )


def build_suite(
    dataset: BenchmarkDataset,
    seed: int = 0,
    *,
    sizes: Sequence[int] = DEFAULT_SIZES,
    instances: int = DEFAULT_INSTANCES,
    source_counts: Sequence[int] = DEFAULT_SOURCE_COUNTS,
    four_source_min_size: int = FOUR_SOURCE_MIN_SIZE,
    max_out_degree: Optional[int] = None,
    output_dir: Optional[Path] = None,
    max_attempts: int = MAX_ATTEMPTS,
) -> tuple[SuiteManifest, dict[str, QueryDag]]:
    """Generate the DAG suite; ids are ``<size>_<sources>_<instance>``.

    Multi-source DAGs are only built for sizes >= ``four_source_min_size``.
    When ``max_out_degree`` is None each DAG draws its own cap from [1, 5].
    """
    manifest = SuiteManifest(dataset=dataset.name, seed=seed)
    dags: dict[str, QueryDag] = {}
    for size in sizes:
        for sources in source_counts:
            if sources > 1 and size < four_source_min_size:
                continue
            for instance in range(1, instances + 1):
                entry_seed = member_seed(seed, size, sources, instance)
                cap = max_out_degree
                if cap is None:
                    lo, hi = MAX_OUT_DEGREE_RANGE
                    cap = int(np.random.default_rng(entry_seed + 1).integers(lo, hi + 1))
                entry = SuiteEntry(
                    dag_id=f"{size}_{sources}_{instance}",
                    n_vertices=size,
                    n_sources=sources,
                    max_out_degree=cap,
                    seed=entry_seed,
                )
                dag, entry.attempts = _build_member(entry, dataset, max_attempts)
                if output_dir is not None:
                    path = save_dag(dag, Path(output_dir) / f"{entry.dag_id}.json")
                    entry.path = path.name
                manifest.entries.append(entry)
                dags[entry.dag_id] = dag
    if output_dir is not None:
        manifest.save(Path(output_dir) / "manifest.json")
    logger.info("Built DAG suite", extra={"dataset": dataset.name, "dags": len(manifest)})
    return manifest, dags


def load_suite(
    manifest: SuiteManifest,
    dataset: BenchmarkDataset,
    base_dir: Optional[Path] = None,
    *,
    only: Optional[Iterable[str]] = None,
    max_attempts: int = MAX_ATTEMPTS,
) -> dict[str, QueryDag]:
    """Reload suite DAG files, regenerating members whose file is absent."""
    wanted = set(only) if only is not None else None
    dags: dict[str, QueryDag] = {}
    for entry in manifest.entries:
        if wanted is not None and entry.dag_id not in wanted:
            continue
        path = Path(base_dir) / entry.path if (base_dir is not None and entry.path) else None
        if path is not None and path.exists():
            dags[entry.dag_id] = load_dag(path, dataset.query_variants)
        else:
            dags[entry.dag_id], _ = _build_member(entry, dataset, max_attempts)
    return dags
