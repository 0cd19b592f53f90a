"""CEP query DAG: structure, validation and path enumeration.

A DAG file is a JSON object::

    {"vertices": [{"id": "v0", "variant": "Src"}, {"id": "v1", "variant": "Fil 0.5"}],
     "edges": [["v0", "v1"]],
     "sinks": ["v1"]}

``sinks`` is optional; when absent the out-degree-0 vertices are the sinks.
Source vertices are the in-degree-0 vertices and may omit ``variant``.
The edge from each sink to the dummy sink is implicit and never stored.
"""
from __future__ import annotations

import itertools
import json
from pathlib import Path
from typing import Any, Iterable, Iterator, Mapping, Sequence

import jsonschema
import networkx as nx

from profiles.dataset import MissingVariant
from schemas.query import SOURCE_VARIANT, SOURCE_VARIANT_ID, QueryVariant

DAG_FILE_SCHEMA: dict[str, Any] = {
    "type": "object",
    "required": ["vertices", "edges"],
    "properties": {
        "vertices": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["id"],
                "properties": {"id": {"type": "string"}, "variant": {"type": ["string", "null"]}},
            },
        },
        "edges": {
            "type": "array",
            "items": {"type": "array", "items": {"type": "string"}, "minItems": 2, "maxItems": 2},
        },
        "sinks": {"type": "array", "items": {"type": "string"}},
    },
}


class DagValidationError(ValueError):
    """Raised when a DAG violates the structural rules."""


class CyclicGraph(DagValidationError):
    pass


class OrphanVertex(DagValidationError):
    pass


class EmptySourceOrSink(DagValidationError):
    pass


class InvalidSource(DagValidationError):
    pass


class PathExplosion(RuntimeError):
    """Raised when enumerate_paths exceeds the caller's cap."""


class QueryDag:
    """Immutable DAG of query variants.

    Vertex order is the declaration order and is used as the deterministic
    tie-break everywhere (topological order, gene order, tables).
    """

    __slots__ = ("_vertices", "_edges", "_declared_sinks", "_graph", "_order", "_topo")

    def __init__(
        self,
        vertices: Sequence[tuple[str, QueryVariant]],
        edges: Iterable[tuple[str, str]],
        sinks: Iterable[str] | None = None,
    ) -> None:
        self._vertices: tuple[tuple[str, QueryVariant], ...] = tuple(vertices)
        self._edges: tuple[tuple[str, str], ...] = tuple((str(a), str(b)) for a, b in edges)
        self._declared_sinks = frozenset(sinks) if sinks is not None else None
        ids = [vid for vid, _ in self._vertices]
        if len(set(ids)) != len(ids):
            raise DagValidationError("duplicate vertex ids")
        self._order = {vid: pos for pos, vid in enumerate(ids)}
        graph = nx.DiGraph()
        graph.add_nodes_from(ids)
        for tail, head in self._edges:
            if tail not in self._order or head not in self._order:
                raise DagValidationError(f"edge ({tail}, {head}) references an unknown vertex")
            graph.add_edge(tail, head)
        if self._declared_sinks is not None:
            unknown = self._declared_sinks - set(ids)
            if unknown:
                raise DagValidationError(f"unknown sink ids: {sorted(unknown)}")
        self._graph = graph
        self._topo: tuple[str, ...] | None = None

    # -- structure --------------------------------------------------------
    @property
    def vertices(self) -> tuple[tuple[str, QueryVariant], ...]:
        return self._vertices

    @property
    def vertex_ids(self) -> list[str]:
        return [vid for vid, _ in self._vertices]

    @property
    def edges(self) -> tuple[tuple[str, str], ...]:
        return self._edges

    @property
    def graph(self) -> nx.DiGraph:
        """Read-only view of the underlying graph; mutating it raises ``NetworkXError``."""
        return self._graph.copy(as_view=True)

    def __len__(self) -> int:
        return len(self._vertices)

    def variant(self, vertex_id: str) -> QueryVariant:
        return self._vertices[self._order[vertex_id]][1]

    def index(self, vertex_id: str) -> int:
        return self._order[vertex_id]

    def predecessors(self, vertex_id: str) -> list[str]:
        return sorted(self._graph.predecessors(vertex_id), key=self._order.__getitem__)

    def successors(self, vertex_id: str) -> list[str]:
        return sorted(self._graph.successors(vertex_id), key=self._order.__getitem__)

    @property
    def source_set(self) -> list[str]:
        return [vid for vid in self.vertex_ids if self._graph.in_degree(vid) == 0]

    @property
    def sink_set(self) -> list[str]:
        if self._declared_sinks is not None:
            return [vid for vid in self.vertex_ids if vid in self._declared_sinks]
        return [vid for vid in self.vertex_ids if self._graph.out_degree(vid) == 0]

    def is_source(self, vertex_id: str) -> bool:
        return self._graph.in_degree(vertex_id) == 0

    def topological_order(self) -> tuple[str, ...]:
        if self._topo is None:
            self._topo = tuple(nx.lexicographical_topological_sort(self._graph, key=self._order.__getitem__))
        return self._topo

    # -- serialization ----------------------------------------------------
    def to_dict(self) -> dict[str, Any]:
        payload: dict[str, Any] = {
            "vertices": [{"id": vid, "variant": variant.id} for vid, variant in self._vertices],
            "edges": [[tail, head] for tail, head in self._edges],
        }
        if self._declared_sinks is not None:
            payload["sinks"] = self.sink_set
        return payload

    @classmethod
    def from_mapping(cls, data: Mapping[str, Any], variants: Mapping[str, QueryVariant]) -> "QueryDag":
        """Build a DAG whose vertex variants are resolved against ``variants``."""
        if not isinstance(data, Mapping) or "vertices" not in data or "edges" not in data:
            raise DagValidationError("DAG document needs 'vertices' and 'edges'")
        incoming = {str(head) for _, head in data["edges"]}
        vertices: list[tuple[str, QueryVariant]] = []
        for entry in data["vertices"]:
            vid = str(entry["id"])
            variant_id = entry.get("variant")
            if variant_id in (None, SOURCE_VARIANT_ID):
                if vid in incoming:
                    raise InvalidSource(f"vertex {vid} uses the source variant but has in-edges")
                vertices.append((vid, SOURCE_VARIANT))
                continue
            if variant_id not in variants:
                raise MissingVariant(f"vertex {vid}: unknown variant '{variant_id}'")
            vertices.append((vid, variants[variant_id]))
        sinks = data.get("sinks")
        return cls(vertices, [tuple(edge) for edge in data["edges"]], sinks=sinks)


def validate_dag(dag: QueryDag) -> None:
    """Check the structural rules; return silently when the DAG is valid."""
    graph = dag.graph
    if not nx.is_directed_acyclic_graph(graph):
        cycle = nx.find_cycle(graph)
        raise CyclicGraph(f"graph has a cycle: {cycle}")
    sources = dag.source_set
    sinks = dag.sink_set
    if not sources or not sinks:
        raise EmptySourceOrSink(f"sources={sources} sinks={sinks}")
    for vid in sources:
        if not dag.variant(vid).is_source:
            raise InvalidSource(f"source vertex {vid} must be the no-op '{SOURCE_VARIANT_ID}' variant")
        if vid in set(sinks):
            raise InvalidSource(f"vertex {vid} cannot be both a source and a sink")
    for vid in dag.vertex_ids:
        if graph.in_degree(vid) > 0 and dag.variant(vid).is_source:
            raise InvalidSource(f"vertex {vid} has in-edges but uses the source variant")
    sink_set = set(sinks)
    for vid in dag.vertex_ids:
        if vid in sink_set:
            continue
        if sink_set.isdisjoint(nx.descendants(graph, vid)):
            raise OrphanVertex(f"vertex {vid} has no path to a sink")


def enumerate_paths(dag: QueryDag, max_paths: int | None = None) -> list[list[str]]:
    """Every source→sink path, once each. Intended for small DAGs."""
    sinks = dag.sink_set
    paths: Iterator[list[str]] = itertools.chain.from_iterable(
        nx.all_simple_paths(dag.graph, source, sinks) for source in dag.source_set
    )
    if max_paths is None:
        return list(paths)
    collected = list(itertools.islice(paths, max_paths + 1))
    if len(collected) > max_paths:
        raise PathExplosion(f"more than {max_paths} source-to-sink paths")
    return collected


def load_dag(path: Path, variants: Mapping[str, QueryVariant]) -> QueryDag:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        jsonschema.validate(data, DAG_FILE_SCHEMA)
    except (json.JSONDecodeError, jsonschema.ValidationError) as exc:
        raise DagValidationError(f"Invalid DAG file '{path}': {exc}") from exc
    dag = QueryDag.from_mapping(data, variants)
    validate_dag(dag)
    return dag


def save_dag(dag: QueryDag, path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(dag.to_dict(), ensure_ascii=False, indent=2), encoding="utf-8")
    return path
