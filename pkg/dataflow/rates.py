"""Event-rate propagation through a query DAG.

Each out-edge carries the full output stream of its tail (duplicate), and all
in-edges of a vertex merge into one input stream (interleave). Rates are
expected values in events/second and are never rounded.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Mapping

from dataflow.dag import QueryDag


@dataclass(frozen=True, slots=True)
class RateMap:
    """Per-vertex input/output rates plus DAG-level totals.

    ``omega_in`` of a source is its share of the DAG input; sources have no
    in-edges, so rate conservation is stated for non-source vertices.
    """

    omega_in: Mapping[str, float]
    omega_out: Mapping[str, float]
    dag_input: float
    dag_output: float
    sources: tuple[str, ...] = field(default=())

    @property
    def dag_selectivity(self) -> float:
        return self.dag_output / self.dag_input

    def scaled(self, factor: float) -> "RateMap":
        """Rates for an input scaled by ``factor``; propagation is linear."""
        if factor < 0:
            raise ValueError("rate scale factor must be non-negative")
        return RateMap(
            omega_in={k: v * factor for k, v in self.omega_in.items()},
            omega_out={k: v * factor for k, v in self.omega_out.items()},
            dag_input=self.dag_input * factor,
            dag_output=self.dag_output * factor,
            sources=self.sources,
        )

    def to_dict(self) -> dict[str, Any]:
        return {
            "omega_in": dict(self.omega_in),
            "omega_out": dict(self.omega_out),
            "dag_input": self.dag_input,
            "dag_output": self.dag_output,
            "sources": list(self.sources),
        }

    @classmethod
    def from_mapping(cls, data: Mapping[str, Any]) -> "RateMap":
        return cls(
            omega_in={str(k): float(v) for k, v in data["omega_in"].items()},
            omega_out={str(k): float(v) for k, v in data["omega_out"].items()},
            dag_input=float(data["dag_input"]),
            dag_output=float(data["dag_output"]),
            sources=tuple(data.get("sources", ())),
        )


def propagate_rates(dag: QueryDag, dag_input: float) -> RateMap:
    """One topological pass computing ω_in/ω_out for every vertex."""
    if dag_input <= 0:
        raise ValueError("DAG input rate must be positive")
    sources = dag.source_set
    per_source = dag_input / len(sources)
    omega_in: dict[str, float] = {}
    omega_out: dict[str, float] = {}
    for vid in dag.topological_order():
        if dag.is_source(vid):
            omega_in[vid] = per_source
            omega_out[vid] = per_source
            continue
        rate_in = 0.0
        for pred in dag.predecessors(vid):
            rate_in += omega_out[pred]
        omega_in[vid] = rate_in
        omega_out[vid] = rate_in * dag.variant(vid).selectivity
    dag_output = 0.0
    for sink in dag.sink_set:
        dag_output += omega_out[sink]
    # 입력 선언 순서로 재정렬해 직렬화 결과를 안정적으로 유지
    ordered = dag.vertex_ids
    return RateMap(
        omega_in={vid: omega_in[vid] for vid in ordered},
        omega_out={vid: omega_out[vid] for vid in ordered},
        dag_input=float(dag_input),
        dag_output=dag_output,
        sources=tuple(sources),
    )


def dag_stats(dag: QueryDag, dag_input: float = 1000.0) -> dict[str, Any]:
    """Static characteristics of a DAG, one row of the DAG configuration table.

    The max query is the non-source vertex with the highest input rate; its
    input selectivity is that rate relative to the DAG input.
    """
    rates = propagate_rates(dag, dag_input)
    kinds: dict[str, int] = {}
    max_query: str | None = None
    for vid, variant in dag.vertices:
        if variant.is_source:
            continue
        kinds[variant.kind.value] = kinds.get(variant.kind.value, 0) + 1
        if max_query is None or rates.omega_in[vid] > rates.omega_in[max_query]:
            max_query = vid
    max_rate = rates.omega_in[max_query] if max_query is not None else 0.0
    return {
        "vertices": len(dag),
        "edges": len(dag.edges),
        "sources": len(dag.source_set),
        "sinks": len(dag.sink_set),
        "kinds": kinds,
        "max_query": max_query,
        "max_query_input_selectivity": max_rate / dag_input,
        "max_query_input_rate": max_rate,
        "dag_selectivity": rates.dag_selectivity,
        "dag_output_rate": rates.dag_output,
    }
