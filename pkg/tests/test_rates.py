"""Unit and property tests for rate propagation."""
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dataflow.dag import QueryDag, enumerate_paths
from dataflow.rates import RateMap, dag_stats, propagate_rates
from schemas.query import SOURCE_VARIANT, QueryKind, QueryVariant

FIL = QueryVariant(id="Fil 1.0", kind=QueryKind.FILTER, selectivity=1.0)
HALF = QueryVariant(id="Fil 0.5", kind=QueryKind.FILTER, selectivity=0.5)
AGG60 = QueryVariant(id="Agg B 60", kind=QueryKind.AGGREGATE_BATCH, selectivity=1 / 60, window_or_pattern_length=60)
SEQ = QueryVariant(id="Seq3 1.5", kind=QueryKind.SEQUENCE, selectivity=1.5, window_or_pattern_length=3)


def test_chain_filter():
    dag = QueryDag([("s", SOURCE_VARIANT), ("f", HALF)], [("s", "f")])
    rates = propagate_rates(dag, 1000)
    assert rates.omega_out["f"] == 500 and rates.dag_output == 500


def test_batch_aggregate():
    dag = QueryDag([("s", SOURCE_VARIANT), ("a", AGG60)], [("s", "a")])
    assert propagate_rates(dag, 6000).omega_out["a"] == pytest.approx(100)


def test_duplicate_then_interleave():
    dag = QueryDag(
        [("s", SOURCE_VARIANT), ("a", FIL), ("b", FIL), ("v", FIL)],
        [("s", "a"), ("s", "b"), ("a", "v"), ("b", "v")],
    )
    assert propagate_rates(dag, 1000).omega_in["v"] == 2000


def test_sources_share_input():
    dag = QueryDag(
        [("s1", SOURCE_VARIANT), ("s2", SOURCE_VARIANT), ("j", FIL)], [("s1", "j"), ("s2", "j")]
    )
    rates = propagate_rates(dag, 1000)
    assert rates.omega_out["s1"] == 500 and rates.omega_in["j"] == 1000


def test_dag_selectivity_above_one():
    dag = QueryDag([("s", SOURCE_VARIANT), ("q", SEQ)], [("s", "q")])
    rates = propagate_rates(dag, 1000)
    assert rates.dag_selectivity == pytest.approx(1.5) and rates.dag_output == pytest.approx(1500)


def test_non_positive_input():
    dag = QueryDag([("s", SOURCE_VARIANT), ("f", FIL)], [("s", "f")])
    with pytest.raises(ValueError):
        propagate_rates(dag, 0)


def test_scaled_and_round_trip():
    dag = QueryDag([("s", SOURCE_VARIANT), ("f", HALF)], [("s", "f")])
    rates = propagate_rates(dag, 1000)
    doubled = rates.scaled(2.0)
    assert doubled.omega_in["f"] == 2000 and doubled.dag_output == 1000
    assert RateMap.from_mapping(rates.to_dict()) == rates


def test_dag_stats_max_query():
    dag = QueryDag(
        [("s", SOURCE_VARIANT), ("a", FIL), ("b", FIL), ("v", HALF)],
        [("s", "a"), ("s", "b"), ("a", "v"), ("b", "v")],
    )
    stats = dag_stats(dag, 1000)
    assert stats["max_query"] == "v"
    assert stats["max_query_input_selectivity"] == 2.0
    assert stats["kinds"] == {"filter": 3}
    assert stats["dag_output_rate"] == 1000


@st.composite
def _layered(draw):
    """Random layered DAG over filters with arbitrary selectivity, one or two sources."""
    widths = draw(st.lists(st.integers(1, 3), min_size=1, max_size=4))
    sels = st.sampled_from([0.0, 0.5, 1.0, 1.5])
    sources = [f"s{k}" for k in range(draw(st.integers(1, 2)))]
    vertices = [(sid, SOURCE_VARIANT) for sid in sources]
    edges = []
    previous = sources
    for depth, width in enumerate(widths):
        layer = []
        for k in range(width):
            vid = f"v{depth}_{k}"
            sel = draw(sels)
            vertices.append((vid, QueryVariant(id=f"F{sel}", kind=QueryKind.FILTER, selectivity=sel)))
            parents = draw(st.lists(st.sampled_from(previous), min_size=1, max_size=len(previous), unique=True))
            edges.extend((p, vid) for p in parents)
            layer.append(vid)
        previous = layer
    for sid in sources:
        if all(tail != sid for tail, _ in edges):
            edges.append((sid, "v0_0"))
    # 자식 없는 중간 정점은 sink 가 된다
    return QueryDag(vertices, edges)


@settings(max_examples=60, deadline=None)
@given(_layered(), st.floats(1.0, 1e5))
def test_rate_conservation(dag, dag_input):
    rates = propagate_rates(dag, dag_input)
    for vid in dag.vertex_ids:
        if dag.is_source(vid):
            continue
        assert math.isclose(rates.omega_in[vid], sum(rates.omega_out[p] for p in dag.predecessors(vid)))
        assert math.isclose(rates.omega_out[vid], rates.omega_in[vid] * dag.variant(vid).selectivity)
    assert math.isclose(rates.dag_output, rates.dag_selectivity * dag_input)


def _path_event_counts(dag, dag_input):
    """Events leaving each vertex per second, summed over every source→vertex path."""
    share = dag_input / len(dag.source_set)
    # 모든 정점은 sink 에 닿으므로 sink 경로의 접두사가 곧 source→정점 경로 전체다
    prefixes = {tuple(path[:k]) for path in enumerate_paths(dag) for k in range(1, len(path) + 1)}
    counts = dict.fromkeys(dag.vertex_ids, 0.0)
    for prefix in prefixes:
        events = share
        for vid in prefix[1:]:
            events *= dag.variant(vid).selectivity
        counts[prefix[-1]] += events
    return counts


def test_path_counts_diamond_by_hand():
    dag = QueryDag(
        [("s", SOURCE_VARIANT), ("a", HALF), ("b", SEQ), ("v", HALF)],
        [("s", "a"), ("s", "b"), ("a", "v"), ("b", "v")],
    )
    counts = _path_event_counts(dag, 1000)
    # s→a→v: 1000·0.5·0.5, s→b→v: 1000·1.5·0.5
    assert counts["v"] == pytest.approx(1000.0)
    assert propagate_rates(dag, 1000).omega_out == pytest.approx(counts)


@settings(max_examples=60, deadline=None)
@given(_layered(), st.floats(1.0, 1e5))
def test_rates_match_path_event_counts(dag, dag_input):
    rates = propagate_rates(dag, dag_input)
    counts = _path_event_counts(dag, dag_input)
    for vid in dag.vertex_ids:
        assert math.isclose(rates.omega_out[vid], counts[vid], rel_tol=1e-9, abs_tol=1e-9)
    assert math.isclose(rates.dag_output, sum(counts[t] for t in dag.sink_set), rel_tol=1e-9, abs_tol=1e-9)
