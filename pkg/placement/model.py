"""Vectorised evaluator for batches of placements of one (dag, scenario, pool).

한 행(row)이 하나의 배치(assignment)다. 행렬 ``A[p, V]`` 의 값은 자원 인덱스
(엣지 먼저, 그 다음 클라우드)이며, 소스/싱크 열은 고정(pinned)된다.
Solvers evaluate whole populations at once; the scalar API in
:mod:`placement.evaluation` is a one-row batch, so numbers agree bit for bit.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from dataflow.dag import QueryDag
from profiles.dataset import CLOUD, EDGE
from schemas.units import charge_mah, transfer_seconds
from simulation.resources import ResourcePool
from simulation.scenario import RuntimeScenario


class UnplacedVertex(ValueError):
    """Raised when a placement leaves a vertex without a resource."""


class PinningViolation(ValueError):
    """Raised when a source is off the edge or a sink is off the cloud."""


@dataclass(slots=True)
class ConstraintVerdict:
    throughput: np.ndarray  # (p, R) bool
    energy: np.ndarray  # (p, R) bool
    queries: np.ndarray  # (p, R) int, non-source queries per resource
    consumed_mah: np.ndarray  # (p, R) float, 0 for clouds

    @property
    def valid(self) -> np.ndarray:
        return ~(self.throughput.any(axis=1) | self.energy.any(axis=1))

    @property
    def violated_classes(self) -> np.ndarray:
        return self.throughput.any(axis=1).astype(np.int64) + self.energy.any(axis=1).astype(np.int64)

    @property
    def violation_count(self) -> np.ndarray:
        return self.throughput.sum(axis=1) + self.energy.sum(axis=1)


@dataclass(slots=True)
class BatchEvaluation:
    makespan: np.ndarray  # (p,) seconds
    end_vertex: np.ndarray  # (p,) vertex index of the sink closing the critical path
    predecessor: np.ndarray  # (p, V) critical predecessor, -1 at path starts
    verdict: ConstraintVerdict
    load: np.ndarray  # (p, R) Σλ of co-located non-source queries
    rate_factor: float = 1.0  # input-rate multiplier the batch was checked at

    @property
    def valid(self) -> np.ndarray:
        return self.verdict.valid

    def __len__(self) -> int:
        return int(self.makespan.shape[0])


class PlacementModel:
    """Compiled arrays for one DAG, one scenario and one resource pool."""

    def __init__(
        self,
        dag: QueryDag,
        scenario: RuntimeScenario,
        pool: ResourcePool,
        *,
        include_sink_compute: bool = False,
    ) -> None:
        if not pool.edges:
            raise ValueError("source vertices need at least one edge device")
        self.dag = dag
        self.scenario = scenario
        self.pool = pool
        self.include_sink_compute = include_sink_compute

        ids = dag.vertex_ids
        self.vertex_ids: list[str] = ids
        self.n_vertices = len(ids)
        self.n_resources = len(pool)
        self.n_edges = len(pool.edges)
        self.cloud_index = self.n_edges
        index = {vid: pos for pos, vid in enumerate(ids)}

        self.is_edge = np.zeros(self.n_resources, dtype=bool)
        self.is_edge[: self.n_edges] = True
        self.placeable = np.array([not dag.variant(vid).is_source for vid in ids], dtype=bool)

        # λ(v, r): 자원 r 의 클래스에 해당하는 표본값, 소스는 0
        self.lam = np.zeros((self.n_vertices, self.n_resources))
        self.eps = np.zeros((self.n_vertices, self.n_resources))
        for pos, vid in enumerate(ids):
            prof = scenario.vertex(vid)
            self.lam[pos, : self.n_edges] = prof.lambda_edge
            self.lam[pos, self.n_edges :] = prof.lambda_cloud
            self.eps[pos, : self.n_edges] = prof.energy_edge
        self.omega_in = np.array([scenario.rate_map.omega_in[vid] for vid in ids], dtype=float)

        self.capacity = np.full(self.n_resources, np.inf)
        self.tau = np.zeros(self.n_resources)
        self.base_mah = np.zeros(self.n_resources)
        for pos, edge in enumerate(pool.edges):
            self.capacity[pos] = edge.capacity_mah
            self.tau[pos] = edge.recharge_period_s
            self.base_mah[pos] = charge_mah(edge.base_load_ma, edge.recharge_period_s)
        edge_fit = scenario.overhead[EDGE]
        cloud_fit = scenario.overhead[CLOUD]
        self.slope = np.where(self.is_edge, edge_fit.slope, cloud_fit.slope)
        self.intercept = np.where(self.is_edge, edge_fit.intercept, cloud_fit.intercept)
        # 단조 감소 오버헤드일 때만 접두(prefix) 가지치기가 최적해를 보존한다
        self.overhead_monotone = bool((self.slope <= 0).all() and (self.intercept <= 0).all())

        # DP 는 head 의 위상 순서로 진행; 각 vertex 의 in-edge 는 선언 순서
        topo = dag.topological_order()
        self.topo_index = np.array([index[vid] for vid in topo], dtype=np.int64)
        self.in_edges: list[list[tuple[int, int]]] = [[] for _ in ids]
        n_links = len(dag.edges)
        self.link_tail = np.zeros(n_links, dtype=np.int64)
        self.link_head = np.zeros(n_links, dtype=np.int64)
        self.link_lat_ee = np.zeros(n_links)
        self.link_lat_ec = np.zeros(n_links)
        self.link_xfer_ee = np.zeros(n_links)
        self.link_xfer_ec = np.zeros(n_links)
        for k, (tail, head) in enumerate(dag.edges):
            link = scenario.link(tail, head)
            size = dag.variant(tail).out_event_size
            self.link_tail[k] = index[tail]
            self.link_head[k] = index[head]
            self.link_lat_ee[k] = link.latency_ee
            self.link_lat_ec[k] = link.latency_ec
            self.link_xfer_ee[k] = transfer_seconds(size, link.bandwidth_ee)
            self.link_xfer_ec[k] = transfer_seconds(size, link.bandwidth_ec)
        for k in range(n_links):
            self.in_edges[int(self.link_head[k])].append((k, int(self.link_tail[k])))
        for entries in self.in_edges:
            entries.sort(key=lambda entry: entry[1])
        self.sink_index = np.array([index[vid] for vid in dag.sink_set], dtype=np.int64)

        # 고정 배치: 소스는 엣지에 라운드로빈, 싱크는 클라우드
        self.pinned: dict[int, int] = {}
        for k, vid in enumerate(dag.source_set):
            self.pinned[index[vid]] = k % self.n_edges
        for vid in dag.sink_set:
            self.pinned[index[vid]] = self.cloud_index
        self.gene_index = np.array(
            [index[vid] for vid in topo if index[vid] not in self.pinned], dtype=np.int64
        )
        self.base_row = np.full(self.n_vertices, -1, dtype=np.int64)
        for pos, res in self.pinned.items():
            self.base_row[pos] = res

    # -- encoding --------------------------------------------------------
    @property
    def n_genes(self) -> int:
        return int(self.gene_index.shape[0])

    @property
    def gene_vertices(self) -> list[str]:
        return [self.vertex_ids[int(pos)] for pos in self.gene_index]

    def expand(self, genes: np.ndarray) -> np.ndarray:
        """Gene rows (p, n) to full assignment rows (p, V)."""
        genes = np.asarray(genes, dtype=np.int64)
        if genes.ndim == 1:
            genes = genes[None, :]
        assignments = np.broadcast_to(self.base_row, (genes.shape[0], self.n_vertices)).copy()
        assignments[:, self.gene_index] = genes
        return assignments

    def genes_of(self, assignments: np.ndarray) -> np.ndarray:
        return np.asarray(assignments, dtype=np.int64)[:, self.gene_index]

    def assignment_row(self, mapping: dict[str, str]) -> np.ndarray:
        """Resource-id mapping to one assignment row, checking pinning."""
        row = np.empty(self.n_vertices, dtype=np.int64)
        for pos, vid in enumerate(self.vertex_ids):
            if vid not in mapping:
                raise UnplacedVertex(f"vertex {vid} has no resource")
            try:
                row[pos] = self.pool.index_of(mapping[vid])
            except KeyError:
                raise UnplacedVertex(f"vertex {vid} is mapped to unknown resource '{mapping[vid]}'") from None
        for vid in self.dag.source_set:
            if not self.is_edge[row[self.vertex_ids.index(vid)]]:
                raise PinningViolation(f"source {vid} must run on an edge device")
        for vid in self.dag.sink_set:
            if self.is_edge[row[self.vertex_ids.index(vid)]]:
                raise PinningViolation(f"sink {vid} must run on the cloud VM")
        return row

    def mapping_of(self, row: Sequence[int]) -> dict[str, str]:
        ids = self.pool.resource_ids
        return {vid: ids[int(res)] for vid, res in zip(self.vertex_ids, row)}

    # -- evaluation ------------------------------------------------------
    def _per_resource(self, assignments: np.ndarray, weights: np.ndarray) -> np.ndarray:
        p = assignments.shape[0]
        flat = (np.arange(p)[:, None] * self.n_resources + assignments).ravel()
        totals = np.bincount(flat, weights=weights.ravel(), minlength=p * self.n_resources)
        return totals.reshape(p, self.n_resources)

    def loads(self, assignments: np.ndarray, mask: np.ndarray | None = None) -> tuple[np.ndarray, np.ndarray]:
        """Σλ and query count per resource, over placeable (and masked-in) vertices."""
        counted = self.placeable if mask is None else (self.placeable & mask)
        lam = self.lam[np.arange(self.n_vertices)[None, :], assignments] * counted
        load = self._per_resource(assignments, lam)
        counts = self._per_resource(assignments, np.broadcast_to(counted, assignments.shape).astype(float))
        return load, counts.astype(np.int64)

    def check(
        self,
        assignments: np.ndarray,
        *,
        rate_factor: float = 1.0,
        omega_in: np.ndarray | None = None,
        mask: np.ndarray | None = None,
        _loads: tuple[np.ndarray, np.ndarray] | None = None,
    ) -> ConstraintVerdict:
        """Throughput and energy verdicts per resource.

        ``mask`` restricts the check to a subset of vertices (prefix pruning).
        """
        assignments = np.atleast_2d(np.asarray(assignments, dtype=np.int64))
        omega = (self.omega_in if omega_in is None else np.asarray(omega_in, dtype=float)) * rate_factor
        load, counts = _loads if _loads is not None else self.loads(assignments, mask)
        counted = self.placeable if mask is None else (self.placeable & mask)

        pi = np.where(counts > 1, (self.slope * (counts - 1) + self.intercept) / 100.0, 0.0)
        limit = 1.0 + pi
        rows = np.arange(assignments.shape[0])[:, None]
        vertex_load = load[rows, assignments]
        vertex_limit = limit[rows, assignments]
        # 제약 2 는 엄격 부등식: ω·Σλ < 1+π 여야 통과
        over = (omega[None, :] * vertex_load >= vertex_limit) & counted
        throughput = self._per_resource(assignments, over.astype(float)) > 0

        eps = self.eps[np.arange(self.n_vertices)[None, :], assignments] * counted
        drain = self._per_resource(assignments, omega[None, :] * eps)
        consumed = np.where(self.is_edge, self.base_mah + self.tau * drain, 0.0)
        energy = (consumed > self.capacity) & self.is_edge
        return ConstraintVerdict(throughput=throughput, energy=energy, queries=counts, consumed_mah=consumed)

    def evaluate(self, assignments: np.ndarray, *, rate_factor: float = 1.0) -> BatchEvaluation:
        assignments = np.atleast_2d(np.asarray(assignments, dtype=np.int64))
        p = assignments.shape[0]
        load, counts = self.loads(assignments)
        verdict = self.check(assignments, rate_factor=rate_factor, _loads=(load, counts))

        rows = np.arange(p)[:, None]
        compute = load[rows, assignments] * self.placeable  # Λ_i, 소스는 0
        tail_res = assignments[:, self.link_tail]
        head_res = assignments[:, self.link_head]
        tail_edge = self.is_edge[tail_res]
        head_edge = self.is_edge[head_res]
        network = np.where(
            tail_edge & head_edge,
            self.link_lat_ee + self.link_xfer_ee,
            self.link_lat_ec + self.link_xfer_ec,
        )
        # 같은 자원 또는 클라우드-클라우드 전달은 네트워크 비용 0
        network = np.where((tail_res == head_res) | (~tail_edge & ~head_edge), 0.0, network)

        dist = np.zeros((p, self.n_vertices))
        pred = np.full((p, self.n_vertices), -1, dtype=np.int64)
        for v in self.topo_index:
            entries = self.in_edges[v]
            if not entries:
                continue
            best = np.full(p, -np.inf)
            arg = np.full(p, -1, dtype=np.int64)
            for k, tail in entries:
                cand = dist[:, tail] + compute[:, tail] + network[:, k]
                better = cand > best
                best = np.where(better, cand, best)
                arg = np.where(better, tail, arg)
            dist[:, v] = best
            pred[:, v] = arg

        finish = dist[:, self.sink_index]
        if self.include_sink_compute:
            finish = finish + compute[:, self.sink_index]
        pick = np.argmax(finish, axis=1)
        makespan = finish[np.arange(p), pick]
        return BatchEvaluation(
            makespan=makespan,
            end_vertex=self.sink_index[pick],
            predecessor=pred,
            verdict=verdict,
            load=load,
            rate_factor=rate_factor,
        )

    def evaluate_genes(self, genes: np.ndarray) -> BatchEvaluation:
        return self.evaluate(self.expand(genes))

    def critical_path(self, batch: BatchEvaluation, row: int = 0) -> list[str]:
        path: list[int] = []
        node = int(batch.end_vertex[row])
        while node != -1:
            path.append(node)
            node = int(batch.predecessor[row, node])
        return [self.vertex_ids[pos] for pos in reversed(path)]
