"""CLI entrypoint for running the placement experiment matrix.

셀 = (DAG, 데이터셋, 입력률, 가용성 시나리오). 셀마다 시나리오를 한 번 샘플링해
모든 솔버가 공유한다. 셀 시드는 셀 키의 SHA-1 에서 유도하므로 워커 스케줄과 무관하다.
"""
from __future__ import annotations

import argparse
import asyncio
import hashlib
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional, Sequence

import numpy as np

from dataflow.dag import QueryDag
from dataflow.generator import SuiteManifest, build_suite, load_suite
from pipeline.config import (
    ConfigError,
    ExperimentConfig,
    add_ga_arguments,
    env_output_dir,
    env_workers,
    ga_overrides,
    load_config,
)
from pipeline.output import OutputManager, runs_frame
from pipeline.summary import headroom_frame, occupancy_frame, occupancy_rows, summary_table
from placement.evaluation import rate_headroom
from placement.metrics import edge_used_pct, occupancy_histogram
from profiles.dataset import BenchmarkDataset, DatasetError
from schemas.run_record import RUN_STATUS_ERROR, RunRecord, cell_key
from simulation.resources import BATTERY_PRESETS, EnergyProfile, ResourcePool, build_pool
from simulation.scenario import materialize
from solvers.base import SolveResult, SolverConfig
from solvers.registry import discover_solvers, registry

logger = logging.getLogger(__name__)


@dataclass(frozen=True, slots=True)
class Cell:
    dag_id: str
    dataset: str
    rate: float
    setup: str

    @property
    def key(self) -> str:
        return cell_key(self.dag_id, self.dataset, self.rate, self.setup)


@dataclass(slots=True)
class CellOutcome:
    cell: Cell
    records: list[RunRecord] = field(default_factory=list)
    placements: dict[str, dict[str, Any]] = field(default_factory=dict)
    trace: Optional[list[tuple[int, bool, float]]] = None
    occupancy: list[dict[str, Any]] = field(default_factory=list)

    @property
    def failed(self) -> bool:
        return any(record.status == RUN_STATUS_ERROR for record in self.records)


def derive_seed(experiment_seed: int, key: str) -> int:
    digest = hashlib.sha1(f"{experiment_seed}:{key}".encode("utf-8")).hexdigest()
    return int(digest[:15], 16)


def solver_parameters(config: ExperimentConfig, solver: str) -> dict[str, Any]:
    if solver == "bf":
        return dict(config.bf)
    if solver == "ga":
        return config.ga_config().to_dict()
    if solver == "random":
        return dict(config.random)
    return {}


def _unpinned(dag: QueryDag) -> int:
    return len(dag) - len(set(dag.source_set) | set(dag.sink_set))


def _record(
    cell: Cell,
    dag: QueryDag,
    pool: ResourcePool,
    solver: str,
    seed: int,
    result: SolveResult,
    population: Optional[int],
) -> RunRecord:
    evaluation = result.evaluation
    return RunRecord(
        dag_id=cell.dag_id,
        dataset=cell.dataset,
        rate=cell.rate,
        setup=cell.setup,
        solver=solver,
        status=result.status,
        valid=result.valid,
        makespan_ms=result.makespan_ms,
        edge_used_pct=edge_used_pct(result.placement, pool) if result.placement is not None else None,
        violations=";".join(sorted(evaluation.violated_kinds())) if evaluation is not None else "",
        evaluations=result.evaluations,
        generations=result.generations,
        population=population,
        wall_time_s=result.wall_time_s,
        n_vertices=len(dag),
        n_edges=len(dag.edges),
        n_unpinned=_unpinned(dag),
        n_resources=len(pool),
        headroom_pct=result.headroom_pct,
        seed=seed,
        metadata=dict(result.metadata),
    )


def _error_record(cell: Cell, dag: QueryDag, solver: str, seed: int, exc: Exception) -> RunRecord:
    return RunRecord(
        dag_id=cell.dag_id,
        dataset=cell.dataset,
        rate=cell.rate,
        setup=cell.setup,
        solver=solver,
        status=RUN_STATUS_ERROR,
        n_vertices=len(dag),
        n_edges=len(dag.edges),
        n_unpinned=_unpinned(dag),
        seed=seed,
        error=f"{type(exc).__name__}: {exc}",
    )


def run_cell(
    cell: Cell,
    dag: QueryDag,
    dataset: BenchmarkDataset,
    config: ExperimentConfig,
    energy: EnergyProfile,
) -> CellOutcome:
    """Materialize one scenario and run every configured solver on it."""
    outcome = CellOutcome(cell=cell)
    seed = derive_seed(config.seed, cell.key)
    try:
        scenario = materialize(dag, dataset, cell.rate, np.random.default_rng(seed))
        pool = build_pool(cell.setup, len(dag), energy, base_load_ma=dataset.base_load_ma)
    except Exception as exc:  # noqa: BLE001 - 셀 실패는 기록만 하고 계속
        logger.exception("Cell %s failed while building its scenario", cell.key)
        outcome.records = [_error_record(cell, dag, solver, seed, exc) for solver in config.solvers]
        return outcome

    for solver in config.solvers:
        solver_seed = derive_seed(config.seed, f"{cell.key}|{solver}")
        parameters = solver_parameters(config, solver)
        try:
            solver_config = SolverConfig(
                name=solver,
                dag_id=cell.dag_id,
                seed=solver_seed,
                include_sink_compute=config.include_sink_compute,
                parameters=parameters,
            )
            result = registry.create(solver, solver_config).run(dag, scenario, pool)
            if config.headroom and solver == "ga" and result.valid and result.placement is not None:
                result.headroom_pct = rate_headroom(dag, scenario, result.placement, pool)
        except Exception as exc:  # noqa: BLE001
            logger.exception("Solver %s failed on cell %s", solver, cell.key)
            outcome.records.append(_error_record(cell, dag, solver, solver_seed, exc))
            continue

        population = parameters.get("population") if solver == "ga" else None
        outcome.records.append(_record(cell, dag, pool, solver, solver_seed, result, population))
        if result.placement is not None:
            outcome.placements[solver] = {"cell": cell.key, "seed": solver_seed, **result.to_dict()}
            histogram = occupancy_histogram([result.placement], pool)
            outcome.occupancy.extend(occupancy_rows(histogram, rate=cell.rate, setup=cell.setup, solver=solver))
        if config.trace and result.fitness_trace:
            outcome.trace = list(result.fitness_trace)
    return outcome


async def run_all(
    cells: Sequence[Cell],
    dags: dict[str, QueryDag],
    datasets: dict[str, BenchmarkDataset],
    config: ExperimentConfig,
    energy: EnergyProfile,
    workers: int,
) -> list[CellOutcome]:
    sem = asyncio.Semaphore(workers)
    results: list[CellOutcome] = []

    async def run_with_semaphore(cell: Cell) -> None:
        async with sem:
            logger.info("Running cell %s", cell.key)
            outcome = await asyncio.to_thread(
                run_cell, cell, dags[cell.dag_id], datasets[cell.dataset], config, energy
            )
            results.append(outcome)

    await asyncio.gather(*(run_with_semaphore(cell) for cell in cells))
    # 완료 순서가 아니라 셀 키 순서
    return sorted(results, key=lambda outcome: outcome.cell.key)


def prepare_suite(config: ExperimentConfig, datasets: dict[str, BenchmarkDataset]) -> dict[str, QueryDag]:
    suite = config.suite
    key = suite.dataset or next(iter(datasets))
    if key not in datasets:
        raise ConfigError(f"suite.dataset '{key}' is not one of the configured datasets")
    dataset = datasets[key]
    if suite.manifest:
        manifest_path = config.resolve(suite.manifest)
        manifest = SuiteManifest.load(manifest_path)
        return load_suite(manifest, dataset, manifest_path.parent, only=suite.only)
    _, dags = build_suite(
        dataset,
        config.seed,
        sizes=suite.sizes,
        instances=suite.instances,
        source_counts=suite.source_counts,
        four_source_min_size=suite.four_source_min_size,
        max_out_degree=suite.max_out_degree,
    )
    if suite.only:
        dags = {dag_id: dag for dag_id, dag in dags.items() if dag_id in set(suite.only)}
    return dags


def build_cells(config: ExperimentConfig, dags: dict[str, QueryDag]) -> list[Cell]:
    return [
        Cell(dag_id=dag_id, dataset=dataset, rate=rate, setup=setup)
        for dag_id in dags
        for dataset in config.datasets
        for rate in config.rates
        for setup in config.setups
    ]


def parse_args(argv: Optional[Sequence[str]] = None) -> argparse.Namespace:
    parser = argparse.ArgumentParser(description="Run the CEP placement experiment matrix")
    parser.add_argument("--config", default=None, help="Experiment YAML/JSON (default: config/experiment.yaml)")
    parser.add_argument("--output-dir", default=None, help="Results root (default: $CEP_OUTPUT_DIR or output/experiments)")
    parser.add_argument("--workers", type=int, default=None, help="Concurrent cells (default: $CEP_WORKERS or 1)")
    parser.add_argument("--solvers", nargs="+", default=None, help="Subset of solvers to run")
    parser.add_argument("--dags", nargs="+", default=None, help="Only run these suite DAG ids")
    parser.add_argument("--budget-secs", type=float, default=None, help="Brute-force wall-clock budget per run")
    parser.add_argument("--headroom", action="store_true", default=None, help="Compute rate headroom for valid GA runs")
    parser.add_argument("--trace", action="store_true", default=None, help="Write GA fitness traces")
    parser.add_argument("--battery", choices=sorted(BATTERY_PRESETS), default=None)
    parser.add_argument("--include-sink-compute", action="store_true", default=None)
    add_ga_arguments(parser)
    return parser.parse_args(argv)


def apply_overrides(config: ExperimentConfig, args: argparse.Namespace) -> ExperimentConfig:
    """CLI 플래그가 설정 파일 값을 덮어쓴다."""
    data = config.describe()
    data["suite"] = {
        "manifest": config.suite.manifest,
        "sizes": config.suite.sizes,
        "instances": config.suite.instances,
        "source_counts": config.suite.source_counts,
        "four_source_min_size": config.suite.four_source_min_size,
        "max_out_degree": config.suite.max_out_degree,
        "dataset": config.suite.dataset,
        "only": args.dags or config.suite.only,
    }
    overrides = ga_overrides(args)
    ga = {**config.ga, **overrides}
    if "fitness_constant_ms" in overrides:
        ga.pop("fitness_constant", None)
    data["ga"] = ga
    if args.solvers:
        data["solvers"] = args.solvers
    if args.budget_secs is not None:
        data["bf"]["budget_secs"] = args.budget_secs
    for flag in ("headroom", "trace", "battery", "include_sink_compute"):
        value = getattr(args, flag)
        if value is not None:
            data[flag] = value
    return ExperimentConfig.from_mapping(data, config_dir=config.config_dir)


def write_outputs(
    output: OutputManager, outcomes: Sequence[CellOutcome], config: ExperimentConfig, dag_ids: Sequence[str]
) -> dict[str, Any]:
    records = [record for outcome in outcomes for record in outcome.records]
    output.save_runs(records)
    frame = runs_frame(records)
    if not frame.empty:
        output.save_frame(summary_table(frame), "summary")
    output.save_frame(occupancy_frame(row for outcome in outcomes for row in outcome.occupancy), "occupancy")
    if config.headroom and not frame.empty:
        output.save_frame(headroom_frame(frame), "headroom")
    for outcome in outcomes:
        for solver, payload in outcome.placements.items():
            output.save_placement(outcome.cell.key, solver, payload)
        if outcome.trace:
            output.save_trace(outcome.cell.key, outcome.trace)

    failed = sorted(outcome.cell.key for outcome in outcomes if outcome.failed)
    metadata = {
        "config": config.describe(),
        "solvers": registry.describe(config.solvers),
        "dags": list(dag_ids),
        "cells": len(outcomes),
        "runs": len(records),
        "failed_cells": failed,
    }
    output.save_metadata(metadata)
    return metadata


def main(argv: Optional[Sequence[str]] = None) -> int:
    logging.basicConfig(level=logging.INFO)
    discover_solvers()
    args = parse_args(argv)

    try:
        config = apply_overrides(load_config(Path(args.config) if args.config else None), args)
        missing = set(config.solvers) - set(registry.available())
        if missing:
            raise ConfigError(f"unknown solvers requested: {', '.join(sorted(missing))}")
        workers = args.workers if args.workers is not None else env_workers()
        if workers < 1:
            raise ConfigError("--workers must be at least 1")
        datasets = config.load_datasets()
        dags = prepare_suite(config, datasets)
    except (ConfigError, DatasetError, OSError, ValueError) as exc:
        logger.error("Invalid experiment configuration: %s", exc)
        return 1
    if not dags:
        logger.error("The DAG suite is empty")
        return 1

    cells = build_cells(config, dags)
    logger.info("Running %d cells with %d worker(s)", len(cells), workers)
    outcomes = asyncio.run(run_all(cells, dags, datasets, config, config.energy, workers))

    output = OutputManager(Path(args.output_dir or env_output_dir()), config.name)
    metadata = write_outputs(output, outcomes, config, list(dags))
    logger.info("Results written to %s", output.run_dir)

    if metadata["failed_cells"]:
        logger.error("%d cell(s) failed: %s", len(metadata["failed_cells"]), ", ".join(metadata["failed_cells"]))
        return 2
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
