"""Place a single DAG file with one solver and print the result as JSON."""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

import numpy as np
import pandas as pd

from dataflow.dag import DagValidationError, load_dag
from pipeline.config import add_ga_arguments, ga_overrides
from placement.evaluation import rate_headroom
from placement.metrics import edge_used_pct
from profiles.dataset import BUNDLED_DATASETS, DatasetError, bundled_dataset, load_dataset
from simulation.resources import BATTERY_PRESETS, Setup, build_pool
from simulation.scenario import materialize
from solvers.base import SolverConfig
from solvers.baselines import DEFAULT_TRIALS
from solvers.genetic import GaConfig
from solvers.registry import discover_solvers, registry

logger = logging.getLogger(__name__)


def parse_args(argv: Optional[Sequence[str]] = None) -> argparse.Namespace:
    parser = argparse.ArgumentParser(description="Solve the placement of one CEP DAG")
    parser.add_argument("dag", help="DAG JSON file")
    parser.add_argument("--dataset", default="campus", help="Bundled dataset name or dataset JSON path")
    parser.add_argument("--solver", default="ga", help="bf, ga, random or cloud_only")
    parser.add_argument("--rate", type=float, default=1000.0, help="DAG input rate (events/s)")
    parser.add_argument("--setup", choices=[s.value for s in Setup], default=Setup.LIBERAL.value)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--battery", choices=sorted(BATTERY_PRESETS), default="default")
    parser.add_argument("--budget-secs", type=float, default=None)
    parser.add_argument("--trials", type=int, default=DEFAULT_TRIALS)
    parser.add_argument("--headroom", action="store_true")
    parser.add_argument("--trace", default=None, help="Write the GA fitness trace CSV here")
    parser.add_argument("--include-sink-compute", action="store_true")
    parser.add_argument("--output", default=None, help="Write the JSON here instead of stdout")
    add_ga_arguments(parser)
    return parser.parse_args(argv)


def main(argv: Optional[Sequence[str]] = None) -> int:
    logging.basicConfig(level=logging.INFO)
    discover_solvers()
    args = parse_args(argv)
    if args.solver not in registry:
        logger.error("Unknown solver %s; available: %s", args.solver, ", ".join(registry.available()))
        return 1

    try:
        dataset = bundled_dataset(args.dataset) if args.dataset in BUNDLED_DATASETS else load_dataset(Path(args.dataset))
        dag = load_dag(Path(args.dag), dataset.query_variants)
        parameters: dict = {}
        if args.solver == "ga":
            parameters = GaConfig.from_mapping(ga_overrides(args)).to_dict()
        elif args.solver == "bf":
            parameters = {"budget_secs": args.budget_secs}
        elif args.solver == "random":
            parameters = {"trials": args.trials}
        scenario = materialize(dag, dataset, args.rate, np.random.default_rng(args.seed))
        pool = build_pool(args.setup, len(dag), BATTERY_PRESETS[args.battery], base_load_ma=dataset.base_load_ma)
    except (DatasetError, DagValidationError, OSError, ValueError) as exc:
        logger.error("Cannot set up placement: %s", exc)
        return 1

    config = SolverConfig(
        name=args.solver,
        dag_id=Path(args.dag).stem,
        seed=args.seed,
        include_sink_compute=args.include_sink_compute,
        parameters=parameters,
    )
    result = registry.create(args.solver, config).run(dag, scenario, pool)
    if args.headroom and result.valid and result.placement is not None:
        result.headroom_pct = rate_headroom(dag, scenario, result.placement, pool)

    payload = result.to_dict()
    payload["dag"] = str(args.dag)
    payload["rate"] = args.rate
    payload["setup"] = args.setup
    payload["resources"] = pool.describe()
    if result.placement is not None:
        payload["edge_used_pct"] = edge_used_pct(result.placement, pool)
    text = json.dumps(payload, ensure_ascii=False, indent=2)
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text + "\n")

    if args.trace and result.fitness_trace:
        frame = pd.DataFrame(result.fitness_trace, columns=["generation", "best_valid", "best_fitness"])
        frame.to_csv(args.trace, index=False)
    return 0 if result.valid else 2


if __name__ == "__main__":
    raise SystemExit(main())
