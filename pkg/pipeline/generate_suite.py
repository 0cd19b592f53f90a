"""Generate the random DAG suite and write one JSON file per DAG plus ``manifest.json``."""
from __future__ import annotations

import argparse
import logging
from pathlib import Path
from typing import Any, Optional, Sequence

import pandas as pd

from dataflow.dag import QueryDag
from dataflow.generator import (
    DEFAULT_INSTANCES,
    DEFAULT_SIZES,
    DEFAULT_SOURCE_COUNTS,
    FOUR_SOURCE_MIN_SIZE,
    MAX_ATTEMPTS,
    GiveUp,
    UnsatisfiableShape,
    build_suite,
)
from dataflow.rates import dag_stats
from profiles.dataset import BUNDLED_DATASETS, DatasetError, bundled_dataset, load_dataset

logger = logging.getLogger(__name__)


def parse_args(argv: Optional[Sequence[str]] = None) -> argparse.Namespace:
    parser = argparse.ArgumentParser(description="Generate a screened random CEP DAG suite")
    parser.add_argument("output_dir", help="Directory for DAG files and manifest.json")
    parser.add_argument("--dataset", default="campus", help="Bundled dataset name or dataset JSON path")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--sizes", type=int, nargs="+", default=list(DEFAULT_SIZES))
    parser.add_argument("--instances", type=int, default=DEFAULT_INSTANCES)
    parser.add_argument("--source-counts", type=int, nargs="+", default=list(DEFAULT_SOURCE_COUNTS))
    parser.add_argument("--four-source-min-size", type=int, default=FOUR_SOURCE_MIN_SIZE)
    parser.add_argument("--max-out-degree", type=int, default=None, help="고정 최대 출력 차수(기본: DAG마다 1~5 추첨)")
    parser.add_argument("--max-attempts", type=int, default=MAX_ATTEMPTS)
    return parser.parse_args(argv)


def stats_frame(dags: dict[str, QueryDag]) -> pd.DataFrame:
    """DAG 특성 표: 정점/간선 수, 종류별 쿼리 수, 최대 쿼리 입력률, σ(G)."""
    rows: list[dict[str, Any]] = []
    for dag_id, dag in dags.items():
        stats = dag_stats(dag)
        kinds = stats.pop("kinds")
        rows.append({"dag_id": dag_id, **stats, **{f"n_{kind}": count for kind, count in sorted(kinds.items())}})
    frame = pd.DataFrame(rows)
    counts = [col for col in frame.columns if col.startswith("n_")]
    frame[counts] = frame[counts].fillna(0).astype(int)
    return frame


def main(argv: Optional[Sequence[str]] = None) -> int:
    logging.basicConfig(level=logging.INFO)
    args = parse_args(argv)
    try:
        dataset = bundled_dataset(args.dataset) if args.dataset in BUNDLED_DATASETS else load_dataset(Path(args.dataset))
    except (DatasetError, OSError) as exc:
        logger.error("Failed to load dataset %s: %s", args.dataset, exc)
        return 1

    try:
        manifest, dags = build_suite(
            dataset,
            args.seed,
            sizes=args.sizes,
            instances=args.instances,
            source_counts=args.source_counts,
            four_source_min_size=args.four_source_min_size,
            max_out_degree=args.max_out_degree,
            output_dir=Path(args.output_dir),
            max_attempts=args.max_attempts,
        )
    except (UnsatisfiableShape, GiveUp) as exc:
        logger.error("Suite generation failed: %s", exc)
        return 2

    stats_path = Path(args.output_dir) / "stats.csv"
    stats_frame(dags).to_csv(stats_path, index=False)

    regenerated = [entry.dag_id for entry in manifest.entries if entry.attempts > 1]
    if regenerated:
        logger.info("DAGs regenerated by screening: %s", ", ".join(regenerated))
    logger.info("Wrote %d DAGs to %s", len(manifest), args.output_dir)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
