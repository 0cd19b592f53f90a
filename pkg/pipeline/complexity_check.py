"""Regress solver wall times from a ``runs.csv`` against expected complexity.

기울기가 허용 범위를 벗어나거나 R² 가 기준 미만이면 코드 2 로 종료한다(CI 게이트).
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

import pandas as pd

from pipeline.complexity import InsufficientData, verify_complexity

logger = logging.getLogger(__name__)


def parse_args(argv: Optional[Sequence[str]] = None) -> argparse.Namespace:
    parser = argparse.ArgumentParser(description="Check solver timings against expected complexity")
    parser.add_argument("runs", help="Path to runs.csv")
    parser.add_argument("--solvers", nargs="+", default=["bf", "ga"])
    parser.add_argument("--slope-tolerance", type=float, default=None, help="허용 |slope - 1| (미지정 시 검사 안 함)")
    parser.add_argument("--min-r2", type=float, default=None, help="R² 하한 (미지정 시 검사 안 함)")
    return parser.parse_args(argv)


def main(argv: Optional[Sequence[str]] = None) -> int:
    logging.basicConfig(level=logging.INFO)
    args = parse_args(argv)
    try:
        runs = pd.read_csv(args.runs)
    except (OSError, pd.errors.ParserError) as exc:
        logger.error("Cannot read %s: %s", args.runs, exc)
        return 1

    report: list[dict] = []
    problems: list[str] = []
    for solver in args.solvers:
        try:
            fit = verify_complexity(runs, solver)
        except InsufficientData as exc:
            logger.warning("Skipping %s: %s", solver, exc)
            continue
        report.append(fit.to_dict())
        if args.slope_tolerance is not None and abs(fit.slope - 1.0) > args.slope_tolerance:
            problems.append(f"{solver}: slope {fit.slope:.3f} outside 1 ± {args.slope_tolerance}")
        if args.min_r2 is not None and fit.r_squared < args.min_r2:
            problems.append(f"{solver}: R² {fit.r_squared:.3f} below {args.min_r2}")

    json.dump(report, sys.stdout, indent=2)
    sys.stdout.write("\n")
    if not report:
        logger.error("No solver had enough timing data in %s", Path(args.runs))
        return 1
    for problem in problems:
        logger.error("Complexity check failed: %s", problem)
    return 2 if problems else 0


if __name__ == "__main__":
    raise SystemExit(main())
