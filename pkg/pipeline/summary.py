"""Aggregate ``runs.csv`` into the per-(rate, setup) comparison tables.

비교 지표는 두 솔버가 모두 유효한 해를 낸 셀에서만 계산한다(셀 키로 짝짓기).
invalid % 는 skipped/error 행을 분모에서 뺀다.
"""
from __future__ import annotations

import math
from typing import Any, Iterable, Sequence

import pandas as pd

from placement.metrics import EmptyInput, headroom_violation_curve, invalid_pct, latency_deviation

GROUP_COLUMNS = ["rate", "setup"]
SOLVER_ORDER = ("bf", "ga", "random", "cloud_only")
# (better, worse) 쌍: E_{A→B} = B 가 A 보다 평균적으로 몇 % 느린지
DEVIATION_PAIRS = (("bf", "ga"), ("bf", "random"), ("ga", "random"), ("ga", "cloud_only"))
EXCLUDED_FROM_INVALID = ("skipped", "error")
DEFAULT_HEADROOM_STEPS = tuple(float(step) for step in range(0, 101, 5))

_LABELS = {"bf": "BF", "ga": "GA", "random": "RND", "cloud_only": "CO"}


def deviation_column(better: str, worse: str) -> str:
    return f"E_{_LABELS.get(better, better)}_{_LABELS.get(worse, worse)}"


def _valid_makespans(group: pd.DataFrame) -> pd.DataFrame:
    valid = group[group["valid"].astype(bool) & group["makespan_ms"].notna()]
    # budget_exceeded 인 BF 는 최적이 아니라 best-so-far 라서 기준에서 뺀다
    valid = valid[(valid["solver"] != "bf") | (valid["status"] == "ok")]
    return valid.pivot_table(index="cell", columns="solver", values="makespan_ms", aggfunc="first")


def _pair_deviation(makespans: pd.DataFrame, better: str, worse: str) -> float:
    if better not in makespans.columns or worse not in makespans.columns:
        return math.nan
    paired = makespans[[better, worse]].dropna()
    if paired.empty:
        return math.nan
    return latency_deviation(paired[better].tolist(), paired[worse].tolist())


def _invalid_share(group: pd.DataFrame, solver: str) -> float:
    rows = group[(group["solver"] == solver) & ~group["status"].isin(EXCLUDED_FROM_INVALID)]
    try:
        return invalid_pct(rows["valid"].astype(bool).tolist())
    except EmptyInput:
        return math.nan


def summary_table(runs: pd.DataFrame, by: Sequence[str] = GROUP_COLUMNS) -> pd.DataFrame:
    """One row per ``by`` group: latency deviations, invalid % per solver, mean edge-used %."""
    if runs.empty:
        raise EmptyInput("summary needs at least one run")
    solvers = [s for s in SOLVER_ORDER if s in set(runs["solver"])]
    rows: list[dict[str, Any]] = []
    for key, group in runs.groupby(list(by), sort=True):
        key = key if isinstance(key, tuple) else (key,)
        row: dict[str, Any] = dict(zip(by, key))
        makespans = _valid_makespans(group)
        for better, worse in DEVIATION_PAIRS:
            row[deviation_column(better, worse)] = _pair_deviation(makespans, better, worse)
        for solver in solvers:
            row[f"invalid_pct_{solver}"] = _invalid_share(group, solver)
        for solver in solvers:
            used = group.loc[(group["solver"] == solver) & group["valid"].astype(bool), "edge_used_pct"].dropna()
            row[f"edge_used_pct_{solver}"] = float(used.mean()) if not used.empty else math.nan
        row["cells"] = int(group["cell"].nunique())
        rows.append(row)
    return pd.DataFrame(rows)


def occupancy_frame(rows: Iterable[dict[str, Any]]) -> pd.DataFrame:
    """Sum per-cell occupancy rows into counts per (rate, setup, solver, resource, queries)."""
    columns = [*GROUP_COLUMNS, "solver", "resource", "queries", "count"]
    frame = pd.DataFrame(list(rows), columns=columns)
    if frame.empty:
        return frame
    keys = columns[:-1]
    return frame.groupby(keys, as_index=False, sort=True)["count"].sum()


def occupancy_rows(
    histogram: dict[str, Any], *, rate: float, setup: str, solver: str
) -> list[dict[str, Any]]:
    """Flatten one :func:`placement.metrics.occupancy_histogram` result."""
    base = {"rate": rate, "setup": setup, "solver": solver}
    rows = [{**base, "resource": "edge", "queries": int(k), "count": int(n)} for k, n in histogram["edge"].items()]
    rows.extend({**base, "resource": "cloud", "queries": int(q), "count": 1} for q in histogram["cloud"])
    return rows


def headroom_frame(
    runs: pd.DataFrame, steps: Sequence[float] = DEFAULT_HEADROOM_STEPS, solver: str = "ga"
) -> pd.DataFrame:
    """Share of placements violating at each % input-rate increase, per (rate, setup)."""
    subset = runs[(runs["solver"] == solver) & runs["headroom_pct"].notna()]
    rows: list[dict[str, Any]] = []
    for (rate, setup), group in subset.groupby(GROUP_COLUMNS, sort=True):
        for step, share in headroom_violation_curve(group["headroom_pct"].tolist(), steps):
            rows.append({"rate": rate, "setup": setup, "step_pct": step, "violating_share": share})
    return pd.DataFrame(rows, columns=["rate", "setup", "step_pct", "violating_share"])
