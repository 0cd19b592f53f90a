"""Check observed solver wall times against their expected growth.

log(wall time) 를 log(예상 연산량)에 회귀한다. 기울기 ≈ 1 이면 예상 복잡도와 일치.
  - bf: (|V| + |E|) · |R|^n
  - ga: g · p · (|V| + |E|)
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Any

import numpy as np
import pandas as pd
from scipy import stats

logger = logging.getLogger(__name__)

BF_STATUSES = ("ok", "infeasible")
GA_STATUSES = ("ok", "invalid")


class InsufficientData(ValueError):
    """Raised when fewer than two distinct timing points are available."""


@dataclass(slots=True)
class RegressionStats:
    solver: str
    slope: float
    intercept: float
    r_squared: float
    points: int

    def to_dict(self) -> dict[str, Any]:
        return {
            "solver": self.solver,
            "slope": self.slope,
            "intercept": self.intercept,
            "r_squared": self.r_squared,
            "points": self.points,
        }


def expected_work(runs: pd.DataFrame, solver: str) -> pd.Series:
    size = runs["n_vertices"].astype(float) + runs["n_edges"].astype(float)
    if solver == "bf":
        return size * np.power(runs["n_resources"].astype(float), runs["n_unpinned"].astype(float))
    if solver == "ga":
        return runs["generations"].astype(float) * runs["population"].astype(float) * size
    raise ValueError(f"no complexity model for solver '{solver}'")


def verify_complexity(runs: pd.DataFrame, solver: str) -> RegressionStats:
    """Log-log regression of wall time on expected work for one solver."""
    statuses = BF_STATUSES if solver == "bf" else GA_STATUSES
    subset = runs[(runs["solver"] == solver) & runs["status"].isin(statuses)]
    subset = subset[subset["wall_time_s"].notna() & (subset["wall_time_s"] > 0)]
    if solver == "ga":
        subset = subset[subset["generations"].notna() & subset["population"].notna()]
    if subset.empty:
        raise InsufficientData(f"no timing data for solver '{solver}'")
    work = expected_work(subset, solver)
    keep = work > 0
    x = np.log(work[keep].to_numpy(dtype=float))
    y = np.log(subset.loc[keep, "wall_time_s"].to_numpy(dtype=float))
    if x.size < 2 or np.unique(x).size < 2:
        raise InsufficientData(f"solver '{solver}' needs at least two distinct problem sizes, got {np.unique(x).size}")
    fit = stats.linregress(x, y)
    result = RegressionStats(
        solver=solver,
        slope=float(fit.slope),
        intercept=float(fit.intercept),
        r_squared=float(fit.rvalue**2),
        points=int(x.size),
    )
    logger.info("Complexity fit", extra=result.to_dict())
    return result
