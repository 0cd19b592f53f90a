"""Utility helpers for persisting experiment outputs."""
from __future__ import annotations

import json
import re
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Iterable, Optional, Sequence

import pandas as pd

from schemas.run_record import RUN_COLUMNS, RunRecord

_UNSAFE = re.compile(r"[^A-Za-z0-9._-]+")


def cell_filename(cell: str, solver: Optional[str] = None) -> str:
    """File-system safe name for a cell key (``dag|dataset|rate|setup``)."""
    stem = _UNSAFE.sub("_", cell.replace("|", "__"))
    return f"{stem}__{solver}" if solver else stem


def runs_frame(records: Iterable[RunRecord]) -> pd.DataFrame:
    return pd.DataFrame([record.to_dict() for record in records], columns=list(RUN_COLUMNS))


class OutputManager:
    """Persist experiment outputs following repository conventions.

    ``<base>/<experiment>/<UTC timestamp>/`` 아래에 CSV·JSON 을 쓴다.
    """

    def __init__(self, base_dir: Path, experiment_name: str, *, timestamp: Optional[str] = None) -> None:
        self.base_dir = Path(base_dir)
        timestamp = timestamp or datetime.now(timezone.utc).strftime("%Y%m%dT%H%M%SZ")
        self.run_dir = self.base_dir / experiment_name / timestamp
        self.run_dir.mkdir(parents=True, exist_ok=True)

    def save_runs(self, records: Sequence[RunRecord]) -> Path:
        path = self.run_dir / "runs.csv"
        runs_frame(records).to_csv(path, index=False)
        return path

    def save_frame(self, frame: pd.DataFrame, name: str) -> Path:
        filename = name if name.endswith(".csv") else f"{name}.csv"
        path = self.run_dir / filename
        frame.to_csv(path, index=False)
        return path

    def save_metadata(self, metadata: dict[str, Any]) -> Path:
        path = self.run_dir / "metadata.json"
        with path.open("w", encoding="utf-8") as fh:
            json.dump(metadata, fh, ensure_ascii=False, indent=2, sort_keys=True)
        return path

    def save_placement(self, cell: str, solver: str, payload: dict[str, Any]) -> Path:
        """Best placement of one solver in one cell."""
        directory = self.run_dir / "placements"
        directory.mkdir(exist_ok=True)
        path = directory / f"{cell_filename(cell, solver)}.json"
        path.write_text(json.dumps(payload, ensure_ascii=False, indent=2, sort_keys=True), encoding="utf-8")
        return path

    def save_trace(self, cell: str, trace: Sequence[tuple[int, bool, float]]) -> Path:
        """GA fitness trace as ``generation,best_valid,best_fitness`` rows."""
        directory = self.run_dir / "traces"
        directory.mkdir(exist_ok=True)
        path = directory / f"{cell_filename(cell)}.csv"
        frame = pd.DataFrame(list(trace), columns=["generation", "best_valid", "best_fitness"])
        frame.to_csv(path, index=False)
        return path
