"""Output directory layout and file contents."""
import json

import pandas as pd

from pipeline.output import OutputManager, cell_filename
from schemas.run_record import RUN_COLUMNS, RunRecord


def test_cell_filename():
    assert cell_filename("10_1_1|campus|100|liberal") == "10_1_1__campus__100__liberal"
    assert cell_filename("10_1_1|lab 2|1e+03|liberal", "ga") == "10_1_1__lab_2__1e_03__liberal__ga"


def test_run_dir(tmp_path):
    manager = OutputManager(tmp_path, "placement", timestamp="20240101T000000Z")
    assert manager.run_dir == tmp_path / "placement" / "20240101T000000Z"
    assert manager.run_dir.is_dir()


def test_runs_csv(tmp_path):
    manager = OutputManager(tmp_path, "placement", timestamp="t")
    record = RunRecord(
        dag_id="4_1_1", dataset="campus", rate=100.0, setup="liberal", solver="ga", status="ok",
        valid=True, makespan_ms=12.5,
    )
    frame = pd.read_csv(manager.save_runs([record]))
    assert list(frame.columns) == list(RUN_COLUMNS)
    assert frame.loc[0, "cell"] == "4_1_1|campus|100|liberal"


def test_placement_and_trace(tmp_path):
    manager = OutputManager(tmp_path, "placement", timestamp="t")
    path = manager.save_placement("4_1_1|campus|100|liberal", "bf", {"placement": {"s": "edge-0"}})
    assert path.name == "4_1_1__campus__100__liberal__bf.json"
    assert json.loads(path.read_text(encoding="utf-8"))["placement"] == {"s": "edge-0"}
    trace = pd.read_csv(manager.save_trace("4_1_1|campus|100|liberal", [(0, False, 1.0), (1, True, 2.0)]))
    assert trace["generation"].tolist() == [0, 1]
    assert trace["best_valid"].tolist() == [False, True]


def test_metadata_sorted(tmp_path):
    manager = OutputManager(tmp_path, "placement", timestamp="t")
    path = manager.save_metadata({"b": 1, "a": 2})
    assert list(json.loads(path.read_text(encoding="utf-8"))) == ["a", "b"]
