"""Unit tests for RunRecord (one runs.csv row)."""
import pytest

from schemas.run_record import RUN_COLUMNS, RunRecord, cell_key


def _rec(**kw):
    defaults = dict(
        dag_id="10_1_1", dataset="campus", rate=1000.0, setup="liberal",
        solver="ga", status="ok", valid=True, makespan_ms=12.5,
    )
    defaults.update(kw)
    return RunRecord(**defaults)


class TestValidation:
    def test_requires_dag_id(self):
        with pytest.raises(ValueError):
            _rec(dag_id="")

    def test_unknown_status(self):
        with pytest.raises(ValueError):
            _rec(status="done")

    def test_rate_positive(self):
        with pytest.raises(ValueError):
            _rec(rate=0)

    def test_valid_needs_makespan(self):
        with pytest.raises(ValueError):
            _rec(makespan_ms=None)

    def test_error_row_allows_missing_numbers(self):
        # 실패 셀은 수치 없이 기록(0 과 구분)
        rec = _rec(status="error", valid=False, makespan_ms=None, error="boom")
        assert rec.makespan_ms is None and rec.error == "boom"


class TestSerialization:
    def test_to_dict_matches_columns(self):
        assert tuple(_rec().to_dict()) == RUN_COLUMNS

    def test_cell_key(self):
        assert _rec().cell == "10_1_1|campus|1000|liberal"
        assert cell_key("4_1_2", "planetlab", 100.0, "centrist") == "4_1_2|planetlab|100|centrist"
