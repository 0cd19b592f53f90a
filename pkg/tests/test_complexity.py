"""Log-log fits of wall time against expected work."""
import pytest

from pipeline.complexity import InsufficientData, expected_work, verify_complexity
from pipeline.output import runs_frame
from schemas.run_record import RunRecord


def _bf(n_unpinned, wall, status="ok"):
    return RunRecord(
        dag_id=f"bf{n_unpinned}",
        dataset="campus",
        rate=100.0,
        setup="liberal",
        solver="bf",
        status=status,
        wall_time_s=wall,
        n_vertices=6,
        n_edges=7,
        n_unpinned=n_unpinned,
        n_resources=3,
    )


def _ga(generations, wall):
    return RunRecord(
        dag_id=f"ga{generations}",
        dataset="campus",
        rate=100.0,
        setup="liberal",
        solver="ga",
        status="ok",
        valid=True,
        makespan_ms=10.0,
        generations=generations,
        population=50,
        wall_time_s=wall,
        n_vertices=6,
        n_edges=7,
    )


def test_bf_linear_in_search_space():
    frame = runs_frame([_bf(n, 1e-6 * 13 * 3**n) for n in range(2, 7)])
    fit = verify_complexity(frame, "bf")
    assert fit.slope == pytest.approx(1.0)
    assert fit.r_squared == pytest.approx(1.0)
    assert fit.points == 5


def test_ga_linear_in_generations():
    frame = runs_frame([_ga(g, 2e-7 * g * 50 * 13) for g in (100, 1_000, 10_000)])
    assert verify_complexity(frame, "ga").slope == pytest.approx(1.0)


def test_skipped_rows_are_ignored():
    frame = runs_frame([_bf(2, 1e-3), _bf(3, 3e-3), _bf(9, 0.0, status="skipped")])
    assert verify_complexity(frame, "bf").points == 2


def test_single_size_is_not_enough():
    frame = runs_frame([_bf(4, 0.1), _bf(4, 0.2)])
    with pytest.raises(InsufficientData):
        verify_complexity(frame, "bf")


def test_no_rows():
    with pytest.raises(InsufficientData):
        verify_complexity(runs_frame([_bf(3, 0.1)]), "ga")


def test_unknown_solver():
    with pytest.raises(ValueError):
        expected_work(runs_frame([_bf(3, 0.1)]), "random")
