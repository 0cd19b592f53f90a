"""Experiment runner: seeds, cells, per-cell failures and the CLI."""
import json

import numpy as np
import pandas as pd
import pytest

from dataflow.generator import generate_dag
from pipeline import run_experiment
from pipeline.config import ExperimentConfig
from pipeline.run_experiment import Cell, apply_overrides, build_cells, derive_seed, parse_args, run_cell
from profiles.dataset import bundled_dataset
from schemas.run_record import RUN_STATUS_ERROR
from solvers.registry import discover_solvers

TINY_GA = {"population": 8, "min_generations": 5, "max_generations": 40}


@pytest.fixture(scope="module")
def campus():
    discover_solvers()
    return bundled_dataset("campus")


@pytest.fixture(scope="module")
def dag(campus):
    return generate_dag(6, 1, 2, campus, np.random.default_rng(0))


def _config(**overrides):
    data = {"seed": 3, "ga": dict(TINY_GA), "random": {"trials": 20}}
    data.update(overrides)
    return ExperimentConfig.from_mapping(data)


def test_derive_seed():
    assert derive_seed(1, "a|b") == derive_seed(1, "a|b")
    assert derive_seed(1, "a|b") != derive_seed(2, "a|b")
    assert 0 <= derive_seed(1, "a|b") < 16**15


def test_build_cells():
    config = _config(rates=[100, 1000], setups=["liberal", "centrist"])
    cells = build_cells(config, {"d1": None, "d2": None})
    assert len(cells) == 2 * 2 * 2 * 2
    assert cells[0] == Cell("d1", "campus", 100.0, "liberal")


class TestRunCell:
    def test_every_solver_gets_a_row(self, campus, dag):
        config = _config(headroom=True, trace=True)
        cell = Cell("6_1_1", "campus", 100.0, "liberal")
        outcome = run_cell(cell, dag, campus, config, config.energy)
        assert [r.solver for r in outcome.records] == ["bf", "ga", "random", "cloud_only"]
        assert not outcome.failed
        assert all(r.n_vertices == 6 and r.n_resources == 6 for r in outcome.records)
        ga = outcome.records[1]
        assert ga.population == 8
        if ga.valid:
            assert ga.headroom_pct is not None
        assert outcome.trace and outcome.trace[0][0] == 0
        assert outcome.occupancy

    def test_same_cell_same_outcome(self, campus, dag):
        config = _config(solvers=["ga", "random"])
        cell = Cell("6_1_1", "campus", 1000.0, "centrist")
        first = run_cell(cell, dag, campus, config, config.energy)
        again = run_cell(cell, dag, campus, config, config.energy)
        assert [r.makespan_ms for r in first.records] == [r.makespan_ms for r in again.records]

    def test_scenario_failure_marks_every_solver(self, campus, dag, monkeypatch):
        def broken(*args, **kwargs):
            raise RuntimeError("no samples")

        monkeypatch.setattr(run_experiment, "materialize", broken)
        config = _config(solvers=["ga", "cloud_only"])
        outcome = run_cell(Cell("6_1_1", "campus", 100.0, "liberal"), dag, campus, config, config.energy)
        assert outcome.failed
        assert [r.status for r in outcome.records] == [RUN_STATUS_ERROR, RUN_STATUS_ERROR]
        assert "no samples" in outcome.records[0].error

    @pytest.mark.parametrize("rate", [100.0, 1000.0])
    @pytest.mark.parametrize("setup", ["liberal", "centrist", "conservative"])
    def test_ga_trace_never_decreases(self, campus, dag, rate, setup):
        config = _config(solvers=["ga"], trace=True)
        outcome = run_cell(Cell("6_1_1", "campus", rate, setup), dag, campus, config, config.energy)
        keys = [(valid, value) for _, valid, value in outcome.trace]
        assert keys and keys == sorted(keys)

    def test_solver_failure_is_isolated(self, campus, dag):
        config = _config(solvers=["random", "cloud_only"], random={"trials": 0})
        outcome = run_cell(Cell("6_1_1", "campus", 100.0, "liberal"), dag, campus, config, config.energy)
        assert [r.status for r in outcome.records][0] == RUN_STATUS_ERROR
        assert outcome.records[1].status in ("ok", "invalid")


def test_cli_overrides():
    args = parse_args(["--solvers", "ga", "--budget-secs", "5", "--ga-fitness-constant-ms", "2000", "--trace"])
    config = apply_overrides(_config(ga={**TINY_GA, "fitness_constant": 9.0}), args)
    assert config.solvers == ["ga"]
    assert config.bf["budget_secs"] == 5
    assert config.ga_config().fitness_constant == pytest.approx(2.0)
    assert config.trace and not config.headroom


def _write_config(tmp_path, **extra):
    data = {
        "name": "tiny",
        "seed": 1,
        "datasets": {"campus": "campus"},
        "suite": {"sizes": [4], "instances": 1, "source_counts": [1]},
        "rates": [100],
        "setups": ["liberal"],
        "ga": TINY_GA,
        "random": {"trials": 20},
    }
    data.update(extra)
    path = tmp_path / "tiny.json"
    path.write_text(json.dumps(data), encoding="utf-8")
    return path


def test_main_writes_results(tmp_path):
    config = _write_config(tmp_path)
    out = tmp_path / "out"
    assert run_experiment.main(["--config", str(config), "--output-dir", str(out)]) == 0
    (run_dir,) = (out / "tiny").iterdir()
    runs = pd.read_csv(run_dir / "runs.csv")
    assert sorted(runs["solver"]) == ["bf", "cloud_only", "ga", "random"]
    assert (run_dir / "summary.csv").exists() and (run_dir / "occupancy.csv").exists()
    metadata = json.loads((run_dir / "metadata.json").read_text(encoding="utf-8"))
    assert metadata["failed_cells"] == [] and metadata["dags"] == ["4_1_1"]
    assert [row["key"] for row in metadata["solvers"]] == ["bf", "ga", "random", "cloud_only"]


def test_main_rejects_bad_config(tmp_path):
    config = _write_config(tmp_path, solvers=["annealing"])
    assert run_experiment.main(["--config", str(config), "--output-dir", str(tmp_path / "out")]) == 1


def test_main_empty_suite(tmp_path):
    config = _write_config(tmp_path)
    assert run_experiment.main(["--config", str(config), "--output-dir", str(tmp_path), "--dags", "nope"]) == 1


@pytest.mark.slow
def test_full_matrix_with_headroom_and_traces(tmp_path):
    config = _write_config(
        tmp_path,
        datasets={"campus": "campus", "planetlab": "planetlab"},
        suite={"sizes": [4, 6, 10], "instances": 1, "source_counts": [1, 4]},
        rates=[100, 1000],
        setups=["liberal", "centrist", "conservative"],
        bf={"max_unpinned": 5},
    )
    out = tmp_path / "out"
    assert run_experiment.main(["--config", str(config), "--output-dir", str(out), "--workers", "4",
                                "--headroom", "--trace"]) == 0
    (run_dir,) = (out / "tiny").iterdir()
    runs = pd.read_csv(run_dir / "runs.csv")
    assert runs["cell"].nunique() == 4 * 2 * 2 * 3
    assert (run_dir / "headroom.csv").exists()
    assert any((run_dir / "traces").iterdir())
