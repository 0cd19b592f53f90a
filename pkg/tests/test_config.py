"""Experiment configuration loading, validation and CLI overrides."""
import argparse

import pytest

from pipeline.config import (
    ENV_OUTPUT_DIR,
    ENV_WORKERS,
    ConfigError,
    ExperimentConfig,
    add_ga_arguments,
    env_output_dir,
    env_workers,
    ga_overrides,
    load_config,
)


def test_bundled_config_loads():
    config = load_config()
    assert config.rates == [100.0, 1000.0]
    assert set(config.solvers) == {"bf", "ga", "random", "cloud_only"}
    assert config.ga_config().population == 50
    assert config.energy.capacity_mah == 8600


def test_defaults_fill_missing_sections():
    config = ExperimentConfig.from_mapping({"bf": {"budget_secs": 5}})
    assert config.bf == {"max_unpinned": 12, "budget_secs": 5, "prune": True}
    assert config.random["trials"] == 15_000


@pytest.mark.parametrize(
    "data",
    [
        {"solvers": ["bf", "annealing"]},
        {"setups": ["generous"]},
        {"rates": [100, -1]},
        {"rates": []},
        {"battery": "solar"},
        {"ga": {"population": 1}},
        {"datasets": ["campus"]},
        {"suite": {"sizes": [3]}},
    ],
)
def test_rejects(data):
    with pytest.raises(ConfigError):
        ExperimentConfig.from_mapping(data)


def test_json_file(tmp_path):
    path = tmp_path / "exp.json"
    path.write_text('{"name": "tiny", "rates": [10], "suite": {"sizes": [4], "instances": 1}}', encoding="utf-8")
    config = ExperimentConfig.load(path)
    assert config.name == "tiny" and config.suite.sizes == [4]
    assert config.config_dir == tmp_path.resolve()


def test_unreadable_file(tmp_path):
    with pytest.raises(ConfigError):
        ExperimentConfig.load(tmp_path / "missing.yaml")


def test_root_must_be_mapping(tmp_path):
    path = tmp_path / "list.yaml"
    path.write_text("- 1\n- 2\n", encoding="utf-8")
    with pytest.raises(ConfigError):
        ExperimentConfig.load(path)


def test_relative_dataset_path(tmp_path):
    (tmp_path / "lab.json").write_text("{}", encoding="utf-8")
    config = ExperimentConfig.from_mapping({"datasets": {"lab": "lab.json"}}, config_dir=tmp_path)
    assert config.resolve("lab.json") == tmp_path / "lab.json"


class TestEnvironment:
    def test_workers(self, monkeypatch):
        monkeypatch.setenv(ENV_WORKERS, "4")
        assert env_workers() == 4

    def test_workers_default(self, monkeypatch):
        monkeypatch.delenv(ENV_WORKERS, raising=False)
        assert env_workers(2) == 2

    @pytest.mark.parametrize("raw", ["many", "0"])
    def test_bad_workers(self, monkeypatch, raw):
        monkeypatch.setenv(ENV_WORKERS, raw)
        with pytest.raises(ConfigError):
            env_workers()

    def test_output_dir(self, monkeypatch):
        monkeypatch.setenv(ENV_OUTPUT_DIR, "/tmp/out")
        assert env_output_dir() == "/tmp/out"


def test_ga_flags():
    parser = argparse.ArgumentParser()
    add_ga_arguments(parser)
    args = parser.parse_args(["--ga-population", "30", "--ga-selection", "rank", "--ga-penalty-per-violation"])
    assert ga_overrides(args) == {"population": 30, "selection": "rank", "penalty_per_violation": True}


def test_no_ga_flags():
    parser = argparse.ArgumentParser()
    add_ga_arguments(parser)
    assert ga_overrides(parser.parse_args([])) == {}
