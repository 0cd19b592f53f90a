"""실험 설정 로더: config/experiment.yaml 을 단일 진실원천으로 다룬다.

YAML 과 JSON 모두 ``yaml.safe_load`` 로 읽는다(JSON 은 YAML 의 부분집합).
CLI 플래그는 파일 값을 덮어쓴다.
"""
from __future__ import annotations

import argparse
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional

import yaml

from profiles.dataset import BUNDLED_DATASETS, BenchmarkDataset, bundled_dataset, load_dataset
from simulation.resources import BATTERY_PRESETS, EnergyProfile, Setup
from solvers.genetic import GaConfig
from solvers.selection import SELECTIONS

DEFAULT_CONFIG_PATH = Path(__file__).resolve().parent.parent / "config" / "experiment.yaml"
DEFAULT_OUTPUT_DIR = "output/experiments"

ENV_WORKERS = "CEP_WORKERS"
ENV_OUTPUT_DIR = "CEP_OUTPUT_DIR"

VALID_SOLVERS = {"bf", "ga", "random", "cloud_only"}
VALID_SETUPS = {s.value for s in Setup}


class ConfigError(ValueError):
    """Raised when the experiment configuration is unusable."""


@dataclass(slots=True)
class SuiteSpec:
    manifest: Optional[str] = None  # 기존 스위트 manifest.json 경로(없으면 생성)
    sizes: List[int] = field(default_factory=lambda: [4, 6, 8, 10, 12, 20, 30, 40, 50])
    instances: int = 3
    source_counts: List[int] = field(default_factory=lambda: [1, 4])
    four_source_min_size: int = 10
    max_out_degree: Optional[int] = None
    dataset: Optional[str] = None  # 생성 시 변형 목록을 가져올 데이터셋 키
    only: Optional[List[str]] = None

    def __post_init__(self) -> None:
        if self.instances < 1:
            raise ConfigError("suite.instances must be at least 1")
        if any(size < 4 for size in self.sizes):
            raise ConfigError("suite.sizes must be at least 4")

    @classmethod
    def from_mapping(cls, data: Mapping[str, Any]) -> "SuiteSpec":
        defaults = cls()
        only = data.get("only")
        return cls(
            manifest=data.get("manifest"),
            sizes=[int(s) for s in data.get("sizes", defaults.sizes)],
            instances=int(data.get("instances", defaults.instances)),
            source_counts=[int(s) for s in data.get("source_counts", defaults.source_counts)],
            four_source_min_size=int(data.get("four_source_min_size", defaults.four_source_min_size)),
            max_out_degree=data.get("max_out_degree"),
            dataset=data.get("dataset"),
            only=[str(x) for x in only] if only else None,
        )


@dataclass(slots=True)
class ExperimentConfig:
    name: str = "placement"
    seed: int = 0
    datasets: Dict[str, str] = field(default_factory=lambda: {"campus": "campus", "planetlab": "planetlab"})
    suite: SuiteSpec = field(default_factory=SuiteSpec)
    rates: List[float] = field(default_factory=lambda: [100.0, 1000.0])
    setups: List[str] = field(default_factory=lambda: ["liberal", "centrist", "conservative"])
    solvers: List[str] = field(default_factory=lambda: ["bf", "ga", "random", "cloud_only"])
    battery: str = "default"
    bf: Dict[str, Any] = field(default_factory=lambda: {"max_unpinned": 12, "budget_secs": 300.0, "prune": True})
    ga: Dict[str, Any] = field(default_factory=dict)
    random: Dict[str, Any] = field(default_factory=lambda: {"trials": 15_000})
    headroom: bool = False
    trace: bool = False
    include_sink_compute: bool = False
    config_dir: Optional[Path] = None

    def __post_init__(self) -> None:
        if not self.datasets:
            raise ConfigError("at least one dataset is required")
        if not self.rates or any(rate <= 0 for rate in self.rates):
            raise ConfigError("rates must be a non-empty list of positive values")
        unknown_setups = set(self.setups) - VALID_SETUPS
        if unknown_setups or not self.setups:
            raise ConfigError(f"invalid setups: {sorted(unknown_setups) or self.setups}")
        unknown_solvers = set(self.solvers) - VALID_SOLVERS
        if unknown_solvers or not self.solvers:
            raise ConfigError(f"invalid solvers: {sorted(unknown_solvers) or self.solvers}")
        if self.battery not in BATTERY_PRESETS:
            raise ConfigError(f"unknown battery preset '{self.battery}'; choose from {sorted(BATTERY_PRESETS)}")
        try:
            GaConfig.from_mapping(self.ga)
        except ValueError as exc:
            raise ConfigError(f"invalid ga section: {exc}") from exc

    @property
    def energy(self) -> EnergyProfile:
        return BATTERY_PRESETS[self.battery]

    def ga_config(self) -> GaConfig:
        return GaConfig.from_mapping(self.ga)

    def resolve(self, value: str) -> Path:
        path = Path(value)
        if not path.is_absolute() and self.config_dir is not None:
            candidate = self.config_dir / path
            if candidate.exists():
                return candidate
        return path

    def load_datasets(self) -> dict[str, BenchmarkDataset]:
        loaded: dict[str, BenchmarkDataset] = {}
        for key, source in self.datasets.items():
            if source in BUNDLED_DATASETS:
                loaded[key] = bundled_dataset(source)
            else:
                loaded[key] = load_dataset(self.resolve(source))
        return loaded

    def describe(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "seed": self.seed,
            "datasets": dict(self.datasets),
            "rates": list(self.rates),
            "setups": list(self.setups),
            "solvers": list(self.solvers),
            "battery": self.battery,
            "bf": dict(self.bf),
            "ga": self.ga_config().to_dict(),
            "random": dict(self.random),
            "headroom": self.headroom,
            "trace": self.trace,
            "include_sink_compute": self.include_sink_compute,
        }

    @classmethod
    def from_mapping(cls, data: Mapping[str, Any], config_dir: Optional[Path] = None) -> "ExperimentConfig":
        defaults = cls()
        datasets = data.get("datasets", defaults.datasets)
        if not isinstance(datasets, Mapping):
            raise ConfigError("'datasets' must be a mapping of name -> bundled name or path")
        return cls(
            name=str(data.get("name", defaults.name)),
            seed=int(data.get("seed", defaults.seed)),
            datasets={str(k): str(v) for k, v in datasets.items()},
            suite=SuiteSpec.from_mapping(data.get("suite") or {}),
            rates=[float(r) for r in data.get("rates", defaults.rates)],
            setups=[str(s) for s in data.get("setups", defaults.setups)],
            solvers=[str(s) for s in data.get("solvers", defaults.solvers)],
            battery=str(data.get("battery", defaults.battery)),
            bf={**defaults.bf, **(data.get("bf") or {})},
            ga=dict(data.get("ga") or {}),
            random={**defaults.random, **(data.get("random") or {})},
            headroom=bool(data.get("headroom", defaults.headroom)),
            trace=bool(data.get("trace", defaults.trace)),
            include_sink_compute=bool(data.get("include_sink_compute", defaults.include_sink_compute)),
            config_dir=config_dir,
        )

    @classmethod
    def load(cls, path: Path | None = None) -> "ExperimentConfig":
        path = Path(path or DEFAULT_CONFIG_PATH)
        try:
            raw = yaml.safe_load(path.read_text(encoding="utf-8")) or {}
        except (OSError, yaml.YAMLError) as exc:
            raise ConfigError(f"cannot read config '{path}': {exc}") from exc
        if not isinstance(raw, Mapping):
            raise ConfigError("config root must be a mapping")
        return cls.from_mapping(raw, config_dir=path.resolve().parent)


def load_config(path: Path | None = None) -> ExperimentConfig:
    return ExperimentConfig.load(path)


def env_workers(default: int = 1) -> int:
    raw = os.environ.get(ENV_WORKERS)
    if not raw:
        return default
    try:
        workers = int(raw)
    except ValueError as exc:
        raise ConfigError(f"{ENV_WORKERS} must be an integer, got '{raw}'") from exc
    if workers < 1:
        raise ConfigError(f"{ENV_WORKERS} must be at least 1")
    return workers


def env_output_dir() -> str:
    return os.environ.get(ENV_OUTPUT_DIR) or DEFAULT_OUTPUT_DIR


# --- CLI 공용 GA 플래그 ----------------------------------------------------
_GA_FLAGS = (
    ("--ga-population", "population", int),
    ("--ga-crossover", "crossover_prob", float),
    ("--ga-mutation", "mutation_prob", float),
    ("--ga-min-generations", "min_generations", int),
    ("--ga-max-generations", "max_generations", int),
    ("--ga-convergence-window", "convergence_window_frac", float),
    ("--ga-fitness-constant-ms", "fitness_constant_ms", float),
    ("--ga-penalty-gamma", "penalty_gamma", float),
    ("--ga-convergence-tolerance", "convergence_tolerance", float),
    ("--ga-seed", "seed", int),
)


def add_ga_arguments(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("genetic algorithm")
    for flag, key, kind in _GA_FLAGS:
        group.add_argument(flag, dest=f"ga_{key}", type=kind, default=None)
    group.add_argument("--ga-selection", dest="ga_selection", choices=SELECTIONS, default=None)
    group.add_argument(
        "--ga-penalty-per-violation",
        dest="ga_penalty_per_violation",
        action="store_true",
        default=None,
        help="위반 클래스가 아니라 자원별 위반 건수만큼 페널티를 적용",
    )


def ga_overrides(args: argparse.Namespace) -> dict[str, Any]:
    """GA fields set on the command line, keyed as in :class:`GaConfig`."""
    overrides: dict[str, Any] = {}
    for _, key, _ in _GA_FLAGS:
        value = getattr(args, f"ga_{key}", None)
        if value is not None:
            overrides[key] = value
    for key in ("selection", "penalty_per_violation"):
        value = getattr(args, f"ga_{key}", None)
        if value is not None:
            overrides[key] = value
    return overrides
