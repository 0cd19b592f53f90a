"""Registry of placement solvers keyed by the names used in configs and CSVs."""
from __future__ import annotations

import importlib
from dataclasses import asdict, dataclass
from typing import Any, Dict, Iterable, Type

from solvers.base import BaseSolver, SolverConfig

SOLVER_MODULES = ("solvers.brute_force", "solvers.genetic", "solvers.baselines")


class UnknownSolver(KeyError):
    """Raised when a solver key has not been registered."""


@dataclass(frozen=True)
class SolverMetadata:
    key: str
    module: str
    description: str | None = None


class SolverRegistry:
    """Solver classes by key; modules register themselves on import."""

    def __init__(self) -> None:
        self._solvers: Dict[str, Type[BaseSolver]] = {}
        self._metadata: Dict[str, SolverMetadata] = {}

    def register(self, key: str, solver_cls: Type[BaseSolver], *, description: str | None = None) -> None:
        current = self._solvers.get(key)
        # 모듈 재로딩은 허용, 다른 클래스가 같은 키를 쓰는 것은 금지
        if current is not None and current.__qualname__ != solver_cls.__qualname__:
            raise ValueError(f"solver key '{key}' is already taken by {current.__qualname__}")
        self._solvers[key] = solver_cls
        self._metadata[key] = SolverMetadata(key=key, module=solver_cls.__module__, description=description)

    def available(self) -> Iterable[str]:
        return sorted(self._solvers)

    def __contains__(self, key: object) -> bool:
        return key in self._solvers

    def _lookup(self, key: str) -> Type[BaseSolver]:
        try:
            return self._solvers[key]
        except KeyError:
            raise UnknownSolver(f"unknown solver '{key}'; available: {', '.join(self.available())}") from None

    def create(self, key: str, config: SolverConfig) -> BaseSolver:
        return self._lookup(key)(config)

    def metadata(self, key: str) -> SolverMetadata:
        self._lookup(key)
        return self._metadata[key]

    def describe(self, keys: Iterable[str] | None = None) -> list[dict[str, Any]]:
        """Metadata rows for ``metadata.json``."""
        return [asdict(self.metadata(key)) for key in (keys if keys is not None else self.available())]


registry = SolverRegistry()


def discover_solvers() -> SolverRegistry:
    """Import solver modules so that registration side-effects run."""
    for module in SOLVER_MODULES:
        importlib.import_module(module)
    return registry
