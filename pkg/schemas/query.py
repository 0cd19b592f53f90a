"""CEP query variants placed on the vertices of a dataflow."""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Any, Optional

DEFAULT_EVENT_SIZE_BYTES = 4  # replayed events are 4-byte integers
SOURCE_VARIANT_ID = "Src"


class QueryKind(str, enum.Enum):
    FILTER = "filter"
    SEQUENCE = "sequence"
    PATTERN = "pattern"
    AGGREGATE_BATCH = "aggregate_batch"
    AGGREGATE_SLIDING = "aggregate_sliding"
    # no-op generator; never assigned to an inner vertex
    SOURCE = "source"

    @classmethod
    def placeable(cls) -> tuple["QueryKind", ...]:
        return (
            cls.FILTER,
            cls.SEQUENCE,
            cls.PATTERN,
            cls.AGGREGATE_BATCH,
            cls.AGGREGATE_SLIDING,
        )


@dataclass(frozen=True, slots=True)
class QueryVariant:
    """A benchmarked query configuration, e.g. ``Fil 0.5`` or ``Agg B 60``.

    ``selectivity`` is output events per input event. Aggregates derive it from
    the window: batch windows emit one event per window, sliding windows emit
    one event per input.
    """

    id: str
    kind: QueryKind
    selectivity: float
    window_or_pattern_length: Optional[int] = None
    out_event_size: int = DEFAULT_EVENT_SIZE_BYTES

    def __post_init__(self) -> None:
        if not self.id:
            raise ValueError("variant id is required")
        if self.selectivity < 0:
            raise ValueError(f"[{self.id}] selectivity must be non-negative")
        if self.window_or_pattern_length is not None and self.window_or_pattern_length <= 0:
            raise ValueError(f"[{self.id}] window/pattern length must be positive")
        if self.out_event_size <= 0:
            raise ValueError(f"[{self.id}] out_event_size must be positive")
        if self.kind is QueryKind.AGGREGATE_BATCH:
            if not self.window_or_pattern_length:
                raise ValueError(f"[{self.id}] batch aggregate requires a window length")
            expected = 1.0 / self.window_or_pattern_length
            if abs(self.selectivity - expected) > 1e-12:
                raise ValueError(f"[{self.id}] batch aggregate selectivity must be 1/window")
        if self.kind is QueryKind.AGGREGATE_SLIDING and self.selectivity != 1.0:
            raise ValueError(f"[{self.id}] sliding aggregate selectivity must be 1.0")
        if self.kind is QueryKind.SOURCE and self.selectivity != 1.0:
            raise ValueError(f"[{self.id}] source selectivity must be 1.0")

    @property
    def is_source(self) -> bool:
        return self.kind is QueryKind.SOURCE

    def to_dict(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "kind": self.kind.value,
            "selectivity": self.selectivity,
            "length": self.window_or_pattern_length,
            "event_size_bytes": self.out_event_size,
        }

    @classmethod
    def from_mapping(cls, data: dict[str, Any]) -> "QueryVariant":
        kind = QueryKind(data["kind"])
        length = data.get("length")
        selectivity = data.get("selectivity")
        if selectivity is None:
            if kind is QueryKind.AGGREGATE_BATCH and length:
                selectivity = 1.0 / int(length)
            elif kind in (QueryKind.AGGREGATE_SLIDING, QueryKind.SOURCE):
                selectivity = 1.0
            else:
                raise ValueError(f"[{data.get('id')}] selectivity is required for {kind.value}")
        return cls(
            id=str(data["id"]),
            kind=kind,
            selectivity=float(selectivity),
            window_or_pattern_length=int(length) if length is not None else None,
            out_event_size=int(data.get("event_size_bytes", DEFAULT_EVENT_SIZE_BYTES)),
        )


SOURCE_VARIANT = QueryVariant(id=SOURCE_VARIANT_ID, kind=QueryKind.SOURCE, selectivity=1.0)
