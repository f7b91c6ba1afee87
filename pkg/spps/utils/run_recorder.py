"""Records per-stage metrics, timing, and failures for a solver run."""

import json
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from spps.utils.logging_utils import get_logger

_logger = get_logger(__name__)


@dataclass
class StageRecord:
    """Record for a single run stage."""

    name: str
    start_time: float = 0.0
    end_time: float = 0.0
    duration_ms: float = 0.0
    metrics: dict[str, Any] = field(default_factory=dict)


@dataclass
class EventRecord:
    """Record for a notable event (shift performed, root discarded, ...)."""

    name: str
    data: dict[str, Any] = field(default_factory=dict)


@dataclass
class FailureRecord:
    """Record for a stage failure."""

    stage: str
    error: str
    code: str = ""
    context: dict[str, Any] = field(default_factory=dict)


class RunRecorder:
    """Collects stage timings and diagnostics for one command invocation."""

    def __init__(self, name: str):
        self.name = name
        self._stages: dict[str, StageRecord] = {}
        self._events: list[EventRecord] = []
        self._failures: list[FailureRecord] = []
        self._run_start = time.monotonic()

    def start_stage(self, name: str) -> None:
        """Mark the beginning of a stage."""
        self._stages[name] = StageRecord(name=name, start_time=time.monotonic())

    def end_stage(self, name: str, metrics: dict[str, Any] | None = None) -> None:
        """Mark the end of a stage with collected metrics."""
        record = self._stages.get(name)
        if record is None:
            _logger.warning(
                f"end_stage('{name}') called without matching start_stage(); "
                "using the current time as start"
            )
            record = StageRecord(name=name, start_time=time.monotonic())
            self._stages[name] = record
        record.end_time = time.monotonic()
        record.duration_ms = (record.end_time - record.start_time) * 1000
        record.metrics = metrics or {}

    def record_event(self, name: str, data: dict[str, Any] | None = None) -> None:
        """Record a notable event."""
        self._events.append(EventRecord(name=name, data=data or {}))

    def record_failure(
        self, stage: str, error: Exception | str, context: dict[str, Any] | None = None
    ) -> None:
        """Record a failure; SPPS errors contribute their code."""
        self._failures.append(
            FailureRecord(
                stage=stage,
                error=str(error),
                code=getattr(error, "code", ""),
                context=context or {},
            )
        )

    @property
    def failed(self) -> bool:
        return bool(self._failures)

    def get_report(self) -> dict[str, Any]:
        """Generate the full report as a dictionary."""
        total_ms = (time.monotonic() - self._run_start) * 1000
        return {
            "name": self.name,
            "total_duration_ms": total_ms,
            "stages": {
                name: {"duration_ms": rec.duration_ms, "metrics": rec.metrics}
                for name, rec in self._stages.items()
            },
            "events": [{"name": e.name, "data": e.data} for e in self._events],
            "failures": [
                {"stage": f.stage, "error": f.error, "code": f.code, "context": f.context}
                for f in self._failures
            ],
            "summary": {
                "total_failures": len(self._failures),
                "total_events": len(self._events),
                "stages_completed": len(self._stages),
            },
        }

    def save(self, output_path: Path) -> None:
        """Write the report as JSON to disk."""
        output_path = Path(output_path)
        output_path.parent.mkdir(parents=True, exist_ok=True)
        output_path.write_text(json.dumps(self.get_report(), indent=2, default=str))
