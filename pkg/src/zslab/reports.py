"""Report envelope: stable key order, schema validation, timing scrub.

Every CLI run emits one JSON object with keys in the fixed order
tool, version, command, claim, config, result, timing.  Identical
configurations produce byte-identical reports once the timing fields
(top-level "timing" and any nested "wall_time_seconds"/"wall_seconds")
are scrubbed.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources

import jsonschema

__all__ = [
    "RunConfig",
    "build_report",
    "render_report",
    "report_schema",
    "strip_timing",
    "validate_report",
]

TOOL_NAME = "zslab"
TOOL_VERSION = "0.1.0"

_TIMING_KEYS = {"wall_seconds", "wall_time_seconds"}


@dataclass
class RunConfig:
    """Echo of everything that determines a run's payload."""

    command: str
    params: dict = field(default_factory=dict)
    seed: int = 0
    workers: int = 1
    budget_seconds: float | None = None
    checkpoint: str | None = None
    output: str | None = None

    def to_json(self) -> dict:
        return {
            "command": self.command,
            "params": self.params,
            "seed": self.seed,
            "workers": self.workers,
            "budget_seconds": self.budget_seconds,
            "checkpoint": self.checkpoint,
            "output": self.output,
        }


def report_schema() -> dict:
    text = resources.files("zslab").joinpath("report_schema.json").read_text()
    return json.loads(text)


def build_report(config: RunConfig, claim: str | None, result: dict, wall_seconds: float) -> dict:
    report = {
        "tool": TOOL_NAME,
        "version": TOOL_VERSION,
        "command": config.command,
        "claim": claim,
        "config": config.to_json(),
        "result": result,
        "timing": {"wall_seconds": round(wall_seconds, 6)},
    }
    validate_report(report)
    return report


def validate_report(report: dict) -> None:
    jsonschema.validate(report, report_schema())


def render_report(report: dict) -> str:
    """Serialize with insertion order preserved (the documented key order)."""
    return json.dumps(report, indent=2) + "\n"


def strip_timing(obj):
    """Copy with all timing fields removed, for byte-level determinism checks."""
    if isinstance(obj, dict):
        return {k: strip_timing(v) for k, v in obj.items() if k not in _TIMING_KEYS}
    if isinstance(obj, list):
        return [strip_timing(v) for v in obj]
    return obj
