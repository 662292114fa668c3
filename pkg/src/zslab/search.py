"""Shared search plumbing: time budgets and resumable prefix checkpoints.

Long enumerations are split into top-level prefix units.  A checkpoint file
is JSON lines: a header with a config hash, then one record per completed
unit.  Resuming skips completed units and merges their stored results, so an
interrupted run finishes with exactly the same report as an uninterrupted
one.
"""

from __future__ import annotations

import hashlib
import json
import time
from pathlib import Path

__all__ = [
    "CheckpointError",
    "PrefixCheckpoint",
    "SearchBudgetExceeded",
    "Ticker",
    "config_hash",
]

CHECKPOINT_FORMAT = "zslab-checkpoint-v1"


class SearchBudgetExceeded(RuntimeError):
    """A search ran out of its time or unit budget.

    checkpoint_path, when set, points at a resumable record of the completed
    work units.
    """

    def __init__(self, message: str, checkpoint_path: str | None = None):
        super().__init__(message)
        self.checkpoint_path = checkpoint_path


class CheckpointError(ValueError):
    """Checkpoint file is corrupt or belongs to a different configuration."""


class Ticker:
    """Cheap deadline guard for inner search loops."""

    __slots__ = ("deadline", "what", "count", "stride")

    def __init__(self, budget_seconds: float | None, what: str = "search", stride: int = 4096):
        self.deadline = None if budget_seconds is None else time.monotonic() + budget_seconds
        self.what = what
        self.count = 0
        self.stride = stride

    def tick(self) -> None:
        if self.deadline is None:
            return
        self.count += 1
        if self.count % self.stride == 0 and time.monotonic() > self.deadline:
            raise SearchBudgetExceeded(f"time budget exhausted during {self.what}")


def config_hash(config: dict) -> str:
    """Stable hash of the parameters that define a search."""
    payload = json.dumps(config, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(payload.encode()).hexdigest()[:16]


class PrefixCheckpoint:
    """Append-only JSONL log of completed top-level search prefixes."""

    def __init__(self, path: str | Path, config: dict):
        self.path = Path(path)
        self.hash = config_hash(config)
        self.records: dict[tuple, dict] = {}
        if self.path.exists() and self.path.stat().st_size > 0:
            self._load()
        else:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            with self.path.open("w") as fh:
                fh.write(json.dumps({"format": CHECKPOINT_FORMAT, "config_hash": self.hash}) + "\n")

    def _load(self) -> None:
        with self.path.open() as fh:
            lines = fh.read().splitlines()
        header = None
        for lineno, line in enumerate(lines, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CheckpointError(f"{self.path}: line {lineno}: invalid JSON") from exc
            if header is None:
                if obj.get("format") != CHECKPOINT_FORMAT:
                    raise CheckpointError(f"{self.path}: line {lineno}: not a checkpoint header")
                if obj.get("config_hash") != self.hash:
                    raise CheckpointError(
                        f"{self.path}: config hash mismatch "
                        f"(file {obj.get('config_hash')}, run {self.hash})"
                    )
                header = obj
                continue
            if "prefix" not in obj:
                raise CheckpointError(f"{self.path}: line {lineno}: record without prefix")
            self.records[tuple(obj["prefix"])] = obj
        if header is None:
            raise CheckpointError(f"{self.path}: missing header line")

    def completed(self) -> set[tuple]:
        return set(self.records)

    def append(self, record: dict) -> None:
        key = tuple(record["prefix"])
        if key in self.records:
            return
        self.records[key] = record
        with self.path.open("a") as fh:
            fh.write(json.dumps(record) + "\n")
