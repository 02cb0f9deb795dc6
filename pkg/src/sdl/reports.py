"""Machine-readable run records with reproducibility hashes.

Every CLI command emits a ReportRecord: the full input echo, the computed
values with their budgets/tolerances, PASS/FAIL verdicts, the library
version, and a sha256 hash of the canonical (command, config) JSON. The
record splits into a *stable core* — bit-reproducible from (config, seed),
the part regeneration checks compare — and volatile metadata (wall clock),
which lives outside the core so that re-runs of a deterministic command
produce byte-identical primary outputs.

Records append to JSON-lines files: one canonical-JSON object per line,
never rewritten.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass

from .errors import FormatError, InvalidConfig

__all__ = [
    "STAT_POLICY",
    "canonical_json",
    "config_hash",
    "ReportRecord",
    "make_record",
    "append_record",
    "load_records",
]

# Single global statistical policy, stated in every report (no per-test
# threshold tuning): inequalities at 3 standard errors, budgets at 99%.
STAT_POLICY = "3 standard errors / 99% confidence budgets"


def canonical_json(obj) -> str:
    """Deterministic JSON: sorted keys, no whitespace, shortest-float repr."""
    try:
        return json.dumps(
            obj, sort_keys=True, separators=(",", ":"), allow_nan=False
        )
    except ValueError as exc:
        raise InvalidConfig(f"non-finite value in report payload: {exc}") from exc


def config_hash(command: str, config: dict) -> str:
    """sha256 of the canonical (command, config) JSON."""
    payload = canonical_json({"command": command, "config": config})
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


@dataclass
class ReportRecord:
    """One run: inputs, outputs, verdicts, and the reproducibility hash."""

    command: str
    config: dict
    results: dict
    verdicts: dict
    version: str
    config_hash: str
    policy: str = STAT_POLICY
    wall_clock_s: float | None = None

    @property
    def passed(self) -> bool:
        return all(self.verdicts.values())

    def stable_core(self) -> dict:
        """The reproducible part: everything except wall clock."""
        return {
            "command": self.command,
            "config": self.config,
            "results": self.results,
            "verdicts": self.verdicts,
            "version": self.version,
            "config_hash": self.config_hash,
            "policy": self.policy,
        }

    def to_json_line(self) -> str:
        record = self.stable_core()
        if self.wall_clock_s is not None:
            record["wall_clock_s"] = self.wall_clock_s
        return canonical_json(record)


def make_record(
    command: str,
    config: dict,
    results: dict,
    verdicts: dict | None = None,
    wall_clock_s: float | None = None,
) -> ReportRecord:
    from . import __version__

    return ReportRecord(
        command=command,
        config=config,
        results=results,
        verdicts=dict(verdicts or {}),
        version=__version__,
        config_hash=config_hash(command, config),
        wall_clock_s=wall_clock_s,
    )


def append_record(record: ReportRecord, path) -> None:
    """Append one record to a JSON-lines report file."""
    with open(path, "a", encoding="utf-8") as fh:
        fh.write(record.to_json_line() + "\n")


def load_records(path) -> list:
    """Read a JSON-lines report file back into ReportRecord objects."""
    records = []
    try:
        with open(path, "r", encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, 1):
                line = line.strip()
                if not line:
                    continue
                try:
                    obj = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise FormatError(f"{path}:{lineno}: bad JSON ({exc})") from exc
                if not isinstance(obj, dict) or "command" not in obj:
                    raise FormatError(f"{path}:{lineno}: not a report record")
                records.append(
                    ReportRecord(
                        command=obj.get("command", ""),
                        config=obj.get("config", {}),
                        results=obj.get("results", {}),
                        verdicts=obj.get("verdicts", {}),
                        version=obj.get("version", ""),
                        config_hash=obj.get("config_hash", ""),
                        policy=obj.get("policy", STAT_POLICY),
                        wall_clock_s=obj.get("wall_clock_s"),
                    )
                )
    except OSError as exc:
        raise InvalidConfig(f"cannot read report file {path}: {exc}") from exc
    return records
