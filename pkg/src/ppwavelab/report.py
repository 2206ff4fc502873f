"""Machine-readable run reports.

A report is a list of named checks, each carrying its worst residual and
its tolerance; pass/fail is derived, never stored, so the two cannot
drift apart. Boolean facts ride along as residual 0/1 against tolerance
0. Serialization sorts keys and converts numpy scalars and arrays, and
it keeps wall time out of the document unless explicitly requested:
reports must come out byte-identical for a fixed config and seed, and
wall time is the one field that never is.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "Check",
    "RunReport",
    "bool_check",
    "jsonable",
    "write_csv",
]


@dataclass(frozen=True, eq=False)
class Check:
    name: str
    max_residual: float
    tolerance: float

    @property
    def status(self) -> str:
        return "pass" if self.max_residual <= self.tolerance else "fail"

    def row(self) -> list:
        return [self.name, self.status, repr(float(self.max_residual)),
                repr(float(self.tolerance))]


def bool_check(name: str, ok) -> Check:
    return Check(name, 0.0 if ok else 1.0, 0.0)


def jsonable(value):
    """Recursively strip numpy types so json.dumps output is canonical."""
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [jsonable(v) for v in value.tolist()]
    if isinstance(value, (np.floating,)):
        return float(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.bool_,)):
        return bool(value)
    return value


@dataclass(eq=False)
class RunReport:
    """One CLI run: identity, the checks, and command-specific numbers."""

    command: str
    fingerprint: str
    seed: int
    checks: list = field(default_factory=list)
    payload: dict = field(default_factory=dict)
    wall_time: float | None = None

    def add(self, name: str, max_residual, tolerance) -> Check:
        check = Check(name, float(max_residual), float(tolerance))
        self.checks.append(check)
        return check

    def add_bool(self, name: str, ok) -> Check:
        check = bool_check(name, bool(ok))
        self.checks.append(check)
        return check

    @property
    def passed(self) -> bool:
        return all(c.status == "pass" for c in self.checks)

    def to_mapping(self, timing: bool = False) -> dict:
        doc = {
            "command": self.command,
            "fingerprint": self.fingerprint,
            "seed": int(self.seed),
            "passed": self.passed,
            "checks": [{"name": c.name, "status": c.status,
                        "max_residual": float(c.max_residual),
                        "tolerance": float(c.tolerance)} for c in self.checks],
            "payload": jsonable(self.payload),
        }
        if timing and self.wall_time is not None:
            doc["wall_time_s"] = float(self.wall_time)
        return doc

    def to_json(self, timing: bool = False) -> str:
        return json.dumps(self.to_mapping(timing), sort_keys=True, indent=2) + "\n"

    def table(self) -> tuple[list, list]:
        header = ["name", "status", "max_residual", "tolerance"]
        return header, [c.row() for c in self.checks]


def write_csv(path, header: list, rows: list):
    """One table per file, header row included, RFC 4180 quoting."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)
