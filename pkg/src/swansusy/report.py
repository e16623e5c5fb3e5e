"""Check results, verification reports and their deterministic serialization.

JSON output writes every float with 17 significant digits and keeps the key
order of the in-memory structures, so two runs of the same configuration on
the same build produce byte-identical files. CSV output uses the shortest
round-trip representation of each float.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Any, Optional

import numpy as np

SCHEMA_VERSION = 1


@dataclass
class CheckResult:
    """One verified identity: its residual against a tolerance."""

    name: str
    residual: float
    tolerance: float
    z: Optional[float] = None
    detail: dict = field(default_factory=dict)
    wall_time: Optional[float] = None
    status: Optional[str] = None

    def __post_init__(self):
        self.residual = float(self.residual)
        self.tolerance = float(self.tolerance)
        if self.status is None:
            ok = math.isfinite(self.residual) and self.residual <= self.tolerance
            self.status = "pass" if ok else "fail"

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    def as_dict(self, timing: bool = False) -> dict:
        out = {
            "name": self.name,
            "z": self.z,
            "residual": self.residual,
            "tolerance": self.tolerance,
            "pass": self.passed,
            "status": self.status,
        }
        if self.detail:
            out["detail"] = dict(self.detail)
        if timing:
            out["wall_time"] = self.wall_time
        return out


def all_passed(results) -> bool:
    return all(r.passed for r in results)


def relative_residual(lhs: np.ndarray, rhs: np.ndarray) -> float:
    """``|lhs - rhs|_F / max(|lhs|_F, |rhs|_F)``; zero when both vanish."""
    scale = max(float(np.linalg.norm(lhs)), float(np.linalg.norm(rhs)))
    diff = float(np.linalg.norm(lhs - rhs))
    if scale == 0.0:
        return diff
    return diff / scale


@dataclass
class VerificationReport:
    config: dict
    entries: list
    metadata: dict
    metric_undefined: list = field(default_factory=list)
    complete: bool = True
    timing: bool = False

    @property
    def pass_count(self) -> int:
        return sum(1 for e in self.entries if e.status == "pass")

    @property
    def fail_count(self) -> int:
        return sum(1 for e in self.entries if e.status == "fail")

    @property
    def undefined_count(self) -> int:
        return sum(1 for e in self.entries if e.status == "metric_undefined")

    @property
    def ok(self) -> bool:
        return self.complete and self.fail_count == 0

    def summary(self) -> dict:
        return {
            "entries": len(self.entries),
            "pass": self.pass_count,
            "fail": self.fail_count,
            "metric_undefined": self.undefined_count,
            "complete": self.complete,
        }

    def as_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "kind": "verify",
            "metadata": self.metadata,
            "config": self.config,
            "summary": self.summary(),
            "metric_undefined_z": list(self.metric_undefined),
            "entries": [e.as_dict(self.timing) for e in self.entries],
        }

    def rows(self) -> list:
        cols = ["name", "z", "residual", "tolerance", "pass", "status"]
        if self.timing:
            cols.append("wall_time")
        out = [cols]
        for e in self.entries:
            d = e.as_dict(self.timing)
            out.append([d[c] for c in cols])
        return out


@dataclass
class TableReport:
    """Row-oriented output of the ``spectrum`` and ``sweep`` commands."""

    kind: str
    config: dict
    metadata: dict
    columns: list
    records: list
    complete: bool = True

    def as_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "kind": self.kind,
            "metadata": self.metadata,
            "config": self.config,
            "complete": self.complete,
            "columns": list(self.columns),
            "rows": [dict(r) for r in self.records],
        }

    def rows(self) -> list:
        return [list(self.columns)] + [[r.get(c) for c in self.columns] for r in self.records]


# -- serialization --------------------------------------------------------------

def _format_float(x: float) -> str:
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    return format(x, ".17g")


def dumps_json(obj: Any, indent: int = 2, _level: int = 0) -> str:
    """JSON text with 17-significant-digit floats and stable key order."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _format_float(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps_json(v, indent, _level + 1)}"
                 for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [pad + dumps_json(v, indent, _level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _csv_cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def dumps_csv(rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    for row in rows:
        writer.writerow([_csv_cell(v) for v in row])
    return buf.getvalue()
