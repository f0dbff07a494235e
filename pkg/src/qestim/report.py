"""Run reports: named results plus pass/fail checks, written as JSON or CSV."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from datetime import datetime, timezone

import numpy as np

from . import __version__


@dataclass
class Check:
    name: str
    passed: bool
    observed: float
    tolerance: float
    relation: str = "<="


def check_at_most(name: str, observed: float, tolerance: float) -> Check:
    return Check(name, bool(observed <= tolerance), float(observed), float(tolerance), "<=")


def check_at_least(name: str, observed: float, tolerance: float) -> Check:
    return Check(name, bool(observed >= tolerance), float(observed), float(tolerance), ">=")


@dataclass
class RunReport:
    command: str
    seed: int
    config: dict
    results: dict = field(default_factory=dict)
    checks: list[Check] = field(default_factory=list)
    version: str = __version__

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def exit_code(self) -> int:
        return 0 if self.passed else 1

    def add(self, check: Check) -> Check:
        self.checks.append(check)
        return check

    def as_dict(self, timestamp: bool = True) -> dict:
        out = {
            "version": self.version,
            "command": self.command,
            "seed": self.seed,
            "config": self.config,
            "results": self.results,
            "checks": [vars(c) for c in self.checks],
            "passed": self.passed,
        }
        if timestamp:
            out["timestamp"] = datetime.now(timezone.utc).isoformat(timespec="seconds")
        return out

    def to_json(self, timestamp: bool = True) -> str:
        return dumps(self.as_dict(timestamp)) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["section", "name", "value", "tolerance", "passed"])
        for name, value in _flatten(self.results):
            writer.writerow(["result", name, _number(value), "", ""])
        for c in self.checks:
            writer.writerow(["check", c.name, _number(c.observed), f"{c.relation} {_number(c.tolerance)}",
                             "true" if c.passed else "false"])
        return buf.getvalue()


def _flatten(obj, prefix: str = ""):
    if isinstance(obj, dict):
        for k, v in obj.items():
            yield from _flatten(v, f"{prefix}.{k}" if prefix else str(k))
    elif isinstance(obj, (list, tuple, np.ndarray)):
        for i, v in enumerate(obj):
            yield from _flatten(v, f"{prefix}[{i}]")
    else:
        yield prefix, obj


def _number(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if not math.isfinite(value):
            return "null"
        return format(value, ".17g")
    if value is None:
        return "null"
    return str(value)


def dumps(obj, indent: int = 2, _level: int = 0) -> str:
    """JSON with every float written to 17 significant digits."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{_string(str(k))}: {dumps(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        if len(obj) == 0:
            return "[]"
        items = [f"{pad}{dumps(v, indent, _level + 1)}" for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    if isinstance(obj, str):
        return _string(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return dumps({"re": obj.real, "im": obj.imag}, indent, _level)
    return _number(obj)


def _string(s: str) -> str:
    return json.dumps(s, ensure_ascii=False)
