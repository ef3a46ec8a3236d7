"""Residual reports: one row per check, serialized as CSV or JSON."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field

import numpy as np

SCHEMA = 1
PASS, FAIL, INFO = "pass", "fail", "info"
COLUMNS = ("check", "status", "max", "mean", "min", "worst_i", "worst_j", "worst_u", "worst_v", "tolerance", "note")


def fmt(x):
    """Text that round-trips: integers as is, floats by shortest repr, empty for ``None``."""
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return repr(float(x))


@dataclass
class CheckResult:
    name: str
    status: str
    max: float | None = None
    mean: float | None = None
    min: float | None = None
    worst: tuple | None = None
    tol: float | None = None
    note: str = ""

    @property
    def enabled(self):
        return self.status in (PASS, FAIL)

    @property
    def passed(self):
        return self.status != FAIL

    def row(self):
        i, j, u, v = self.worst if self.worst is not None else (None,) * 4
        return {
            "check": self.name,
            "status": self.status,
            "max": self.max,
            "mean": self.mean,
            "min": self.min,
            "worst_i": i,
            "worst_j": j,
            "worst_u": u,
            "worst_v": v,
            "tolerance": self.tol,
            "note": self.note,
        }


def _stats(values, grid):
    a = np.asarray(values, dtype=float)
    if a.size == 0:
        return None, None, None, None
    if np.any(np.isnan(a)):
        k = int(np.flatnonzero(np.isnan(a.ravel()))[0])
        mx = float("nan")
    else:
        k = int(np.argmax(a.ravel()))
        mx = float(a.ravel()[k])
    worst = None
    if grid is not None and a.ndim == 2:
        I, J, U, V = grid
        i, j = np.unravel_index(k, a.shape)
        worst = (int(I[i, j]), int(J[i, j]), float(U[i, j]), float(V[i, j]))
    return mx, float(np.mean(a)), float(np.min(a)), worst


def measured(name, values, tol, grid=None, note=""):
    """Check that ``max(values) <= tol``; NaN fails."""
    mx, mean, mn, worst = _stats(values, grid)
    ok = mx is not None and not np.isnan(mx) and mx <= tol
    return CheckResult(name, PASS if ok else FAIL, mx, mean, mn, worst, tol, note)


def info(name, values, grid=None, note=""):
    mx, mean, mn, worst = _stats(values, grid)
    return CheckResult(name, INFO, mx, mean, mn, worst, None, note)


def skipped(name, reason, tol=None):
    return CheckResult(name, f"skipped ({reason})", tol=tol)


@dataclass
class ResidualReport:
    command: str
    config: dict
    results: list = field(default_factory=list)
    flags: dict = field(default_factory=dict)

    def add(self, result):
        self.results.append(result)
        return result

    @property
    def passed(self):
        return all(r.passed for r in self.results)

    @property
    def failures(self):
        return [r for r in self.results if r.status == FAIL]

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(COLUMNS)
        for r in self.results:
            row = r.row()
            w.writerow([row[c] if c in ("check", "status", "note") else fmt(row[c]) for c in COLUMNS])
        return buf.getvalue()

    def to_json(self):
        def clean(x):
            if isinstance(x, dict):
                return {k: clean(v) for k, v in x.items()}
            if isinstance(x, (list, tuple)):
                return [clean(v) for v in x]
            if isinstance(x, (bool, np.bool_)):
                return bool(x)
            if isinstance(x, (int, np.integer)):
                return int(x)
            if isinstance(x, (float, np.floating)):
                x = float(x)
                return x if np.isfinite(x) else fmt(x)
            return x

        doc = {
            "schema": SCHEMA,
            "command": self.command,
            "passed": self.passed,
            "config": self.config,
            "flags": self.flags,
            "checks": [r.row() for r in self.results],
        }
        return json.dumps(clean(doc), indent=2, sort_keys=False) + "\n"

    def render(self, format):
        return self.to_json() if format == "json" else self.to_csv()
