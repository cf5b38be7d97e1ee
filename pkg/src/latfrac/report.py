"""Experiment records with byte-stable CSV output and a JSON mirror.

The CSV carries everything that is a function of (flags, seed) and nothing
else; wall time and version live only in the JSON.  Floats are written
with ``repr`` (shortest round-trip form), so reruns compare byte for byte.
"""

from __future__ import annotations

import io
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Sequence

import numpy as np

SCHEMA_VERSION = 1
INEQUALITY_SLACK = 1e-9


def package_version() -> str:
    try:
        from importlib.metadata import version

        return version("artifact")
    except Exception:
        return "0+unknown"


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    """Independent stream for one trial, derived from (master seed, trial index)."""
    return np.random.default_rng(np.random.SeedSequence([int(seed), int(trial)]))


def thread_count() -> int:
    raw = os.environ.get("LATFRAC_THREADS", "")
    try:
        cap = int(raw)
    except ValueError:
        cap = 0
    return max(1, cap) if raw else max(1, os.cpu_count() or 1)


def parallel_map(fn: Callable, items: Sequence) -> list:
    """``[fn(x) for x in items]`` on a thread pool; results stay in input order."""
    workers = min(thread_count(), max(1, len(items)))
    if workers == 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def passes(measured: float, bound: float) -> bool:
    return bool(measured <= bound * (1 + INEQUALITY_SLACK))


def loglog_slope(xs: Iterable[float], ys: Iterable[float]) -> float:
    """Least-squares slope of log y against log x; NaN with fewer than two usable points."""
    pairs = [(math.log(x), math.log(y)) for x, y in zip(xs, ys) if x > 0 and y > 0 and math.isfinite(y)]
    if len(pairs) < 2 or len({p[0] for p in pairs}) < 2:
        return math.nan
    lx, ly = zip(*pairs)
    return float(np.polyfit(lx, ly, 1)[0])


def _cell(v: Any) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return repr(v)
    if isinstance(v, (tuple, list)):
        return " ".join(_cell(x) for x in v)
    s = str(v)
    return '"' + s.replace('"', '""') + '"' if ("," in s or '"' in s) else s


def _jsonable(v: Any):
    if isinstance(v, (np.bool_,)):
        return bool(v)
    if isinstance(v, np.integer):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if math.isfinite(v) else repr(v)
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return v


@dataclass
class ExperimentReport:
    """One experiment run: parameter grid, per-case records and summary checks.

    Every record holds ``measured``, ``bound``, ``ratio`` and ``pass``; the
    ``checks`` are the acceptance assertions, and ``notes`` spell out the
    formulas and thresholds behind them.
    """

    experiment: str
    parameters: dict
    columns: list[str]
    rows: list[dict] = field(default_factory=list)
    summary: dict = field(default_factory=dict)
    checks: dict = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)
    seed: int | None = None
    wall_time: float = 0.0

    @property
    def passed(self) -> bool:
        return all(bool(v) for v in self.checks.values())

    def add(self, **record) -> None:
        missing = [c for c in self.columns if c not in record]
        if missing:
            raise KeyError(f"record for {self.experiment} lacks columns {missing}")
        self.rows.append(record)

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(f"# experiment: {self.experiment}\n")
        buf.write(f"# schema: {SCHEMA_VERSION}\n")
        buf.write(f"# seed: {_cell(self.seed)}\n")
        for key in sorted(self.parameters):
            buf.write(f"# param {key}: {_cell(self.parameters[key])}\n")
        for note in self.notes:
            buf.write(f"# note: {note}\n")
        for key in sorted(self.summary):
            buf.write(f"# summary {key}: {_cell(self.summary[key])}\n")
        for key in sorted(self.checks):
            buf.write(f"# check {key}: {'pass' if self.checks[key] else 'FAIL'}\n")
        buf.write(",".join(self.columns) + "\n")
        for row in self.rows:
            buf.write(",".join(_cell(row[c]) for c in self.columns) + "\n")
        return buf.getvalue()

    def to_json(self) -> dict:
        return _jsonable(
            {
                "experiment": self.experiment,
                "schema": SCHEMA_VERSION,
                "parameters": self.parameters,
                "columns": self.columns,
                "records": self.rows,
                "summary": self.summary,
                "checks": {k: bool(v) for k, v in self.checks.items()},
                "passed": self.passed,
                "notes": self.notes,
                "environment": {"seed": self.seed, "version": package_version()},
                "wall_time": self.wall_time,
            }
        )


class Timer:
    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.start
        return False
