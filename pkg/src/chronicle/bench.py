"""Interactive-latency and memory budget checks.

Each probed level is timed as the mean of repeated aggregate queries at a
representative (largest) node. The borough budget and the memory factor
are hard gates; region and block budgets are advisory targets reported as
warnings, since absolute numbers shift with host hardware.
"""

from __future__ import annotations

import os
import tempfile
import time
from dataclasses import dataclass, field

from .query import Engine

__all__ = ["BUDGETS_MS", "HARD_LEVELS", "MEMORY_FACTOR_BUDGET", "BenchReport", "run_bench"]

BUDGETS_MS = {"borough": 500.0, "region": 100.0, "block": 50.0}
HARD_LEVELS = ("borough",)
MEMORY_FACTOR_BUDGET = 4.0


@dataclass
class LevelTiming:
    level: str
    path: list[str]
    mean_ms: float
    trials: list[float]
    budget_ms: float
    hard: bool

    @property
    def within_budget(self) -> bool:
        return self.mean_ms <= self.budget_ms


@dataclass
class BenchReport:
    timings: list[LevelTiming] = field(default_factory=list)
    accounted_bytes: int = 0
    snapshot_bytes: int = 0
    memory_factor: float = 0.0
    oracle_checked: bool = False
    oracle_agreed: bool = True

    @property
    def violations(self) -> list[str]:
        out = []
        for t in self.timings:
            if t.hard and not t.within_budget:
                out.append(
                    f"{t.level} aggregate {t.mean_ms:.1f} ms exceeds {t.budget_ms:.0f} ms"
                )
        if self.memory_factor > MEMORY_FACTOR_BUDGET:
            out.append(
                f"memory factor {self.memory_factor:.2f} exceeds {MEMORY_FACTOR_BUDGET}"
            )
        if self.oracle_checked and not self.oracle_agreed:
            out.append("bench aggregates disagree with the naive oracle")
        return out

    @property
    def warnings(self) -> list[str]:
        return [
            f"{t.level} aggregate {t.mean_ms:.1f} ms above target {t.budget_ms:.0f} ms"
            for t in self.timings
            if not t.hard and not t.within_budget
        ]

    def to_json(self) -> dict:
        return {
            "timings": [
                {
                    "level": t.level,
                    "path": t.path,
                    "mean_ms": t.mean_ms,
                    "trials_ms": t.trials,
                    "budget_ms": t.budget_ms,
                    "hard": t.hard,
                    "within_budget": t.within_budget,
                }
                for t in self.timings
            ],
            "memory": {
                "accounted_bytes": self.accounted_bytes,
                "snapshot_bytes": self.snapshot_bytes,
                "factor": self.memory_factor,
                "budget": MEMORY_FACTOR_BUDGET,
            },
            "oracle": {"checked": self.oracle_checked, "agreed": self.oracle_agreed},
            "violations": self.violations,
            "warnings": self.warnings,
        }


def _largest_child(engine: Engine, tree, node, r: int):
    children = tree.children_of(node)
    if not children:
        return None
    return max(children, key=lambda c: (len(tree.members(c, r)), c.name))


def _probe_paths(engine: Engine) -> list[tuple[str, list[str]]]:
    """Largest borough, its largest region, that region's largest block."""
    tree = engine.tree()
    r = len(engine.releases) - 1
    out = []
    node = tree.root
    for level in ("borough", "region", "block"):
        node = _largest_child(engine, tree, node, r)
        if node is None:
            break
        out.append((level, list(node.path)))
    return out


def run_bench(
    engine: Engine,
    *,
    trials: int = 10,
    attribute: str = "ASSESSTOTAL",
    fn: str = "sum",
    oracle=None,
) -> BenchReport:
    """Time representative aggregates and account memory against a snapshot."""
    report = BenchReport()
    release = str(engine.releases[-1])

    for level, path in _probe_paths(engine):
        engine.aggregate(path, attribute, fn, release)   # warm: tree + caches
        samples = []
        for _ in range(trials):
            t0 = time.perf_counter()
            value = engine.aggregate(path, attribute, fn, release)
            samples.append((time.perf_counter() - t0) * 1000.0)
        report.timings.append(
            LevelTiming(
                level=level,
                path=path,
                mean_ms=sum(samples) / len(samples),
                trials=samples,
                budget_ms=BUDGETS_MS[level],
                hard=level in HARD_LEVELS,
            )
        )
        if oracle is not None:
            report.oracle_checked = True
            expected = oracle.aggregate(path, attribute, fn, release)
            if expected is None or value is None:
                agreed = expected is None and value is None
            else:
                scale = max(abs(expected), 1.0)
                agreed = abs(value - expected) <= 1e-9 * scale
            report.oracle_agreed = report.oracle_agreed and agreed

    report.accounted_bytes = engine.tree().memory_report()["total_bytes"]
    from .snapshot import save_snapshot

    fd, tmp = tempfile.mkstemp(suffix=".snap")
    os.close(fd)
    try:
        report.snapshot_bytes = save_snapshot(tmp, engine)
    finally:
        os.unlink(tmp)
    if report.snapshot_bytes:
        report.memory_factor = report.accounted_bytes / report.snapshot_bytes
    return report
