"""Budget checks: probe-path selection, gate evaluation, oracle hook."""

import pytest

from chronicle import bench
from chronicle.bench import BUDGETS_MS, MEMORY_FACTOR_BUDGET, run_bench


@pytest.fixture(scope="module")
def report(micro):
    return run_bench(micro.engine, trials=3)


class TestProbePaths:
    def test_levels_in_order(self, report):
        assert [t.level for t in report.timings] == ["borough", "region", "block"]

    def test_largest_nodes_picked(self, report):
        by_level = {t.level: t.path for t in report.timings}
        assert by_level["borough"] == ["city", "borough-1"]
        # east holds three lots at the last release, west two
        assert by_level["region"] == ["city", "borough-1", "east"]
        assert by_level["block"] == ["city", "borough-1", "east", "00020"]


class TestGates:
    def test_trial_counts(self, report):
        assert all(len(t.trials) == 3 for t in report.timings)
        for t in report.timings:
            assert t.mean_ms == pytest.approx(sum(t.trials) / 3)

    def test_budgets_and_hardness(self, report):
        for t in report.timings:
            assert t.budget_ms == BUDGETS_MS[t.level]
            assert t.hard == (t.level == "borough")

    def test_micro_corpus_is_within_every_budget(self, report):
        assert all(t.within_budget for t in report.timings)
        assert report.violations == []
        assert report.warnings == []

    def test_memory_factor(self, report):
        assert report.snapshot_bytes > 0
        assert report.accounted_bytes > 0
        assert report.memory_factor == pytest.approx(
            report.accounted_bytes / report.snapshot_bytes)
        assert report.memory_factor <= MEMORY_FACTOR_BUDGET

    def test_hard_violation_listed(self, micro, monkeypatch):
        monkeypatch.setitem(bench.BUDGETS_MS, "borough", -1.0)
        hot = run_bench(micro.engine, trials=1)
        assert any("borough" in v for v in hot.violations)

    def test_soft_miss_is_a_warning_not_a_violation(self, micro, monkeypatch):
        monkeypatch.setitem(bench.BUDGETS_MS, "block", -1.0)
        hot = run_bench(micro.engine, trials=1)
        assert hot.violations == []
        assert any("block" in w for w in hot.warnings)


class TestOracleHook:
    def test_agreement(self, micro):
        checked = run_bench(micro.engine, trials=1, oracle=micro.oracle)
        assert checked.oracle_checked is True
        assert checked.oracle_agreed is True
        assert checked.violations == []

    def test_disagreement_is_a_violation(self, micro):
        class WrongOracle:
            def aggregate(self, *args, **kwargs):
                return 1e12

        checked = run_bench(micro.engine, trials=1, oracle=WrongOracle())
        assert checked.oracle_checked is True
        assert checked.oracle_agreed is False
        assert any("oracle" in v for v in checked.violations)


class TestReportJson:
    def test_shape(self, report):
        doc = report.to_json()
        assert set(doc) == {"timings", "memory", "oracle", "violations", "warnings"}
        assert {t["level"] for t in doc["timings"]} == {"borough", "region", "block"}
        for t in doc["timings"]:
            assert set(t) == {"level", "path", "mean_ms", "trials_ms",
                              "budget_ms", "hard", "within_budget"}
        assert doc["memory"]["budget"] == MEMORY_FACTOR_BUDGET
        assert doc["oracle"] == {"checked": False, "agreed": True}
