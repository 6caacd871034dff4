"""Query engine: aggregates, filters, matrices, series, histograms.

Most tests run against the five-lot micro corpus (see helpers.py for the
full table); every expected number can be computed by hand. Engine
results are cross-checked against the naive full-scan oracle, which
shares no code with the indexed path.
"""

import pytest
from hypothesis import given, strategies as st

from chronicle.index import PathNotFound
from chronicle.model import ReleaseId
from chronicle.query import (
    FilterError,
    FilterExpression,
    InvalidRelease,
    QueryError,
    QueryTypeError,
    UnknownAttribute,
)

from .helpers import MICRO_RELEASES as RELEASES


@pytest.fixture(scope="module")
def mq(micro):
    return micro


def fx(data):
    return FilterExpression.from_json(data)


CITY = ["city"]
BOROUGH = ["city", "borough-1"]
WEST_PATH = BOROUGH + ["west"]
EAST_PATH = BOROUGH + ["east"]


class TestAggregate:
    def test_sum_and_avg(self, mq):
        assert mq.engine.aggregate(CITY, "LOTAREA", "sum", "2004.1") == 600.0
        assert mq.engine.aggregate(CITY, "LOTAREA", "avg", "2004.1") == 200.0

    def test_min_max(self, mq):
        assert mq.engine.aggregate(CITY, "LOTAREA", "min", "2004.1") == 100.0
        assert mq.engine.aggregate(CITY, "LOTAREA", "max", "2004.1") == 300.0

    def test_count_of_lots(self, mq):
        assert mq.engine.aggregate(CITY, None, "count", "2004.1") == 4
        assert mq.engine.aggregate(CITY, None, "count", "2004.2") == 5

    def test_count_of_valid_values(self, mq):
        # D has no LOTAREA; count skips the invalid slot
        assert mq.engine.aggregate(CITY, "LOTAREA", "count", "2004.1") == 3
        assert mq.engine.aggregate(CITY, "LANDUSE", "count", "2004.1") == 4

    def test_aggregate_at_every_level(self, mq):
        assert mq.engine.aggregate(WEST_PATH, "LOTAREA", "sum", "2004.1") == 300.0
        assert mq.engine.aggregate(
            WEST_PATH + ["00010"], "LOTAREA", "sum", "2004.1") == 300.0
        assert mq.engine.aggregate(
            WEST_PATH + ["00010", "1000100002"], "LOTAREA", "sum", "2004.1") == 200.0

    def test_empty_members(self, mq):
        # lot E does not exist in the first release
        path = EAST_PATH + ["00020", "1000200003"]
        assert mq.engine.aggregate(path, None, "count", "2004.1") == 0
        assert mq.engine.aggregate(path, "LOTAREA", "sum", "2004.1") is None

    def test_valid_members_without_valid_values(self, mq):
        # D exists but has no LOTAREA: count 0, extrema undefined
        path = EAST_PATH + ["00020", "1000200002"]
        assert mq.engine.aggregate(path, "LOTAREA", "count", "2004.1") == 0
        assert mq.engine.aggregate(path, "LOTAREA", "min", "2004.1") is None

    def test_release_accepts_ids_and_strings(self, mq):
        a = mq.engine.aggregate(CITY, "LOTAREA", "sum", "2004.1")
        b = mq.engine.aggregate(CITY, "LOTAREA", "sum", ReleaseId(2004, 1))
        assert a == b

    def test_matches_oracle(self, mq):
        for path in (CITY, BOROUGH, WEST_PATH, EAST_PATH, EAST_PATH + ["00020"]):
            for attribute, fn in (
                (None, "count"), ("LOTAREA", "sum"), ("LOTAREA", "avg"),
                ("ASSESSLAND", "min"), ("ASSESSTOTAL", "max"), ("LANDUSE", "count"),
            ):
                for release in RELEASES:
                    got = mq.engine.aggregate(path, attribute, fn, release)
                    want = mq.oracle.aggregate(path, attribute, fn, release)
                    assert got == want, (path, attribute, fn, release)


class TestDerivedAttribute:
    def test_listed(self, mq):
        assert "NORMALIZED_ASSESSTOTAL" in mq.engine.attribute_names()

    def test_values(self, mq):
        # A: 1000/100 = 10, B: 4000/200 = 20; C no total, D no area -> None
        assert mq.engine.aggregate(
            CITY, "NORMALIZED_ASSESSTOTAL", "sum", "2004.1") == 30.0
        assert mq.engine.aggregate(
            CITY, "NORMALIZED_ASSESSTOTAL", "avg", "2004.1") == 15.0
        assert mq.engine.aggregate(
            CITY, "NORMALIZED_ASSESSTOTAL", "count", "2004.1") == 2

    def test_zero_area_is_invalid(self, mq):
        # E enters at r1 with LOTAREA 0; the ratio stays undefined
        assert mq.engine.aggregate(
            CITY, "NORMALIZED_ASSESSTOTAL", "count", "2004.2") == 2

    def test_matches_oracle(self, mq):
        for fn in ("sum", "avg", "count", "min", "max"):
            for release in RELEASES:
                got = mq.engine.aggregate(CITY, "NORMALIZED_ASSESSTOTAL", fn, release)
                want = mq.oracle.aggregate(CITY, "NORMALIZED_ASSESSTOTAL", fn, release)
                assert got == want, (fn, release)


class TestErrors:
    def test_unknown_attribute(self, mq):
        with pytest.raises(UnknownAttribute):
            mq.engine.aggregate(CITY, "NOPE", "sum", "2004.1")

    def test_numeric_fn_on_categorical(self, mq):
        with pytest.raises(QueryTypeError):
            mq.engine.aggregate(CITY, "LANDUSE", "sum", "2004.1")

    def test_numeric_fn_without_attribute(self, mq):
        with pytest.raises(QueryTypeError):
            mq.engine.aggregate(CITY, None, "sum", "2004.1")

    def test_unknown_fn(self, mq):
        with pytest.raises(QueryError):
            mq.engine.aggregate(CITY, "LOTAREA", "median", "2004.1")

    def test_malformed_release(self, mq):
        with pytest.raises(InvalidRelease):
            mq.engine.aggregate(CITY, "LOTAREA", "sum", "20O4.1")

    def test_release_outside_timeline(self, mq):
        with pytest.raises(InvalidRelease):
            mq.engine.aggregate(CITY, "LOTAREA", "sum", "1999.1")

    def test_unknown_path_segment(self, mq):
        with pytest.raises(PathNotFound) as err:
            mq.engine.aggregate(BOROUGH + ["nowhere"], None, "count", "2004.1")
        assert err.value.segment == "nowhere"
        assert err.value.depth == 3

    def test_unknown_region_kind(self, mq):
        with pytest.raises(QueryError):
            mq.engine.aggregate(CITY, None, "count", "2004.1", region_kind="postal")

    def test_unknown_snapshot(self, mq):
        with pytest.raises(QueryError):
            mq.engine.aggregate(CITY, None, "count", "2004.1", snapshot_id="ghost")


class TestFilterValidation:
    def test_shape_errors(self):
        for bad in (
            "not a dict",
            {},
            {"op": "and", "children": []},
            {"op": "not", "children": [{"op": "invalid", "attr": "X"},
                                       {"op": "invalid", "attr": "X"}]},
            {"op": "="},
            {"op": "between", "attr": "X", "value": 1},
        ):
            with pytest.raises(FilterError):
                fx(bad)

    def test_unknown_attribute(self, mq):
        with pytest.raises(UnknownAttribute):
            fx({"op": "=", "attr": "NOPE", "value": 1}).validate(mq.engine)

    def test_ordered_op_on_categorical(self, mq):
        with pytest.raises(QueryTypeError):
            fx({"op": "<", "attr": "LANDUSE", "value": "m"}).validate(mq.engine)
        with pytest.raises(QueryTypeError):
            fx({"op": "range", "attr": "LANDUSE", "value": [0, 1]}).validate(mq.engine)

    def test_operand_type_errors(self, mq):
        for bad in (
            {"op": "=", "attr": "LOTAREA", "value": "big"},
            {"op": "=", "attr": "LOTAREA", "value": True},
            {"op": "=", "attr": "LANDUSE", "value": 3},
            {"op": "range", "attr": "LOTAREA", "value": [100]},
            {"op": "range", "attr": "LOTAREA", "value": [200, 100]},
            {"op": "in", "attr": "LOTAREA", "value": []},
            {"op": "in", "attr": "LANDUSE", "value": ["vacant", 9]},
        ):
            with pytest.raises(FilterError):
                fx(bad).validate(mq.engine)

    def test_json_round_trip(self):
        expr = fx({"op": "and", "children": [
            {"op": "=", "attr": "LANDUSE", "value": "vacant"},
            {"op": "not", "children": [{"op": "invalid", "attr": "LOTAREA"}]},
        ]})
        assert fx(expr.to_json()).to_json() == expr.to_json()


def city_count(engine, release, snapshot_id=None):
    return engine.aggregate(CITY, None, "count", release, snapshot_id=snapshot_id)


class TestFilteredSnapshots:
    def filtered_count(self, mq, expr_json, release):
        engine = mq.engine
        try:
            engine.apply_filter(fx(expr_json))
            return city_count(engine, release)
        finally:
            engine.clear_filter()

    def test_equality_filter(self, mq):
        vacant = {"op": "=", "attr": "LANDUSE", "value": "vacant"}
        assert self.filtered_count(mq, vacant, "2004.1") == 2   # A and D
        assert self.filtered_count(mq, vacant, "2004.2") == 2   # D and E

    def test_filter_evaluated_per_release(self, mq):
        engine = mq.engine
        try:
            sid = engine.apply_filter(fx({"op": "=", "attr": "LANDUSE",
                                          "value": "vacant"}))
            snap = engine.get_snapshot(sid)
            lot_a = engine.seq.bbl_index["1000100001"]
            # A is vacant only in the first release
            assert snap.exists[lot_a].tolist() == [True, False, False, False]
        finally:
            engine.clear_filter()

    def test_invalid_predicate(self, mq):
        missing_total = {"op": "invalid", "attr": "ASSESSTOTAL"}
        assert self.filtered_count(mq, missing_total, "2004.1") == 1   # C
        assert self.filtered_count(mq, missing_total, "2005.1") == 2   # B gap + C

    def test_not_is_a_pure_complement(self, mq):
        vacant = {"op": "=", "attr": "LANDUSE", "value": "vacant"}
        for release in RELEASES:
            total = city_count(mq.engine, release)
            inside = self.filtered_count(mq, vacant, release)
            outside = self.filtered_count(
                mq, {"op": "not", "children": [vacant]}, release)
            assert inside + outside == total

    def test_range_and_in(self, mq):
        assert self.filtered_count(
            mq, {"op": "range", "attr": "LOTAREA", "value": [100, 250]},
            "2004.1") == 2
        assert self.filtered_count(
            mq, {"op": "in", "attr": "LANDUSE", "value": ["vacant", "industrial"]},
            "2004.1") == 3

    def test_tautology_keeps_everything(self, mq):
        anything = {"op": "or", "children": [
            {"op": ">=", "attr": "LOTAREA", "value": 0},
            {"op": "invalid", "attr": "LOTAREA"},
        ]}
        for release in RELEASES:
            assert self.filtered_count(mq, anything, release) == city_count(
                mq.engine, release)

    def test_snapshot_lifecycle(self, mq):
        engine = mq.engine
        try:
            first = engine.apply_filter(fx({"op": "=", "attr": "LANDUSE",
                                            "value": "vacant"}))
            assert engine.snapshot.id == first
            second = engine.apply_filter(fx({"op": "invalid",
                                             "attr": "ASSESSTOTAL"}))
            assert engine.snapshot.id == second
            # only the base and the active snapshot stay addressable
            with pytest.raises(QueryError):
                engine.get_snapshot(first)
            assert city_count(mq.engine, "2004.1", snapshot_id="base") == 4
        finally:
            assert engine.clear_filter() == "base"
        assert engine.snapshot.id == "base"

    def test_filter_requires_validation(self, mq):
        with pytest.raises(UnknownAttribute):
            mq.engine.apply_filter(fx({"op": "=", "attr": "GHOST", "value": 1}))
        assert mq.engine.snapshot.id == "base"

    @given(
        st.sampled_from(["LOTAREA", "ASSESSTOTAL", "ASSESSLAND"]),
        st.sampled_from(["<", "<=", ">", ">=", "="]),
        st.floats(min_value=-50, max_value=5000, allow_nan=False),
        st.sampled_from(["LANDUSE"]),
        st.sampled_from(["vacant", "commercial", "industrial", "park"]),
        st.sampled_from(RELEASES),
    )
    def test_filter_algebra_matches_oracle(self, mq, attr, op, value, cattr, cval,
                                           release):
        a = {"op": op, "attr": attr, "value": value}
        b = {"op": "=", "attr": cattr, "value": cval}
        both = {"op": "and", "children": [a, b]}
        either = {"op": "or", "children": [a, b]}
        complement = {"op": "not", "children": [a]}

        total = city_count(mq.engine, release)
        counts = {}
        for name, expr in (("a", a), ("both", both), ("either", either),
                           ("not", complement)):
            got = self.filtered_count(mq, expr, release)
            want = mq.oracle.aggregate(CITY, None, "count", release,
                                       filter_expr=fx(expr))
            assert got == want, (name, expr, release)
            counts[name] = got

        assert counts["both"] <= counts["a"] <= counts["either"] <= total
        assert counts["a"] + counts["not"] == total


class TestMatrix:
    def test_value_mode_cells(self, mq):
        m = mq.engine.aggregate_matrix(BOROUGH, "ASSESSLAND", "sum")
        assert m.rows == ["east", "west"]
        assert m.releases == RELEASES
        assert m.cells[m.rows.index("west")] == [300.0, 300.0, 300.0, 300.0]
        assert m.cells[m.rows.index("east")] == [50.0, 75.0, 0.0, 30.0]

    def test_absent_member_is_none_not_zero(self, mq):
        m = mq.engine.aggregate_matrix(EAST_PATH + ["00020"], None, "count")
        row = m.cells[m.rows.index("1000200003")]
        assert row == [None, 1, 1, 1]

    def test_delta_mode(self, mq):
        m = mq.engine.aggregate_matrix(BOROUGH, "ASSESSLAND", "sum", mode="delta")
        east = m.cells[m.rows.index("east")]
        assert east[0] is None                       # nothing precedes r0
        assert east[1] == pytest.approx(0.5)         # 50 -> 75
        assert east[2] == pytest.approx(-1.0)        # 75 -> 0
        assert east[3] is None                       # previous value was 0

    def test_delta_absolute_mode(self, mq):
        m = mq.engine.aggregate_matrix(
            BOROUGH, "ASSESSLAND", "sum", mode="delta-absolute")
        assert m.cells[m.rows.index("east")] == [None, 25.0, -75.0, 30.0]

    def test_pinned_base_release(self, mq):
        m = mq.engine.aggregate_matrix(
            BOROUGH, "ASSESSLAND", "sum", mode="delta", base_release="2004.1")
        east = m.cells[m.rows.index("east")]
        assert east == [0.0, pytest.approx(0.5), pytest.approx(-1.0),
                        pytest.approx(-0.4)]

    def test_sort_by_release_column(self, mq):
        m = mq.engine.aggregate_matrix(
            BOROUGH, "ASSESSLAND", "sum", sort="2004.1")
        assert m.rows == ["west", "east"]    # 300 before 50

    def test_sort_puts_missing_last(self, mq):
        m = mq.engine.aggregate_matrix(
            EAST_PATH + ["00020"], "LOTAREA", "sum", sort="2004.2")
        # C=300, E=0.0, D has no LOTAREA at all
        assert m.rows == ["1000200001", "1000200003", "1000200002"]

    def test_unknown_mode(self, mq):
        with pytest.raises(QueryError):
            mq.engine.aggregate_matrix(CITY, None, "count", mode="wavelet")

    def test_to_json_shape(self, mq):
        payload = mq.engine.aggregate_matrix(CITY, None, "count").to_json()
        assert set(payload) == {"rows", "releases", "cells", "mode", "sort"}

    def test_matches_oracle(self, mq):
        m = mq.engine.aggregate_matrix(BOROUGH, "LOTAREA", "avg")
        names, cells = mq.oracle.matrix(BOROUGH, "LOTAREA", "avg")
        assert m.rows == names
        for name, row in zip(m.rows, m.cells):
            assert row == cells[name], name


class TestSeries:
    def test_points_match_matrix_row(self, mq):
        m = mq.engine.aggregate_matrix(BOROUGH, "ASSESSLAND", "sum")
        series = mq.engine.series(BOROUGH, ["east"], "ASSESSLAND", "sum")
        assert len(series) == 1
        s = series[0]
        assert s.name == "east"
        assert [v for _, v in s.points] == m.cells[m.rows.index("east")]
        assert [r for r, _ in s.points] == RELEASES

    def test_modes_flow_through(self, mq):
        s = mq.engine.series(
            BOROUGH, ["east"], "ASSESSLAND", "sum", mode="delta")[0]
        assert s.points[1][1] == pytest.approx(0.5)
        assert s.mode == "delta"

    def test_multiple_names_keep_request_order(self, mq):
        series = mq.engine.series(BOROUGH, ["west", "east"], None, "count")
        assert [s.name for s in series] == ["west", "east"]

    def test_unknown_selection(self, mq):
        with pytest.raises(PathNotFound) as err:
            mq.engine.series(BOROUGH, ["east", "nowhere"], None, "count")
        assert err.value.segment == "nowhere"
        assert err.value.depth == 3


class TestHistogram:
    def test_city_lotarea(self, mq):
        h = mq.engine.attribute_histogram("LOTAREA", 2, release="2004.1")
        assert h.edges == [100.0, 200.0, 300.0]
        assert h.counts == [1, 2]
        assert sum(h.counts) == 3

    def test_matches_oracle(self, mq):
        h = mq.engine.attribute_histogram("LOTAREA", 4, release="2004.2")
        edges, counts = mq.oracle.histogram("LOTAREA", 4, release="2004.2")
        assert h.edges == edges
        assert h.counts == counts

    def test_default_release_is_latest(self, mq):
        a = mq.engine.attribute_histogram("LOTAREA", 3)
        b = mq.engine.attribute_histogram("LOTAREA", 3, release="2005.2")
        assert a.release == "2005.2"
        assert (a.edges, a.counts) == (b.edges, b.counts)

    def test_constant_attribute_collapses(self, mq):
        h = mq.engine.attribute_histogram("BUILTFAR", 5, release="2004.1")
        assert h.edges == [5.0, 5.0]
        assert h.counts == [4]

    def test_no_valid_values(self, mq):
        h = mq.engine.attribute_histogram("OFFICEAREA", 5, release="2004.1")
        assert (h.edges, h.counts) == ([], [])

    def test_scoped_to_path(self, mq):
        h = mq.engine.attribute_histogram(
            "LOTAREA", 2, release="2004.1", path=WEST_PATH)
        assert sum(h.counts) == 2

    def test_validation(self, mq):
        with pytest.raises(QueryError):
            mq.engine.attribute_histogram("LOTAREA", 0)
        with pytest.raises(QueryTypeError):
            mq.engine.attribute_histogram("LANDUSE", 4)
        with pytest.raises(UnknownAttribute):
            mq.engine.attribute_histogram("NOPE", 4)

    def test_to_json_shape(self, mq):
        payload = mq.engine.attribute_histogram("LOTAREA", 2).to_json()
        assert set(payload) == {"attribute", "release", "edges", "counts"}


class TestGeometries:
    def test_block_children(self, mq):
        out = mq.engine.retrieve_geometries(WEST_PATH + ["00010"], "2004.1")
        names = [name for name, _ in out]
        assert names == ["1000100001", "1000100002"]
        assert all(poly.area == pytest.approx(16.0) for _, poly in out)

    def test_absent_children_skipped(self, mq):
        out = mq.engine.retrieve_geometries(EAST_PATH + ["00020"], "2004.1")
        assert [name for name, _ in out] == ["1000200001", "1000200002"]

    def test_region_boundaries(self, mq):
        out = dict(mq.engine.retrieve_geometries(BOROUGH, "2004.1"))
        assert set(out) == {"west", "east"}
        assert out["west"].area == pytest.approx(100 * 100)

    def test_simplify_reduces_vertices(self, mq):
        full = mq.engine.retrieve_geometries(BOROUGH, "2004.1")
        slim = mq.engine.retrieve_geometries(BOROUGH, "2004.1", simplify=5.0)
        for (_, a), (_, b) in zip(full, slim):
            assert sum(len(r) for r in b.rings()) <= sum(len(r) for r in a.rings())


class TestRegionKinds:
    def test_missing_kind_is_unassigned(self, mq):
        # no community-districts file was written for this corpus
        m = mq.engine.aggregate_matrix(
            BOROUGH, None, "count", region_kind="community-district")
        assert m.rows == ["(unassigned)"]
        assert m.cells[0] == [4, 5, 5, 5]

    def test_city_totals_independent_of_kind(self, mq):
        for release in RELEASES:
            a = mq.engine.aggregate(CITY, None, "count", release)
            b = mq.engine.aggregate(CITY, None, "count", release,
                                    region_kind="community-district")
            assert a == b


class TestSmallCorpusAgainstOracle:
    """Randomized spot checks on a generated corpus, all levels mixed."""

    def test_sampled_queries(self, small):
        import random

        engine, oracle = small.engine, small.oracle
        rng = random.Random(2026)
        tree = engine.tree(engine.snapshot, None, False)
        paths = [["city"]]
        for node in tree.children_of(tree.root):
            paths.append(list(node.path))
            for region in tree.children_of(node):
                paths.append(list(region.path))
                for block in tree.children_of(region)[:2]:
                    paths.append(list(block.path))
        releases = [str(r) for r in engine.releases]
        fns = ["count", "sum", "avg", "min", "max"]
        attrs = [None, "LOTAREA", "ASSESSTOTAL", "NUMFLOORS", "LANDUSE",
                 "NORMALIZED_ASSESSTOTAL"]

        checked = 0
        for _ in range(120):
            path = rng.choice(paths)
            fn = rng.choice(fns)
            attribute = rng.choice(attrs)
            if fn != "count" and (
                attribute is None or attribute in ("LANDUSE",)
            ):
                continue
            release = rng.choice(releases)
            got = engine.aggregate(path, attribute, fn, release)
            want = oracle.aggregate(path, attribute, fn, release)
            if fn in ("sum", "avg") and got is not None:
                assert got == pytest.approx(want, rel=1e-12, abs=1e-9)
            else:
                assert got == want, (path, attribute, fn, release)
            checked += 1
        assert checked > 60
