"""Query processor: aggregation, matrices, series, filters, histograms.

All queries run against an immutable snapshot. Applying a filter builds a
new snapshot (containers untouched, only existence masks and trees are
rebuilt) and publishes it with one atomic reference swap, so concurrent
readers always see either the old or the new state, never a mixture.

Aggregation never walks lot nodes: per-node candidate arrays are gathered
against the container reference tables, so a borough-level aggregate is a
handful of vectorized operations.
"""

from __future__ import annotations

import threading
from collections import namedtuple
from dataclasses import dataclass, field

import numpy as np

from .dedup import AttributeContainer, GeometryContainer
from .geolevels import LevelAssignment
from .geometry import Polygon, simplify as simplify_poly
from .index import PathNotFound, Tree, TreeOptions, build_index
from .ingest import ReleaseSequence
from .model import AttributeKind, ReleaseId

__all__ = [
    "QueryError",
    "UnknownAttribute",
    "QueryTypeError",
    "InvalidRelease",
    "FilterError",
    "FilterExpression",
    "MatrixSlice",
    "SeriesSlice",
    "Histogram",
    "Engine",
    "AGGREGATE_FNS",
    "DERIVED_ATTRIBUTES",
    "histogram_edges",
]

AGGREGATE_FNS = ("sum", "count", "min", "max", "avg")

ORDER_OPS = ("<", "<=", ">", ">=")
LEAF_OPS = ("=", "!=", "<", "<=", ">", ">=", "in", "range", "invalid")
BOOL_OPS = ("and", "or", "not")


class QueryError(Exception):
    pass


class UnknownAttribute(QueryError):
    pass


class QueryTypeError(QueryError):
    pass


class InvalidRelease(QueryError):
    pass


class FilterError(QueryError):
    pass


# ---- derived attributes ---------------------------------------------------

def _normalized_assesstotal(values: dict[str, np.ndarray]) -> np.ndarray:
    num = values["ASSESSTOTAL"]
    den = values["LOTAREA"]
    out = np.full(len(num), np.nan)
    ok = ~np.isnan(den) & (den != 0.0) & ~np.isnan(num)
    out[ok] = num[ok] / den[ok]
    return out


# name -> (numeric dependencies, vectorized compute over a dep-name dict)
DERIVED_ATTRIBUTES = {
    "NORMALIZED_ASSESSTOTAL": (("ASSESSTOTAL", "LOTAREA"), _normalized_assesstotal),
}


# ---- filter expressions ----------------------------------------------------

# values: full column; categorical: True when values are vocab codes;
# encode: operand -> code for categorical columns (-2 when not in the vocab)
Column = namedtuple("Column", ["values", "categorical", "encode"])


class FilterExpression:
    """Boolean tree over per-release attribute predicates.

    Every comparison predicate is false on an invalid value; the explicit
    `invalid` predicate selects invalid values; `not` is pure logical
    complement, so NOT(p) does include invalid-valued lots.
    """

    def __init__(self, op: str, *, attr=None, value=None, children=None):
        self.op = op
        self.attr = attr
        self.value = value
        self.children: list[FilterExpression] = children or []

    @classmethod
    def from_json(cls, data) -> "FilterExpression":
        if not isinstance(data, dict) or "op" not in data:
            raise FilterError("filter node must be an object with an 'op'")
        op = data["op"]
        if op in BOOL_OPS:
            raw = data.get("children")
            if not isinstance(raw, list) or not raw:
                raise FilterError(f"'{op}' needs a non-empty children list")
            children = [cls.from_json(c) for c in raw]
            if op == "not" and len(children) != 1:
                raise FilterError("'not' takes exactly one child")
            return cls(op, children=children)
        if op in LEAF_OPS:
            attr = data.get("attr")
            if not isinstance(attr, str):
                raise FilterError(f"'{op}' needs an 'attr' name")
            return cls(op, attr=attr, value=data.get("value"))
        raise FilterError(f"unknown filter op {op!r}")

    def to_json(self) -> dict:
        if self.op in BOOL_OPS:
            return {"op": self.op, "children": [c.to_json() for c in self.children]}
        out = {"op": self.op, "attr": self.attr}
        if self.op != "invalid":
            out["value"] = self.value
        return out

    def validate(self, engine: "Engine") -> None:
        if self.op in BOOL_OPS:
            for child in self.children:
                child.validate(engine)
            return
        kind = engine.attribute_kind(self.attr)   # raises UnknownAttribute
        numeric = kind != AttributeKind.CATEGORICAL
        if self.op == "invalid":
            return
        if self.op in ORDER_OPS or self.op == "range":
            if not numeric:
                raise QueryTypeError(
                    f"ordered predicate {self.op!r} needs a numeric attribute, "
                    f"{self.attr} is categorical"
                )
        if self.op == "range":
            v = self.value
            if (
                not isinstance(v, (list, tuple))
                or len(v) != 2
                or not all(_is_number(x) for x in v)
                or not v[0] <= v[1]
            ):
                raise FilterError("range operand must be an ordered [low, high] pair")
        elif self.op == "in":
            v = self.value
            if not isinstance(v, (list, tuple)) or not v:
                raise FilterError("'in' operand must be a non-empty list")
            if numeric and not all(_is_number(x) for x in v):
                raise FilterError(f"'in' operands for {self.attr} must be numbers")
            if not numeric and not all(isinstance(x, str) for x in v):
                raise FilterError(f"'in' operands for {self.attr} must be strings")
        elif numeric:
            if not _is_number(self.value):
                raise FilterError(f"{self.op!r} operand for {self.attr} must be a number")
        elif not isinstance(self.value, str):
            raise FilterError(f"{self.op!r} operand for {self.attr} must be a string")

    def evaluate(self, columns) -> np.ndarray:
        """Vectorized evaluation; columns(attr) returns a Column."""
        if self.op == "and":
            out = self.children[0].evaluate(columns)
            for child in self.children[1:]:
                out = out & child.evaluate(columns)
            return out
        if self.op == "or":
            out = self.children[0].evaluate(columns)
            for child in self.children[1:]:
                out = out | child.evaluate(columns)
            return out
        if self.op == "not":
            return ~self.children[0].evaluate(columns)

        col = columns(self.attr)
        values = col.values
        if col.categorical:
            valid = values >= 0
            if self.op == "invalid":
                return ~valid
            if self.op == "=":
                return values == col.encode(self.value)
            if self.op == "!=":
                return valid & (values != col.encode(self.value))
            if self.op == "in":
                codes = [col.encode(x) for x in self.value]
                return valid & np.isin(values, codes)
            raise QueryTypeError(f"{self.op!r} unsupported for categorical values")
        valid = ~np.isnan(values)
        if self.op == "invalid":
            return ~valid
        if self.op == "=":
            return values == self.value
        if self.op == "!=":
            return valid & (values != self.value)
        if self.op == "<":
            return values < self.value
        if self.op == "<=":
            return values <= self.value
        if self.op == ">":
            return values > self.value
        if self.op == ">=":
            return values >= self.value
        if self.op == "in":
            return np.isin(values, np.asarray(self.value, dtype=np.float64))
        if self.op == "range":
            lo, hi = self.value
            return (values >= lo) & (values <= hi)
        raise FilterError(f"unknown filter op {self.op!r}")


def _is_number(x) -> bool:
    return isinstance(x, (int, float)) and not isinstance(x, bool)


# ---- result shapes ---------------------------------------------------------

@dataclass
class MatrixSlice:
    rows: list[str]
    releases: list[str]
    cells: list[list[float | None]]
    mode: str
    sort: str

    def to_json(self) -> dict:
        return {
            "rows": self.rows,
            "releases": self.releases,
            "cells": self.cells,
            "mode": self.mode,
            "sort": self.sort,
        }


@dataclass
class SeriesSlice:
    name: str
    mode: str
    points: list[tuple[str, float | None]]

    def to_json(self) -> dict:
        return {"name": self.name, "mode": self.mode, "points": [list(p) for p in self.points]}


@dataclass
class Histogram:
    attribute: str
    release: str
    edges: list[float]
    counts: list[int]

    def to_json(self) -> dict:
        return {
            "attribute": self.attribute,
            "release": self.release,
            "edges": self.edges,
            "counts": self.counts,
        }


def histogram_edges(lo: float, hi: float, bins: int) -> list[float]:
    # shared closed-form edge rule so independent binning code agrees exactly
    return [lo + (hi - lo) * i / bins for i in range(bins + 1)]


@dataclass
class Snapshot:
    """One immutable query state: existence mask plus cached tree variants."""

    id: str
    exists: np.ndarray
    expr: FilterExpression | None = None
    trees: dict = field(default_factory=dict)


class Engine:
    """Query processor over shared containers and per-kind assignments."""

    def __init__(
        self,
        seq: ReleaseSequence,
        gc: GeometryContainer,
        ac: AttributeContainer,
        assignments: dict[str, LevelAssignment],
        *,
        city_name: str = "city",
        borough_names: dict[int, str] | None = None,
        borough_boundaries: dict[str, Polygon] | None = None,
        city_boundary: Polygon | None = None,
        default_region_kind: str = "neighborhood",
    ):
        self.seq = seq
        self.gc = gc
        self.ac = ac
        self.assignments = assignments
        self.city_name = city_name
        self.borough_names = borough_names or {}
        self.borough_boundaries = borough_boundaries or {}
        self.city_boundary = city_boundary
        self.default_region_kind = default_region_kind
        self.releases: list[ReleaseId] = list(seq.releases)

        # all named boundary shapes go into the container up front so the
        # store can be frozen before any tree variant materializes
        if city_boundary is not None:
            gc.register_extra("city", city_boundary)
        for name, poly in self.borough_boundaries.items():
            gc.register_extra(f"borough:{name}", poly)
        for kind, assignment in assignments.items():
            rs = assignment.regions
            for name, poly in zip(rs.names, rs.boundaries):
                gc.register_extra(f"region:{kind}:{name}", poly)
        gc.freeze()

        self._lock = threading.Lock()
        self._filter_counter = 0
        base = Snapshot(id="base", exists=seq.exists)
        self._active = base
        self._snapshots: dict[str, Snapshot] = {"base": base}

    # ---- snapshot plumbing --------------------------------------------------

    @property
    def snapshot(self) -> Snapshot:
        # single attribute read: concurrent readers get a coherent state
        return self._active

    def get_snapshot(self, snapshot_id: str | None) -> Snapshot:
        if snapshot_id is None:
            return self._active
        try:
            return self._snapshots[snapshot_id]
        except KeyError:
            raise QueryError(f"unknown snapshot {snapshot_id!r}") from None

    def tree(
        self,
        snapshot: Snapshot | None = None,
        region_kind: str | None = None,
        skip_blocks: bool = False,
    ) -> Tree:
        snap = snapshot if snapshot is not None else self._active
        kind = region_kind or self.default_region_kind
        if kind not in self.assignments:
            raise QueryError(f"no region set of kind {kind!r}")
        key = (kind, skip_blocks)
        tree = snap.trees.get(key)
        if tree is None:
            options = TreeOptions(
                region_kind=kind,
                skip_blocks=skip_blocks,
                city_name=self.city_name,
                borough_names=self.borough_names,
                borough_boundaries=self.borough_boundaries,
                city_boundary=self.city_boundary,
            )
            tree = build_index(
                self.seq, self.gc, self.ac, self.assignments[kind], options,
                exists=snap.exists,
            )
            snap.trees[key] = tree
        return tree

    def apply_filter(self, expr: FilterExpression, *, region_kind: str | None = None) -> str:
        """Validate, rebuild under the filter, atomically publish. Returns id."""
        expr.validate(self)
        passing = self._filter_matrix(expr)
        with self._lock:
            self._filter_counter += 1
            snap = Snapshot(
                id=f"filter-{self._filter_counter}",
                exists=self.seq.exists & passing,
                expr=expr,
            )
            # build the default tree variant before publishing, so the first
            # query after the swap does not pay for index construction
            self.tree(snap, region_kind)
            self._active = snap
            self._snapshots = {"base": self._snapshots["base"], snap.id: snap}
        return snap.id

    def clear_filter(self) -> str:
        with self._lock:
            base = self._snapshots["base"]
            self._active = base
            self._snapshots = {"base": base}
        return "base"

    def _filter_matrix(self, expr: FilterExpression) -> np.ndarray:
        L, R = self.seq.exists.shape
        out = np.zeros((L, R), dtype=bool)
        for r in range(R):
            out[:, r] = expr.evaluate(lambda attr, r=r: self._column_for_filter(attr, r))
        return out

    def _column_for_filter(self, attr: str, r: int) -> Column:
        """Full-length column at release r; nonexistent rows read invalid."""
        if attr in DERIVED_ATTRIBUTES:
            deps, fn = DERIVED_ATTRIBUTES[attr]
            vals = fn({d: self._column_for_filter(d, r).values for d in deps})
            return Column(vals, False, None)
        kind = self.attribute_kind(attr)
        pool = self.ac.pools[kind]
        ref = pool.ref[:, r]
        ok = ref >= 0
        col = pool.columns[attr][np.where(ok, ref, 0)]
        if kind == AttributeKind.CATEGORICAL:
            codes = col.copy()
            codes[~ok] = -1
            return Column(codes, True, lambda x: self._vocab_code(attr, x))
        vals = col.astype(np.float64, copy=True)
        vals[~ok] = np.nan
        return Column(vals, False, None)

    def _vocab_code(self, attr: str, value) -> int:
        try:
            return self.seq.vocab[attr].index(value)
        except (ValueError, KeyError):
            return -2   # matches nothing, including invalid

    # ---- metadata -------------------------------------------------------------

    def attribute_kind(self, attr) -> AttributeKind:
        if not isinstance(attr, str) or (
            attr not in DERIVED_ATTRIBUTES and attr not in self.seq.schema
        ):
            raise UnknownAttribute(f"unknown attribute {attr!r}")
        if attr in DERIVED_ATTRIBUTES:
            return AttributeKind.UNSTABLE
        return self.seq.schema.kind_of(attr)

    def attribute_names(self) -> list[str]:
        return self.seq.schema.names() + sorted(DERIVED_ATTRIBUTES)

    def release_index(self, release) -> int:
        if isinstance(release, str):
            try:
                release = ReleaseId.parse(release)
            except (TypeError, ValueError):
                raise InvalidRelease(f"malformed release {release!r}") from None
        try:
            return self.releases.index(release)
        except ValueError:
            raise InvalidRelease(f"release {release} outside the timeline") from None

    # ---- value gathering --------------------------------------------------------

    def _values(self, attr: str, lots: np.ndarray, r: int) -> tuple[np.ndarray, bool]:
        """Values for lots known to exist at r; (array, is_categorical)."""
        if attr in DERIVED_ATTRIBUTES:
            deps, fn = DERIVED_ATTRIBUTES[attr]
            return fn({d: self._values(d, lots, r)[0] for d in deps}), False
        kind = self.attribute_kind(attr)
        pool = self.ac.pools[kind]
        refs = pool.ref[lots, r]
        col = pool.columns[attr][refs]
        if kind == AttributeKind.CATEGORICAL:
            return col, True
        return col.astype(np.float64, copy=False), False

    def _aggregate_lots(self, lots: np.ndarray, attr: str | None, fn: str, r: int):
        if fn not in AGGREGATE_FNS:
            raise QueryError(f"unknown aggregate {fn!r}")
        if attr is None:
            if fn != "count":
                raise QueryTypeError("only count works without an attribute")
            return int(len(lots))
        kind = self.attribute_kind(attr)
        numeric = attr in DERIVED_ATTRIBUTES or kind != AttributeKind.CATEGORICAL
        if fn != "count" and not numeric:
            raise QueryTypeError(f"{fn} needs a numeric attribute, {attr} is categorical")
        if len(lots) == 0:
            return 0 if fn == "count" else None
        values, categorical = self._values(attr, lots, r)
        if categorical:
            return int((values >= 0).sum())
        valid = ~np.isnan(values)
        n = int(valid.sum())
        if fn == "count":
            return n
        if n == 0:
            return None
        kept = values[valid]
        if fn == "sum":
            return float(np.sum(kept))
        if fn == "min":
            return float(kept.min())
        if fn == "max":
            return float(kept.max())
        return float(np.sum(kept) / n)   # avg = sum / count

    # ---- public query ops ----------------------------------------------------------

    def aggregate(
        self,
        path,
        attribute: str | None,
        fn: str,
        release,
        *,
        region_kind: str | None = None,
        skip_blocks: bool = False,
        snapshot_id: str | None = None,
    ):
        snap = self.get_snapshot(snapshot_id)
        tree = self.tree(snap, region_kind, skip_blocks)
        node = tree.resolve(path)
        r = self.release_index(release)
        lots = tree.members(node, r)
        return self._aggregate_lots(lots, attribute, fn, r)

    def retrieve_geometries(
        self,
        path,
        release,
        *,
        region_kind: str | None = None,
        skip_blocks: bool = False,
        snapshot_id: str | None = None,
        simplify: float | None = None,
    ) -> list[tuple[str, Polygon]]:
        snap = self.get_snapshot(snapshot_id)
        tree = self.tree(snap, region_kind, skip_blocks)
        node = tree.resolve(path)
        r = self.release_index(release)
        out = []
        for child in tree.children_of(node):
            if len(tree.members(child, r)) == 0:
                continue
            poly = tree.node_geometry(child, r)
            if poly is None:
                continue
            if simplify:
                poly = simplify_poly(poly, simplify)
            out.append((child.name, poly))
        return out

    def aggregate_matrix(
        self,
        path,
        attribute: str | None,
        fn: str,
        *,
        mode: str = "value",
        sort: str = "name",
        base_release=None,
        region_kind: str | None = None,
        skip_blocks: bool = False,
        snapshot_id: str | None = None,
    ) -> MatrixSlice:
        if mode not in ("value", "delta", "delta-absolute"):
            raise QueryError(f"unknown matrix mode {mode!r}")
        snap = self.get_snapshot(snapshot_id)
        tree = self.tree(snap, region_kind, skip_blocks)
        node = tree.resolve(path)
        children = tree.children_of(node)
        R = len(self.releases)

        raw: list[list[float | None]] = []
        for child in children:
            row = []
            for r in range(R):
                lots = tree.members(child, r)
                if len(lots) == 0:
                    row.append(None)   # nonexistent at r, not a zero count
                    continue
                row.append(self._aggregate_lots(lots, attribute, fn, r))
            raw.append(row)

        base_idx = self.release_index(base_release) if base_release is not None else None
        cells = [self._apply_mode(row, mode, base_idx) for row in raw]
        names = [c.name for c in children]

        if sort != "name":
            col = self.release_index(sort)
            order = sorted(
                range(len(names)),
                key=lambda i: (cells[i][col] is None, -(cells[i][col] or 0.0)),
            )
            names = [names[i] for i in order]
            cells = [cells[i] for i in order]
        return MatrixSlice(
            rows=names,
            releases=[str(x) for x in self.releases],
            cells=cells,
            mode=mode,
            sort=sort,
        )

    @staticmethod
    def _apply_mode(row, mode: str, base_idx: int | None):
        if mode == "value":
            return row

        def delta(cur, prev):
            if cur is None or prev is None:
                return None
            if mode == "delta-absolute":
                return cur - prev
            if prev == 0:
                return None
            return (cur - prev) / abs(prev)

        if base_idx is not None:
            return [delta(v, row[base_idx]) for v in row]
        return [None] + [delta(row[i], row[i - 1]) for i in range(1, len(row))]

    def series(
        self,
        path,
        selected: list[str],
        attribute: str | None,
        fn: str,
        *,
        mode: str = "value",
        base_release=None,
        region_kind: str | None = None,
        skip_blocks: bool = False,
        snapshot_id: str | None = None,
    ) -> list[SeriesSlice]:
        matrix = self.aggregate_matrix(
            path, attribute, fn,
            mode=mode, base_release=base_release,
            region_kind=region_kind, skip_blocks=skip_blocks,
            snapshot_id=snapshot_id,
        )
        by_name = {name: row for name, row in zip(matrix.rows, matrix.cells)}
        out = []
        for name in selected:
            if name not in by_name:
                raise PathNotFound(name, len(tuple(path)) + 1)
            out.append(
                SeriesSlice(
                    name=name,
                    mode=mode,
                    points=list(zip(matrix.releases, by_name[name])),
                )
            )
        return out

    def attribute_histogram(
        self,
        attribute: str,
        bins: int,
        *,
        release=None,
        path=None,
        region_kind: str | None = None,
        snapshot_id: str | None = None,
    ) -> Histogram:
        if not isinstance(bins, int) or bins <= 0:
            raise QueryError("bin count must be a positive integer")
        kind = self.attribute_kind(attribute)
        if attribute not in DERIVED_ATTRIBUTES and kind == AttributeKind.CATEGORICAL:
            raise QueryTypeError(
                f"histogram needs a numeric attribute, {attribute} is categorical"
            )
        snap = self.get_snapshot(snapshot_id)
        tree = self.tree(snap, region_kind)
        node = tree.resolve(path) if path is not None else tree.root
        r = self.release_index(release) if release is not None else len(self.releases) - 1
        lots = tree.members(node, r)
        release_str = str(self.releases[r])
        if len(lots) == 0:
            return Histogram(attribute, release_str, [], [])
        values, _ = self._values(attribute, lots, r)
        kept = values[~np.isnan(values)]
        if len(kept) == 0:
            return Histogram(attribute, release_str, [], [])
        lo, hi = float(kept.min()), float(kept.max())
        if lo == hi:
            return Histogram(attribute, release_str, [lo, hi], [int(len(kept))])
        edges = histogram_edges(lo, hi, bins)
        inner = np.asarray(edges[1:-1])
        counts = np.bincount(np.searchsorted(inner, kept, side="right"), minlength=bins)
        return Histogram(attribute, release_str, counts=counts.astype(int).tolist(), edges=edges)
