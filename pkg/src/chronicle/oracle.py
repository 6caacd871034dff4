"""Naive reference implementations used to cross-check the query engine.

Everything here recomputes results by scanning raw per-release columns row
by row. It deliberately avoids the deduplicated containers, the level tree,
and the vectorized gather path, so agreement between the two routes is
meaningful evidence rather than the same code called twice.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from functools import lru_cache

from .geolevels import UNASSIGNED
from .model import ReleaseId

__all__ = ["Oracle"]

NORMALIZED = "NORMALIZED_ASSESSTOTAL"


class Oracle:
    """Full-scan answers over raw release data."""

    def __init__(
        self,
        seq,
        assignments,
        *,
        city_name: str = "city",
        borough_names: dict[int, str] | None = None,
        default_region_kind: str = "neighborhood",
    ):
        self.seq = seq
        self.assignments = assignments
        self.city_name = city_name
        self.borough_names = borough_names or {}
        self.default_region_kind = default_region_kind
        self._block_idx = {key: i for i, key in enumerate(seq.blocks)}
        self._col = lru_cache(maxsize=64)(self._col_uncached)
        self._meta = lru_cache(maxsize=32)(self._meta_uncached)

    # ---- raw column access ------------------------------------------------

    def _release(self, release) -> int:
        if isinstance(release, str):
            release = ReleaseId.parse(release)
        return self.seq.releases.index(release)

    def _col_uncached(self, r: int, attr: str) -> list:
        raw = self.seq.raws[r]
        if attr in raw.numeric:
            return raw.numeric[attr].tolist()
        return raw.categorical[attr].tolist()

    def _meta_uncached(self, r: int):
        raw = self.seq.raws[r]
        borough = raw.borough.tolist()
        bidx = [self._block_idx[(bo, bl)] for bo, bl in zip(borough, raw.block)]
        return raw.bbl, borough, raw.block, bidx

    def _value(self, r: int, i: int, attr: str):
        """Decoded value of one raw row; None when invalid."""
        if attr == NORMALIZED:
            assess = self._value(r, i, "ASSESSTOTAL")
            area = self._value(r, i, "LOTAREA")
            if assess is None or area is None or area == 0:
                return None
            return assess / area
        if self.seq.schema.is_numeric(attr):
            x = self._col(r, attr)[i]
            return None if math.isnan(x) else x
        code = self._col(r, attr)[i]
        return None if code < 0 else self.seq.vocab[attr][code]

    def _region_name(self, kind: str, bidx: int, r: int) -> str:
        assignment = self.assignments[kind]
        code = assignment.block_region[bidx, r]
        if code == -1:
            return UNASSIGNED
        return assignment.regions.names[code]

    def _borough_label(self, code: int) -> str:
        return self.borough_names.get(code, f"borough-{code}")

    # ---- path handling --------------------------------------------------------

    def _levels(self, skip_blocks: bool) -> tuple[str, ...]:
        if skip_blocks:
            return ("city", "borough", "region", "lot")
        return ("city", "borough", "region", "block", "lot")

    def _row_segment(self, level: str, r: int, i: int, kind: str, meta) -> str:
        bbls, boroughs, blocks, bidx = meta
        if level == "borough":
            return self._borough_label(boroughs[i])
        if level == "region":
            return self._region_name(kind, bidx[i], r)
        if level == "block":
            return blocks[i]
        return bbls[i]

    def _row_matches(self, segs, r: int, i: int, kind: str, skip_blocks: bool, meta) -> bool:
        levels = self._levels(skip_blocks)
        for depth, seg in enumerate(segs):
            if depth == 0:
                if seg != self.city_name:
                    return False
                continue
            if seg != self._row_segment(levels[depth], r, i, kind, meta):
                return False
        return True

    # ---- filters -------------------------------------------------------------

    def compile_filter(self, expr):
        """JSON filter tree -> row predicate; None input passes everything."""
        if expr is None:
            return None
        if hasattr(expr, "to_json"):
            expr = expr.to_json()
        return self._compile(expr)

    def _compile(self, node: dict):
        op = node["op"]
        if op == "and":
            kids = [self._compile(c) for c in node["children"]]
            return lambda get: all(k(get) for k in kids)
        if op == "or":
            kids = [self._compile(c) for c in node["children"]]
            return lambda get: any(k(get) for k in kids)
        if op == "not":
            kid = self._compile(node["children"][0])
            return lambda get: not kid(get)

        attr = node["attr"]
        value = node.get("value")

        def leaf(get):
            v = get(attr)
            if op == "invalid":
                return v is None
            if v is None:
                return False
            if op == "=":
                return v == value
            if op == "!=":
                return v != value
            if op == "<":
                return v < value
            if op == "<=":
                return v <= value
            if op == ">":
                return v > value
            if op == ">=":
                return v >= value
            if op == "in":
                return v in value
            if op == "range":
                return value[0] <= v <= value[1]
            raise ValueError(f"unknown op {op!r}")

        return leaf

    def _passes(self, predicate, r: int, i: int) -> bool:
        if predicate is None:
            return True
        return predicate(lambda attr: self._value(r, i, attr))

    # ---- query mirrors -----------------------------------------------------------

    def aggregate(
        self,
        path,
        attribute: str | None,
        fn: str,
        release,
        *,
        filter_expr=None,
        region_kind: str | None = None,
        skip_blocks: bool = False,
    ):
        r = self._release(release)
        kind = region_kind or self.default_region_kind
        segs = tuple(path)
        meta = self._meta(r)
        predicate = self.compile_filter(filter_expr)

        matched = 0
        values: list[float] = []
        for i in range(len(meta[0])):
            if not self._row_matches(segs, r, i, kind, skip_blocks, meta):
                continue
            if not self._passes(predicate, r, i):
                continue
            matched += 1
            if attribute is None:
                continue
            v = self._value(r, i, attribute)
            if v is not None:
                values.append(v)
        return self._fold(fn, attribute, matched, values)

    @staticmethod
    def _fold(fn: str, attribute: str | None, matched: int, values: list):
        if fn == "count":
            return matched if attribute is None else len(values)
        if not values:
            return None
        if fn == "sum":
            return math.fsum(values)
        if fn == "min":
            return min(values)
        if fn == "max":
            return max(values)
        if fn == "avg":
            return math.fsum(values) / len(values)
        raise ValueError(f"unknown aggregate {fn!r}")

    def matrix(
        self,
        path,
        attribute: str | None,
        fn: str,
        *,
        filter_expr=None,
        region_kind: str | None = None,
        skip_blocks: bool = False,
    ):
        """Value-mode cells: (sorted row names, {name: [cell per release]})."""
        kind = region_kind or self.default_region_kind
        segs = tuple(path)
        levels = self._levels(skip_blocks)
        child_level = levels[len(segs)]
        predicate = self.compile_filter(filter_expr)
        R = len(self.seq.releases)

        per_child: dict[str, list] = {}
        for r in range(R):
            meta = self._meta(r)
            for i in range(len(meta[0])):
                if not self._row_matches(segs, r, i, kind, skip_blocks, meta):
                    continue
                if not self._passes(predicate, r, i):
                    continue
                name = self._row_segment(child_level, r, i, kind, meta)
                cells = per_child.setdefault(name, [None] * R)
                if cells[r] is None:
                    cells[r] = (0, [])
                matched, values = cells[r]
                v = self._value(r, i, attribute) if attribute is not None else None
                if v is not None:
                    values.append(v)
                cells[r] = (matched + 1, values)

        names = sorted(per_child)
        out = {}
        for name in names:
            row = []
            for cell in per_child[name]:
                if cell is None:
                    row.append(None)   # child nonexistent at this release
                else:
                    row.append(self._fold(fn, attribute, cell[0], cell[1]))
            out[name] = row
        return names, out

    def histogram(
        self,
        attribute: str,
        bins: int,
        *,
        release=None,
        path=None,
        filter_expr=None,
        region_kind: str | None = None,
    ):
        r = self._release(release) if release is not None else len(self.seq.releases) - 1
        segs = tuple(path) if path is not None else (self.city_name,)
        kind = region_kind or self.default_region_kind
        meta = self._meta(r)
        predicate = self.compile_filter(filter_expr)

        values = []
        for i in range(len(meta[0])):
            if not self._row_matches(segs, r, i, kind, False, meta):
                continue
            if not self._passes(predicate, r, i):
                continue
            v = self._value(r, i, attribute)
            if v is not None:
                values.append(v)
        if not values:
            return [], []
        lo, hi = min(values), max(values)
        if lo == hi:
            return [lo, hi], [len(values)]
        edges = [lo + (hi - lo) * i / bins for i in range(bins + 1)]
        counts = [0] * bins
        for v in values:
            counts[min(bisect_right(edges, v, 1, bins) - 1, bins - 1)] += 1
        return edges, counts
