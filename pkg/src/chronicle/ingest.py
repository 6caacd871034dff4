"""Collect, clean, and consolidate per-release parcel files.

Release files are newline-delimited GeoJSON features (`<year>.<half>.geojsonl`),
one file per release. Records are held columnar: numeric attributes as float64
arrays (NaN marks an invalid/missing value, never zero), categorical ones as
int32 codes into a per-attribute vocabulary (-1 marks invalid).
"""

from __future__ import annotations

import csv
import json
import re
import sys
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .geometry import Polygon, PolygonStore, ring_area
from .model import (
    DEFAULT_RENAMES,
    AttributeKind,
    AttributeSchema,
    LotId,
    ReleaseId,
)

__all__ = [
    "RawRelease",
    "RejectionReport",
    "ReleaseSequence",
    "IngestError",
    "load_release",
    "load_renames",
    "clean_records",
    "consolidate",
    "discover_releases",
]


class IngestError(Exception):
    """Fatal ingestion problem (unreadable file, unsorted releases, ...)."""


class RawRelease:
    """All records of one release, stored columnar."""

    def __init__(self, release: ReleaseId, schema: AttributeSchema):
        self.release = release
        self.schema = schema
        self.bbl: list[str] = []
        self.borough = np.empty(0, dtype=np.int16)
        self.block: list[str] = []
        self.lot: list[str] = []
        self.shapes = PolygonStore()
        self.numeric: dict[str, np.ndarray] = {}
        self.categorical: dict[str, np.ndarray] = {}
        self.vocab: dict[str, list[str]] = {
            a.name: [] for a in schema if a.kind == AttributeKind.CATEGORICAL
        }
        self.rejects: Counter = Counter()

    def __len__(self) -> int:
        return len(self.bbl)

    def lot_id(self, i: int) -> LotId:
        return LotId(int(self.borough[i]), self.block[i], self.lot[i])

    def polygon(self, i: int) -> Polygon:
        return self.shapes.get(i)

    def attrs(self, i: int) -> dict:
        """Attribute map for one record; invalid values come back as None."""
        out = {}
        for name, col in self.numeric.items():
            v = col[i]
            out[name] = None if np.isnan(v) else float(v)
        for name, col in self.categorical.items():
            code = col[i]
            out[name] = None if code < 0 else self.vocab[name][code]
        return out

    def records(self):
        """Iterate (LotId, Polygon, attribute map) tuples."""
        for i in range(len(self)):
            yield self.lot_id(i), self.polygon(i), self.attrs(i)

    def cat_code(self, name: str, value) -> int:
        """Intern a categorical value into this release's vocabulary."""
        if value is None:
            return -1
        vocab = self.vocab[name]
        text = str(value)
        try:
            return vocab.index(text)
        except ValueError:
            vocab.append(text)
            return len(vocab) - 1


@dataclass
class RejectionReport:
    """Why records were dropped while cleaning one release."""

    release: ReleaseId
    input_count: int
    kept_count: int
    dropped: Counter = field(default_factory=Counter)
    load_dropped: Counter = field(default_factory=Counter)

    @property
    def total_dropped(self) -> int:
        return sum(self.dropped.values())


_ID_KEYS = ("bbl", "borough", "block", "lot")


def load_renames(path: str | Path) -> dict[str, str]:
    """Two-column CSV (source name, canonical name) on top of the defaults."""
    table = dict(DEFAULT_RENAMES)
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            if not row or row[0].startswith("#"):
                continue
            if len(row) < 2:
                raise IngestError(f"rename table row needs 2 columns: {row!r}")
            table[row[0].strip()] = row[1].strip()
    return table


def _canonical_key(key: str, schema: AttributeSchema, renames: dict[str, str]) -> str | None:
    if key in schema:
        return key
    if key in renames:
        return renames[key]
    upper = key.upper()
    if upper in schema:
        return upper
    return None


def load_release(
    path: str | Path,
    release: ReleaseId,
    schema: AttributeSchema,
    renames: dict[str, str] | None = None,
) -> RawRelease:
    """Parse one newline-delimited GeoJSON release file.

    Attribute names are mapped through the rename table to canonical schema
    names; features with unusable identity or geometry are dropped and
    counted on the returned release's `rejects`.
    """
    renames = dict(DEFAULT_RENAMES) if renames is None else renames
    raw = RawRelease(release, schema)
    numeric_names = [a.name for a in schema if a.kind != AttributeKind.CATEGORICAL]
    cat_names = [a.name for a in schema if a.kind == AttributeKind.CATEGORICAL]
    num_cols: dict[str, list[float]] = {n: [] for n in numeric_names}
    cat_cols: dict[str, list[int]] = {n: [] for n in cat_names}
    boroughs: list[int] = []

    try:
        fh = open(path, encoding="utf-8")
    except OSError as exc:
        raise IngestError(f"cannot read release file {path}: {exc}") from exc

    with fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            try:
                feature = json.loads(line)
            except json.JSONDecodeError:
                raw.rejects["bad record"] += 1
                continue
            props = feature.get("properties") or {}
            try:
                borough = int(props["borough"])
                block = str(props["block"])
                lot = str(props["lot"])
            except (KeyError, TypeError, ValueError):
                raw.rejects["missing id"] += 1
                continue
            try:
                poly = Polygon.from_geojson(feature.get("geometry"))
            except (ValueError, TypeError):
                raw.rejects["bad geometry"] += 1
                continue

            raw.bbl.append(str(props.get("bbl") or f"{borough}{block}{lot}"))
            raw.block.append(sys.intern(block))
            raw.lot.append(sys.intern(lot))
            boroughs.append(borough)
            raw.shapes.append(poly)

            canon = {}
            for key, value in props.items():
                if key in _ID_KEYS:
                    continue
                name = _canonical_key(key, schema, renames)
                if name is not None:
                    canon[name] = value
            for name in numeric_names:
                value = canon.get(name)
                try:
                    num_cols[name].append(float(value))
                except (TypeError, ValueError):
                    num_cols[name].append(np.nan)
            for name in cat_names:
                value = canon.get(name)
                cat_cols[name].append(raw.cat_code(name, value))

    raw.borough = np.asarray(boroughs, dtype=np.int16)
    raw.numeric = {n: np.asarray(c, dtype=np.float64) for n, c in num_cols.items()}
    raw.categorical = {n: np.asarray(c, dtype=np.int32) for n, c in cat_cols.items()}
    raw.shapes.finalize()
    return raw


def _ring_flags(store: PolygonStore):
    """Vectorized per-shape validity + orientation info over a packed store.

    A ring with nonzero area necessarily has >= 3 distinct vertices, so the
    expensive distinctness check only runs for the rare zero-area holes.
    """
    part_off, ring_off, pt_off, coords = store.arrays
    n_shapes = len(part_off) - 1
    n_rings = len(pt_off) - 1
    if n_shapes == 0:
        return np.zeros(0, bool), np.zeros(0, bool), np.zeros(0)

    pts_per_ring = np.diff(pt_off)
    x = coords[:, 0]
    y = coords[:, 1]
    n_pts = len(coords)
    nxt = np.arange(1, n_pts + 1)
    nxt[pt_off[1:] - 1] = pt_off[:-1]  # wrap each ring onto itself
    cross = x * y.take(nxt) - x.take(nxt) * y
    ring_areas = np.add.reduceat(cross, pt_off[:-1]) / 2.0

    finite_pt = np.isfinite(coords).all(axis=1).astype(np.int8)
    ring_finite = np.minimum.reduceat(finite_pt, pt_off[:-1]).astype(bool)

    is_outer = np.zeros(n_rings, dtype=bool)
    is_outer[ring_off[:-1]] = True

    ring_ok = ring_finite & (pts_per_ring >= 3)
    ring_ok &= ~is_outer | (np.abs(ring_areas) > 0)
    # zero-area holes: fall back to an explicit distinct-vertex count
    for r in np.nonzero(ring_ok & ~is_outer & (ring_areas == 0))[0]:
        seg = coords[pt_off[r]:pt_off[r + 1]]
        if len({pt.tobytes() for pt in seg}) < 3:
            ring_ok[r] = False

    shape_ring_starts = ring_off[part_off[:-1]]
    shape_ok = np.minimum.reduceat(ring_ok.astype(np.int8), shape_ring_starts).astype(bool)
    needs_flip = np.where(is_outer, ring_areas < 0, ring_areas > 0) & (ring_areas != 0)
    return shape_ok, needs_flip, ring_areas


def clean_records(raw: RawRelease) -> tuple[RawRelease, RejectionReport]:
    """Drop invalid polygons and duplicate ids; normalize ring orientation.

    Cleaning is total: every input record is either kept or counted under a
    reason, so |input| == |kept| + sum(report.dropped.values()).
    """
    n = len(raw)
    report = RejectionReport(
        release=raw.release,
        input_count=n,
        kept_count=0,
        load_dropped=Counter(raw.rejects),
    )
    shape_ok, needs_flip, _ = _ring_flags(raw.shapes)

    keep = np.ones(n, dtype=bool)
    seen: set[str] = set()
    for i in range(n):
        if not shape_ok[i]:
            keep[i] = False
            report.dropped["degenerate ring"] += 1
            continue
        bbl = raw.bbl[i]
        if bbl in seen:
            keep[i] = False
            report.dropped["duplicate id"] += 1
        else:
            seen.add(bbl)

    part_off, ring_off, _, _ = raw.shapes.arrays
    flip_any = bool(needs_flip.any())
    if keep.all() and not flip_any:
        report.kept_count = n
        out = _copy_columns(raw, None)
        return out, report

    kept_idx = np.nonzero(keep)[0]
    flip_rings = set(np.nonzero(needs_flip)[0].tolist()) if flip_any else set()
    out = _copy_columns(raw, kept_idx)
    out.shapes = raw.shapes.subset(kept_idx.tolist(), flip_rings)
    report.kept_count = len(kept_idx)
    return out, report


def _copy_columns(raw: RawRelease, idx) -> RawRelease:
    out = RawRelease(raw.release, raw.schema)
    if idx is None:
        out.bbl = list(raw.bbl)
        out.block = list(raw.block)
        out.lot = list(raw.lot)
        out.borough = raw.borough
        out.numeric = dict(raw.numeric)
        out.categorical = dict(raw.categorical)
        out.shapes = raw.shapes
    else:
        ilist = idx.tolist()
        out.bbl = [raw.bbl[i] for i in ilist]
        out.block = [raw.block[i] for i in ilist]
        out.lot = [raw.lot[i] for i in ilist]
        out.borough = raw.borough[idx]
        out.numeric = {n: c[idx] for n, c in raw.numeric.items()}
        out.categorical = {n: c[idx] for n, c in raw.categorical.items()}
    out.vocab = {n: list(v) for n, v in raw.vocab.items()}
    return out


class ReleaseSequence:
    """The canonical consolidated sequence: every lot timeline addressable.

    `row[lot, r]` is the record's row in release r's columnar arrays, or -1
    when the lot does not exist in that release. Categorical codes are
    remapped onto one global vocabulary per attribute.
    """

    def __init__(self, releases, raws, schema):
        self.releases: list[ReleaseId] = releases
        self.raws: list[RawRelease] = raws
        self.schema: AttributeSchema = schema
        self.lots: list[LotId] = []
        self.bbl_index: dict[str, int] = {}
        self.blocks: list[tuple[int, str]] = []
        self.block_index: dict[tuple[int, str], int] = {}
        self.block_of_lot = np.empty(0, dtype=np.int32)
        self.borough_of_lot = np.empty(0, dtype=np.int16)
        self.exists = np.zeros((0, 0), dtype=bool)
        self.row = np.zeros((0, 0), dtype=np.int32)
        self.vocab: dict[str, list[str]] = {}

    @property
    def n_lots(self) -> int:
        return len(self.lots)

    @property
    def n_releases(self) -> int:
        return len(self.releases)

    def release_index(self, release: ReleaseId) -> int:
        try:
            return self.releases.index(release)
        except ValueError:
            raise KeyError(f"release {release} not in sequence") from None

    def exists_at(self, bbl: str, release: ReleaseId) -> bool:
        lot = self.bbl_index.get(bbl)
        if lot is None:
            return False
        return bool(self.exists[lot, self.release_index(release)])

    def timeline(self, bbl: str) -> list[tuple[ReleaseId, bool]]:
        lot = self.bbl_index.get(bbl)
        if lot is None:
            return [(r, False) for r in self.releases]
        return [(r, bool(self.exists[lot, i])) for i, r in enumerate(self.releases)]

    def record(self, bbl: str, release: ReleaseId) -> dict | None:
        """Attribute map of one lot at one release, or None if nonexistent."""
        lot = self.bbl_index.get(bbl)
        if lot is None:
            return None
        r = self.release_index(release)
        if not self.exists[lot, r]:
            return None
        return self.raws[r].attrs(int(self.row[lot, r]))

    def polygon(self, lot: int, r: int) -> Polygon:
        return self.raws[r].polygon(int(self.row[lot, r]))


def consolidate(raws: list[RawRelease]) -> ReleaseSequence:
    """Merge cleaned releases into one canonical sequence."""
    if not raws:
        raise IngestError("no releases to consolidate")
    releases = [raw.release for raw in raws]
    for a, b in zip(releases, releases[1:]):
        if not a < b:
            raise IngestError(f"releases not strictly increasing: {a} then {b}")

    schema = raws[0].schema
    seq = ReleaseSequence(releases, raws, schema)

    # global vocabulary per categorical attribute, then in-place code remap
    for name in raws[0].vocab:
        merged: dict[str, int] = {}
        for raw in raws:
            remap = np.empty(len(raw.vocab[name]) + 1, dtype=np.int32)
            remap[-1] = -1
            for code, text in enumerate(raw.vocab[name]):
                remap[code] = merged.setdefault(text, len(merged))
            raw.categorical[name] = remap[raw.categorical[name]]
        seq.vocab[name] = list(merged)
        for raw in raws:
            raw.vocab[name] = seq.vocab[name]   # codes are global now

    bbl_index = seq.bbl_index
    lots = seq.lots
    rows_per_release = []
    for raw in raws:
        rows = np.empty(len(raw), dtype=np.int64)
        for i, bbl in enumerate(raw.bbl):
            idx = bbl_index.get(bbl)
            if idx is None:
                idx = len(lots)
                bbl_index[bbl] = idx
                lots.append(raw.lot_id(i))
            rows[i] = idx
        rows_per_release.append(rows)

    L, R = len(lots), len(releases)
    seq.exists = np.zeros((L, R), dtype=bool)
    seq.row = np.full((L, R), -1, dtype=np.int32)
    for r, rows in enumerate(rows_per_release):
        seq.exists[rows, r] = True
        seq.row[rows, r] = np.arange(len(rows), dtype=np.int32)

    seq.borough_of_lot = np.asarray([l.borough for l in lots], dtype=np.int16)
    block_index = seq.block_index
    block_ids = np.empty(L, dtype=np.int32)
    for i, lot in enumerate(lots):
        key = (lot.borough, lot.block)
        idx = block_index.get(key)
        if idx is None:
            idx = len(seq.blocks)
            block_index[key] = idx
            seq.blocks.append(key)
        block_ids[i] = idx
    seq.block_of_lot = block_ids
    return seq


_RELEASE_FILE = re.compile(r"^(\d{4})\.([12])\.geojsonl$")


def discover_releases(directory: str | Path) -> list[tuple[ReleaseId, Path]]:
    """Find `<year>.<half>.geojsonl` files, sorted by release."""
    found = []
    for path in Path(directory).iterdir():
        m = _RELEASE_FILE.match(path.name)
        if m:
            found.append((ReleaseId(int(m.group(1)), int(m.group(2))), path))
    found.sort(key=lambda pair: pair[0])
    return found


def write_geojsonl(raw: RawRelease, path: str | Path) -> None:
    """Serialize a release back to newline-delimited GeoJSON features."""
    with open(path, "w", encoding="utf-8") as fh:
        for i in range(len(raw)):
            lot = raw.lot_id(i)
            props = {
                "bbl": raw.bbl[i],
                "borough": lot.borough,
                "block": lot.block,
                "lot": lot.lot,
            }
            props.update(raw.attrs(i))
            feature = {
                "type": "Feature",
                "properties": props,
                "geometry": raw.polygon(i).to_geojson(),
            }
            fh.write(json.dumps(feature) + "\n")
