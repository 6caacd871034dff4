"""Deterministic synthetic parcel corpus with planted change rates.

Lays out a city as a column of rectangular boroughs, each a row of square
neighborhoods holding a grid of blocks; every block carries a grid of
rectangular lots. Community districts pair adjacent neighborhoods. Each
transition plants geometry changes, bounded geometry noise, per-kind
attribute changes, and rare splits/merges, all driven by one seeded RNG so
equal seeds give byte-identical corpora.

Geometry noise is drawn fresh around a lot's base shape every time (never
cumulative), and is bounded so a noisy shape always keeps an overlap ratio
above 0.97 with its base; genuine changes displace the base rectangle by
at least 30% of its width, keeping the ratio below 0.75. The two event
kinds therefore never blur across the 0.9 equivalence threshold.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .geometry import Polygon, PolygonStore
from .geolevels import RegionSet
from .ingest import RawRelease, write_geojsonl
from .model import AttributeKind, AttributeSchema, ReleaseId, default_schema

__all__ = ["GeneratorParams", "SyntheticCorpus", "generate_synthetic", "write_corpus"]

CITY_NAME = "city"

LOT_SIDE = 40.0        # lot cell content edge
CELL_PITCH = 44.0      # lot cell grid pitch
BLOCK_MARGIN = 40.0    # road ring around a block's cells
NBHD_MARGIN = 40.0     # gap between block grid and neighborhood boundary
BOROUGH_MARGIN = 30.0
CITY_MARGIN = 50.0
NOISE_AMPLITUDE = 0.08  # per-coordinate jitter bound, keeps ratio >= 0.97

VOCAB: dict[str, list[str]] = {
    "LANDUSE": [
        "one-two-family", "multi-family-walkup", "multi-family-elevator",
        "mixed-residential", "commercial", "industrial", "transportation",
        "public-facility", "open-space", "parking", "vacant",
    ],
    "BLDGCLASS": [f"{letter}{d}" for letter in "ABCDEFGHIJ" for d in range(4)],
    "SPDIST": ["none", "arts", "business-core", "waterfront", "industrial-bonus", "historic"],
}


def _fresh_numeric(name: str, rng: np.random.Generator, n: int) -> np.ndarray:
    if name == "LOTAREA":
        return rng.uniform(600.0, 4000.0, n)
    if name in ("RESAREA", "COMAREA", "OFFICEAREA"):
        return rng.uniform(0.0, 9000.0, n)
    if name == "NUMBLDGS":
        return rng.integers(0, 9, n).astype(np.float64)
    if name == "NUMFLOORS":
        return rng.integers(1, 41, n).astype(np.float64)
    if name in ("ASSESSLAND", "ASSESSTOTAL"):
        return np.exp(rng.normal(11.0, 0.9, n))
    if name in ("BUILTFAR", "RESIDFAR"):
        return rng.uniform(0.1, 12.0, n)
    return rng.uniform(0.0, 1000.0, n)


@dataclass
class GeneratorParams:
    """Knobs for the synthetic corpus; defaults mimic PLUTO-scale behavior."""

    lots: int = 100_000
    releases: int = 20
    start: tuple[int, int] = (2004, 1)
    boroughs: int = 5
    neighborhoods_per_borough: int = 8
    lots_per_block: int = 25
    geometry_change_prob: float = 0.08
    geometry_noise_prob: float = 0.05
    categorical_change_prob: float = 0.21
    stable_change_prob: float = 0.295
    unstable_change_prob: float = 0.755
    split_prob: float = 0.0015
    merge_prob: float = 0.0015
    invalid_rate: float = 0.02
    multipart_rate: float = 0.01
    late_attributes: dict[str, int] = field(default_factory=dict)

    def validate(self) -> None:
        if self.lots <= 0 or self.releases <= 0:
            raise ValueError("lot and release counts must be positive")
        if len(self.start) != 2 or self.start[1] not in (1, 2):
            raise ValueError("start must be (year, half) with half 1 or 2")
        if not 1 <= self.boroughs <= 9:
            raise ValueError("borough count must fit a 1-digit code (1..9)")
        if self.neighborhoods_per_borough <= 0 or self.lots_per_block <= 0:
            raise ValueError("layout counts must be positive")
        for name, p in (
            ("geometry_change_prob", self.geometry_change_prob),
            ("geometry_noise_prob", self.geometry_noise_prob),
            ("categorical_change_prob", self.categorical_change_prob),
            ("stable_change_prob", self.stable_change_prob),
            ("unstable_change_prob", self.unstable_change_prob),
            ("split_prob", self.split_prob),
            ("merge_prob", self.merge_prob),
            ("invalid_rate", self.invalid_rate),
            ("multipart_rate", self.multipart_rate),
        ):
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"{name} must be a probability, got {p}")


@dataclass
class SyntheticCorpus:
    releases: list[RawRelease]
    manifest: dict
    region_sets: dict[str, RegionSet]
    borough_boundaries: dict[str, Polygon]
    city_boundary: Polygon


def _rect_poly(x0: float, y0: float, x1: float, y1: float) -> Polygon:
    return Polygon.from_rings([[x0, y0], [x1, y0], [x1, y1], [x0, y1]])


def _corners(rects: np.ndarray) -> np.ndarray:
    """(n, 4) rectangles -> (n, 4, 2) counter-clockwise corner rings."""
    x0, y0, x1, y1 = rects[:, 0], rects[:, 1], rects[:, 2], rects[:, 3]
    out = np.empty((len(rects), 4, 2))
    out[:, 0, 0], out[:, 0, 1] = x0, y0
    out[:, 1, 0], out[:, 1, 1] = x1, y0
    out[:, 2, 0], out[:, 2, 1] = x1, y1
    out[:, 3, 0], out[:, 3, 1] = x0, y1
    return out


class _Population:
    """Mutable lot table; emission snapshots the alive rows."""

    def __init__(self, schema: AttributeSchema):
        self.schema = schema
        self.rect = np.empty((0, 4))
        self.rect2 = np.empty((0, 4))   # second part, NaN row when single-part
        self.alive = np.empty(0, dtype=bool)
        self.borough = np.empty(0, dtype=np.int16)
        self.block = np.empty(0, dtype=np.int32)
        self.block_code: list[str] = []
        self.lot_code: list[str] = []
        self.bbl: list[str] = []
        self.noise_flags = np.zeros(0, dtype=bool)
        self.num: dict[str, np.ndarray] = {
            n: np.empty(0) for n in schema.names() if schema.is_numeric(n)
        }
        self.cat: dict[str, np.ndarray] = {
            n: np.empty(0, dtype=np.int32)
            for n in schema.names(AttributeKind.CATEGORICAL)
        }

    def __len__(self) -> int:
        return len(self.alive)

    def extend(self, rows: dict) -> None:
        k = len(rows["bbl"])
        if k == 0:
            return
        self.rect = np.vstack([self.rect, np.asarray(rows["rect"])])
        self.rect2 = np.vstack([self.rect2, np.asarray(rows["rect2"])])
        self.alive = np.concatenate([self.alive, np.ones(k, dtype=bool)])
        self.borough = np.concatenate(
            [self.borough, np.asarray(rows["borough"], dtype=np.int16)]
        )
        self.block = np.concatenate(
            [self.block, np.asarray(rows["block"], dtype=np.int32)]
        )
        self.block_code += rows["block_code"]
        self.lot_code += rows["lot_code"]
        self.bbl += rows["bbl"]
        for n in self.num:
            self.num[n] = np.concatenate([self.num[n], np.asarray(rows["num"][n])])
        for n in self.cat:
            self.cat[n] = np.concatenate(
                [self.cat[n], np.asarray(rows["cat"][n], dtype=np.int32)]
            )


def _release_ids(params: GeneratorParams) -> list[ReleaseId]:
    year, half = params.start
    out = []
    for _ in range(params.releases):
        out.append(ReleaseId(year, half))
        year, half = (year, 2) if half == 1 else (year + 1, 1)
    return out


def generate_synthetic(params: GeneratorParams, seed: int) -> SyntheticCorpus:
    """Build the corpus; all randomness flows from one seeded generator."""
    params.validate()
    schema = default_schema()
    rng = np.random.default_rng(seed)
    releases = _release_ids(params)

    # ---- static layout -------------------------------------------------
    total_blocks = math.ceil(params.lots / params.lots_per_block)
    n_nbhd = params.neighborhoods_per_borough
    per_nbhd = math.ceil(total_blocks / (params.boroughs * n_nbhd))
    grid = math.ceil(math.sqrt(per_nbhd))
    cell_grid = math.ceil(math.sqrt(params.lots_per_block))

    block_pitch = cell_grid * CELL_PITCH + 2 * BLOCK_MARGIN
    nbhd_side = grid * block_pitch + 2 * NBHD_MARGIN
    nbhd_pitch = nbhd_side + 2 * BOROUGH_MARGIN
    borough_w = n_nbhd * nbhd_pitch
    borough_h = nbhd_pitch

    nbhd_regions: list[tuple[str, Polygon]] = []
    district_regions: list[tuple[str, Polygon]] = []
    borough_boundaries: dict[str, Polygon] = {}
    borough_names: dict[int, str] = {}
    blocks: list[dict] = []
    ground_truth: dict[str, dict[str, str]] = {"neighborhood": {}, "community-district": {}}

    init_rows: dict = {
        "rect": [], "rect2": [], "borough": [], "block": [],
        "block_code": [], "lot_code": [], "bbl": [],
    }
    next_lot_in_block: list[int] = []
    remaining = params.lots
    for b in range(1, params.boroughs + 1):
        by0 = (b - 1) * (borough_h + 2 * BOROUGH_MARGIN + 100.0)
        name = f"borough-{b}"
        borough_names[b] = name
        borough_boundaries[name] = _rect_poly(
            -BOROUGH_MARGIN, by0 - BOROUGH_MARGIN,
            borough_w + BOROUGH_MARGIN, by0 + borough_h + BOROUGH_MARGIN,
        )
        district_of_nbhd = {}
        for d in range(math.ceil(n_nbhd / 2)):
            dname = f"district-{b}-{d + 1}"
            lo = d * 2
            hi = min(lo + 2, n_nbhd)
            dx0 = lo * nbhd_pitch + BOROUGH_MARGIN
            dx1 = (hi - 1) * nbhd_pitch + BOROUGH_MARGIN + nbhd_side
            district_regions.append(
                (dname, _rect_poly(dx0, by0 + BOROUGH_MARGIN, dx1, by0 + BOROUGH_MARGIN + nbhd_side))
            )
            for i in range(lo, hi):
                district_of_nbhd[i] = dname
        block_counter = 0
        for i in range(n_nbhd):
            nx0 = i * nbhd_pitch + BOROUGH_MARGIN
            ny0 = by0 + BOROUGH_MARGIN
            nname = f"nbhd-{b}-{i + 1:02d}"
            nbhd_regions.append((nname, _rect_poly(nx0, ny0, nx0 + nbhd_side, ny0 + nbhd_side)))
            for cell in range(per_nbhd):
                if remaining <= 0:
                    break
                gx, gy = cell % grid, cell // grid
                bx0 = nx0 + NBHD_MARGIN + gx * block_pitch + BLOCK_MARGIN
                by_ = ny0 + NBHD_MARGIN + gy * block_pitch + BLOCK_MARGIN
                block_counter += 1
                code = f"{block_counter:05d}"
                block_id = len(blocks)
                blocks.append({"borough": b, "code": code})
                key = f"{b}:{code}"
                ground_truth["neighborhood"][key] = nname
                ground_truth["community-district"][key] = district_of_nbhd[i]
                placed = min(params.lots_per_block, remaining)
                for j in range(placed):
                    cx = bx0 + (j % cell_grid) * CELL_PITCH
                    cy = by_ + (j // cell_grid) * CELL_PITCH
                    lot_code = f"{j + 1:04d}"
                    init_rows["rect"].append((cx, cy, cx + LOT_SIDE, cy + LOT_SIDE))
                    init_rows["rect2"].append((np.nan,) * 4)
                    init_rows["borough"].append(b)
                    init_rows["block"].append(block_id)
                    init_rows["block_code"].append(code)
                    init_rows["lot_code"].append(lot_code)
                    init_rows["bbl"].append(f"{b}{code}{lot_code}")
                next_lot_in_block.append(placed)
                remaining -= placed

    pop = _Population(schema)
    n0 = len(init_rows["bbl"])
    init_rows["num"] = {}
    init_rows["cat"] = {}
    for name in pop.num:
        col = _fresh_numeric(name, rng, n0)
        col[rng.random(n0) < params.invalid_rate] = np.nan
        init_rows["num"][name] = col
    for name in pop.cat:
        col = rng.integers(0, len(VOCAB[name]), n0).astype(np.int32)
        col[rng.random(n0) < params.invalid_rate] = -1
        init_rows["cat"][name] = col
    pop.extend(init_rows)

    # some lots are two-part multipolygons from birth
    mp = rng.random(n0) < params.multipart_rate
    if mp.any():
        r = pop.rect[mp]
        w = r[:, 2] - r[:, 0]
        part1 = np.column_stack([r[:, 0], r[:, 1], r[:, 0] + 0.40 * w, r[:, 3]])
        part2 = np.column_stack([r[:, 0] + 0.55 * w, r[:, 1], r[:, 2], r[:, 3]])
        pop.rect[mp] = part1
        pop.rect2[mp] = part2

    kind_probs = {
        AttributeKind.CATEGORICAL: params.categorical_change_prob,
        AttributeKind.STABLE: params.stable_change_prob,
        AttributeKind.UNSTABLE: params.unstable_change_prob,
    }

    # late attributes stay invalid until their first release
    for name in params.late_attributes:
        if name in pop.num:
            pop.num[name][:] = np.nan
        elif name in pop.cat:
            pop.cat[name][:] = -1

    out_releases: list[RawRelease] = []
    noise_flags = np.zeros(len(pop), dtype=bool)
    for r, release in enumerate(releases):
        if r > 0:
            active = {
                kind: [
                    n
                    for n in schema.names(kind)
                    if params.late_attributes.get(n, 0) <= r
                ]
                for kind in kind_probs
            }
            _transition(pop, params, rng, blocks, next_lot_in_block, kind_probs, active)
            noise_flags = pop.noise_flags
        if r in params.late_attributes.values():
            for name, first in params.late_attributes.items():
                if first == r:
                    live = np.nonzero(pop.alive)[0]
                    if name in pop.num:
                        pop.num[name][live] = _fresh_numeric(name, rng, len(live))
                    else:
                        pop.cat[name][live] = rng.integers(
                            0, len(VOCAB[name]), len(live)
                        ).astype(np.int32)
        out_releases.append(_emit(release, schema, pop, noise_flags, rng))

    manifest = {
        "seed": seed,
        "city": CITY_NAME,
        "releases": [str(x) for x in releases],
        "planted": {
            "geometry": params.geometry_change_prob,
            "geometry-noise": params.geometry_noise_prob,
            "categorical": params.categorical_change_prob,
            "numerical-stable": params.stable_change_prob,
            "numerical-unstable": params.unstable_change_prob,
            "split": params.split_prob,
            "merge": params.merge_prob,
        },
        "expected_redundancy": {
            "geometry": 1.0 - params.geometry_change_prob,
            "categorical": 1.0 - params.categorical_change_prob,
            "numerical-stable": 1.0 - params.stable_change_prob,
            "numerical-unstable": 1.0 - params.unstable_change_prob,
        },
        "layout": {
            "lots": params.lots,
            "boroughs": params.boroughs,
            "borough_names": {str(k): v for k, v in borough_names.items()},
            "neighborhoods_per_borough": n_nbhd,
            "lots_per_block": params.lots_per_block,
            "blocks": len(blocks),
        },
        "ground_truth": ground_truth,
    }
    if params.late_attributes:
        manifest["late_attributes"] = dict(params.late_attributes)

    return SyntheticCorpus(
        releases=out_releases,
        manifest=manifest,
        region_sets={
            "neighborhood": RegionSet("neighborhood", nbhd_regions),
            "community-district": RegionSet("community-district", district_regions),
        },
        borough_boundaries=borough_boundaries,
        city_boundary=_rect_poly(
            -CITY_MARGIN,
            -CITY_MARGIN,
            borough_w + CITY_MARGIN,
            params.boroughs * (borough_h + 2 * BOROUGH_MARGIN + 100.0) + CITY_MARGIN,
        ),
    )


def _transition(pop, params, rng, blocks, next_lot_in_block, kind_probs, active) -> None:
    """One release step: splits, merges, geometry events, attribute events."""
    n_pre = len(pop)
    alive_pre = pop.alive.copy()

    split_mask = (rng.random(n_pre) < params.split_prob) & alive_pre
    merge_mask = (rng.random(n_pre) < params.merge_prob) & alive_pre & ~split_mask

    new_rows: dict = {
        "rect": [], "rect2": [], "borough": [], "block": [],
        "block_code": [], "lot_code": [], "bbl": [],
        "num": {k: [] for k in pop.num}, "cat": {k: [] for k in pop.cat},
    }

    def add_child(rect, parent, block_id):
        next_lot_in_block[block_id] += 1
        code = blocks[block_id]["code"]
        lot_code = f"{next_lot_in_block[block_id]:04d}"
        b = blocks[block_id]["borough"]
        new_rows["rect"].append(rect)
        new_rows["rect2"].append((np.nan,) * 4)
        new_rows["borough"].append(b)
        new_rows["block"].append(block_id)
        new_rows["block_code"].append(code)
        new_rows["lot_code"].append(lot_code)
        new_rows["bbl"].append(f"{b}{code}{lot_code}")
        for k in pop.num:
            new_rows["num"][k].append(pop.num[k][parent])
        for k in pop.cat:
            new_rows["cat"][k].append(pop.cat[k][parent])

    for i in np.nonzero(split_mask)[0]:
        if np.isnan(pop.rect2[i, 0]):
            x0, y0, x1, y1 = pop.rect[i]
            if x1 - x0 < 4.0:   # too thin to split again
                continue
            xm = (x0 + x1) / 2.0
            halves = [(x0, y0, xm - 0.5, y1), (xm + 0.5, y0, x1, y1)]
        else:
            halves = [tuple(pop.rect[i]), tuple(pop.rect2[i])]
        pop.alive[i] = False
        block_id = int(pop.block[i])
        for rect in halves:
            add_child(rect, int(i), block_id)

    by_block: dict[int, list[int]] = {}
    for i in np.nonzero(merge_mask)[0]:
        by_block.setdefault(int(pop.block[i]), []).append(int(i))
    for block_id in sorted(by_block):
        group = sorted(by_block[block_id], key=lambda i: pop.bbl[i])
        for a, c in zip(group[0::2], group[1::2]):
            parts = [pop.rect[a], pop.rect[c]]
            for i in (a, c):
                if not np.isnan(pop.rect2[i, 0]):
                    parts.append(pop.rect2[i])
            stack = np.vstack(parts)
            merged = (
                stack[:, 0].min(), stack[:, 1].min(),
                stack[:, 2].max(), stack[:, 3].max(),
            )
            pop.alive[a] = False
            pop.alive[c] = False
            add_child(merged, a, block_id)

    pop.extend(new_rows)

    # geometry change and bounded noise, on lots alive before and after
    survivors = pop.alive[:n_pre] & alive_pre
    change = (rng.random(n_pre) < params.geometry_change_prob) & survivors
    noise = (rng.random(n_pre) < params.geometry_noise_prob) & survivors & ~change
    idx = np.nonzero(change)[0]
    if len(idx):
        r = pop.rect[idx]
        w = r[:, 2] - r[:, 0]
        h = r[:, 3] - r[:, 1]
        dx = rng.uniform(0.30, 0.45, len(idx)) * w * rng.choice([-1.0, 1.0], len(idx))
        dy = rng.uniform(0.0, 0.20, len(idx)) * h * rng.choice([-1.0, 1.0], len(idx))
        scale = rng.uniform(0.8, 1.2, len(idx))
        cx = (r[:, 0] + r[:, 2]) / 2.0 + dx
        cy = (r[:, 1] + r[:, 3]) / 2.0 + dy
        pop.rect[idx] = np.column_stack([
            cx - scale * w / 2.0, cy - scale * h / 2.0,
            cx + scale * w / 2.0, cy + scale * h / 2.0,
        ])
        two = idx[~np.isnan(pop.rect2[idx, 0])]
        if len(two):
            pop.rect2[two, 0::2] += dx[np.isin(idx, two)][:, None]
            pop.rect2[two, 1::2] += dy[np.isin(idx, two)][:, None]

    for kind, p in kind_probs.items():
        names = active[kind]
        if not names:
            continue
        mask = (rng.random(n_pre) < p) & survivors
        rows = np.nonzero(mask)[0]
        if len(rows) == 0:
            continue
        pick = rng.integers(0, len(names), len(rows))
        to_invalid = rng.random(len(rows)) < params.invalid_rate
        for j, name in enumerate(names):
            sel = rows[pick == j]
            inv = to_invalid[pick == j]
            if len(sel) == 0:
                continue
            if kind == AttributeKind.CATEGORICAL:
                col = pop.cat[name]
                v = len(VOCAB[name])
                old = col[sel]
                fresh = rng.integers(0, v, len(sel)).astype(np.int32)
                shifted = ((old + rng.integers(1, v, len(sel))) % v).astype(np.int32)
                new = np.where(old < 0, fresh, shifted)
                new[inv & (old >= 0)] = -1
                col[sel] = new
            else:
                col = pop.num[name]
                old = col[sel]
                fresh = _fresh_numeric(name, rng, len(sel))
                bumped = old * rng.uniform(1.05, 1.45, len(sel)) + rng.uniform(1.0, 5.0, len(sel))
                new = np.where(np.isnan(old), fresh, bumped)
                new[inv & ~np.isnan(old)] = np.nan
                col[sel] = new

    flags = np.zeros(len(pop), dtype=bool)
    flags[: n_pre] = noise
    pop.noise_flags = flags


def _emit(release, schema, pop, noise_flags, rng) -> RawRelease:
    order = np.nonzero(pop.alive)[0]
    two = ~np.isnan(pop.rect2[order, 0])
    pts_per_shape = np.where(two, 8, 4).astype(np.int64)
    shape_off = np.zeros(len(order) + 1, dtype=np.int64)
    np.cumsum(pts_per_shape, out=shape_off[1:])
    coords = np.empty((int(shape_off[-1]), 2))

    first = shape_off[:-1]
    coords[(first[:, None] + np.arange(4)).ravel()] = _corners(pop.rect[order]).reshape(-1, 2)
    rows2 = np.nonzero(two)[0]
    if len(rows2):
        base = first[rows2] + 4
        coords[(base[:, None] + np.arange(4)).ravel()] = _corners(
            pop.rect2[order[rows2]]
        ).reshape(-1, 2)

    nf = noise_flags[order]
    if nf.any():
        pmask = np.repeat(nf, pts_per_shape)
        coords[pmask] += rng.uniform(-NOISE_AMPLITUDE, NOISE_AMPLITUDE, (int(pmask.sum()), 2))

    parts_per = np.where(two, 2, 1).astype(np.int64)
    part_off = np.zeros(len(order) + 1, dtype=np.int64)
    np.cumsum(parts_per, out=part_off[1:])
    n_parts = int(part_off[-1])
    ring_off = np.arange(n_parts + 1, dtype=np.int64)       # one ring per part
    pt_off = np.arange(n_parts + 1, dtype=np.int64) * 4     # four points per ring

    raw = RawRelease(release, schema)
    raw.shapes = PolygonStore.from_arrays(part_off, ring_off, pt_off, coords)
    olist = order.tolist()
    raw.bbl = [pop.bbl[i] for i in olist]
    raw.block = [pop.block_code[i] for i in olist]
    raw.lot = [pop.lot_code[i] for i in olist]
    raw.borough = pop.borough[order]
    raw.numeric = {n: c[order] for n, c in pop.num.items()}
    raw.categorical = {n: c[order] for n, c in pop.cat.items()}
    raw.vocab = {n: list(v) for n, v in VOCAB.items() if n in raw.categorical}
    return raw


def write_corpus(corpus: SyntheticCorpus, directory: str | Path) -> None:
    """Write release files, region boundaries, and the manifest."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    for raw in corpus.releases:
        write_geojsonl(raw, directory / f"{raw.release}.geojsonl")
    (directory / "manifest.json").write_text(json.dumps(corpus.manifest, indent=2))
    for kind, rs in corpus.region_sets.items():
        fname = "neighborhoods.geojson" if kind == "neighborhood" else "community-districts.geojson"
        (directory / fname).write_text(json.dumps(rs.to_geojson()))
    boroughs = {
        "type": "FeatureCollection",
        "features": [
            {
                "type": "Feature",
                "properties": {"name": name},
                "geometry": poly.to_geojson(),
            }
            for name, poly in corpus.borough_boundaries.items()
        ],
    }
    (directory / "boroughs.geojson").write_text(json.dumps(boroughs))
    (directory / "city.geojson").write_text(
        json.dumps(
            {
                "type": "FeatureCollection",
                "features": [
                    {
                        "type": "Feature",
                        "properties": {"name": CITY_NAME},
                        "geometry": corpus.city_boundary.to_geojson(),
                    }
                ],
            }
        )
    )
