"""Cross-release deduplication of lot geometries and attribute sets.

A lot's timeline is scanned release by release. Geometries are judged by
the overlap ratio Area(a intersect b) / max(Area(a), Area(b)): at least
epsilon (default 0.9) means "same shape", and the first occurrence stays
the stored canonical shape. Attribute values are grouped into three pools
(categorical, numerical-stable, numerical-unstable); a pool entry is
shared between consecutive releases only when every value in the set is
bitwise equal, with invalid comparing equal only to invalid.

A gap in a lot's timeline breaks the chain: a reappearing lot starts a
fresh run with a fresh first occurrence.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .geometry import Polygon, PolygonStore, intersection_area, to_shapely
from .ingest import ReleaseSequence
from .model import AttributeKind, AttributeSchema

__all__ = [
    "DedupOptions",
    "GeometryContainer",
    "AttributeContainer",
    "RedundancyReport",
    "overlap_ratio",
    "geometry_equivalent",
    "dedup_geometries",
    "dedup_attributes",
    "redundancy_report",
]

EPSILON = 0.9


@dataclass
class DedupOptions:
    """Build-time switches for the geometry equivalence rule.

    `flip_inequality` treats LOW overlap as "same" (ratio <= epsilon); it
    exists for fidelity experiments and is off by default because it makes
    near-identical shapes read as different. `chain_to_predecessor`
    compares each release against the immediately preceding shape instead
    of the stored representative, allowing slow drift to stay "same".
    """

    epsilon: float = EPSILON
    flip_inequality: bool = False
    chain_to_predecessor: bool = False


def overlap_ratio(a: Polygon, b: Polygon) -> float:
    """Intersection area over the larger of the two areas; 0 when both empty."""
    mx = max(a.area, b.area)
    if mx <= 0.0:
        return 0.0
    return intersection_area(a, b) / mx


def _same(ratio: float, epsilon: float, flip: bool) -> bool:
    return ratio <= epsilon if flip else ratio >= epsilon


def geometry_equivalent(
    a: Polygon, b: Polygon, epsilon: float = EPSILON, *, flip_inequality: bool = False
) -> bool:
    """True when the two shapes count as the same version of a lot."""
    if not 0.0 < epsilon <= 1.0:
        raise ValueError(f"epsilon must be in (0, 1], got {epsilon}")
    return _same(overlap_ratio(a, b), epsilon, flip_inequality)


class GeometryContainer:
    """Deduplicated shapes plus a (lot, release) -> shape index table.

    `ref[l, r]` is -1 where the lot does not exist. Named extra shapes
    (region boundaries) can be registered before the container is frozen;
    they live in the same store but never count toward redundancy.
    """

    def __init__(self, n_lots: int, n_releases: int):
        self.store = PolygonStore()
        self.ref = np.full((n_lots, n_releases), -1, dtype=np.int32)
        self.slots = 0
        self.firsts = 0
        self.lot_entries = 0
        self.bytes_before = 0
        self.extras: dict[str, int] = {}

    def shape(self, index: int) -> Polygon:
        return self.store.get(index)

    def lookup(self, lot: int, release: int) -> int:
        return int(self.ref[lot, release])

    def register_extra(self, name: str, poly: Polygon) -> int:
        """Store a named non-lot shape (idempotent per name)."""
        if name not in self.extras:
            self.extras[name] = self.store.append(poly)
        return self.extras[name]

    def freeze(self) -> None:
        self.store.finalize()

    @property
    def nbytes(self) -> int:
        return self.store.nbytes + self.ref.nbytes


@dataclass
class Pool:
    """One deduplicated attribute-set pool."""

    kind: AttributeKind
    attr_names: list[str]
    columns: dict[str, np.ndarray]
    ref: np.ndarray
    entries: int

    @property
    def row_bytes(self) -> int:
        return sum(col.dtype.itemsize for col in self.columns.values())

    @property
    def nbytes(self) -> int:
        return sum(col.nbytes for col in self.columns.values()) + self.ref.nbytes


class AttributeContainer:
    """Three pools sharing one slot/first census, plus decode vocabulary."""

    def __init__(self, pools: dict[AttributeKind, Pool], vocab: dict[str, list[str]],
                 slots: int, firsts: int):
        self.pools = pools
        self.vocab = vocab
        self.slots = slots
        self.firsts = firsts

    def lookup(self, kind: AttributeKind, lot: int, release: int) -> int:
        return int(self.pools[kind].ref[lot, release])

    def tuple_at(self, kind: AttributeKind, index: int) -> dict:
        """Decode one stored entry; invalid values come back as None."""
        pool = self.pools[kind]
        out = {}
        for name in pool.attr_names:
            v = pool.columns[name][index]
            if kind == AttributeKind.CATEGORICAL:
                out[name] = None if v < 0 else self.vocab[name][int(v)]
            else:
                out[name] = None if np.isnan(v) else float(v)
        return out

    @property
    def nbytes(self) -> int:
        return sum(p.nbytes for p in self.pools.values())


def dedup_geometries(seq: ReleaseSequence, options: DedupOptions | None = None) -> GeometryContainer:
    """Scan every lot timeline, storing a shape only when it really changed.

    Identical shapes are caught by a bitwise fingerprint before any
    clipping runs; the overlap ratio is only computed for slots whose
    coordinates differ from the comparison target.
    """
    opts = options or DedupOptions()
    if not 0.0 < opts.epsilon <= 1.0:
        raise ValueError(f"epsilon must be in (0, 1], got {opts.epsilon}")
    L, R = seq.n_lots, seq.n_releases
    gc = GeometryContainer(L, R)
    digests = [raw.shapes.shape_digests() for raw in seq.raws]
    gc.bytes_before = sum(
        sum(a.nbytes for a in raw.shapes.arrays) for raw in seq.raws
    )
    exists = seq.exists.tolist()
    rows = seq.row.tolist()
    ref = gc.ref
    store = gc.store

    for l in range(L):
        e = exists[l]
        rw = rows[l]
        rep_idx = -1
        cmp_digest = None
        cmp_poly: Polygon | None = None
        cmp_sh = None
        prev = False
        for r in range(R):
            if not e[r]:
                prev = False
                continue
            gc.slots += 1
            row = rw[r]
            d = digests[r][row]
            if not prev:
                gc.firsts += 1
                cmp_poly = seq.raws[r].shapes.get(row)
                rep_idx = store.append(cmp_poly)
                cmp_digest, cmp_sh = d, None
            elif opts.flip_inequality or d != cmp_digest:
                # the fingerprint shortcut must not mask the flipped rule,
                # under which even identical shapes compare "different"
                cur = seq.raws[r].shapes.get(row)
                if cmp_sh is None:
                    cmp_sh = to_shapely(cmp_poly)
                cur_sh = to_shapely(cur)
                mx = max(cmp_sh.area, cur_sh.area)
                ratio = intersection_area(cmp_sh, cur_sh) / mx if mx > 0 else 0.0
                if _same(ratio, opts.epsilon, opts.flip_inequality):
                    if opts.chain_to_predecessor:
                        cmp_digest, cmp_poly, cmp_sh = d, cur, cur_sh
                else:
                    rep_idx = store.append(cur)
                    cmp_digest, cmp_poly, cmp_sh = d, cur, cur_sh
            ref[l, r] = rep_idx
            prev = True

    gc.lot_entries = len(store)
    return gc


def dedup_attributes(seq: ReleaseSequence, schema: AttributeSchema | None = None) -> AttributeContainer:
    """Pool-wise vectorized scan; entries are numbered release-major."""
    schema = schema or seq.schema
    exists = seq.exists
    L, R = exists.shape
    slots = int(exists.sum())
    firsts = int(exists[:, 0].sum()) + int((exists[:, 1:] & ~exists[:, :-1]).sum())

    pools: dict[AttributeKind, Pool] = {}
    for kind in AttributeKind:
        names = schema.names(kind)
        categorical = kind == AttributeKind.CATEGORICAL
        aligned: dict[str, np.ndarray] = {}
        for name in names:
            if categorical:
                A = np.full((L, R), -1, dtype=np.int32)
            else:
                A = np.full((L, R), np.nan)
            for r in range(R):
                m = exists[:, r]
                col = (
                    seq.raws[r].categorical[name]
                    if categorical
                    else seq.raws[r].numeric[name]
                )
                A[m, r] = col[seq.row[m, r]]
            aligned[name] = A

        same_all = np.ones((L, max(R - 1, 0)), dtype=bool)
        for A in aligned.values():
            left, right = A[:, :-1], A[:, 1:]
            s = left == right
            if not categorical:
                s |= np.isnan(left) & np.isnan(right)
            same_all &= s

        new_entry = exists.copy()
        if R > 1:
            new_entry[:, 1:] = exists[:, 1:] & (~exists[:, :-1] | ~same_all)
        ids = np.cumsum(new_entry.T.ravel()).reshape(R, L) - 1

        ref = np.full((L, R), -1, dtype=np.int32)
        if R > 0:
            ref[:, 0] = np.where(new_entry[:, 0], ids[0], -1)
        for r in range(1, R):
            ref[:, r] = np.where(
                new_entry[:, r],
                ids[r],
                np.where(exists[:, r], ref[:, r - 1], -1),
            )

        r_idx, l_idx = np.nonzero(new_entry.T)
        columns = {name: aligned[name][l_idx, r_idx] for name in names}
        pools[kind] = Pool(
            kind=kind,
            attr_names=list(names),
            columns=columns,
            ref=ref,
            entries=len(l_idx),
        )

    return AttributeContainer(pools, dict(seq.vocab), slots, firsts)


@dataclass
class CategoryStats:
    stored: int
    slots: int
    firsts: int
    bytes_before: int
    bytes_after: int

    @property
    def fraction(self) -> float:
        comparisons = self.slots - self.firsts
        if comparisons <= 0:
            return 1.0
        changes = self.stored - self.firsts
        return min(1.0, max(0.0, 1.0 - changes / comparisons))


@dataclass
class RedundancyReport:
    categories: dict[str, CategoryStats] = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            name: {
                "redundant_fraction": stats.fraction,
                "stored_entries": stats.stored,
                "reference_slots": stats.slots,
                "first_occurrences": stats.firsts,
                "bytes_before": stats.bytes_before,
                "bytes_after": stats.bytes_after,
            }
            for name, stats in self.categories.items()
        }


def redundancy_report(gc: GeometryContainer, ac: AttributeContainer) -> RedundancyReport:
    report = RedundancyReport()
    report.categories["geometry"] = CategoryStats(
        stored=gc.lot_entries,
        slots=gc.slots,
        firsts=gc.firsts,
        bytes_before=gc.bytes_before,
        bytes_after=gc.nbytes,
    )
    for kind, pool in ac.pools.items():
        report.categories[kind.value] = CategoryStats(
            stored=pool.entries,
            slots=ac.slots,
            firsts=ac.firsts,
            bytes_before=ac.slots * pool.row_bytes,
            bytes_after=pool.nbytes,
        )
    return report
