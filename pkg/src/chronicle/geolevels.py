"""Assign blocks to enclosing regions (neighborhoods or districts).

Assignment is per block and per release: a deterministic pseudo-random
representative lot is chosen among the block's lots existing in that
release, and the block goes to the first region whose boundary contains
the representative's interior point. All lots of a block always share
the block's assignment.
"""

from __future__ import annotations

import hashlib
import json
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .geometry import Polygon, point_in_polygon, representative_point
from .ingest import ReleaseSequence

__all__ = ["UNASSIGNED", "RegionSet", "LevelAssignment", "assign_blocks"]

UNASSIGNED = "(unassigned)"

REGION_KINDS = ("neighborhood", "community-district")


class RegionSet:
    """Named region boundaries of one kind, in first-wins priority order."""

    def __init__(self, kind: str, regions: list[tuple[str, Polygon]]):
        if kind not in REGION_KINDS:
            raise ValueError(f"unknown region kind {kind!r}")
        self.kind = kind
        self.names: list[str] = []
        self.boundaries: list[Polygon] = []
        for name, boundary in regions:
            if name == UNASSIGNED:
                raise ValueError(f"region name {UNASSIGNED!r} is reserved")
            if name in self.names:
                raise ValueError(f"duplicate region name {name!r}")
            reason = boundary.invalid_reason()
            if reason is not None:
                raise ValueError(f"region {name!r} boundary invalid: {reason}")
            self.names.append(name)
            self.boundaries.append(boundary)
        self._bounds = (
            np.asarray([b.bounds for b in self.boundaries])
            if self.boundaries
            else np.empty((0, 4))
        )

    def __len__(self) -> int:
        return len(self.names)

    def boundary_of(self, name: str) -> Polygon:
        return self.boundaries[self.names.index(name)]

    def locate(self, point: tuple[float, float]) -> int:
        """Index of the first region containing the point, or -1."""
        x, y = point
        b = self._bounds
        hits = np.nonzero(
            (b[:, 0] <= x) & (x <= b[:, 2]) & (b[:, 1] <= y) & (y <= b[:, 3])
        )[0]
        for i in hits:
            if point_in_polygon(point, self.boundaries[i]):
                return int(i)
        return -1

    @classmethod
    def load(cls, path: str | Path, kind: str) -> "RegionSet":
        """Read a GeoJSON FeatureCollection with a `name` property per feature."""
        data = json.loads(Path(path).read_text())
        features = data.get("features")
        if data.get("type") != "FeatureCollection" or features is None:
            raise ValueError(f"{path}: not a GeoJSON FeatureCollection")
        regions = []
        for feature in features:
            props = feature.get("properties") or {}
            name = props.get("name")
            if name is None:
                raise ValueError(f"{path}: feature without a name property")
            regions.append((str(name), Polygon.from_geojson(feature["geometry"])))
        return cls(kind, regions)

    def to_geojson(self) -> dict:
        return {
            "type": "FeatureCollection",
            "features": [
                {
                    "type": "Feature",
                    "properties": {"name": name},
                    "geometry": boundary.to_geojson(),
                }
                for name, boundary in zip(self.names, self.boundaries)
            ],
        }


@dataclass
class LevelAssignment:
    """block x release -> region index (-1 unassigned, -2 block absent)."""

    regions: RegionSet
    block_region: np.ndarray
    unassigned: Counter = field(default_factory=Counter)

    def region_name(self, block: int, r: int) -> str | None:
        idx = self.block_region[block, r]
        if idx == -2:
            return None
        return UNASSIGNED if idx == -1 else self.regions.names[idx]


def _representative_index(seed: int, block_key: tuple[int, str], bbls: list[str]) -> int:
    # Hash-based choice so the pick survives process restarts and does not
    # depend on PYTHONHASHSEED or iteration order.
    borough, block = block_key
    h = hashlib.blake2b(digest_size=8)
    h.update(f"{seed}|{borough}|{block}|".encode())
    h.update("|".join(bbls).encode())
    return int.from_bytes(h.digest(), "little") % len(bbls)


def assign_blocks(seq: ReleaseSequence, regions: RegionSet, seed: int) -> LevelAssignment:
    """Assign every block present in each release to at most one region."""
    B, R = len(seq.blocks), seq.n_releases
    out = np.full((B, R), -2, dtype=np.int32)
    assignment = LevelAssignment(regions, out)

    order = np.argsort(seq.block_of_lot, kind="stable")
    block_sorted = seq.block_of_lot[order]
    starts = np.searchsorted(block_sorted, np.arange(B))
    ends = np.searchsorted(block_sorted, np.arange(B) + 1)
    lots_by_block = [order[s:e] for s, e in zip(starts, ends)]

    bbls = [lot.bbl for lot in seq.lots]
    for r in range(R):
        exists = seq.exists[:, r]
        for b in range(B):
            members = lots_by_block[b]
            live = members[exists[members]]
            if len(live) == 0:
                continue
            ranked = sorted(live.tolist(), key=lambda i: bbls[i])
            pick = ranked[
                _representative_index(seed, seq.blocks[b], [bbls[i] for i in ranked])
            ]
            point = representative_point(seq.polygon(pick, r))
            idx = regions.locate(point)
            out[b, r] = idx
            if idx < 0:
                assignment.unassigned[seq.releases[r]] += 1
    return assignment
