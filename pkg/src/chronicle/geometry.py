"""Planar polygon primitives: shoelace areas, containment, ragged storage.

Shapes are polygons or multipolygons in an already-projected planar CRS.
Internally every ring is stored *open* (no repeated closing vertex) as an
(n, 2) float64 array; serialized GeoJSON form is explicitly closed. The
first ring of a part is its outer boundary, the rest are holes.
"""

from __future__ import annotations

import hashlib
import struct
from typing import Iterable, Iterator

import numpy as np

__all__ = [
    "Polygon",
    "PolygonStore",
    "ring_area",
    "point_in_polygon",
    "intersection_area",
    "to_shapely",
    "from_shapely",
]


def _as_open_ring(points) -> np.ndarray:
    ring = np.asarray(points, dtype=np.float64)
    if ring.ndim != 2 or ring.shape[1] != 2 or ring.shape[0] < 1:
        raise ValueError("ring must be an (n, 2) coordinate array")
    if ring.shape[0] > 1 and np.array_equal(ring[0], ring[-1]):
        ring = ring[:-1]
    return ring


def ring_area(ring: np.ndarray) -> float:
    """Signed shoelace area of an open ring (positive = counter-clockwise)."""
    x = ring[:, 0]
    y = ring[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))


class Polygon:
    """A polygon or multipolygon: parts, each a list of rings (outer first)."""

    __slots__ = ("parts",)

    def __init__(self, parts: Iterable[Iterable[np.ndarray]]):
        self.parts: tuple[tuple[np.ndarray, ...], ...] = tuple(
            tuple(np.asarray(r, dtype=np.float64) for r in part) for part in parts
        )
        if not self.parts or any(not part for part in self.parts):
            raise ValueError("polygon needs at least one part with an outer ring")

    @classmethod
    def from_rings(cls, *rings) -> "Polygon":
        """Single-part polygon from an outer ring plus optional holes."""
        return cls([[_as_open_ring(r) for r in rings]])

    @classmethod
    def from_geojson(cls, geometry: dict) -> "Polygon":
        """Parse a GeoJSON Polygon/MultiPolygon geometry mapping.

        Raises ValueError on anything structurally unusable; semantic
        validity (degenerate rings etc.) is the cleaning stage's job.
        """
        if not isinstance(geometry, dict):
            raise ValueError("geometry is not an object")
        gtype = geometry.get("type")
        coords = geometry.get("coordinates")
        if gtype == "Polygon":
            part_list = [coords]
        elif gtype == "MultiPolygon":
            part_list = coords
        else:
            raise ValueError(f"unsupported geometry type {gtype!r}")
        if not isinstance(part_list, (list, tuple)) or not part_list:
            raise ValueError("empty coordinates")
        parts = []
        for rings in part_list:
            if not isinstance(rings, (list, tuple)) or not rings:
                raise ValueError("part without rings")
            parts.append([_as_open_ring(r) for r in rings])
        return cls(parts)

    def to_geojson(self) -> dict:
        """Serialize with explicitly closed rings."""
        closed = [
            [np.vstack([r, r[:1]]).tolist() for r in part] for part in self.parts
        ]
        if len(closed) == 1:
            return {"type": "Polygon", "coordinates": closed[0]}
        return {"type": "MultiPolygon", "coordinates": closed}

    def rings(self) -> Iterator[np.ndarray]:
        for part in self.parts:
            yield from part

    @property
    def area(self) -> float:
        """Planar area: outer rings minus holes, per part."""
        total = 0.0
        for part in self.parts:
            total += abs(ring_area(part[0]))
            for hole in part[1:]:
                total -= abs(ring_area(hole))
        return total

    @property
    def bounds(self) -> tuple[float, float, float, float]:
        pts = np.vstack([r for r in self.rings()])
        return (
            float(pts[:, 0].min()),
            float(pts[:, 1].min()),
            float(pts[:, 0].max()),
            float(pts[:, 1].max()),
        )

    def centroid(self) -> tuple[float, float]:
        """Area-weighted centroid over outer rings (holes ignored)."""
        ax = ay = aw = 0.0
        for part in self.parts:
            ring = part[0]
            x, y = ring[:, 0], ring[:, 1]
            xn, yn = np.roll(x, -1), np.roll(y, -1)
            cross = x * yn - xn * y
            a = cross.sum() / 2.0
            if a == 0.0:
                continue
            ax += float(((x + xn) * cross).sum()) / 6.0
            ay += float(((y + yn) * cross).sum()) / 6.0
            aw += a
        if aw == 0.0:
            pts = np.vstack([p[0] for p in self.parts])
            return float(pts[:, 0].mean()), float(pts[:, 1].mean())
        return ax / aw, ay / aw

    def normalized(self) -> "Polygon":
        """Orient outer rings counter-clockwise and holes clockwise."""
        parts = []
        for part in self.parts:
            rings = []
            for i, ring in enumerate(part):
                a = ring_area(ring)
                want_ccw = i == 0
                if (a > 0) != want_ccw and a != 0:
                    ring = ring[::-1].copy()
                rings.append(ring)
            parts.append(rings)
        return Polygon(parts)

    def invalid_reason(self) -> str | None:
        """None if all rings satisfy the shape invariants, else why not."""
        for ring in self.rings():
            if not np.isfinite(ring).all():
                return "degenerate ring"
            if len(np.unique(ring, axis=0)) < 3:
                return "degenerate ring"
        for part in self.parts:
            if abs(ring_area(part[0])) == 0.0:
                return "degenerate ring"
        return None

    def digest(self) -> bytes:
        """Bitwise fingerprint of structure + coordinates."""
        h = hashlib.blake2b(digest_size=16)
        for part in self.parts:
            h.update(struct.pack("<i", len(part)))
            for ring in part:
                h.update(struct.pack("<i", len(ring)))
                h.update(np.ascontiguousarray(ring).tobytes())
        return h.digest()

    def __eq__(self, other) -> bool:
        if not isinstance(other, Polygon):
            return NotImplemented
        return self.digest() == other.digest()

    def __hash__(self) -> int:
        return hash(self.digest())

    def __repr__(self) -> str:
        n = sum(len(r) for r in self.rings())
        return f"Polygon(parts={len(self.parts)}, points={n}, area={self.area:.3g})"


def _point_on_segment(px, py, x1, y1, x2, y2) -> bool:
    cross = (x2 - x1) * (py - y1) - (y2 - y1) * (px - x1)
    if cross != 0.0:
        return False
    return min(x1, x2) <= px <= max(x1, x2) and min(y1, y2) <= py <= max(y1, y2)


def point_in_polygon(point: tuple[float, float], poly: Polygon) -> bool:
    """Even-odd containment over all rings; boundary points count as inside.

    Holes are excluded automatically: a point inside a hole crosses both the
    outer ring and the hole ring an odd number of times each, so the parity
    comes out even.
    """
    px, py = float(point[0]), float(point[1])
    inside = False
    for ring in poly.rings():
        n = len(ring)
        j = n - 1
        for i in range(n):
            x1, y1 = ring[j, 0], ring[j, 1]
            x2, y2 = ring[i, 0], ring[i, 1]
            if _point_on_segment(px, py, x1, y1, x2, y2):
                return True
            if (y1 > py) != (y2 > py):
                x_cross = x1 + (py - y1) * (x2 - x1) / (y2 - y1)
                if px < x_cross:
                    inside = not inside
            j = i
    return inside


def representative_point(poly: Polygon) -> tuple[float, float]:
    """A point guaranteed inside the polygon.

    Uses the centroid when it falls inside (the common case for parcels);
    otherwise probes fan-triangle centroids of the largest part until one
    lands inside.
    """
    c = poly.centroid()
    if point_in_polygon(c, poly):
        return c
    part = max(poly.parts, key=lambda p: abs(ring_area(p[0])))
    ring = part[0]
    n = len(ring)
    for i in range(1, n - 1):
        tx = (ring[0, 0] + ring[i, 0] + ring[i + 1, 0]) / 3.0
        ty = (ring[0, 1] + ring[i, 1] + ring[i + 1, 1]) / 3.0
        if point_in_polygon((tx, ty), poly):
            return tx, ty
    # Last resort: a vertex is on the boundary, which counts as inside.
    return float(ring[0, 0]), float(ring[0, 1])


# -- shapely bridge (engine-side clipping; the test oracle never uses this) --

def to_shapely(poly: Polygon):
    import shapely

    parts = [
        shapely.Polygon(part[0], holes=[h for h in part[1:]]) for part in poly.parts
    ]
    if len(parts) == 1:
        return parts[0]
    return shapely.MultiPolygon([sp for sp in parts])


def from_shapely(geom) -> Polygon:
    import shapely

    if geom.is_empty:
        raise ValueError("empty geometry")
    if isinstance(geom, shapely.Polygon):
        polys = [geom]
    elif isinstance(geom, shapely.MultiPolygon):
        polys = list(geom.geoms)
    else:
        raise ValueError(f"not a polygonal geometry: {geom.geom_type}")
    parts = []
    for p in polys:
        rings = [_as_open_ring(np.asarray(p.exterior.coords))]
        rings += [_as_open_ring(np.asarray(i.coords)) for i in p.interiors]
        parts.append(rings)
    return Polygon(parts)


def intersection_area(a, b) -> float:
    """Area of the intersection of two shapes (Polygon or shapely geometry)."""
    import shapely

    ga = a if isinstance(a, shapely.geometry.base.BaseGeometry) else to_shapely(a)
    gb = b if isinstance(b, shapely.geometry.base.BaseGeometry) else to_shapely(b)
    try:
        return float(ga.intersection(gb).area)
    except shapely.errors.GEOSException:
        # Real-world parcel files occasionally carry self-touching rings.
        return float(shapely.make_valid(ga).intersection(shapely.make_valid(gb)).area)


def simplify(poly: Polygon, tolerance: float) -> Polygon:
    """Topology-preserving vertex reduction for coarse zoom levels."""
    simplified = to_shapely(poly).simplify(tolerance, preserve_topology=True)
    if simplified.is_empty:
        return poly
    try:
        return from_shapely(simplified)
    except ValueError:
        return poly


class PolygonStore:
    """Append-only ragged storage for many shapes without per-shape objects.

    Grows through python lists while building; `finalize()` packs everything
    into flat numpy arrays (and is idempotent). Shapes are addressed by the
    integer index returned from `append`.
    """

    def __init__(self):
        self._parts_per_shape: list[int] = []
        self._rings_per_part: list[int] = []
        self._points_per_ring: list[int] = []
        self._coords: list[np.ndarray] = []
        self._digests: list[bytes] = []
        self._packed: tuple | None = None

    def __len__(self) -> int:
        return len(self._parts_per_shape)

    def append(self, poly: Polygon) -> int:
        if self._packed is not None:
            raise RuntimeError("store is finalized")
        self._parts_per_shape.append(len(poly.parts))
        for part in poly.parts:
            self._rings_per_part.append(len(part))
            for ring in part:
                self._points_per_ring.append(len(ring))
                self._coords.append(np.ascontiguousarray(ring, dtype=np.float64))
        self._digests.append(None)
        return len(self._parts_per_shape) - 1

    def digest(self, i: int) -> bytes:
        if i >= len(self._digests) or self._digests[i] is None:
            # Stores rebuilt from packed arrays compute digests on demand.
            while len(self._digests) < len(self):
                self._digests.append(None)
            self._digests[i] = self.get(i).digest()
        return self._digests[i]

    def finalize(self) -> None:
        if self._packed is not None:
            return
        def offsets(counts):
            out = np.zeros(len(counts) + 1, dtype=np.int64)
            np.cumsum(counts, out=out[1:])
            return out

        coords = (
            np.concatenate(self._coords, axis=0)
            if self._coords
            else np.empty((0, 2), dtype=np.float64)
        )
        self._packed = (
            offsets(np.asarray(self._parts_per_shape, dtype=np.int64)),
            offsets(np.asarray(self._rings_per_part, dtype=np.int64)),
            offsets(np.asarray(self._points_per_ring, dtype=np.int64)),
            coords,
        )
        self._coords = []

    def get(self, i: int) -> Polygon:
        if self._packed is None:
            self.finalize()
        part_off, ring_off, pt_off, coords = self._packed
        parts = []
        for p in range(part_off[i], part_off[i + 1]):
            rings = [
                coords[pt_off[r]:pt_off[r + 1]]
                for r in range(ring_off[p], ring_off[p + 1])
            ]
            parts.append(rings)
        return Polygon(parts)

    @property
    def arrays(self) -> tuple:
        if self._packed is None:
            self.finalize()
        return self._packed

    def subset(self, keep, flip_rings=()) -> "PolygonStore":
        """New store with only the given shapes, reversing the listed rings."""
        part_off, ring_off, pt_off, coords = self.arrays
        flip = set(flip_rings)
        out = PolygonStore()
        for s in keep:
            parts = []
            for p in range(part_off[s], part_off[s + 1]):
                rings = []
                for r in range(ring_off[p], ring_off[p + 1]):
                    seg = coords[pt_off[r]:pt_off[r + 1]]
                    rings.append(seg[::-1] if r in flip else seg)
                parts.append(rings)
            out.append(Polygon(parts))
        out.finalize()
        return out

    def shape_digests(self) -> list[bytes]:
        """Bitwise fingerprints of every shape, computed in bulk.

        Only comparable with other fingerprints from this method; equality
        means identical part/ring structure and coordinate bytes.
        """
        part_off, ring_off, pt_off, coords = self.arrays
        rings_per_part = np.diff(ring_off)
        pts_per_ring = np.diff(pt_off)
        out = []
        for s in range(len(self)):
            p0, p1 = part_off[s], part_off[s + 1]
            r0, r1 = ring_off[p0], ring_off[p1]
            h = hashlib.blake2b(digest_size=16)
            h.update(rings_per_part[p0:p1].tobytes())
            h.update(pts_per_ring[r0:r1].tobytes())
            h.update(coords[pt_off[r0]:pt_off[r1]].tobytes())
            out.append(h.digest())
        return out

    @classmethod
    def from_arrays(cls, part_off, ring_off, pt_off, coords) -> "PolygonStore":
        store = cls()
        store._parts_per_shape = np.diff(part_off).tolist()
        store._packed = (
            np.asarray(part_off, dtype=np.int64),
            np.asarray(ring_off, dtype=np.int64),
            np.asarray(pt_off, dtype=np.int64),
            np.asarray(coords, dtype=np.float64).reshape(-1, 2),
        )
        return store

    @property
    def nbytes(self) -> int:
        if self._packed is None:
            self.finalize()
        part_off, ring_off, pt_off, coords = self._packed
        base = part_off.nbytes + ring_off.nbytes + pt_off.nbytes + coords.nbytes
        return base + sum(16 for d in self._digests if d is not None)
