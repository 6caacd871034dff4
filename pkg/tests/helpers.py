"""Builders for tiny handwritten corpora shared across test modules."""

import json

from chronicle.ingest import clean_records, consolidate, load_release
from chronicle.model import default_schema


def ring(x0, y0, side=1.0):
    """Closed square ring in GeoJSON coordinate order."""
    return [
        [x0, y0], [x0 + side, y0], [x0 + side, y0 + side], [x0, y0 + side], [x0, y0],
    ]


def feature(borough=1, block="00010", lot="0001", geom=None, sq=None, **attrs):
    """One lot feature; pass sq=(x0, y0, side) for a square at a location."""
    if geom is None:
        x0, y0, side = sq if sq is not None else (0.0, 0.0, 1.0)
        geom = {"type": "Polygon", "coordinates": [ring(x0, y0, side)]}
    props = {"borough": borough, "block": block, "lot": lot, **attrs}
    return {"type": "Feature", "properties": props, "geometry": geom}


def write_release_file(path, rows):
    with open(path, "w") as fh:
        for row in rows:
            fh.write(row if isinstance(row, str) else json.dumps(row))
            fh.write("\n")
    return path


def make_seq(tmp_path, frames, schema=None):
    """Load, clean, and consolidate [(ReleaseId, [feature, ...]), ...]."""
    schema = schema or default_schema()
    raws = []
    for i, (release, rows) in enumerate(frames):
        path = write_release_file(tmp_path / f"{release}a{i}.geojsonl", rows)
        raw = load_release(path, release, schema)
        raws.append(clean_records(raw)[0])
    return consolidate(raws)


# ---- the five-lot micro corpus ----------------------------------------------
#
#   lot  block  region  LOTAREA  ASSESSTOTAL     ASSESSLAND     LANDUSE
#   A    00010  west    100      1000            100            vacant -> commercial
#   B    00010  west    200      4000 (gap r2)   200            commercial
#   C    00020  east    300      never           50/75/0/30     industrial
#   D    00020  east    never    500             never          vacant
#   E    00020  east    0        700             never          vacant (enters r1)

MICRO_RELEASES = ["2004.1", "2004.2", "2005.1", "2005.2"]

_WEST = {"type": "Feature", "properties": {"name": "west"},
         "geometry": {"type": "Polygon",
                      "coordinates": [[[0, 0], [100, 0], [100, 100], [0, 100], [0, 0]]]}}
_EAST = {"type": "Feature", "properties": {"name": "east"},
         "geometry": {"type": "Polygon",
                      "coordinates": [[[100, 0], [400, 0], [400, 100], [100, 100], [100, 0]]]}}


def _micro_release(r):
    c_land = [50, 75, 0, 30][r]
    rows = [
        feature(block="00010", lot="0001", sq=(10, 10, 4), LOTAREA=100,
                ASSESSTOTAL=1000, ASSESSLAND=100, BUILTFAR=5.0,
                LANDUSE="vacant" if r == 0 else "commercial"),
        feature(block="00010", lot="0002", sq=(20, 10, 4), LOTAREA=200,
                ASSESSLAND=200, BUILTFAR=5.0, LANDUSE="commercial",
                **({} if r == 2 else {"ASSESSTOTAL": 4000})),
        feature(block="00020", lot="0001", sq=(150, 10, 4), LOTAREA=300,
                ASSESSLAND=c_land, BUILTFAR=5.0, LANDUSE="industrial"),
        feature(block="00020", lot="0002", sq=(160, 10, 4),
                ASSESSTOTAL=500, BUILTFAR=5.0, LANDUSE="vacant"),
    ]
    if r >= 1:
        rows.append(
            feature(block="00020", lot="0003", sq=(170, 10, 4), LOTAREA=0,
                    ASSESSTOTAL=700, BUILTFAR=5.0, LANDUSE="vacant")
        )
    return rows


def write_micro_corpus(root):
    """Write the five-lot corpus (plus a neighborhood sidecar) into root."""
    for r, rid in enumerate(MICRO_RELEASES):
        write_release_file(root / f"{rid}.geojsonl", _micro_release(r))
    (root / "neighborhoods.geojson").write_text(
        json.dumps({"type": "FeatureCollection", "features": [_WEST, _EAST]})
    )
    return root
