"""Binary snapshot of the preprocessed state.

Writing the same engine twice produces byte-identical files, and loading
one restores the full query surface (containers, reference tables, region
assignments) without touching the raw release files again. Raw per-release
rows are deliberately not retained; a loaded engine serves queries but
cannot re-run ingest-level reports.

Layout, all little-endian:

    magic            8 bytes  b"CHRSNAP1"
    version          u32
    section count    u32
    table of contents, one entry per section:
        name length  u16
        name         ascii
        offset       u64      absolute file offset
        length       u64      payload bytes
    section payloads, in table order

Sections are either raw numpy buffers (dtype and shape recorded in `meta`)
or canonical JSON (sorted keys, no whitespace). `meta` is always first.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .dedup import AttributeContainer, GeometryContainer, Pool
from .geolevels import LevelAssignment, RegionSet
from .geometry import Polygon, PolygonStore
from .ingest import ReleaseSequence
from .model import AttributeKind, AttributeSchema, LotId, ReleaseId

__all__ = ["save_snapshot", "load_snapshot", "SnapshotError", "MAGIC", "VERSION"]

MAGIC = b"CHRSNAP1"
VERSION = 1


class SnapshotError(ValueError):
    pass


def _jbytes(obj) -> bytes:
    return json.dumps(obj, sort_keys=True, separators=(",", ":")).encode()


def _poly_json(poly: Polygon | None):
    if poly is None:
        return None
    return [[ring.tolist() for ring in part] for part in poly.parts]


def _poly_from(obj) -> Polygon | None:
    if obj is None:
        return None
    return Polygon(obj)


# ---- writing ----------------------------------------------------------------

def save_snapshot(path, engine) -> int:
    """Serialize an engine's base state; returns bytes written."""
    seq, gc, ac = engine.seq, engine.gc, engine.ac
    sections: list[tuple[str, bytes]] = []

    meta = {
        "city_name": engine.city_name,
        "default_region_kind": engine.default_region_kind,
        "releases": [[r.year, r.half] for r in seq.releases],
        "schema": seq.schema.to_json(),
        "vocab": seq.vocab,
        "borough_names": {str(k): v for k, v in engine.borough_names.items()},
        "n_lots": seq.n_lots,
        "n_releases": seq.n_releases,
        "n_blocks": len(seq.blocks),
        "geometry": {
            "slots": gc.slots,
            "firsts": gc.firsts,
            "lot_entries": gc.lot_entries,
            "bytes_before": gc.bytes_before,
        },
        "attributes": {"slots": ac.slots, "firsts": ac.firsts},
        "pool_entries": {k.value: p.entries for k, p in ac.pools.items()},
        "region_kinds": sorted(engine.assignments),
    }
    sections.append(("meta", _jbytes(meta)))
    sections.append(
        ("lots", _jbytes({
            "borough": [lot.borough for lot in seq.lots],
            "block": [lot.block for lot in seq.lots],
            "lot": [lot.lot for lot in seq.lots],
        }))
    )
    sections.append(("blocks", _jbytes([[b, c] for b, c in seq.blocks])))
    sections.append(("exists", np.packbits(seq.exists).tobytes()))
    sections.append(("block_of", seq.block_of_lot.astype("<i4").tobytes()))
    sections.append(("borough_of", seq.borough_of_lot.astype("<i2").tobytes()))

    sections.append(("geo.ref", gc.ref.astype("<i4").tobytes()))
    part_off, ring_off, pt_off, coords = gc.store.arrays
    sections.append(("geo.part", part_off.astype("<i8").tobytes()))
    sections.append(("geo.ring", ring_off.astype("<i8").tobytes()))
    sections.append(("geo.pt", pt_off.astype("<i8").tobytes()))
    sections.append(("geo.coords", coords.astype("<f8").tobytes()))
    sections.append(("geo.extras", _jbytes(gc.extras)))

    for kind in AttributeKind:
        pool = ac.pools[kind]
        sections.append((f"pool.{kind.value}.ref", pool.ref.astype("<i4").tobytes()))
        for attr in seq.schema.names(kind):
            code = "<i4" if kind == AttributeKind.CATEGORICAL else "<f8"
            sections.append(
                (f"col.{kind.value}.{attr}", pool.columns[attr].astype(code).tobytes())
            )

    for kind in sorted(engine.assignments):
        assignment = engine.assignments[kind]
        sections.append(
            (f"asg.{kind}.map", assignment.block_region.astype("<i4").tobytes())
        )
        sections.append(
            (f"asg.{kind}.regions", _jbytes({
                "names": assignment.regions.names,
                "boundaries": [_poly_json(b) for b in assignment.regions.boundaries],
                "unassigned": {str(k): v for k, v in assignment.unassigned.items()},
            }))
        )

    sections.append(
        ("boundaries", _jbytes({
            "city": _poly_json(engine.city_boundary),
            "boroughs": {
                name: _poly_json(poly)
                for name, poly in engine.borough_boundaries.items()
            },
        }))
    )

    toc_size = sum(2 + len(name.encode()) + 16 for name, _ in sections)
    offset = len(MAGIC) + 8 + toc_size
    header = bytearray()
    header += MAGIC
    header += VERSION.to_bytes(4, "little")
    header += len(sections).to_bytes(4, "little")
    for name, payload in sections:
        raw = name.encode()
        header += len(raw).to_bytes(2, "little")
        header += raw
        header += offset.to_bytes(8, "little")
        header += len(payload).to_bytes(8, "little")
        offset += len(payload)

    out = Path(path)
    with out.open("wb") as fh:
        fh.write(bytes(header))
        for _, payload in sections:
            fh.write(payload)
    return offset


# ---- reading ----------------------------------------------------------------

def _read_toc(blob: bytes) -> dict[str, bytes]:
    if blob[: len(MAGIC)] != MAGIC:
        raise SnapshotError("not a snapshot file (bad magic)")
    version = int.from_bytes(blob[8:12], "little")
    if version != VERSION:
        raise SnapshotError(f"unsupported snapshot version {version}")
    count = int.from_bytes(blob[12:16], "little")
    pos = 16
    sections = {}
    for _ in range(count):
        n = int.from_bytes(blob[pos : pos + 2], "little")
        pos += 2
        name = blob[pos : pos + n].decode()
        pos += n
        off = int.from_bytes(blob[pos : pos + 8], "little")
        length = int.from_bytes(blob[pos + 8 : pos + 16], "little")
        pos += 16
        if off + length > len(blob):
            raise SnapshotError(f"section {name!r} runs past end of file")
        sections[name] = blob[off : off + length]
    return sections


def load_snapshot(path):
    """Rebuild an Engine from a snapshot file."""
    from .query import Engine

    blob = Path(path).read_bytes()
    sec = _read_toc(blob)

    def arr(name, dtype, shape=None):
        a = np.frombuffer(sec[name], dtype=dtype)
        # frombuffer views are read-only; copy so downstream code may own it
        a = a.copy()
        return a.reshape(shape) if shape is not None else a

    meta = json.loads(sec["meta"])
    L, R, B = meta["n_lots"], meta["n_releases"], meta["n_blocks"]
    schema = AttributeSchema.from_json(meta["schema"])
    releases = [ReleaseId(y, h) for y, h in meta["releases"]]

    seq = ReleaseSequence(releases, [], schema)
    lots_json = json.loads(sec["lots"])
    seq.lots = [
        LotId(b, bl, lt)
        for b, bl, lt in zip(lots_json["borough"], lots_json["block"], lots_json["lot"])
    ]
    seq.bbl_index = {lot.bbl: i for i, lot in enumerate(seq.lots)}
    seq.blocks = [(b, c) for b, c in json.loads(sec["blocks"])]
    seq.block_index = {key: i for i, key in enumerate(seq.blocks)}
    seq.block_of_lot = arr("block_of", "<i4")
    seq.borough_of_lot = arr("borough_of", "<i2")
    seq.exists = np.unpackbits(
        np.frombuffer(sec["exists"], dtype=np.uint8), count=L * R
    ).astype(bool).reshape(L, R)
    seq.vocab = meta["vocab"]

    gc = GeometryContainer(L, R)
    gc.ref = arr("geo.ref", "<i4", (L, R))
    gc.store = PolygonStore.from_arrays(
        arr("geo.part", "<i8"),
        arr("geo.ring", "<i8"),
        arr("geo.pt", "<i8"),
        arr("geo.coords", "<f8").reshape(-1, 2),
    )
    gc.extras = json.loads(sec["geo.extras"])
    g = meta["geometry"]
    gc.slots, gc.firsts = g["slots"], g["firsts"]
    gc.lot_entries, gc.bytes_before = g["lot_entries"], g["bytes_before"]

    pools = {}
    for kind in AttributeKind:
        names = schema.names(kind)
        entries = meta["pool_entries"][kind.value]
        code = "<i4" if kind == AttributeKind.CATEGORICAL else "<f8"
        columns = {
            attr: arr(f"col.{kind.value}.{attr}", code, (entries,)) for attr in names
        }
        pools[kind] = Pool(
            kind=kind,
            attr_names=names,
            columns=columns,
            ref=arr(f"pool.{kind.value}.ref", "<i4", (L, R)),
            entries=entries,
        )
    ac = AttributeContainer(
        pools, seq.vocab, meta["attributes"]["slots"], meta["attributes"]["firsts"]
    )

    assignments = {}
    for kind in meta["region_kinds"]:
        rj = json.loads(sec[f"asg.{kind}.regions"])
        regions = RegionSet(
            kind, list(zip(rj["names"], (_poly_from(b) for b in rj["boundaries"])))
        )
        assignment = LevelAssignment(regions, arr(f"asg.{kind}.map", "<i4", (B, R)))
        assignment.unassigned.update(
            {ReleaseId.parse(k): v for k, v in rj["unassigned"].items()}
        )
        assignments[kind] = assignment

    bj = json.loads(sec["boundaries"])
    return Engine(
        seq,
        gc,
        ac,
        assignments,
        city_name=meta["city_name"],
        borough_names={int(k): v for k, v in meta["borough_names"].items()},
        borough_boundaries={
            name: _poly_from(p) for name, p in bj["boroughs"].items()
        },
        city_boundary=_poly_from(bj["city"]),
        default_region_kind=meta["default_region_kind"],
    )
