"""End-to-end assembly: a corpus directory in, a ready query engine out.

A corpus directory holds `<year>.<half>.geojsonl` release files plus
optional boundary collections (`neighborhoods.geojson`,
`community-districts.geojson`, `boroughs.geojson`, `city.geojson`) and an
optional `manifest.json` with display names. Missing boundary files just
mean the corresponding level stays unassigned.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from pathlib import Path

from .dedup import (
    DedupOptions,
    RedundancyReport,
    dedup_attributes,
    dedup_geometries,
    redundancy_report,
)
from .geolevels import REGION_KINDS, RegionSet, assign_blocks
from .geometry import Polygon
from .ingest import (
    IngestError,
    RejectionReport,
    clean_records,
    consolidate,
    discover_releases,
    load_release,
)
from .model import AttributeSchema, default_schema
from .query import Engine

__all__ = ["PipelineResult", "build_engine", "REGION_FILES"]

REGION_FILES = {
    "neighborhood": "neighborhoods.geojson",
    "community-district": "community-districts.geojson",
}


@dataclass
class PipelineResult:
    engine: Engine
    rejections: list[RejectionReport]
    redundancy: RedundancyReport
    timings: dict[str, float] = field(default_factory=dict)

    @property
    def total_seconds(self) -> float:
        return sum(self.timings.values())


def _load_feature_collection(path: Path) -> list[tuple[str, Polygon]]:
    data = json.loads(path.read_text())
    out = []
    for feature in data.get("features", []):
        name = feature.get("properties", {}).get("name")
        if name is None:
            continue
        out.append((name, Polygon.from_geojson(feature["geometry"])))
    return out


def build_engine(
    corpus_dir: str | Path,
    *,
    schema: AttributeSchema | None = None,
    renames: dict[str, str] | None = None,
    dedup_options: DedupOptions | None = None,
    seed: int = 0,
    default_region_kind: str = "neighborhood",
) -> PipelineResult:
    """Run the full preprocessing chain over one corpus directory."""
    directory = Path(corpus_dir)
    schema = schema or default_schema()
    timings: dict[str, float] = {}

    t0 = time.perf_counter()
    found = discover_releases(directory)
    if not found:
        raise IngestError(f"no release files in {directory}")
    raws = []
    rejections = []
    for release, path in found:
        raw = load_release(path, release, schema, renames)
        cleaned, report = clean_records(raw)
        raws.append(cleaned)
        rejections.append(report)
    timings["load"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    seq = consolidate(raws)
    timings["consolidate"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    gc = dedup_geometries(seq, dedup_options)
    timings["dedup_geometry"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    ac = dedup_attributes(seq)
    timings["dedup_attributes"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    assignments = {}
    for kind in REGION_KINDS:
        fname = directory / REGION_FILES[kind]
        regions = (
            RegionSet.load(fname, kind) if fname.exists() else RegionSet(kind, [])
        )
        assignments[kind] = assign_blocks(seq, regions, seed)
    timings["assign"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    city_name = "city"
    city_boundary = None
    city_file = directory / "city.geojson"
    if city_file.exists():
        features = _load_feature_collection(city_file)
        if features:
            city_name, city_boundary = features[0]

    borough_boundaries: dict[str, Polygon] = {}
    borough_file = directory / "boroughs.geojson"
    if borough_file.exists():
        borough_boundaries = dict(_load_feature_collection(borough_file))

    borough_names: dict[int, str] = {}
    manifest_file = directory / "manifest.json"
    if manifest_file.exists():
        manifest = json.loads(manifest_file.read_text())
        raw_names = manifest.get("layout", {}).get("borough_names", {})
        borough_names = {int(k): v for k, v in raw_names.items()}

    if default_region_kind not in assignments:
        default_region_kind = next(iter(assignments))
    engine = Engine(
        seq,
        gc,
        ac,
        assignments,
        city_name=city_name,
        borough_names=borough_names,
        borough_boundaries=borough_boundaries,
        city_boundary=city_boundary,
        default_region_kind=default_region_kind,
    )
    timings["index"] = time.perf_counter() - t0

    return PipelineResult(
        engine=engine,
        rejections=rejections,
        redundancy=redundancy_report(gc, ac),
        timings=timings,
    )
