"""Versioned land-parcel storage: dedup containers, level index, queries."""

from .bench import BenchReport, run_bench
from .dedup import (
    EPSILON,
    AttributeContainer,
    DedupOptions,
    GeometryContainer,
    RedundancyReport,
    dedup_attributes,
    dedup_geometries,
    geometry_equivalent,
    overlap_ratio,
    redundancy_report,
)
from .geolevels import UNASSIGNED, LevelAssignment, RegionSet, assign_blocks
from .geometry import Polygon, PolygonStore
from .index import IndexBuildError, PathNotFound, Tree, TreeOptions, build_index
from .ingest import (
    IngestError,
    RawRelease,
    RejectionReport,
    ReleaseSequence,
    clean_records,
    consolidate,
    discover_releases,
    load_release,
    load_renames,
    write_geojsonl,
)
from .model import (
    AttributeKind,
    AttributeSchema,
    LotId,
    ReleaseId,
    default_schema,
)
from .oracle import Oracle
from .pipeline import PipelineResult, build_engine
from .query import (
    AGGREGATE_FNS,
    DERIVED_ATTRIBUTES,
    Engine,
    FilterError,
    FilterExpression,
    Histogram,
    InvalidRelease,
    MatrixSlice,
    QueryError,
    QueryTypeError,
    SeriesSlice,
    UnknownAttribute,
)
from .server import SessionState, create_app
from .snapshot import SnapshotError, load_snapshot, save_snapshot
from .synth import GeneratorParams, SyntheticCorpus, generate_synthetic, write_corpus

__version__ = "0.1.0"

__all__ = [
    "AGGREGATE_FNS",
    "AttributeContainer",
    "AttributeKind",
    "AttributeSchema",
    "BenchReport",
    "DedupOptions",
    "DERIVED_ATTRIBUTES",
    "EPSILON",
    "Engine",
    "FilterError",
    "FilterExpression",
    "GeneratorParams",
    "GeometryContainer",
    "Histogram",
    "IndexBuildError",
    "IngestError",
    "InvalidRelease",
    "LevelAssignment",
    "LotId",
    "MatrixSlice",
    "Oracle",
    "PathNotFound",
    "PipelineResult",
    "Polygon",
    "PolygonStore",
    "QueryError",
    "QueryTypeError",
    "RawRelease",
    "RedundancyReport",
    "RegionSet",
    "RejectionReport",
    "ReleaseId",
    "ReleaseSequence",
    "SeriesSlice",
    "SessionState",
    "SnapshotError",
    "SyntheticCorpus",
    "Tree",
    "TreeOptions",
    "UNASSIGNED",
    "UnknownAttribute",
    "assign_blocks",
    "build_engine",
    "build_index",
    "clean_records",
    "consolidate",
    "create_app",
    "dedup_attributes",
    "dedup_geometries",
    "default_schema",
    "discover_releases",
    "generate_synthetic",
    "geometry_equivalent",
    "load_release",
    "load_renames",
    "load_snapshot",
    "overlap_ratio",
    "redundancy_report",
    "run_bench",
    "save_snapshot",
    "write_corpus",
    "write_geojsonl",
]
