"""Command-line entry points.

Exit codes: 0 success, 1 usage error, 2 data error (unreadable or
inconsistent inputs), 3 budget violation from the benchmark gates.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .dedup import DedupOptions, EPSILON
from .ingest import (
    IngestError,
    clean_records,
    consolidate,
    discover_releases,
    load_release,
    load_renames,
)
from .model import AttributeSchema, default_schema
from .pipeline import REGION_FILES, build_engine
from .snapshot import SnapshotError, load_snapshot, save_snapshot

__all__ = ["main"]


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors; the contract here reserves 2 for
    # data problems, so usage failures are remapped to 1
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _build_parser() -> _Parser:
    parser = _Parser(prog="chronicle", description=__doc__)
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("ingest", help="preprocess a corpus into a snapshot")
    p.add_argument("corpus", help="directory of <year>.<half>.geojsonl releases")
    p.add_argument("-o", "--output", required=True, help="snapshot file to write")
    p.add_argument("--schema", help="attribute schema JSON (default: built-in)")
    p.add_argument("--renames", help="CSV of source->canonical attribute names")
    p.add_argument("--epsilon", type=float, default=EPSILON,
                   help="overlap ratio at and above which shapes are the same")
    p.add_argument("--flip-inequality", action="store_true",
                   help="treat ratios at or below epsilon as the same (fidelity experiment)")
    p.add_argument("--chain-to-predecessor", action="store_true",
                   help="compare each release to its predecessor instead of the stored representative")
    p.add_argument("--seed", type=int, default=0, help="region assignment seed")
    p.add_argument("--report", help="also write the full ingest report as JSON")

    p = sub.add_parser("synth", help="generate a synthetic corpus")
    p.add_argument("output", help="directory to write the corpus into")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--lots", type=int, default=100_000)
    p.add_argument("--releases", type=int, default=20)
    p.add_argument("--boroughs", type=int, default=5)
    p.add_argument("--neighborhoods", type=int, default=8,
                   help="neighborhoods per borough")
    p.add_argument("--lots-per-block", type=int, default=25)
    p.add_argument("--split-prob", type=float, default=0.0015)
    p.add_argument("--merge-prob", type=float, default=0.0015)
    p.add_argument("--invalid-rate", type=float, default=0.02)

    p = sub.add_parser("bench", help="latency and memory budget checks")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--snapshot", help="benchmark a saved snapshot")
    src.add_argument("--corpus", help="preprocess a corpus, then benchmark")
    p.add_argument("--trials", type=int, default=10)
    p.add_argument("--attribute", default="ASSESSTOTAL")
    p.add_argument("--fn", default="sum")
    p.add_argument("--oracle", action="store_true",
                   help="cross-check timed aggregates against the naive scan "
                        "(corpus mode only)")
    p.add_argument("--json", action="store_true", help="machine-readable output")

    p = sub.add_parser("serve", help="run the HTTP API")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--snapshot", help="serve a saved snapshot")
    src.add_argument("--corpus", help="preprocess and serve a corpus directory")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8801)
    p.add_argument("--static", help="directory of UI assets to serve at /")

    p = sub.add_parser("oracle", help="answer one query by naive full scan")
    p.add_argument("corpus", help="corpus directory to scan")
    p.add_argument("--query", required=True,
                   help="query JSON, or @file to read it from a file")
    p.add_argument("--seed", type=int, default=0, help="region assignment seed")

    return parser


# ---- commands ---------------------------------------------------------------

def _load_schema(args) -> AttributeSchema:
    return AttributeSchema.load(args.schema) if args.schema else default_schema()


def cmd_ingest(args) -> int:
    renames = load_renames(args.renames) if args.renames else None
    options = DedupOptions(
        epsilon=args.epsilon,
        flip_inequality=args.flip_inequality,
        chain_to_predecessor=args.chain_to_predecessor,
    )
    result = build_engine(
        args.corpus,
        schema=_load_schema(args),
        renames=renames,
        dedup_options=options,
        seed=args.seed,
    )
    size = save_snapshot(args.output, result.engine)

    for report in result.rejections:
        dropped = dict(report.load_dropped) | dict(report.dropped)
        note = f" dropped {dropped}" if dropped else ""
        print(f"{report.release}: kept {report.kept_count}/{report.input_count}{note}")
    print("redundancy:")
    for name, stats in result.redundancy.categories.items():
        print(f"  {name}: {stats.fraction:.3f}")
    print(f"timings: " + ", ".join(f"{k} {v:.2f}s" for k, v in result.timings.items()))
    print(f"snapshot: {args.output} ({size} bytes)")

    if args.report:
        doc = {
            "rejections": [
                {
                    "release": str(rep.release),
                    "input": rep.input_count,
                    "kept": rep.kept_count,
                    "dropped": dict(rep.dropped),
                    "load_dropped": dict(rep.load_dropped),
                }
                for rep in result.rejections
            ],
            "redundancy": result.redundancy.to_json(),
            "timings": result.timings,
            "snapshot_bytes": size,
        }
        Path(args.report).write_text(json.dumps(doc, indent=2))
    return 0


def cmd_synth(args) -> int:
    from .synth import GeneratorParams, generate_synthetic, write_corpus

    params = GeneratorParams(
        lots=args.lots,
        releases=args.releases,
        boroughs=args.boroughs,
        neighborhoods_per_borough=args.neighborhoods,
        lots_per_block=args.lots_per_block,
        split_prob=args.split_prob,
        merge_prob=args.merge_prob,
        invalid_rate=args.invalid_rate,
    )
    try:
        params.validate()
    except ValueError as exc:
        # bad flag values are usage problems, not data problems
        print(f"chronicle synth: error: {exc}", file=sys.stderr)
        return 1
    corpus = generate_synthetic(params, args.seed)
    write_corpus(corpus, args.output)
    print(
        f"wrote {len(corpus.releases)} releases, "
        f"{corpus.manifest['layout']['blocks']} blocks to {args.output}"
    )
    return 0


def cmd_bench(args) -> int:
    from .bench import run_bench

    oracle = None
    if args.snapshot:
        if args.oracle:
            print("--oracle needs --corpus (snapshots keep no raw rows)", file=sys.stderr)
            return 1
        engine = load_snapshot(args.snapshot)
    else:
        result = build_engine(args.corpus)
        engine = result.engine
        if args.oracle:
            from .oracle import Oracle

            oracle = Oracle(
                engine.seq,
                engine.assignments,
                city_name=engine.city_name,
                borough_names=engine.borough_names,
                default_region_kind=engine.default_region_kind,
            )

    report = run_bench(
        engine, trials=args.trials, attribute=args.attribute, fn=args.fn, oracle=oracle
    )
    if args.json:
        print(json.dumps(report.to_json(), indent=2))
    else:
        for t in report.timings:
            gate = "hard" if t.hard else "target"
            status = "ok" if t.within_budget else "OVER"
            print(
                f"{t.level:<8} {t.mean_ms:8.2f} ms  ({gate} {t.budget_ms:.0f} ms) {status}"
            )
        print(
            f"memory   {report.memory_factor:8.2f} x   (budget "
            f"{4.0:.1f} x) {'ok' if report.memory_factor <= 4.0 else 'OVER'}"
        )
        if report.oracle_checked:
            print(f"oracle   {'agreed' if report.oracle_agreed else 'DISAGREED'}")
        for warning in report.warnings:
            print(f"warning: {warning}")
        for violation in report.violations:
            print(f"violation: {violation}")
    return 3 if report.violations else 0


def cmd_serve(args) -> int:
    import uvicorn

    from .server import create_app

    if args.snapshot:
        source = args.snapshot

        def loader():
            return load_snapshot(source)

    else:
        source = args.corpus

        def loader():
            return build_engine(source).engine

    app = create_app(loader=loader, static_dir=args.static)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def cmd_oracle(args) -> int:
    from .geolevels import RegionSet, assign_blocks
    from .oracle import Oracle

    if args.query.startswith("@"):
        query = json.loads(Path(args.query[1:]).read_text())
    else:
        query = json.loads(args.query)

    directory = Path(args.corpus)
    schema = default_schema()
    raws = []
    found = discover_releases(directory)
    if not found:
        raise IngestError(f"no release files in {directory}")
    for release, path in found:
        cleaned, _ = clean_records(load_release(path, release, schema))
        raws.append(cleaned)
    seq = consolidate(raws)
    assignments = {}
    for kind, fname in REGION_FILES.items():
        f = directory / fname
        regions = RegionSet.load(f, kind) if f.exists() else RegionSet(kind, [])
        assignments[kind] = assign_blocks(seq, regions, args.seed)

    borough_names = {}
    manifest = directory / "manifest.json"
    if manifest.exists():
        raw_names = json.loads(manifest.read_text()).get("layout", {}).get("borough_names", {})
        borough_names = {int(k): v for k, v in raw_names.items()}
    oracle = Oracle(seq, assignments, borough_names=borough_names)

    kind = query.get("kind", "aggregate")
    common = {
        "filter_expr": query.get("filter"),
        "region_kind": query.get("region_kind"),
    }
    if kind == "aggregate":
        value = oracle.aggregate(
            query["path"], query.get("attribute"), query.get("fn", "count"),
            query["release"], skip_blocks=query.get("skip_blocks", False), **common,
        )
        print(json.dumps({"value": value}))
    elif kind == "matrix":
        names, cells = oracle.matrix(
            query["path"], query.get("attribute"), query.get("fn", "count"),
            skip_blocks=query.get("skip_blocks", False), **common,
        )
        print(json.dumps({"rows": names, "cells": [cells[n] for n in names]}))
    elif kind == "histogram":
        edges, counts = oracle.histogram(
            query["attribute"], query.get("bins", 20),
            release=query.get("release"), path=query.get("path"), **common,
        )
        print(json.dumps({"edges": edges, "counts": counts}))
    else:
        print(f"unknown oracle query kind {kind!r}", file=sys.stderr)
        return 1
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.command is None:
        parser.print_help()
        return 1
    handlers = {
        "ingest": cmd_ingest,
        "synth": cmd_synth,
        "bench": cmd_bench,
        "serve": cmd_serve,
        "oracle": cmd_oracle,
    }
    try:
        return handlers[args.command](args)
    except (IngestError, SnapshotError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (OSError, json.JSONDecodeError, ValueError, KeyError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
