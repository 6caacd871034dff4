"""
End to end: generate a corpus, build the engine, query it, snapshot it.
========================================================================

Run from the repository root:

    python3 demos/01_end_to_end.py

Writes everything under a temp directory and cleans up after itself.
"""

import tempfile
from pathlib import Path

from chronicle.pipeline import build_engine
from chronicle.query import FilterExpression
from chronicle.snapshot import load_snapshot, save_snapshot
from chronicle.synth import GeneratorParams, generate_synthetic, write_corpus

workdir = Path(tempfile.mkdtemp(prefix="chronicle-demo-"))
print(f"working in {workdir}")

# A small city: ~2,000 lots tracked across 6 semiannual releases.
params = GeneratorParams(
    lots=2000,
    releases=6,
    boroughs=2,
    neighborhoods_per_borough=3,
    lots_per_block=16,
)
corpus = generate_synthetic(params, seed=7)
write_corpus(corpus, workdir / "corpus")
print(f"wrote {len(corpus.releases)} release files to {workdir / 'corpus'}")

# Ingest + deduplicate + index in one call. The result carries the engine
# plus the ingest report (rejection counts, redundancy per category).
result = build_engine(workdir / "corpus")
engine = result.engine
print("\nredundancy after deduplication:")
for name, stats in result.redundancy.categories.items():
    print(f"  {name:20s} {stats.fraction:6.1%} of re-released values were references")

# Aggregates at any level of the city / borough / region / block / lot tree.
last = str(engine.releases[-1])
city_total = engine.aggregate(["city"], "ASSESSTOTAL", "sum", last)
print(f"\ncitywide assessed value at {last}: {city_total:,.0f}")

tree = engine.tree()
for borough in tree.children_of(tree.root):
    value = engine.aggregate(list(borough.path), "ASSESSTOTAL", "sum", last)
    lots = engine.aggregate(list(borough.path), None, "count", last)
    print(f"  {borough.name}: {value:,.0f} across {lots} lots")

# A matrix slices one level across every release; delta mode shows change.
borough = tree.children_of(tree.root)[0]
matrix = engine.aggregate_matrix(list(borough.path), "ASSESSTOTAL", "avg", mode="delta")
print(f"\nrelative change in average assessed value, regions of {borough.name}:")
for row_name, cells in zip(matrix.rows, matrix.cells):
    rendered = ["   --" if c is None else f"{c:+5.1%}" for c in cells]
    print(f"  {row_name:16s} {' '.join(rendered)}")

# Filters rebuild the index under a predicate, atomically. Queries in
# flight keep reading the snapshot they started on.
expr = FilterExpression.from_json({"op": ">=", "attr": "LOTAREA", "value": 3000})
snapshot_id = engine.apply_filter(expr)
big = engine.aggregate(["city"], None, "count", last)
print(f"\nfilter {snapshot_id}: {big} lots with LOTAREA >= 3000 at {last}")
engine.clear_filter()

# The whole deduplicated store round-trips through one snapshot file.
snap_path = workdir / "city.chron"
n = save_snapshot(snap_path, engine)
reloaded = load_snapshot(snap_path)
again = reloaded.aggregate(["city"], "ASSESSTOTAL", "sum", last)
print(f"\nsnapshot: {n / 1e6:.1f} MB, reloaded engine agrees: {again == city_total}")

import shutil

shutil.rmtree(workdir)
print("cleaned up")
