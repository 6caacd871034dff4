"""
Drilling down the level tree: matrices, series, and histograms.
===============================================================

The queries a dashboard issues while the user walks from the city view
down to a single lot, shown as plain function calls.

    python3 demos/03_drilldown.py
"""

import tempfile
from pathlib import Path

from chronicle.pipeline import build_engine
from chronicle.synth import GeneratorParams, generate_synthetic, write_corpus

workdir = Path(tempfile.mkdtemp(prefix="chronicle-demo-"))
params = GeneratorParams(lots=1500, releases=8, boroughs=2,
                         neighborhoods_per_borough=2, lots_per_block=12)
write_corpus(generate_synthetic(params, seed=3), workdir / "corpus")
engine = build_engine(workdir / "corpus").engine


def show(matrix, title):
    print(f"\n{title}")
    header = " ".join(f"{r:>8s}" for r in matrix.releases)
    print(f"  {'':16s} {header}")
    for name, cells in zip(matrix.rows, matrix.cells):
        row = " ".join("      --" if c is None else f"{c:8.0f}" for c in cells)
        print(f"  {name:16s} {row}")


# Level 1: boroughs of the city. Every cell is one borough at one release.
path = ["city"]
show(engine.aggregate_matrix(path, None, "count"), "lots per borough")

# Level 2: neighborhoods of the first borough, sorted by the latest release
# so the fastest-growing row comes first in the dashboard.
tree = engine.tree()
borough = tree.children_of(tree.root)[0]
path = list(borough.path)
last = str(engine.releases[-1])
matrix = engine.aggregate_matrix(path, "ASSESSTOTAL", "sum", sort=last)
show(matrix, f"assessed value by neighborhood of {borough.name}, sorted at {last}")

# Level 3: one neighborhood as a time series instead of a matrix row.
# Series are asked for by name under a parent, matching a chart legend.
region = tree.children_of(borough)[0]
[series] = engine.series(path, [region.name], "ASSESSTOTAL", "avg", mode="delta")
print(f"\naverage assessed value change in {series.name}:")
for release, value in series.points:
    print(f"  {release}: " + ("--" if value is None else f"{value:+.1%}"))

# Distribution at a point in time: histogram over the lots below any node.
hist = engine.attribute_histogram("LOTAREA", 6, release=last,
                                  path=list(region.path))
print(f"\nLOTAREA distribution in {region.name} at {last}:")
for i, count in enumerate(hist.counts):
    lo, hi = hist.edges[i], hist.edges[i + 1]
    print(f"  [{lo:8.0f}, {hi:8.0f}) {'#' * (count // 4)} {count}")

# Level 4 and 5: blocks of the region, then one lot's own history.
block = tree.children_of(region)[0]
lot = tree.children_of(block)[0]
[series] = engine.series(list(block.path), [lot.name], "ASSESSTOTAL", "sum")
print(f"\nlot {lot.name} assessed value by release:")
for release, value in series.points:
    print(f"  {release}: " + ("absent" if value is None else f"{value:,.0f}"))

import shutil

shutil.rmtree(workdir)
