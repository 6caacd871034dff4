"""
How geometry deduplication decides SAME versus DIFFERENT.
=========================================================

Two versions of a lot polygon count as the same shape when their
intersection covers at least 90% of the larger one. This walks the
ratio through the threshold with a square that slides sideways.

    python3 demos/02_overlap_threshold.py
"""

from chronicle.dedup import EPSILON, geometry_equivalent, overlap_ratio
from chronicle.geometry import Polygon

base = Polygon.from_rings([(0.0, 0.0), (10.0, 0.0), (10.0, 10.0), (0.0, 10.0)])

print(f"threshold epsilon = {EPSILON}")
print(f"{'shift':>6s} {'overlap ratio':>14s}  verdict")
for shift in (0.0, 0.4, 0.9, 0.999, 1.0, 1.001, 1.1, 2.5, 10.0):
    moved = Polygon.from_rings(
        [(x + shift, y) for x, y in [(0, 0), (10, 0), (10, 10), (0, 10)]]
    )
    ratio = overlap_ratio(base, moved)
    same = geometry_equivalent(base, moved)
    print(f"{shift:6.3f} {ratio:14.6f}  {'SAME' if same else 'DIFFERENT'}")

# Survey corrections are the motivating case: a re-digitized parcel whose
# boundary wobbles by centimeters should not cost a second stored polygon.
wobbled = Polygon.from_rings(
    [(0.002, -0.001), (10.001, 0.002), (9.998, 10.001), (-0.001, 9.999)]
)
print(f"\nre-digitized boundary, ratio {overlap_ratio(base, wobbled):.6f} "
      f"-> {'SAME' if geometry_equivalent(base, wobbled) else 'DIFFERENT'}")

# A genuine subdivision (lot split in half) lands far below the threshold.
half = Polygon.from_rings([(0.0, 0.0), (5.0, 0.0), (5.0, 10.0), (0.0, 10.0)])
print(f"lot split in half, ratio {overlap_ratio(base, half):.6f} "
      f"-> {'SAME' if geometry_equivalent(base, half) else 'DIFFERENT'}")

# The ratio normalizes by the LARGER area, so containment does not fool it:
# a tiny sliver inside a big lot is nothing like 90% of the big lot.
sliver = Polygon.from_rings([(4.0, 4.0), (6.0, 4.0), (6.0, 6.0), (4.0, 6.0)])
print(f"contained sliver, ratio {overlap_ratio(base, sliver):.6f} "
      f"-> {'SAME' if geometry_equivalent(base, sliver) else 'DIFFERENT'}")
