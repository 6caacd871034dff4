"""Reference polygon clipping: Sutherland-Hodgman plus shoelace areas.

Deliberately pure python with no imports from the package under test (and
no shapely), so agreement between this module and the engine's overlap
ratios is evidence rather than the same code called twice.

The clipper is only exact when the clip ring is convex; every caller in the
test suite generates convex shapes. Rings are open vertex lists
[(x, y), ...] without a repeated closing vertex.
"""


def shoelace_area(ring) -> float:
    """Signed area; positive for counter-clockwise vertex order."""
    if len(ring) < 3:
        return 0.0
    total = 0.0
    n = len(ring)
    for i in range(n):
        x0, y0 = ring[i]
        x1, y1 = ring[(i + 1) % n]
        total += x0 * y1 - x1 * y0
    return total / 2.0


def ccw(ring):
    return list(ring) if shoelace_area(ring) >= 0 else list(reversed(ring))


def clip_ring(subject, clip):
    """Subject ring cut down to the inside of a convex CCW clip ring."""
    output = list(subject)
    n = len(clip)
    for i in range(n):
        if not output:
            return []
        ax, ay = clip[i]
        bx, by = clip[(i + 1) % n]

        def inside(p):
            # left of (or on) the directed edge a -> b
            return (bx - ax) * (p[1] - ay) - (by - ay) * (p[0] - ax) >= 0.0

        def cross_point(p, q):
            dcx, dcy = ax - bx, ay - by
            dpx, dpy = p[0] - q[0], p[1] - q[1]
            n1 = ax * by - ay * bx
            n2 = p[0] * q[1] - p[1] * q[0]
            den = dcx * dpy - dcy * dpx
            return ((n1 * dpx - n2 * dcx) / den, (n1 * dpy - n2 * dcy) / den)

        source, output = output, []
        s = source[-1]
        s_in = inside(s)
        for e in source:
            e_in = inside(e)
            if e_in:
                if not s_in:
                    output.append(cross_point(s, e))
                output.append(e)
            elif s_in:
                output.append(cross_point(s, e))
            s, s_in = e, e_in
    return output


def intersection_area(a, b) -> float:
    """Area of the intersection of two convex rings, any orientation."""
    return abs(shoelace_area(clip_ring(ccw(a), ccw(b))))


def overlap_ratio(a, b) -> float:
    """Intersection area over the larger input area; 0 when both degenerate."""
    mx = max(abs(shoelace_area(a)), abs(shoelace_area(b)))
    if mx <= 0.0:
        return 0.0
    return intersection_area(a, b) / mx
