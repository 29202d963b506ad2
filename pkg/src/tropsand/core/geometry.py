"""Exact planar primitives on rational points.

Points are plain ``(x, y)`` tuples of :class:`gmpy2.mpq` (``RPoint`` is a
tuple subclass, so both spellings hash and compare alike).  Polygons are
lists of points in counter-clockwise order without repeated or collinear
vertices.  Nothing here touches floating point.
"""

from __future__ import annotations

from gmpy2 import mpq

ZERO = mpq(0)
ONE = mpq(1)

UNIT_SQUARE = [(ZERO, ZERO), (ONE, ZERO), (ONE, ONE), (ZERO, ONE)]


def cross(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def simplify(poly):
    """Drop repeated and collinear vertices; return [] if no area is left."""
    pts = []
    for p in poly:
        if not pts or pts[-1] != p:
            pts.append(p)
    while len(pts) > 1 and pts[0] == pts[-1]:
        pts.pop()
    changed = True
    while changed and len(pts) >= 3:
        changed = False
        n = len(pts)
        for k in range(n):
            if cross(pts[k - 1], pts[k], pts[(k + 1) % n]) == 0:
                del pts[k]
                changed = True
                break
    return pts if len(pts) >= 3 else []


def clip(poly, a, b, c):
    """Intersect a convex polygon with the closed half-plane a*x + b*y + c <= 0.

    Returns [] when the intersection has empty interior.
    """
    if not poly:
        return []
    vals = [a * x + b * y + c for x, y in poly]
    if max(vals) <= 0:
        return poly
    if min(vals) >= 0:
        return []
    out = []
    n = len(poly)
    for k in range(n):
        p, vp = poly[k], vals[k]
        q, vq = poly[(k + 1) % n], vals[(k + 1) % n]
        if vp <= 0:
            out.append(p)
        if (vp < 0 < vq) or (vq < 0 < vp):
            t = vp / (vp - vq)
            out.append((p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])))
    return simplify(out)


def twice_area(poly):
    s = ZERO
    n = len(poly)
    for k in range(n):
        x0, y0 = poly[k]
        x1, y1 = poly[(k + 1) % n]
        s += x0 * y1 - x1 * y0
    return s


def area(poly):
    return twice_area(poly) / 2


def convex_hull(points):
    """Andrew's monotone chain; ccw, collinear points removed."""
    pts = sorted(set(points))
    if len(pts) < 3:
        return []
    lower = []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper = []
    for p in reversed(pts):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    hull = lower[:-1] + upper[:-1]
    return hull if len(hull) >= 3 else []


def contains(poly, p):
    """Closed containment test for a ccw convex polygon."""
    n = len(poly)
    return all(cross(poly[k], poly[(k + 1) % n], p) >= 0 for k in range(n))


def on_segment(a, b, p):
    """True if p lies on the closed segment ab."""
    if cross(a, b, p) != 0:
        return False
    return (min(a[0], b[0]) <= p[0] <= max(a[0], b[0])
            and min(a[1], b[1]) <= p[1] <= max(a[1], b[1]))


def on_square_boundary(p):
    x, y = p
    return x == 0 or y == 0 or x == 1 or y == 1


def segment_on_square_boundary(a, b):
    """Both endpoints on one side of the unit square."""
    return ((a[0] == b[0] and a[0] in (0, 1))
            or (a[1] == b[1] and a[1] in (0, 1)))


def segment_meets_box(a, b, x0, x1, y0, y1):
    """Exact closed segment / axis-aligned closed box intersection test."""
    # Liang-Barsky with rational parameters.
    t0, t1 = ZERO, ONE
    dx = b[0] - a[0]
    dy = b[1] - a[1]
    for p, q in ((-dx, a[0] - x0), (dx, x1 - a[0]), (-dy, a[1] - y0), (dy, y1 - a[1])):
        if p == 0:
            if q < 0:
                return False
            continue
        r = q / p
        if p < 0:
            if r > t1:
                return False
            if r > t0:
                t0 = r
        else:
            if r < t0:
                return False
            if r < t1:
                t1 = r
    return t0 <= t1
