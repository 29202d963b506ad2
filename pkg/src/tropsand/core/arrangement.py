"""Face arrangement of a tropical series and the operations that need it."""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import InternalConsistencyError, InvalidSeriesError
from .geometry import (UNIT_SQUARE, area, clip, on_square_boundary,
                       segment_on_square_boundary)
from .series import Exponent, RPoint, Rational, TropicalSeries, boundary_zero_check


@dataclass(frozen=True)
class CurveEdge:
    a: RPoint
    b: RPoint
    faces: tuple[Exponent, Exponent]


@dataclass(frozen=True)
class FaceArrangement:
    """Polygonal subdivision of the unit square induced by a series.

    ``faces`` maps each exponent with a positive-area face to its closed
    polygon (ccw corners).  ``curve_vertices`` are the corners of the curve
    inside the open square, ``boundary_points`` the points where the curve
    reaches the square's boundary.
    """

    faces: dict[Exponent, tuple[RPoint, ...]]
    curve_vertices: tuple[RPoint, ...]
    boundary_points: tuple[RPoint, ...]
    curve_edges: tuple[CurveEdge, ...]

    @property
    def vertices(self) -> set[RPoint]:
        """Every polygon corner, including square corners and boundary points."""
        return {v for poly in self.faces.values() for v in poly}

    def face_list(self) -> list[tuple[Exponent, tuple[RPoint, ...]]]:
        return list(self.faces.items())


def _face_polygon(key, coeffs, others):
    """Clip the square to the region where monomial `key` is minimal."""
    i, j = key
    c = coeffs[key]
    poly = UNIT_SQUARE
    for b in others:
        if b == key:
            continue
        # c + i x + j y <= c_b + b_i x + b_j y
        poly = clip(poly, i - b[0], j - b[1], c - coeffs[b])
        if not poly:
            return []
    return poly


def _rotate_to_min(poly):
    """Start a ccw polygon at its smallest corner so equal faces compare equal."""
    k = poly.index(min(poly))
    return poly[k:] + poly[:k]


def assemble(faces: dict) -> FaceArrangement:
    """Derive curve edges and vertices from a dict of face polygons."""
    faces = {k: _rotate_to_min(tuple(RPoint(*v) for v in poly)) for k, poly in sorted(faces.items())}
    seen: dict[frozenset, list] = {}
    for key, poly in faces.items():
        n = len(poly)
        for t in range(n):
            a, b = poly[t], poly[(t + 1) % n]
            if segment_on_square_boundary(a, b):
                continue
            seen.setdefault(frozenset((a, b)), []).append((key, a, b))
    edges = []
    for owners in seen.values():
        if len(owners) != 2:
            raise InternalConsistencyError(
                f"curve edge {owners[0][1]}-{owners[0][2]} is bordered by {len(owners)} faces")
        (k1, a, b), (k2, _, _) = owners
        edges.append(CurveEdge(a, b, (k1, k2)))
    edges.sort(key=lambda e: (min(e.a, e.b), max(e.a, e.b)))
    ends = {p for e in edges for p in (e.a, e.b)}
    interior = tuple(sorted(p for p in ends if not on_square_boundary(p)))
    boundary = tuple(sorted(p for p in ends if on_square_boundary(p)))
    return FaceArrangement(faces, interior, boundary, tuple(edges))


def build_arrangement(f: TropicalSeries) -> FaceArrangement:
    """Exact half-plane clipping of the square, one face per monomial.

    Monomials whose region has empty interior (including segments) get no
    face.
    """
    coeffs = dict(f.monomials)
    if not coeffs:
        raise InvalidSeriesError("series has no monomials")
    faces = {}
    for key in coeffs:
        # Nearby exponents shrink the polygon fastest.
        others = sorted(coeffs, key=lambda b: (b[0] - key[0]) ** 2 + (b[1] - key[1]) ** 2)
        poly = _face_polygon(key, coeffs, others)
        if poly:
            faces[key] = poly
    return assemble(faces)


def prune(f: TropicalSeries) -> TropicalSeries:
    """Drop monomials without a positive-area face; no boundary requirement."""
    arr = f.arrangement
    g = TropicalSeries({k: f[k] for k in arr.faces})
    g.__dict__["arrangement"] = arr
    return g


def canonicalize(f: TropicalSeries) -> TropicalSeries:
    """Minimal canonical form: keep exactly the monomials with a face of positive area."""
    if not boundary_zero_check(f):
        raise InvalidSeriesError("series is not zero on the boundary of the unit square")
    return prune(f)


def is_canonical(f: TropicalSeries) -> bool:
    return len(f.arrangement.faces) == len(f)


def canonical_coefficient(f: TropicalSeries, i: int, j: int) -> Rational:
    """Smallest c with c + i*x + j*y >= f on the square: max of f - i x - j y.

    The difference is affine on every face, so the maximum sits at a face
    corner; square corners and boundary points are face corners too.
    """
    arr = f.arrangement
    best = None
    for key, poly in arr.faces.items():
        c = f[key]
        di, dj = key[0] - i, key[1] - j
        for x, y in poly:
            v = c + di * x + dj * y
            if best is None or v > best:
                best = v
    return best


def face_areas(f: TropicalSeries) -> dict[Exponent, Rational]:
    return {k: area(poly) for k, poly in f.arrangement.faces.items()}
