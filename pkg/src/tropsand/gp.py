"""The face-shrinking operator G_p and the fixpoint G_P applied to the zero series.

A shrink raises the coefficient of the face containing p until p reaches the
corner locus.  Every other exponent (i, j) implicitly carries its canonical
coefficient, the least value keeping c + i x + j y above f.  When the face
of ``a0`` is raised, the exponents that can take over part of it are the
integer points of the dual cells of the face's corners (the "star" of a0);
the dual cell of a corner v is the set of slopes whose plane through
(v, f(v)) stays above f, and on it the canonical coefficient is
f(v) - a.v.  Only the raised face and the faces sharing a corner with it
change, so the arrangement is updated locally.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

from gmpy2 import mpq

from .core.arrangement import assemble, canonical_coefficient, canonicalize, prune
from .core.geometry import UNIT_SQUARE, clip, convex_hull, on_square_boundary
from .core.series import Exponent, Q, RPoint, Rational, TropicalSeries, boundary_zero_check, evaluate
from .errors import (BoundaryPointError, InputError, InternalConsistencyError, NonTerminationError,
                     OracleFailure)

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class ShrinkOutcome:
    raised_exponent: Exponent | None
    raise_amount: Rational
    new_competitors: tuple[Exponent, ...] = ()


@dataclass
class SolveTrace:
    passes: int = 0
    total_shrinks: int = 0
    log: list[tuple[int, RPoint, ShrinkOutcome]] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "passes": self.passes,
            "total_shrinks": self.total_shrinks,
            "shrinks": [
                {
                    "point": index,
                    "xy": [str(p.x), str(p.y)],
                    "raised": list(o.raised_exponent),
                    "amount": str(o.raise_amount),
                    "competitors": [list(k) for k in o.new_competitors],
                }
                for index, p, o in self.log
            ],
        }


def _check_interior(p) -> RPoint:
    p = RPoint(Q(p[0]), Q(p[1]))
    if not (0 < p.x < 1 and 0 < p.y < 1):
        raise BoundaryPointError(f"point {p} is not in the open unit square")
    return p


def _integer_direction(e):
    """Positive multiple of a rational vector with coprime integer entries."""
    ex, ey = e
    den = math.lcm(int(ex.denominator), int(ey.denominator))
    ix, iy = int(ex * den), int(ey * den)
    g = math.gcd(ix, iy)
    return ix // g, iy // g


class _State:
    """Mutable canonical series with its face polygons and a corner index."""

    def __init__(self, coeffs: dict, faces: dict):
        self.coeffs = dict(coeffs)
        self.faces = {k: list(v) for k, v in faces.items()}
        self.corner_faces: dict[tuple, set] = {}
        for k, poly in self.faces.items():
            for v in poly:
                self.corner_faces.setdefault(v, set()).add(k)

    @classmethod
    def from_series(cls, f: TropicalSeries) -> "_State":
        arr = f.arrangement
        if len(arr.faces) != len(f):
            raise InputError("series is not in canonical form")
        if not boundary_zero_check(f):
            raise InputError("series is not zero on the boundary of the unit square")
        return cls(f.monomials, {k: [tuple(v) for v in poly] for k, poly in arr.faces.items()})

    def series(self) -> TropicalSeries:
        f = TropicalSeries(self.coeffs)
        f.__dict__["arrangement"] = assemble(self.faces)
        return f

    def values_at(self, p):
        x, y = p
        return {k: c + k[0] * x + k[1] * y for k, c in self.coeffs.items()}

    def minimal_at(self, p):
        vals = self.values_at(p)
        best = min(vals.values())
        return [k for k, v in vals.items() if v == best], best

    def _box(self):
        keys = self.coeffs.keys()
        return (min(k[0] for k in keys) - 1, max(k[0] for k in keys) + 1,
                min(k[1] for k in keys) - 1, max(k[1] for k in keys) + 1)

    def star(self, a0):
        """Exponents (other than a0) in the dual cells of a0's face corners,
        mapped to their canonical coefficients."""
        imin, imax, jmin, jmax = self._box()
        c0 = self.coeffs[a0]
        out: dict[Exponent, Rational] = {}
        for v in self.faces[a0]:
            fv = c0 + a0[0] * v[0] + a0[1] * v[1]
            constraints = []
            slopes = []
            for k in self.corner_faces[v]:
                poly = self.faces[k]
                t = poly.index(v)
                n = len(poly)
                slopes.append(k)
                for w in (poly[(t + 1) % n], poly[t - 1]):
                    dx, dy = _integer_direction((w[0] - v[0], w[1] - v[1]))
                    constraints.append((dx, dy, k[0] * dx + k[1] * dy))
            if on_square_boundary(v):
                lo_i, hi_i, lo_j, hi_j = imin, imax, jmin, jmax
            else:
                lo_i = max(imin, min(k[0] for k in slopes))
                hi_i = min(imax, max(k[0] for k in slopes))
                lo_j = max(jmin, min(k[1] for k in slopes))
                hi_j = min(jmax, max(k[1] for k in slopes))
            for i in range(lo_i, hi_i + 1):
                for j in range(lo_j, hi_j + 1):
                    if (i, j) == a0 or (i, j) in out:
                        continue
                    if all(i * dx + j * dy >= rhs for dx, dy, rhs in constraints):
                        out[(i, j)] = fv - i * v[0] - j * v[1]
        return out

    def shrink(self, p) -> ShrinkOutcome:
        minimal, fp = self.minimal_at(p)
        if len(minimal) >= 2:
            return ShrinkOutcome(None, mpq(0), ())
        a0 = minimal[0]
        phi = self.faces[a0]
        cand = self.star(a0)
        if not cand:
            raise InternalConsistencyError(f"no competitor found for face {a0} at {p}")
        x, y = p
        reach = {k: c + k[0] * x + k[1] * y for k, c in cand.items()}
        best = min(reach.values())
        t = best - fp
        if t <= 0:
            raise InternalConsistencyError(f"non-positive raise {t} for face {a0} at {p}")
        tied = tuple(sorted(k for k, v in reach.items() if v == best))

        planes = dict(cand)
        planes[a0] = self.coeffs[a0] + t
        order = sorted(planes)
        pieces = {}
        for a in order:
            ca = planes[a]
            poly = phi
            for b in sorted(order, key=lambda b: (b[0] - a[0]) ** 2 + (b[1] - a[1]) ** 2):
                if b == a:
                    continue
                poly = clip(poly, a[0] - b[0], a[1] - b[1], ca - planes[b])
                if not poly:
                    break
            if poly:
                pieces[a] = poly

        changed = {a0: None}
        for a, piece in pieces.items():
            if a == a0:
                changed[a0] = piece
            elif a in self.faces:
                if self.coeffs[a] != planes[a]:
                    raise InternalConsistencyError(
                        f"canonical coefficient of active {a} drifted: {self.coeffs[a]} vs {planes[a]}")
                changed[a] = convex_hull(self.faces[a] + piece)
            else:
                changed[a] = piece
        for a, poly in changed.items():
            old = self.faces.pop(a, None)
            if old is not None:
                for v in old:
                    owners = self.corner_faces[v]
                    owners.discard(a)
                    if not owners:
                        del self.corner_faces[v]
            if poly:
                self.faces[a] = poly
                self.coeffs[a] = planes[a]
                for v in poly:
                    self.corner_faces.setdefault(v, set()).add(a)
            else:
                self.coeffs.pop(a, None)
        return ShrinkOutcome(a0, t, tied)


def competitor_bound(f: TropicalSeries, p, t_cap) -> int:
    """Radius D beyond which no exponent can cap a raise of ``t_cap`` at p.

    For q = p - d (i, j)/|(i, j)| with d the distance from p to the boundary,
    f(q) >= 0 gives  c_ij + i p_x + j p_y >= d |(i, j)|.  An exponent competes
    only if that is <= f(p) + t_cap, so |(i, j)| <= (f(p) + t_cap) / d.
    """
    p = _check_interior(p)
    t_cap = Q(t_cap)
    if t_cap < 0:
        raise InputError("t_cap must be non-negative")
    d = min(p.x, p.y, 1 - p.x, 1 - p.y)
    bound = (evaluate(f, p) + t_cap) / d
    return max(1, int(math.ceil(bound)))


def shrink_step(f: TropicalSeries, p) -> tuple[TropicalSeries, ShrinkOutcome]:
    """Apply G_p once to a canonical, boundary-zero series."""
    p = _check_interior(p)
    state = _State.from_series(f)
    outcome = state.shrink(p)
    if outcome.raised_exponent is None:
        return f, outcome
    return state.series(), outcome


def shrink_step_reference(f: TropicalSeries, p) -> tuple[TropicalSeries, Rational]:
    """Slow from-scratch G_p used to cross-check the incremental update.

    Competitors are every exponent inside the distance bound (for the raise)
    and inside the exponent box grown by one (for the rebuilt series), with
    canonical coefficients taken over the whole arrangement.
    """
    p = _check_interior(p)
    vals = {k: c + k[0] * p.x + k[1] * p.y for k, c in f.monomials.items()}
    fp = min(vals.values())
    minimal = [k for k, v in vals.items() if v == fp]
    if len(minimal) >= 2:
        return f, mpq(0)
    a0 = minimal[0]
    keys = list(f.monomials)
    imin = min(k[0] for k in keys) - 1
    imax = max(k[0] for k in keys) + 1
    jmin = min(k[1] for k in keys) - 1
    jmax = max(k[1] for k in keys) + 1
    coeffs = {}
    for i in range(imin, imax + 1):
        for j in range(jmin, jmax + 1):
            if (i, j) != a0:
                coeffs[(i, j)] = canonical_coefficient(f, i, j)
    t_cap = min(c + i * p.x + j * p.y for (i, j), c in coeffs.items()) - fp
    radius = competitor_bound(f, p, t_cap)
    for i in range(-radius, radius + 1):
        for j in range(-radius, radius + 1):
            if (i, j) != a0 and (i, j) not in coeffs and i * i + j * j <= radius * radius:
                coeffs[(i, j)] = canonical_coefficient(f, i, j)
    t = min(c + i * p.x + j * p.y for (i, j), c in coeffs.items()) - fp
    coeffs[a0] = f[a0] + t
    return canonicalize(TropicalSeries(coeffs)), t


def _distinct(points):
    pts = [_check_interior(p) for p in points]
    if len(set(pts)) != len(pts):
        raise InputError("duplicate points in P")
    return pts


def solve_gp(points, max_passes: int | None = None, order=None) -> tuple[TropicalSeries, SolveTrace]:
    """G_P applied to the zero series by cyclic sweeps over P.

    ``order`` optionally permutes the sweep order (a list of indices into
    ``points``).
    """
    pts = _distinct(points)
    if max_passes is None:
        max_passes = 10 * len(pts) + 100
    if max_passes < 1:
        raise InputError("max_passes must be >= 1")
    sweep = list(range(len(pts))) if order is None else list(order)
    if sorted(sweep) != list(range(len(pts))):
        raise InputError("order must be a permutation of the point indices")
    state = _State({(0, 0): mpq(0)}, {(0, 0): list(UNIT_SQUARE)})
    trace = SolveTrace()
    while True:
        if trace.passes >= max_passes:
            raise NonTerminationError(
                f"no fixpoint after {max_passes} passes", partial=state.series(), trace=trace)
        trace.passes += 1
        shrinks = 0
        for idx in sweep:
            outcome = state.shrink(pts[idx])
            if outcome.raised_exponent is not None:
                shrinks += 1
                trace.log.append((idx, pts[idx], outcome))
        trace.total_shrinks += shrinks
        log.debug("pass %d: %d shrinks, %d monomials", trace.passes, shrinks, len(state.coeffs))
        if shrinks == 0:
            break
    return state.series(), trace


def _least_coefficients(exps, base, ties, pts):
    """Least c >= base with the given monomial pair tied and minimal at each point.

    All constraints are difference constraints c_u >= c_v + w, so the feasible
    set is closed under componentwise min and its least element is found by
    Bellman-Ford style relaxation.  Returns None when infeasible.
    """
    cons = []
    for (a, b), p in zip(ties, pts):
        va = a[0] * p.x + a[1] * p.y
        vb = b[0] * p.x + b[1] * p.y
        cons.append((a, b, vb - va))
        cons.append((b, a, va - vb))
        for k in exps:
            if k != a:
                cons.append((k, a, va - (k[0] * p.x + k[1] * p.y)))
    c = dict(base)
    for _ in range(len(exps) + 1):
        moved = False
        for u, v, w in cons:
            if c[v] + w > c[u]:
                c[u] = c[v] + w
                moved = True
        if not moved:
            return c
    return None


def brute_force_gp(points, degree_cap: int = 2, coefficient_grid_step=mpq(1, 64)) -> TropicalSeries:
    """Exhaustive oracle for G_P 0 restricted to monomials with |i| + |j| <= degree_cap.

    Enumerates every choice of a tied monomial pair at each point of P and
    solves each choice exactly for its least coefficient vector (all
    exponents start at their zero-series coefficient).  The union of the
    feasible sets contains G_P 0 whenever its degree is within the cap, so
    the pointwise least candidate, judged on a sample grid of spacing
    ``coefficient_grid_step``, is returned.  Independent of the shrink code;
    intended for |P| <= 3.
    """
    import itertools

    pts = _distinct(points)
    step = Q(coefficient_grid_step)
    if not pts:
        return TropicalSeries.zero()
    if len(pts) > 3 or not 1 <= degree_cap <= 2:
        raise InputError("brute force oracle is limited to |P| <= 3 and 1 <= degree_cap <= 2")
    exps = [(i, j) for i in range(-degree_cap, degree_cap + 1)
            for j in range(-degree_cap, degree_cap + 1) if abs(i) + abs(j) <= degree_cap]
    # least coefficient keeping each monomial >= 0 on the square (its corners)
    base = {(i, j): mpq(max(0, -i, -j, -i - j)) for i, j in exps}
    pairs = list(itertools.combinations(exps, 2))
    n = int(1 / step)
    sample = [(mpq(a, n), mpq(b, n)) for a in range(n + 1) for b in range(n + 1)]

    best = None
    best_vals = None
    for ties in itertools.product(pairs, repeat=len(pts)):
        c = _least_coefficients(exps, base, ties, pts)
        if c is None:
            continue
        series = TropicalSeries(c)
        if not boundary_zero_check(series):
            continue
        if best is not None and c == best:
            continue
        terms = list(c.items())
        vals = [min(ck + k[0] * x + k[1] * y for k, ck in terms) for x, y in sample]
        if best is None or sum(vals) < sum(best_vals):
            best, best_vals = c, vals
    if best is None:
        raise OracleFailure(f"no series of degree <= {degree_cap} passes through all points")
    return prune(TropicalSeries(best))
