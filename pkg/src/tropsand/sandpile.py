"""Abelian sandpile on the lattice {0..s}^2, used as an independent numerical oracle.

A vertex with at least four grains topples by sending one grain to each of
its four lattice neighbours; grains sent off the grid are lost.  The stable
state and the toppling function do not depend on the order of topplings,
which the scheduling policies below exercise.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field

import numpy as np
from gmpy2 import mpq

from .core.geometry import segment_meets_box
from .core.series import Q, RPoint, TropicalSeries
from .errors import InputError

POLICIES = ("queue", "stack", "parallel", "scan")


@dataclass
class SandpileGrid:
    """Grain counts and toppling counts, both indexed ``[x, y]``."""

    s: int
    grains: np.ndarray
    topplings: np.ndarray = None

    def __post_init__(self):
        self.grains = np.asarray(self.grains, dtype=np.int64)
        if self.grains.shape != (self.s + 1, self.s + 1):
            raise InputError(f"grain array must be {(self.s + 1,) * 2}, got {self.grains.shape}")
        if self.topplings is None:
            self.topplings = np.zeros_like(self.grains)
        self.topplings = np.asarray(self.topplings, dtype=np.int64)

    @property
    def is_stable(self) -> bool:
        return bool((self.grains <= 3).all())

    def copy(self) -> "SandpileGrid":
        return SandpileGrid(self.s, self.grains.copy(), self.topplings.copy())

    def to_pgm(self) -> bytes:
        """Binary PGM, grains 0..3 mapped to gray levels 0, 85, 170, 255; row 0 is y = s."""
        img = (np.clip(self.grains, 0, 3) * 85).astype(np.uint8).T[::-1]
        header = f"P5\n{self.s + 1} {self.s + 1}\n255\n".encode()
        return header + img.tobytes()

    def topplings_bytes(self) -> bytes:
        """Unsigned 32-bit little-endian toppling counts, row-major with rows indexed by y."""
        return self.topplings.T.astype("<u4").tobytes()


def lattice_coords(s: int, p) -> tuple[int, int]:
    x, y = Q(p[0]) * s, Q(p[1]) * s
    if x.denominator != 1 or y.denominator != 1:
        raise InputError(f"point {RPoint(Q(p[0]), Q(p[1]))} is not on the 1/{s} lattice")
    x, y = int(x), int(y)
    if not (1 <= x <= s - 1 and 1 <= y <= s - 1):
        raise InputError(f"lattice point ({x}, {y}) is not interior for s={s}")
    return x, y


def tropical_state(s: int, points) -> SandpileGrid:
    """Three grains everywhere plus one extra grain at each s*p."""
    if s < 2:
        raise InputError("s must be >= 2")
    grains = np.full((s + 1, s + 1), 3, dtype=np.int64)
    for p in points:
        x, y = lattice_coords(s, p)
        grains[x, y] += 1
    return SandpileGrid(s, grains)


def _neighbours(x, y, n):
    if x > 0:
        yield x - 1, y
    if x < n - 1:
        yield x + 1, y
    if y > 0:
        yield x, y - 1
    if y < n - 1:
        yield x, y + 1


def _relax_worklist(grains, topplings, lifo):
    n = grains.shape[0]
    g = grains.tolist()
    h = topplings.tolist()
    work = deque((x, y) for x in range(n) for y in range(n) if g[x][y] >= 4)
    pop = work.pop if lifo else work.popleft
    while work:
        x, y = pop()
        k = g[x][y] // 4
        if k == 0:
            continue
        g[x][y] -= 4 * k
        h[x][y] += k
        for u, v in _neighbours(x, y, n):
            before = g[u][v]
            g[u][v] = before + k
            if before < 4 <= before + k:
                work.append((u, v))
    return np.array(g, dtype=np.int64), np.array(h, dtype=np.int64)


def _relax_parallel(grains, topplings):
    g = grains.copy()
    h = topplings.copy()
    while True:
        k = g // 4
        if not k.any():
            return g, h
        g -= 4 * k
        h += k
        g[1:, :] += k[:-1, :]
        g[:-1, :] += k[1:, :]
        g[:, 1:] += k[:, :-1]
        g[:, :-1] += k[:, 1:]


def _relax_scan(grains, topplings):
    """Naive single-toppling relaxer in fixed row-major order."""
    n = grains.shape[0]
    g = grains.tolist()
    h = topplings.tolist()
    unstable = True
    while unstable:
        unstable = False
        for x in range(n):
            for y in range(n):
                while g[x][y] >= 4:
                    unstable = True
                    g[x][y] -= 4
                    h[x][y] += 1
                    for u, v in _neighbours(x, y, n):
                        g[u][v] += 1
    return np.array(g, dtype=np.int64), np.array(h, dtype=np.int64)


def relax(grid: SandpileGrid, policy: str = "queue") -> SandpileGrid:
    """Topple until stable.  Returns a new grid; ``topplings`` accumulates.

    Policies: ``queue`` (FIFO worklist, batch toppling), ``stack`` (LIFO
    worklist), ``parallel`` (every unstable vertex fires floor(g/4) times per
    round, vectorised), ``scan`` (naive single topplings in fixed order).
    """
    if (grid.grains < 0).any():
        raise InputError("negative grain count")
    if policy == "queue":
        g, h = _relax_worklist(grid.grains, grid.topplings, lifo=False)
    elif policy == "stack":
        g, h = _relax_worklist(grid.grains, grid.topplings, lifo=True)
    elif policy == "parallel":
        g, h = _relax_parallel(grid.grains, grid.topplings)
    elif policy == "scan":
        g, h = _relax_scan(grid.grains, grid.topplings)
    else:
        raise InputError(f"unknown policy {policy!r}; expected one of {POLICIES}")
    return SandpileGrid(grid.s, g, h)


def deviation_set(stable: SandpileGrid) -> set[tuple[int, int]]:
    if not stable.is_stable:
        raise InputError("deviation set needs a stable grid")
    xs, ys = np.nonzero(stable.grains != 3)
    return set(zip(xs.tolist(), ys.tolist()))


def conservation_residual(initial: SandpileGrid, final: SandpileGrid) -> np.ndarray:
    """final - initial - (discrete Laplacian of the toppling function), all vertices.

    Zero everywhere for a legal relaxation: off-grid neighbours never send
    grains back, so the identity also holds on the boundary rows.
    """
    h = final.topplings - initial.topplings
    inflow = np.zeros_like(h)
    inflow[1:, :] += h[:-1, :]
    inflow[:-1, :] += h[1:, :]
    inflow[:, 1:] += h[:, :-1]
    inflow[:, :-1] += h[:, 1:]
    return final.grains - initial.grains - inflow + 4 * h


def rasterize_curve(f: TropicalSeries, s: int) -> np.ndarray:
    """Mark lattice vertices whose closed cell [v - 1/2, v + 1/2]/s meets a curve edge."""
    mask = np.zeros((s + 1, s + 1), dtype=bool)
    half = mpq(1, 2)
    for edge in f.arrangement.curve_edges:
        a, b = edge.a, edge.b
        lo_x = max(0, int(np.floor(float(min(a.x, b.x) * s - half))) - 1)
        hi_x = min(s, int(np.ceil(float(max(a.x, b.x) * s + half))) + 1)
        lo_y = max(0, int(np.floor(float(min(a.y, b.y) * s - half))) - 1)
        hi_y = min(s, int(np.ceil(float(max(a.y, b.y) * s + half))) + 1)
        for u in range(lo_x, hi_x + 1):
            x0, x1 = (u - half) / s, (u + half) / s
            for v in range(lo_y, hi_y + 1):
                if not mask[u, v] and segment_meets_box(a, b, x0, x1, (v - half) / s, (v + half) / s):
                    mask[u, v] = True
    return mask


@dataclass
class DeviationReport:
    s: int
    deviation_cells: int
    curve_cells: int
    sup_norm_gap: float
    sup_norm_gap_exact: str
    radius: int
    deviation_coverage: float
    curve_coverage: float
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "schema": "deviation-report/1",
            "s": self.s,
            "deviation_cells": self.deviation_cells,
            "curve_cells": self.curve_cells,
            "sup_norm_gap": self.sup_norm_gap,
            "sup_norm_gap_exact": self.sup_norm_gap_exact,
            "radius": self.radius,
            "deviation_coverage": self.deviation_coverage,
            "curve_coverage": self.curve_coverage,
            **self.extra,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def _dilate(mask: np.ndarray, r: int) -> np.ndarray:
    from scipy.ndimage import binary_dilation

    if r <= 0:
        return mask.copy()
    return binary_dilation(mask, structure=np.ones((2 * r + 1, 2 * r + 1), dtype=bool))


def sup_gap(f: TropicalSeries, stable: SandpileGrid):
    """Exact max over lattice vertices of |h(v)/s - f(v/s)|."""
    s = stable.s
    terms = list(f.monomials.items())
    h = stable.topplings
    best = mpq(0)
    for u in range(s + 1):
        for v in range(s + 1):
            x, y = mpq(u, s), mpq(v, s)
            fv = min(c + i * x + j * y for (i, j), c in terms)
            gap = abs(mpq(int(h[u, v]), s) - fv)
            if gap > best:
                best = gap
    return best


def compare_with_exact(f: TropicalSeries, stable: SandpileGrid, radius: int = 3) -> DeviationReport:
    s = stable.s
    dev = np.zeros((s + 1, s + 1), dtype=bool)
    for u, v in deviation_set(stable):
        dev[u, v] = True
    curve = rasterize_curve(f, s)
    gap = sup_gap(f, stable)
    n_dev, n_curve = int(dev.sum()), int(curve.sum())
    dev_cov = float((dev & _dilate(curve, radius)).sum() / n_dev) if n_dev else 1.0
    curve_cov = float((curve & _dilate(dev, radius)).sum() / n_curve) if n_curve else 1.0
    return DeviationReport(s, n_dev, n_curve, float(gap), f"{gap.numerator}/{gap.denominator}",
                           radius, dev_cov, curve_cov)
