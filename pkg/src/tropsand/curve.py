"""Genus, the curve graph and the tree test behind "genus = |P|"."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .core.geometry import on_segment, on_square_boundary, segment_on_square_boundary
from .core.series import RPoint, TropicalSeries, is_on_curve
from .errors import InputError

# vertex kinds
INTERIOR = "interior"
BOUNDARY = "boundary"
MARKED = "marked"
MARKED_VERTEX = "marked_vertex"


def interior_faces(f: TropicalSeries):
    """Exponents whose closed face avoids the square's boundary.

    A convex polygon inside the square touches the boundary iff one of its
    corners does.
    """
    return [k for k, poly in f.arrangement.faces.items()
            if not any(on_square_boundary(v) for v in poly)]


def genus(f: TropicalSeries) -> int:
    return len(interior_faces(f))


@dataclass
class CurveGraph:
    vertices: list[RPoint] = field(default_factory=list)
    kinds: list[str] = field(default_factory=list)
    edges: list[tuple[int, int]] = field(default_factory=list)

    @property
    def incidence(self) -> list[list[int]]:
        adj = [[] for _ in self.vertices]
        for e, (a, b) in enumerate(self.edges):
            adj[a].append(e)
            adj[b].append(e)
        return adj

    def count(self, kind: str) -> int:
        return sum(1 for k in self.kinds if k == kind)

    def is_separator(self, index: int) -> bool:
        return self.kinds[index] != INTERIOR

    def to_dict(self) -> dict:
        return {
            "schema": "curve-graph/1",
            "vertices": [
                {"x": str(v.x), "y": str(v.y), "kind": k, "separator": k != INTERIOR}
                for v, k in zip(self.vertices, self.kinds)
            ],
            "edges": [list(e) for e in self.edges],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def curve_graph(f: TropicalSeries, points=()) -> CurveGraph:
    """1-skeleton of C(f) with the points of P inserted as vertices."""
    pts = [RPoint(*p) for p in points]
    for p in pts:
        if not is_on_curve(f, p):
            raise InputError(f"point {p} is not on the curve")
    arr = f.arrangement
    segments = [(e.a, e.b) for e in arr.curve_edges]
    corners = set(arr.curve_vertices) | set(arr.boundary_points)
    marked_at_vertex = {p for p in pts if p in corners}
    split: list[tuple[RPoint, RPoint]] = []
    for a, b in segments:
        inner = [p for p in pts if p not in corners and p != a and p != b and on_segment(a, b, p)]
        chain = [a] + sorted(inner, key=lambda p: (p.x - a.x) ** 2 + (p.y - a.y) ** 2) + [b]
        split.extend(zip(chain, chain[1:]))
    index: dict[RPoint, int] = {}
    graph = CurveGraph()
    for v in sorted({v for e in split for v in e}):
        index[v] = len(graph.vertices)
        graph.vertices.append(v)
        if v in marked_at_vertex:
            graph.kinds.append(MARKED_VERTEX)
        elif v in pts:
            graph.kinds.append(MARKED)
        elif on_square_boundary(v):
            graph.kinds.append(BOUNDARY)
        else:
            graph.kinds.append(INTERIOR)
    graph.edges = sorted((index[a], index[b]) if index[a] < index[b] else (index[b], index[a])
                         for a, b in split)
    return graph


def _tree_after_removal(graph: CurveGraph) -> bool:
    """Is the graph minus its separator vertices (edges kept open) a tree?

    Each edge end at a removed vertex becomes its own dangling leaf, so an
    edge between two removed vertices is an isolated open segment.
    """
    parent = {}

    def find(u):
        while parent[u] != u:
            parent[u] = parent[parent[u]]
            u = parent[u]
        return u

    nodes = 0
    for v in range(len(graph.vertices)):
        if not graph.is_separator(v):
            parent[("v", v)] = ("v", v)
            nodes += 1
    for e, (a, b) in enumerate(graph.edges):
        ends = []
        for side, u in ((0, a), (1, b)):
            if graph.is_separator(u):
                key = ("leaf", e, side)
                parent[key] = key
                nodes += 1
                ends.append(key)
            else:
                ends.append(("v", u))
        ra, rb = find(ends[0]), find(ends[1])
        if ra == rb:
            return False
        parent[ra] = rb
    roots = {find(u) for u in parent}
    return len(roots) <= 1


def is_generic_tree(f: TropicalSeries, points=()) -> bool:
    """C(f) minus (P and the boundary) is connected and acyclic, with every
    point of P in the interior of a curve edge."""
    graph = curve_graph(f, points)
    if graph.count(MARKED_VERTEX):
        return False
    return _tree_after_removal(graph)


def euler_characteristic(f: TropicalSeries) -> int:
    """V - E + F of the planar graph made of curve edges and the subdivided
    square boundary, counting the unbounded outer face."""
    arr = f.arrangement
    vertices = set()
    edges = set()
    for poly in arr.faces.values():
        n = len(poly)
        for t in range(n):
            a, b = poly[t], poly[(t + 1) % n]
            vertices.add(a)
            edges.add(frozenset((a, b)))
    # boundary sides may be cut by curve endpoints that are corners of the
    # neighbouring face only; polygon corners already include them
    return len(vertices) - len(edges) + len(arr.faces) + 1


def boundary_edge_count(f: TropicalSeries) -> int:
    edges = set()
    for poly in f.arrangement.faces.values():
        n = len(poly)
        for t in range(n):
            a, b = poly[t], poly[(t + 1) % n]
            if segment_on_square_boundary(a, b):
                edges.add(frozenset((a, b)))
    return len(edges)
