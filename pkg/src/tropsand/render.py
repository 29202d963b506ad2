"""Deterministic SVG drawings of tropical curves on the unit square."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from xml.sax.saxutils import quoteattr

from .core.geometry import on_square_boundary
from .core.series import TropicalSeries
from .curve import interior_faces
from .errors import InputError

FACE_MODES = ("none", "exponent", "genus")


@dataclass(frozen=True)
class RenderSpec:
    canvas: int = 512
    stroke_width: float = 1.5
    face_mode: str = "none"
    marker_radius: float = 3.0
    margin: int = 8

    def __post_init__(self):
        if self.canvas < 64:
            raise InputError("canvas must be at least 64 px")
        if self.face_mode not in FACE_MODES:
            raise InputError(f"face_mode must be one of {FACE_MODES}")


def _fmt(v: float) -> str:
    return f"{v:.3f}".rstrip("0").rstrip(".")


def _exponent_color(key) -> str:
    digest = hashlib.sha256(f"{key[0]},{key[1]}".encode()).digest()
    r, g, b = (128 + d // 2 for d in digest[:3])
    return f"#{r:02x}{g:02x}{b:02x}"


def render_svg(f: TropicalSeries, points=(), spec: RenderSpec | None = None) -> str:
    """SVG 1.1 document: square outline, curve edges, optional face fills, markers at P.

    y grows upwards in the unit square and downwards on the canvas.
    """
    spec = spec or RenderSpec()
    size = spec.canvas
    inner = size - 2 * spec.margin

    def xy(p):
        return (_fmt(spec.margin + float(p[0]) * inner),
                _fmt(spec.margin + (1.0 - float(p[1])) * inner))

    arr = f.arrangement
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{size}" height="{size}" '
        f'viewBox="0 0 {size} {size}">',
    ]
    if spec.face_mode != "none":
        closed = set(interior_faces(f)) if spec.face_mode == "genus" else set()
        out.append('<g id="faces" stroke="none">')
        for key, poly in arr.faces.items():
            if spec.face_mode == "exponent":
                color = _exponent_color(key)
            else:
                color = "#f4c542" if key in closed else "#ffffff"
            pts = " ".join(",".join(xy(v)) for v in poly)
            out.append(f'<polygon points="{pts}" fill="{color}" data-exponent={quoteattr(f"{key[0]},{key[1]}")}/>')
        out.append("</g>")
    a, b = xy((0, 0)), xy((1, 1))
    out.append(f'<rect id="omega" x="{a[0]}" y="{b[1]}" width="{_fmt(inner)}" height="{_fmt(inner)}" '
               f'fill="none" stroke="#888888" stroke-width="1"/>')
    out.append(f'<g id="curve" stroke="#000000" stroke-width="{_fmt(spec.stroke_width)}" '
               f'stroke-linecap="round">')
    for e in arr.curve_edges:
        (x1, y1), (x2, y2) = xy(e.a), xy(e.b)
        leg = on_square_boundary(e.a) or on_square_boundary(e.b)
        cls = "leg" if leg else "inner"
        out.append(f'<line class="{cls}" x1="{x1}" y1="{y1}" x2="{x2}" y2="{y2}"/>')
    out.append("</g>")
    if points:
        out.append('<g id="points" fill="#d62728">')
        for p in points:
            cx, cy = xy(p)
            out.append(f'<circle cx="{cx}" cy="{cy}" r="{_fmt(spec.marker_radius)}"/>')
        out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"
