"""Writers for meshes, crease patterns and verification reports.

All output is a deterministic function of the inputs: no timestamps, fixed
number formatting and line-feed newlines.
"""
from __future__ import annotations

import json
import math
import os
import xml.etree.ElementTree as ET
from dataclasses import dataclass

import numpy as np

from .atlas import FlatDomain

CREASE_SAMPLES = 512
CUT_SAMPLES = 256


def _num(x: float) -> str:
    return f"{x:.12g}"


def write_mesh(mesh, path) -> None:
    """Wavefront OBJ: positions, uv normalised to the unit square, and
    1-based ``v/vt`` face pairs."""
    dom = mesh.atlas.domain
    uv = np.column_stack([
        (mesh.uvs[:, 0] - dom.u_min) / dom.width,
        (mesh.uvs[:, 1] - dom.v_min) / dom.height,
    ])
    meta = mesh.metadata
    lines = [f"# flatklein n={meta.get('n')} r={_num(meta.get('r', 0.0))} s={_num(meta.get('s', 0.0))} "
             f"res={meta.get('res_u')}x{meta.get('res_v_per_strip')} slits={meta.get('slits', 0)}"]
    lines += [f"v {_num(x)} {_num(y)} {_num(z)}" for x, y, z in mesh.vertices]
    lines += [f"vt {_num(a)} {_num(b)}" for a, b in uv]
    lines += [f"f {a + 1}/{a + 1} {b + 1}/{b + 1} {c + 1}/{c + 1}" for a, b, c in mesh.triangles]
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def _clean(obj):
    """JSON-safe copy: numpy scalars to Python, non-finite floats to null."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        val = float(obj)
        return val if math.isfinite(val) else None
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    return obj


def report_text(report) -> str:
    data = report.as_dict() if hasattr(report, "as_dict") else report
    return json.dumps(_clean(data), indent=2, allow_nan=False) + "\n"


def write_report(report, path) -> None:
    """JSON report with keys in fixed order; floats in shortest round-trip form."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(report_text(report))


@dataclass(frozen=True)
class PatternStyle:
    scale: float = 30.0
    grid_cells_u: int = 12
    grid_cells_v: int = 12
    colors: tuple[str, str] = ("#f4e3c1", "#c9dcef")
    glyphs: bool = True
    crease_stroke: str = "#1f3b73"
    cut_stroke: str = "#c0392b"

    def __post_init__(self):
        if not (math.isfinite(self.scale) and self.scale > 0):
            raise ValueError("scale must be positive")
        if self.grid_cells_u < 1 or self.grid_cells_v < 1:
            raise ValueError("grid needs at least one cell each way")


def _points(xs, ys) -> str:
    return " ".join(f"{x:.4f},{y:.4f}" for x, y in zip(xs, ys))


def _harpoon(cx: float, cy: float, size: float) -> str:
    """A half-headed arrow along +x; its barb is on one side only, so a
    mirrored copy is distinguishable."""
    h = 0.5 * size
    return (f"M{cx - h:.4f},{cy:.4f} L{cx + h:.4f},{cy:.4f} "
            f"L{cx + h - 0.45 * size:.4f},{cy - 0.3 * size:.4f}")


def pattern_document(domain: FlatDomain, creases, cuts, style: PatternStyle = PatternStyle()) -> ET.Element:
    """Build the development as an SVG tree.

    ``creases`` and ``cuts`` are sequences of objects with ``v(u)`` and a
    ``u`` range (``domain_points``-style crease curves or slit arcs).
    """
    sc = style.scale
    width = domain.width * sc
    height = domain.height * sc

    def x_of(u):
        return (np.asarray(u) - domain.u_min) * sc

    def y_of(v):
        return (domain.v_max - np.asarray(v)) * sc

    svg = ET.Element("svg", {
        "xmlns": "http://www.w3.org/2000/svg",
        "width": f"{width:.4f}",
        "height": f"{height:.4f}",
        "viewBox": f"0 0 {width:.4f} {height:.4f}",
    })
    grid = ET.SubElement(svg, "g", {"id": "grid"})
    cw = width / style.grid_cells_u
    ch = height / style.grid_cells_v
    for i in range(style.grid_cells_u):
        for j in range(style.grid_cells_v):
            ET.SubElement(grid, "rect", {
                "x": f"{i * cw:.4f}", "y": f"{j * ch:.4f}",
                "width": f"{cw:.4f}", "height": f"{ch:.4f}",
                "fill": style.colors[(i + j) % 2], "stroke": "none",
            })
    if style.glyphs:
        glyphs = ET.SubElement(svg, "g", {"id": "orientation", "stroke": "#555555", "fill": "none",
                                          "stroke-width": f"{0.02 * sc:.4f}"})
        size = 0.5 * min(cw, ch)
        for i in range(style.grid_cells_u):
            for j in range(style.grid_cells_v):
                ET.SubElement(glyphs, "path", {"d": _harpoon((i + 0.5) * cw, (j + 0.5) * ch, size)})

    creases_g = ET.SubElement(svg, "g", {"id": "creases", "fill": "none", "stroke": style.crease_stroke,
                                          "stroke-width": f"{0.04 * sc:.4f}",
                                          "stroke-dasharray": f"{0.3 * sc:.4f} {0.1 * sc:.4f} {0.04 * sc:.4f} {0.1 * sc:.4f}"})
    for c in creases:
        u = np.linspace(domain.u_min, domain.u_max, CREASE_SAMPLES)
        v = c.domain_points(u)[:, 1]
        ET.SubElement(creases_g, "polyline", {"class": "crease", "points": _points(x_of(u), y_of(v))})

    cuts_g = ET.SubElement(svg, "g", {"id": "cuts", "fill": "none", "stroke": style.cut_stroke,
                                       "stroke-width": f"{0.05 * sc:.4f}"})
    for arc in cuts:
        pts = arc.sample(CUT_SAMPLES)
        ET.SubElement(cuts_g, "polyline", {"class": "cut", "points": _points(x_of(pts[:, 0]), y_of(pts[:, 1]))})

    ET.SubElement(svg, "rect", {"id": "outline", "x": "0", "y": "0", "width": f"{width:.4f}",
                                "height": f"{height:.4f}", "fill": "none", "stroke": "#000000",
                                "stroke-width": f"{0.05 * sc:.4f}"})
    _identification_marks(svg, domain, sc, width, height)
    return svg


def _identification_marks(svg, domain: FlatDomain, sc: float, width: float, height: float) -> None:
    """Gluing arrows on the edges: single heads on the vertical pair, double
    heads on the horizontal pair, pointing the way the edges are matched."""
    g = ET.SubElement(svg, "g", {"id": "identifications", "fill": "none", "stroke": "#000000",
                                 "stroke-width": f"{0.05 * sc:.4f}"})
    a = 0.25 * sc

    def head(x, y, dx, dy):
        # chevron at (x, y) pointing along (dx, dy)
        px, py = -dy, dx
        return (f"M{x - a * dx + a * px:.4f},{y - a * dy + a * py:.4f} L{x:.4f},{y:.4f} "
                f"L{x - a * dx - a * px:.4f},{y - a * dy - a * py:.4f}")

    # vertical edges glued directly: both point up
    for x in (0.0, width):
        g.append(ET.Element("path", {"d": head(x, 0.5 * height, 0.0, -1.0)}))
    bottom_dir = -1.0 if domain.klein else 1.0
    for y, d in ((height, bottom_dir), (0.0, 1.0)):
        for off in (0.0, 0.6 * a):
            g.append(ET.Element("path", {"d": head(0.5 * width + d * off, y, d, 0.0)}))


def pattern_text(domain, creases, cuts, style: PatternStyle = PatternStyle()) -> str:
    tree = pattern_document(domain, creases, cuts, style)
    ET.indent(tree)
    return ET.tostring(tree, encoding="unicode") + "\n"


def write_pattern(domain: FlatDomain, creases, cuts, style: PatternStyle = PatternStyle(), path=None) -> None:
    """Printable development: grid, dash-dot creases, solid cut arcs."""
    if path is None:
        raise ValueError("path is required")
    text = pattern_text(domain, creases, cuts, style)
    with open(os.fspath(path), "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
