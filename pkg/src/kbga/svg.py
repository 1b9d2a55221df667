"""Plain SVG 1.1 scene rendering built with ElementTree.

World coordinates have y pointing up; the root group flips the axis so the
drawing matches the usual plot orientation. Every path is one polyline.
"""
from __future__ import annotations

import xml.etree.ElementTree as ET
from typing import Iterable, Sequence

from .environment import Environment

SVG_NS = "http://www.w3.org/2000/svg"
MARGIN = 4.0

# stroke styles for the kinds of path we draw
STYLES = {
    "best": {"stroke": "#000000", "stroke-width": "0.8", "fill": "none"},
    "history": {"stroke": "#7f7f7f", "stroke-width": "0.3", "fill": "none", "stroke-opacity": "0.6"},
    "plan": {"stroke": "#000000", "stroke-width": "0.8", "fill": "none", "stroke-dasharray": "2,1"},
    "trajectory": {"stroke": "#ffffff", "stroke-width": "1.2", "fill": "none"},
}


def _f(v: float) -> str:
    s = f"{v:.4f}".rstrip("0").rstrip(".")
    return "0" if s in ("-0", "") else s


def _points(pts: Iterable[Sequence[float]]) -> str:
    return " ".join(f"{_f(x)},{_f(y)}" for x, y in pts)


def render_scene(env: Environment, paths: Sequence[tuple[Sequence[Sequence[float]], str]] = (),
                 dots: Sequence[Sequence[float]] = (), title: str = "", grid_ticks: bool = True) -> str:
    """SVG text showing the workspace, obstacles, start/target and the given paths.

    ``paths`` holds ``(points, style)`` pairs with ``style`` a key of
    :data:`STYLES`; ``dots`` marks robot positions.
    """
    ET.register_namespace("", SVG_NS)
    ws = env.workspace
    w, h = ws.width, ws.height
    root = ET.Element(f"{{{SVG_NS}}}svg", {
        "version": "1.1",
        "width": _f(4 * (w + 2 * MARGIN)),
        "height": _f(4 * (h + 2 * MARGIN)),
        "viewBox": f"{_f(-MARGIN)} {_f(-MARGIN)} {_f(w + 2 * MARGIN)} {_f(h + 2 * MARGIN)}",
    })
    if title:
        ET.SubElement(root, f"{{{SVG_NS}}}title").text = title
    world = ET.SubElement(root, f"{{{SVG_NS}}}g", {"transform": f"matrix(1 0 0 -1 0 {_f(h)})"})
    ET.SubElement(world, f"{{{SVG_NS}}}rect", {
        "x": "0", "y": "0", "width": _f(w), "height": _f(h),
        "fill": "#d9d9d9", "stroke": "#000000", "stroke-width": "0.4"})

    if grid_ticks:
        ticks = ET.SubElement(world, f"{{{SVG_NS}}}g", {"stroke": "#000000", "stroke-width": "0.15"})
        step_c = max(1, ws.grid_cols // 10)
        step_r = max(1, ws.grid_rows // 10)
        for c in range(0, ws.grid_cols + 1, step_c):
            x = _f(c * ws.cell_width)
            ET.SubElement(ticks, f"{{{SVG_NS}}}line", {"x1": x, "y1": "0", "x2": x, "y2": "-1.5"})
        for r in range(0, ws.grid_rows + 1, step_r):
            y = _f(r * ws.cell_height)
            ET.SubElement(ticks, f"{{{SVG_NS}}}line", {"x1": "0", "y1": y, "x2": "-1.5", "y2": y})

    obs = ET.SubElement(world, f"{{{SVG_NS}}}g", {"fill": "#404040", "stroke": "#202020", "stroke-width": "0.2"})
    for g in env.obstacles:
        grp = ET.SubElement(obs, f"{{{SVG_NS}}}g", {"id": f"obstacle-{g.id}"})
        for part in g.parts:
            ET.SubElement(grp, f"{{{SVG_NS}}}polygon", {"points": _points(part.vertices)})

    for pts, style in paths:
        attrs = dict(STYLES[style])
        attrs["class"] = style
        attrs["points"] = _points(pts)
        ET.SubElement(world, f"{{{SVG_NS}}}polyline", attrs)

    for x, y in dots:
        ET.SubElement(world, f"{{{SVG_NS}}}circle", {
            "cx": _f(x), "cy": _f(y), "r": "0.9", "fill": "#ffffff", "stroke": "#000000", "stroke-width": "0.2"})

    for (x, y), colour in ((env.start, "#1f77b4"), (env.target, "#d62728")):
        ET.SubElement(world, f"{{{SVG_NS}}}circle", {"cx": _f(x), "cy": _f(y), "r": "1.5", "fill": colour})

    ET.indent(root)
    return ET.tostring(root, encoding="unicode", xml_declaration=True) + "\n"
