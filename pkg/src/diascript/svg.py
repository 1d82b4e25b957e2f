"""Deterministic SVG emission.

A visitor over the layouted tree producing byte-identical output for
identical input on every platform: numbers use the canonical 3-fraction-digit
format, attributes are emitted in fixed order, and every element becomes one
``<g>`` carrying its id. The viewBox is the diagram bounding box.
"""

from __future__ import annotations

import math
from xml.sax.saxutils import escape, quoteattr

from .fonts import FontCatalog, baseline_offset, default_catalog, line_height
from .layout import DEFAULT_FONT_SIZE, LayoutedDiagram, LayoutedElement
from .routing import RoutedConnection, route_polyline
from .source import format_number as fmt


def _attr(name: str, value: str) -> str:
    return f" {name}={quoteattr(value)}"


def _shape_paint(attrs: dict, default_fill: str = "none") -> str:
    fill = attrs.get("fill", default_fill)
    stroke = attrs.get("stroke", "#000000")
    width = attrs.get("strokeWidth", 1.0)
    out = _attr("fill", str(fill)) + _attr("stroke", str(stroke))
    out += _attr("stroke-width", fmt(float(width)) if isinstance(width, float) else str(width))
    dash = attrs.get("strokeDasharray")
    if dash:
        out += _attr("stroke-dasharray", str(dash))
    return out


class _SvgVisitor:
    def __init__(self, fonts: FontCatalog):
        self.fonts = fonts
        self.lines: list[str] = []

    def visit(self, element: LayoutedElement) -> None:
        self.lines.append(f"<g{_attr('id', element.id)}>")
        kind = element.kind
        if kind == "rect":
            self._rect(element)
        elif kind == "ellipse":
            self._ellipse(element)
        elif kind in ("text", "label"):
            self._text(element)
        elif kind == "path":
            self._path(element)
        elif kind == "canvasConnection":
            self._connection(element)
        for child in element.children:
            self.visit(child)
        self.lines.append("</g>")

    def _rect(self, el: LayoutedElement) -> None:
        self.lines.append(
            f"<rect x={quoteattr(fmt(el.x))} y={quoteattr(fmt(el.y))}"
            f" width={quoteattr(fmt(el.width))} height={quoteattr(fmt(el.height))}"
            f"{_shape_paint(el.attributes)}/>"
        )

    def _ellipse(self, el: LayoutedElement) -> None:
        cx, cy = el.x + el.width / 2, el.y + el.height / 2
        self.lines.append(
            f"<ellipse cx={quoteattr(fmt(cx))} cy={quoteattr(fmt(cy))}"
            f" rx={quoteattr(fmt(el.width / 2))} ry={quoteattr(fmt(el.height / 2))}"
            f"{_shape_paint(el.attributes)}/>"
        )

    def _path(self, el: LayoutedElement) -> None:
        points = el.attributes.get("points") or []
        if len(points) >= 4:
            coords = [
                (el.x + float(points[i]), el.y + float(points[i + 1]))
                for i in range(0, len(points) - 1, 2)
            ]
            d = "M " + " L ".join(f"{fmt(x)} {fmt(y)}" for x, y in coords)
            self.lines.append(f"<path d={quoteattr(d)}{_shape_paint(el.attributes)}/>")

    def _text(self, el: LayoutedElement) -> None:
        attrs = el.attributes
        family = attrs.get("fontFamily") or self.fonts.default_family or ""
        size = attrs.get("fontSize", DEFAULT_FONT_SIZE)
        size = float(size) if isinstance(size, float) else DEFAULT_FONT_SIZE
        metrics = self.fonts.resolve(attrs.get("fontFamily"))
        fill = attrs.get("textFill", "#000000")
        extra = ""
        if attrs.get("fontWeight"):
            extra += _attr("font-weight", str(attrs["fontWeight"]))
        if attrs.get("fontStyle"):
            extra += _attr("font-style", str(attrs["fontStyle"]))
        text = attrs.get("text", "")
        base = baseline_offset(metrics, size)
        lh = line_height(metrics, size)
        for i, line in enumerate(str(text).split("\n")):
            y = el.y + base + i * lh
            self.lines.append(
                f"<text x={quoteattr(fmt(el.x))} y={quoteattr(fmt(y))}"
                f" font-family={quoteattr(str(family))} font-size={quoteattr(fmt(size))}"
                f" fill={quoteattr(str(fill))}{extra}>{escape(line)}</text>"
            )

    def _connection(self, el: LayoutedElement) -> None:
        route = el.route
        if route is None:
            return
        d = _route_path(route)
        stroke = el.attributes.get("stroke", "#000000")
        width = el.attributes.get("strokeWidth", 1.0)
        attrs = _attr("fill", "none") + _attr("stroke", str(stroke))
        attrs += _attr("stroke-width", fmt(float(width)) if isinstance(width, float) else str(width))
        dash = el.attributes.get("strokeDasharray")
        if dash:
            attrs += _attr("stroke-dasharray", str(dash))
        self.lines.append(f"<path d={quoteattr(d)}{attrs}/>")
        self._markers(route, str(stroke))

    def _markers(self, route: RoutedConnection, stroke: str) -> None:
        points = route_polyline(route)
        if len(points) < 2:
            return
        if route.start_marker:
            self._marker(route.start_marker, points[0], points[1], route.marker_size, stroke)
        if route.end_marker:
            self._marker(route.end_marker, points[-1], points[-2], route.marker_size, stroke)

    def _marker(self, kind: str, tip, prev, size: float, stroke: str) -> None:
        dx, dy = tip[0] - prev[0], tip[1] - prev[1]
        norm = math.hypot(dx, dy)
        if norm == 0:
            dx, dy = 1.0, 0.0
        else:
            dx, dy = dx / norm, dy / norm
        nx, ny = -dy, dx
        tx, ty = tip

        def pt(back: float, side: float) -> str:
            return f"{fmt(tx - dx * back + nx * side)} {fmt(ty - dy * back + ny * side)}"

        if kind == "openArrow":
            d = f"M {pt(size, size * 0.4)} L {fmt(tx)} {fmt(ty)} L {pt(size, -size * 0.4)}"
            self.lines.append(
                f"<path d={quoteattr(d)} fill=\"none\" stroke={quoteattr(stroke)} stroke-width=\"1\"/>"
            )
        elif kind == "triangleHollow":
            d = f"M {fmt(tx)} {fmt(ty)} L {pt(size, size * 0.5)} L {pt(size, -size * 0.5)} Z"
            self.lines.append(
                f"<path d={quoteattr(d)} fill=\"#ffffff\" stroke={quoteattr(stroke)} stroke-width=\"1\"/>"
            )
        elif kind in ("diamondHollow", "diamondFilled"):
            fill = "#ffffff" if kind == "diamondHollow" else stroke
            d = (
                f"M {fmt(tx)} {fmt(ty)} L {pt(size / 2, size * 0.35)}"
                f" L {pt(size, 0.0)} L {pt(size / 2, -size * 0.35)} Z"
            )
            self.lines.append(
                f"<path d={quoteattr(d)} fill={quoteattr(fill)} stroke={quoteattr(stroke)} stroke-width=\"1\"/>"
            )
        elif kind == "cross":
            cx, cy = tx - dx * size / 2, ty - dy * size / 2
            h = size / 2
            a1 = (cx - (dx + nx) * h / 1.414, cy - (dy + ny) * h / 1.414)
            a2 = (cx + (dx + nx) * h / 1.414, cy + (dy + ny) * h / 1.414)
            b1 = (cx - (dx - nx) * h / 1.414, cy - (dy - ny) * h / 1.414)
            b2 = (cx + (dx - nx) * h / 1.414, cy + (dy - ny) * h / 1.414)
            d = (
                f"M {fmt(a1[0])} {fmt(a1[1])} L {fmt(a2[0])} {fmt(a2[1])}"
                f" M {fmt(b1[0])} {fmt(b1[1])} L {fmt(b2[0])} {fmt(b2[1])}"
            )
            self.lines.append(
                f"<path d={quoteattr(d)} fill=\"none\" stroke={quoteattr(stroke)} stroke-width=\"1\"/>"
            )


def _route_path(route: RoutedConnection) -> str:
    parts: list[str] = []
    cursor: tuple[float, float] | None = None
    for segment in route.segments:
        pts = segment.points
        if cursor != pts[0]:
            parts.append(f"M {fmt(pts[0][0])} {fmt(pts[0][1])}")
        if segment.mode == "bezier":
            _, c1, c2, p1 = pts
            parts.append(
                f"C {fmt(c1[0])} {fmt(c1[1])}, {fmt(c2[0])} {fmt(c2[1])}, {fmt(p1[0])} {fmt(p1[1])}"
            )
            cursor = p1
        else:
            for p in pts[1:]:
                parts.append(f"L {fmt(p[0])} {fmt(p[1])}")
            cursor = pts[-1]
    return " ".join(parts)


def render_svg(layouted: LayoutedDiagram) -> str:
    """Standalone SVG 1.1 document; a pure function of the layouted tree."""
    root = layouted.root
    fonts = layouted.fonts or default_catalog()
    view = f"{fmt(root.x)} {fmt(root.y)} {fmt(root.width)} {fmt(root.height)}"
    visitor = _SvgVisitor(fonts)
    visitor.visit(root)
    header = (
        '<?xml version="1.0" encoding="UTF-8"?>\n'
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" viewBox={quoteattr(view)}'
        f" width={quoteattr(fmt(root.width))} height={quoteattr(fmt(root.height))}>"
    )
    return header + "\n" + "\n".join(visitor.lines) + "\n</svg>\n"
