"""Two-phase layout: measure passes size constraints down and measured sizes
up; layout assigns absolute positions and sizes down and emits the flattened,
style-free tree.

The layouted output contains no vbox/hbox nodes (their children are
re-parented), no style rules, and only visual attributes. Canvas children are
positioned in canvas content coordinates; for the root canvas the content
origin is exactly the layout origin, so an ``apos(x, y)`` literal IS the
element's absolute position. Margins only widen the reported bounding box.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .diagnostics import Diagnostic
from .fonts import FontCatalog, default_catalog, measure_text
from .model import (
    AbsolutePoint,
    Diagram,
    ElementNode,
    LAYOUT_ONLY_KINDS,
    RelativePoint,
)
from .routing import (
    InvalidRoute,
    Rect,
    RoutedConnection,
    RouteSegment,
    RouteSpec,
    label_center,
    route_connection,
    route_points_bbox,
)
from .source import Span
from .styles import resolve_styles

INF = math.inf

RECT_PADDING = 5.0
CANVAS_MARGIN = 10.0
PLACEMENT_GAP = 20.0
DEFAULT_FONT_SIZE = 12.0
LABEL_OFFSET = 5.0
MARKER_SIZE = 12.0


class CyclicReference(Exception):
    pass


@dataclass(frozen=True, slots=True)
class Constraints:
    min_width: float = 0.0
    max_width: float = INF
    min_height: float = 0.0
    max_height: float = INF

    def __post_init__(self) -> None:
        if not (0 <= self.min_width <= self.max_width and 0 <= self.min_height <= self.max_height):
            raise ValueError(f"degenerate constraints {self}")

    def clamp(self, width: float, height: float) -> "MeasuredSize":
        w = min(max(width, self.min_width), self.max_width)
        h = min(max(height, self.min_height), self.max_height)
        return MeasuredSize(w, h)

    def inset(self, dx: float, dy: float) -> "Constraints":
        return Constraints(
            0.0,
            max(self.max_width - dx, 0.0),
            0.0,
            max(self.max_height - dy, 0.0),
        )


UNBOUNDED = Constraints()


@dataclass(frozen=True, slots=True)
class MeasuredSize:
    width: float
    height: float


@dataclass(frozen=True)
class LayoutedElement:
    id: str
    kind: str
    x: float
    y: float
    width: float
    height: float
    attributes: dict
    children: tuple["LayoutedElement", ...] = ()
    origin_span: Span | None = None
    route: RoutedConnection | None = None

    @property
    def rect(self) -> Rect:
        return Rect(self.x, self.y, self.width, self.height)


@dataclass(frozen=True)
class LayoutedDiagram:
    root: LayoutedElement
    diagnostics: tuple[Diagnostic, ...] = ()
    fonts: FontCatalog | None = None


def iter_layouted(root: LayoutedElement):
    yield root
    for child in root.children:
        yield from iter_layouted(child)


def _num(attrs: dict, name: str, default: float) -> float:
    value = attrs.get(name)
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        return default
    return float(value)


_VISUAL_KEYS = {
    "rect": ("fill", "stroke", "strokeWidth", "strokeDasharray"),
    "ellipse": ("fill", "stroke", "strokeWidth", "strokeDasharray"),
    "path": ("points", "fill", "stroke", "strokeWidth", "strokeDasharray"),
    "text": ("text", "fontFamily", "fontSize", "fontWeight", "fontStyle", "textFill"),
    "label": ("text", "fontFamily", "fontSize", "fontWeight", "fontStyle", "textFill"),
    "canvas": (),
    "canvasElement": (),
    "canvasConnection": ("stroke", "strokeWidth", "strokeDasharray"),
    "connectionSegment": (),
}


def _visual_attrs(kind: str, resolved: dict) -> dict:
    return {k: resolved[k] for k in _VISUAL_KEYS.get(kind, ()) if k in resolved}


class _Job:
    """State for one layout run: resolved styles, measured sizes, placements."""

    def __init__(self, diagram: Diagram, fonts: FontCatalog):
        self.diagram = diagram
        self.fonts = fonts
        self.styles = resolve_styles(diagram)
        self.measured: dict[str, MeasuredSize] = {}
        self.diagnostics: list[Diagnostic] = []
        # per-canvas placement info, filled during measure
        self.placements: dict[str, dict[str, tuple[float, float]]] = {}
        self.dropped: dict[str, set[str]] = {}
        self.bbox_min: dict[str, tuple[float, float]] = {}

    def report(self, severity: str, node: ElementNode, message: str) -> None:
        self.diagnostics.append(Diagnostic(severity, node.origin_span, message))

    # measure phase

    def measure(self, node: ElementNode, constraints: Constraints) -> MeasuredSize:
        attrs = self.styles[node.id]
        kind = node.kind
        if kind in ("rect", "ellipse"):
            size = self._measure_box(node, attrs, constraints)
        elif kind in ("text", "label"):
            size = self._measure_text(node, attrs, constraints)
        elif kind == "vbox":
            size = self._measure_stack(node, attrs, constraints, vertical=True)
        elif kind == "hbox":
            size = self._measure_stack(node, attrs, constraints, vertical=False)
        elif kind == "canvas":
            size = self._measure_canvas(node, attrs, constraints)
        elif kind == "canvasElement":
            size = self._measure_canvas_element(node, attrs, constraints)
        elif kind == "path":
            size = self._measure_path(node, attrs, constraints)
        else:  # canvasConnection, connectionSegment: routed, not measured
            size = constraints.clamp(0.0, 0.0)
        self.measured[node.id] = size
        return size

    def _measure_box(self, node, attrs, constraints: Constraints) -> MeasuredSize:
        pad = _num(attrs, "padding", RECT_PADDING)
        explicit_w = attrs.get("width") if isinstance(attrs.get("width"), float) else None
        explicit_h = attrs.get("height") if isinstance(attrs.get("height"), float) else None
        if explicit_w is not None:
            child_c_w = (max(explicit_w - 2 * pad, 0.0),) * 2
        else:
            child_c_w = (0.0, max(constraints.max_width - 2 * pad, 0.0))
        if explicit_h is not None:
            child_c_h = (max(explicit_h - 2 * pad, 0.0),) * 2
        else:
            child_c_h = (0.0, max(constraints.max_height - 2 * pad, 0.0))
        child_constraints = Constraints(child_c_w[0], child_c_w[1], child_c_h[0], child_c_h[1])
        content_w = content_h = 0.0
        for child in node.children:
            size = self.measure(child, child_constraints)
            content_w = max(content_w, size.width)
            content_h = max(content_h, size.height)
        w = explicit_w if explicit_w is not None else content_w + 2 * pad
        h = explicit_h if explicit_h is not None else content_h + 2 * pad
        return constraints.clamp(w, h)

    def _measure_text(self, node, attrs, constraints: Constraints) -> MeasuredSize:
        metrics = self.fonts.resolve(attrs.get("fontFamily"))
        size = _num(attrs, "fontSize", DEFAULT_FONT_SIZE)
        text = attrs.get("text") if isinstance(attrs.get("text"), str) else ""
        w, h = measure_text(text, metrics, size)
        return constraints.clamp(w, h)

    def _measure_stack(self, node, attrs, constraints: Constraints, vertical: bool) -> MeasuredSize:
        pad = _num(attrs, "padding", 0.0)
        gap = _num(attrs, "gap", 0.0)
        child_constraints = constraints.inset(2 * pad, 2 * pad)
        if vertical:
            child_constraints = Constraints(0, child_constraints.max_width, 0, INF)
        else:
            child_constraints = Constraints(0, INF, 0, child_constraints.max_height)
        main = cross = 0.0
        for child in node.children:
            size = self.measure(child, child_constraints)
            if vertical:
                main += size.height
                cross = max(cross, size.width)
            else:
                main += size.width
                cross = max(cross, size.height)
        if node.children:
            main += gap * (len(node.children) - 1)
        if vertical:
            return constraints.clamp(cross + 2 * pad, main + 2 * pad)
        return constraints.clamp(main + 2 * pad, cross + 2 * pad)

    def _measure_canvas_element(self, node, attrs, constraints: Constraints) -> MeasuredSize:
        explicit_w = attrs.get("width") if isinstance(attrs.get("width"), float) else None
        explicit_h = attrs.get("height") if isinstance(attrs.get("height"), float) else None
        cw = Constraints(
            explicit_w or 0.0, explicit_w if explicit_w is not None else INF,
            explicit_h or 0.0, explicit_h if explicit_h is not None else INF,
        )
        content_w = content_h = 0.0
        for child in node.children:
            size = self.measure(child, cw)
            content_w = max(content_w, size.width)
            content_h = max(content_h, size.height)
        w = explicit_w if explicit_w is not None else content_w
        h = explicit_h if explicit_h is not None else content_h
        return constraints.clamp(w, h)

    def _measure_path(self, node, attrs, constraints: Constraints) -> MeasuredSize:
        points = attrs.get("points")
        w = _num(attrs, "width", 0.0)
        h = _num(attrs, "height", 0.0)
        if isinstance(points, list) and len(points) >= 2:
            xs = [float(v) for v in points[0::2]]
            ys = [float(v) for v in points[1::2]]
            w = max(w, max(xs) - min(xs))
            h = max(h, max(ys) - min(ys))
        return constraints.clamp(w, h)

    def _measure_canvas(self, node, attrs, constraints: Constraints) -> MeasuredSize:
        margin = _num(attrs, "margin", CANVAS_MARGIN)
        elements = [c for c in node.children if c.kind == "canvasElement"]
        for child in elements:
            self.measure(child, UNBOUNDED)
        for child in node.children:
            if child.kind == "canvasConnection":
                for label in child.children:
                    self.measure(label, UNBOUNDED)

        placements: dict[str, tuple[float, float]] = {}
        dropped: set[str] = set()
        by_id = {c.id: c for c in elements}

        # default placement: unplaced elements stack at x=0 in declaration order
        cursor = 0.0
        for child in elements:
            if child.attributes.get("pos") is None:
                placements[child.id] = (0.0, cursor)
                cursor += self.measured[child.id].height + PLACEMENT_GAP

        state: dict[str, str] = {}

        def resolve(eid: str) -> tuple[float, float]:
            if eid in placements and state.get(eid) != "visiting":
                return placements[eid]
            if state.get(eid) == "visiting":
                raise CyclicReference(eid)
            element = by_id[eid]
            pos = element.attributes.get("pos")
            if isinstance(pos, AbsolutePoint):
                placements[eid] = (pos.x, pos.y)
                return placements[eid]
            if isinstance(pos, RelativePoint):
                state[eid] = "visiting"
                target_id = pos.target if isinstance(pos.target, str) else None
                if target_id not in by_id:
                    raise KeyError(target_id)
                tx, ty = resolve(target_id)
                state[eid] = "done"
                placements[eid] = (tx + pos.dx, ty + pos.dy)
                return placements[eid]
            # unexpected pos value: fall back to default stacking slot
            self.report("warning", element, f"ignoring invalid pos value on {eid}")
            placements[eid] = (0.0, 0.0)
            return placements[eid]

        for child in elements:
            if child.id in placements:
                continue
            try:
                resolve(child.id)
            except CyclicReference:
                self.report("error", child, f"cyclic rpos reference involving {child.id}")
                dropped.add(child.id)
            except KeyError as miss:
                self.report("error", child, f"rpos target {miss.args[0]!r} not found for {child.id}")
                dropped.add(child.id)

        xs: list[float] = []
        ys: list[float] = []
        for child in elements:
            if child.id in dropped or child.id not in placements:
                continue
            px, py = placements[child.id]
            size = self.measured[child.id]
            xs.extend((px, px + size.width))
            ys.extend((py, py + size.height))

        self.placements[node.id] = placements
        self.dropped[node.id] = dropped
        if xs:
            self.bbox_min[node.id] = (min(xs), min(ys))
            w = (max(xs) - min(xs)) + 2 * margin
            h = (max(ys) - min(ys)) + 2 * margin
        else:
            self.bbox_min[node.id] = (0.0, 0.0)
            w = h = 0.0
        return constraints.clamp(w, h)

    # layout phase

    def layout(self, node: ElementNode, x: float, y: float, w: float, h: float) -> list[LayoutedElement]:
        """Returns the layouted subtree; vbox/hbox dissolve into their children."""
        kind = node.kind
        attrs = self.styles[node.id]
        if kind in ("rect", "ellipse"):
            return [self._layout_box(node, attrs, x, y, w, h)]
        if kind in ("text", "label"):
            size = self.measured[node.id]
            return [LayoutedElement(node.id, kind, x, y, size.width, size.height,
                                    _visual_attrs(kind, attrs), (), node.origin_span)]
        if kind == "path":
            size = self.measured[node.id]
            return [LayoutedElement(node.id, kind, x, y, size.width, size.height,
                                    _visual_attrs(kind, attrs), (), node.origin_span)]
        if kind in LAYOUT_ONLY_KINDS:
            return self._layout_stack(node, attrs, x, y, w, h, vertical=(kind == "vbox"))
        if kind == "canvasElement":
            children: list[LayoutedElement] = []
            for child in node.children:
                children.extend(self.layout(child, x, y, w, h))
            return [LayoutedElement(node.id, kind, x, y, w, h, {}, tuple(children),
                                    node.origin_span)]
        if kind == "canvas":
            return [self._layout_canvas(node, attrs, x, y, w, h, origin=None)]
        # canvasConnection / connectionSegment handled by the owning canvas
        return []

    def _layout_box(self, node, attrs, x, y, w, h) -> LayoutedElement:
        pad = _num(attrs, "padding", RECT_PADDING)
        inner_w = max(w - 2 * pad, 0.0)
        children: list[LayoutedElement] = []
        for child in node.children:
            size = self.measured[child.id]
            cw = inner_w if child.kind in ("rect", "ellipse", "vbox", "hbox", "canvas") else size.width
            children.extend(self.layout(child, x + pad, y + pad, cw, size.height))
        return LayoutedElement(node.id, node.kind, x, y, w, h, _visual_attrs(node.kind, attrs),
                               tuple(children), node.origin_span)

    def _layout_stack(self, node, attrs, x, y, w, h, vertical: bool) -> list[LayoutedElement]:
        pad = _num(attrs, "padding", 0.0)
        gap = _num(attrs, "gap", 0.0)
        alignment = attrs.get("alignment", "start")
        inner_w = max(w - 2 * pad, 0.0)
        inner_h = max(h - 2 * pad, 0.0)
        out: list[LayoutedElement] = []
        cursor = (y if vertical else x) + pad
        for child in node.children:
            size = self.measured[child.id]
            cw, ch = size.width, size.height
            if vertical:
                cx, cross_size = _align(alignment, x + pad, inner_w, cw)
                cw = cross_size if alignment == "stretch" else cw
                out.extend(self.layout(child, cx, cursor, cw, ch))
                cursor += ch + gap
            else:
                cy, cross_size = _align(alignment, y + pad, inner_h, ch)
                ch = cross_size if alignment == "stretch" else ch
                out.extend(self.layout(child, cursor, cy, cw, ch))
                cursor += cw + gap
        return out

    def _layout_canvas(self, node, attrs, x, y, w, h, origin: tuple[float, float] | None) -> LayoutedElement:
        margin = _num(attrs, "margin", CANVAS_MARGIN)
        placements = self.placements[node.id]
        dropped = self.dropped[node.id]
        if origin is None:
            # nested canvas: content shifts so its bbox starts inside the margin
            min_x, min_y = self.bbox_min[node.id]
            origin = (x + margin - min_x, y + margin - min_y)
        ox, oy = origin

        laid: dict[str, LayoutedElement] = {}
        for child in node.children:
            if child.kind != "canvasElement" or child.id in dropped:
                continue
            px, py = placements[child.id]
            size = self.measured[child.id]
            nodes = self.layout(child, ox + px, oy + py, size.width, size.height)
            laid[child.id] = nodes[0]

        children: list[LayoutedElement] = []
        for child in node.children:
            if child.kind == "canvasElement":
                if child.id in laid:
                    children.append(laid[child.id])
            elif child.kind == "canvasConnection":
                conn = self._route(child, laid)
                if conn is not None:
                    children.append(conn)

        if children:
            min_x = min(_bbox(c)[0] for c in children)
            min_y = min(_bbox(c)[1] for c in children)
            max_x = max(_bbox(c)[2] for c in children)
            max_y = max(_bbox(c)[3] for c in children)
            cx, cy = min_x - margin, min_y - margin
            cw, ch = (max_x - min_x) + 2 * margin, (max_y - min_y) + 2 * margin
        else:
            cx, cy, cw, ch = x, y, 0.0, 0.0
        return LayoutedElement(node.id, "canvas", cx, cy, cw, ch, _visual_attrs("canvas", attrs),
                               tuple(children), node.origin_span)

    def _route(self, node: ElementNode, laid: dict[str, LayoutedElement]) -> LayoutedElement | None:
        attrs = self.styles[node.id]
        source_id = node.attributes.get("source")
        target_id = node.attributes.get("target")
        source = laid.get(source_id)
        target = laid.get(target_id)
        if source is None or target is None:
            missing = source_id if source is None else target_id
            self.report("error", node, f"connection endpoint {missing!r} is missing")
            return None
        spec = node.attributes.get("route")
        if spec is not None and not isinstance(spec, RouteSpec):
            self.report("error", node, "invalid route specification")
            return None
        try:
            route = route_connection(
                spec,
                source.rect,
                target.rect,
                node.attributes.get("markerStart"),
                node.attributes.get("markerEnd"),
                _num(attrs, "markerSize", MARKER_SIZE),
            )
        except InvalidRoute as bad:
            self.report("error", node, str(bad))
            return None

        labels: list[LayoutedElement] = []
        for label in node.children:
            if label.kind != "label":
                continue
            label_attrs = self.styles[label.id]
            t = _num(label.attributes, "t", 0.5)
            distance = _num(label.attributes, "distance", LABEL_OFFSET)
            size = self.measured[label.id]
            cx, cy = label_center(route, t, distance)
            labels.append(
                LayoutedElement(label.id, "label", cx - size.width / 2, cy - size.height / 2,
                                size.width, size.height, _visual_attrs("label", label_attrs),
                                (), label.origin_span)
            )

        bbox = route_points_bbox(route)
        xs = [bbox[0], bbox[2]] if bbox else []
        ys = [bbox[1], bbox[3]] if bbox else []
        for lab in labels:
            xs.extend((lab.x, lab.x + lab.width))
            ys.extend((lab.y, lab.y + lab.height))
        x0, y0 = (min(xs), min(ys)) if xs else (0.0, 0.0)
        x1, y1 = (max(xs), max(ys)) if xs else (0.0, 0.0)
        return LayoutedElement(node.id, "canvasConnection", x0, y0, x1 - x0, y1 - y0,
                               _visual_attrs("canvasConnection", attrs), tuple(labels),
                               node.origin_span, route=route)


def _align(alignment: str, start: float, available: float, child_size: float) -> tuple[float, float]:
    if alignment == "center":
        return (start + (available - child_size) / 2, child_size)
    if alignment == "end":
        return (start + available - child_size, child_size)
    if alignment == "stretch":
        return (start, available)
    return (start, child_size)


def _bbox(element: LayoutedElement) -> tuple[float, float, float, float]:
    return (element.x, element.y, element.x + element.width, element.y + element.height)


def measure_element(diagram: Diagram, node: ElementNode, constraints: Constraints,
                    fonts: FontCatalog | None = None) -> MeasuredSize:
    """Measure one subtree in isolation (testing/inspection hook)."""
    job = _Job(diagram, fonts or diagram.fonts or default_catalog())
    return job.measure(node, constraints)


def _translate(element: LayoutedElement, dx: float, dy: float) -> LayoutedElement:
    route = element.route
    if route is not None:
        segments = tuple(
            RouteSegment(seg.mode, tuple((p[0] + dx, p[1] + dy) for p in seg.points))
            for seg in route.segments
        )
        route = RoutedConnection(segments, route.start_marker, route.end_marker,
                                 route.marker_size)
    return LayoutedElement(
        element.id,
        element.kind,
        element.x + dx,
        element.y + dy,
        element.width,
        element.height,
        element.attributes,
        tuple(_translate(c, dx, dy) for c in element.children),
        element.origin_span,
        route,
    )


def layout_diagram(diagram: Diagram, origin: tuple[float, float] = (0.0, 0.0)) -> LayoutedDiagram:
    """Run the full pipeline: resolve styles, measure, lay out, route.

    Layout always runs in origin coordinates, so a root-canvas element
    positioned by ``apos(x, y)`` gets absolute position exactly (x, y); a
    non-zero ``origin`` then shifts every coordinate by one final addition,
    which makes translation exactly equivariant in float64.
    """
    root = diagram.root
    if root.kind in LAYOUT_ONLY_KINDS:
        raise ValueError(f"diagram root cannot be a {root.kind}")
    fonts = diagram.fonts or default_catalog()
    job = _Job(diagram, fonts)
    size = job.measure(root, UNBOUNDED)
    if root.kind == "canvas":
        layouted = job._layout_canvas(root, job.styles[root.id], 0.0, 0.0, size.width,
                                      size.height, origin=(0.0, 0.0))
    else:
        layouted = job.layout(root, 0.0, 0.0, size.width, size.height)[0]
    if origin != (0.0, 0.0):
        layouted = _translate(layouted, origin[0], origin[1])
    return LayoutedDiagram(layouted, tuple(job.diagnostics), fonts)
