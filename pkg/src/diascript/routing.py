"""Connection routing: border anchors, segment construction, label placement.

Segments come in three modes: straight lines, axis-aligned runs (horizontal,
vertical, horizontal), and cubic bezier curves. Default routes connect the
intersection points of the center-to-center line with each element's bounding
rectangle; explicit routes anchor at perimeter fractions measured clockwise
from the top-left corner.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


class InvalidRoute(Exception):
    pass


@dataclass(frozen=True, slots=True)
class Rect:
    x: float
    y: float
    width: float
    height: float

    @property
    def center(self) -> tuple[float, float]:
        return (self.x + self.width / 2, self.y + self.height / 2)

    def distance_to_border(self, px: float, py: float) -> float:
        """0 when the point lies on the rectangle outline."""
        left, top = self.x, self.y
        right, bottom = self.x + self.width, self.y + self.height
        if left <= px <= right and top <= py <= bottom:
            return min(px - left, right - px, py - top, bottom - py)
        qx = min(max(px, left), right)
        qy = min(max(py, top), bottom)
        return math.hypot(px - qx, py - qy)


@dataclass(frozen=True)
class EndAnchor:
    """Terminal of an explicit route: perimeter fraction on the target."""

    param: float


@dataclass(frozen=True)
class RouteStep:
    mode: str  # "line" | "axisAligned" | "bezier"
    target: object  # EndAnchor or an (x, y) tuple for intermediate points
    fraction: float | None = None  # axisAligned bend position
    c1: tuple[float, float] | None = None
    c2: tuple[float, float] | None = None


@dataclass(frozen=True)
class RouteSpec:
    """Explicit route from a ``with`` block: start fraction plus step chain."""

    start_param: float
    steps: tuple[RouteStep, ...]


@dataclass(frozen=True)
class RouteSegment:
    mode: str
    points: tuple[tuple[float, float], ...]


@dataclass(frozen=True)
class RoutedConnection:
    segments: tuple[RouteSegment, ...]
    start_marker: str | None = None
    end_marker: str | None = None
    marker_size: float = 12.0


MARKER_KINDS = ("openArrow", "cross", "diamondHollow", "diamondFilled", "triangleHollow")

BEZIER_FLATTEN_STEPS = 32


def border_intersection(rect: Rect, toward: tuple[float, float]) -> tuple[float, float]:
    """Where the ray from the rectangle center toward ``toward`` exits it."""
    cx, cy = rect.center
    dx = toward[0] - cx
    dy = toward[1] - cy
    if dx == 0 and dy == 0:
        return (cx, cy)
    ts = []
    if dx > 0:
        ts.append((rect.x + rect.width - cx) / dx)
    elif dx < 0:
        ts.append((rect.x - cx) / dx)
    if dy > 0:
        ts.append((rect.y + rect.height - cy) / dy)
    elif dy < 0:
        ts.append((rect.y - cy) / dy)
    t = min(ts)
    return (cx + dx * t, cy + dy * t)


def perimeter_point(rect: Rect, param: float) -> tuple[float, float]:
    """Point at fraction ``param`` of the perimeter, clockwise from top-left."""
    w, h = rect.width, rect.height
    total = 2 * (w + h)
    if total == 0:
        return (rect.x, rect.y)
    d = (param % 1.0) * total
    if d < w:
        return (rect.x + d, rect.y)
    d -= w
    if d < h:
        return (rect.x + w, rect.y + d)
    d -= h
    if d < w:
        return (rect.x + w - d, rect.y + h)
    d -= w
    return (rect.x, rect.y + h - d)


def bezier_point(
    p0: tuple[float, float],
    c1: tuple[float, float],
    c2: tuple[float, float],
    p1: tuple[float, float],
    t: float,
) -> tuple[float, float]:
    """Cubic bezier via de Casteljau."""

    def lerp(a, b, f):
        return (a[0] + (b[0] - a[0]) * f, a[1] + (b[1] - a[1]) * f)

    a = lerp(p0, c1, t)
    b = lerp(c1, c2, t)
    c = lerp(c2, p1, t)
    d = lerp(a, b, t)
    e = lerp(b, c, t)
    return lerp(d, e, t)


def _axis_points(start, end, fraction):
    bend_x = start[0] + (end[0] - start[0]) * fraction
    return (start, (bend_x, start[1]), (bend_x, end[1]), end)


def route_connection(
    spec: RouteSpec | None,
    source: Rect,
    target: Rect,
    start_marker: str | None = None,
    end_marker: str | None = None,
    marker_size: float = 12.0,
) -> RoutedConnection:
    """Build the routed polyline/curve chain between two layouted rectangles."""
    if spec is None:
        a = border_intersection(source, target.center)
        b = border_intersection(target, source.center)
        segments = (RouteSegment("line", (a, b)),)
        return RoutedConnection(segments, start_marker, end_marker, marker_size)

    if not 0.0 <= spec.start_param < 1.0:
        raise InvalidRoute(f"start fraction {spec.start_param} outside [0, 1)")
    current = perimeter_point(source, spec.start_param)
    segments: list[RouteSegment] = []
    if not spec.steps:
        raise InvalidRoute("route has no segments")
    if not isinstance(spec.steps[-1].target, EndAnchor):
        raise InvalidRoute("route must end at end(...)")
    for step in spec.steps:
        if isinstance(step.target, EndAnchor):
            if not 0.0 <= step.target.param < 1.0:
                raise InvalidRoute(f"end fraction {step.target.param} outside [0, 1)")
            goal = perimeter_point(target, step.target.param)
        else:
            goal = step.target
        if step.mode == "line":
            segments.append(RouteSegment("line", (current, goal)))
        elif step.mode == "axisAligned":
            if step.fraction is None or not 0.0 <= step.fraction <= 1.0:
                raise InvalidRoute(f"axisAligned fraction {step.fraction} outside [0, 1]")
            segments.append(RouteSegment("axisAligned", _axis_points(current, goal, step.fraction)))
        elif step.mode == "bezier":
            segments.append(RouteSegment("bezier", (current, step.c1, step.c2, goal)))
        else:
            raise InvalidRoute(f"unknown segment mode '{step.mode}'")
        current = goal
    return RoutedConnection(tuple(segments), start_marker, end_marker, marker_size)


def segment_polyline(segment: RouteSegment) -> list[tuple[float, float]]:
    """Flattened point list; beziers are sampled at fixed resolution."""
    if segment.mode == "bezier":
        p0, c1, c2, p1 = segment.points
        return [
            bezier_point(p0, c1, c2, p1, i / BEZIER_FLATTEN_STEPS)
            for i in range(BEZIER_FLATTEN_STEPS + 1)
        ]
    return list(segment.points)


def route_polyline(route: RoutedConnection) -> list[tuple[float, float]]:
    points: list[tuple[float, float]] = []
    for segment in route.segments:
        flat = segment_polyline(segment)
        if points and points[-1] == flat[0]:
            flat = flat[1:]
        points.extend(flat)
    return points


def point_at(route: RoutedConnection, t: float) -> tuple[tuple[float, float], tuple[float, float]]:
    """Point and unit tangent at arc-length fraction ``t`` along the route."""
    points = route_polyline(route)
    if len(points) < 2:
        p = points[0] if points else (0.0, 0.0)
        return p, (1.0, 0.0)
    lengths = []
    total = 0.0
    for a, b in zip(points, points[1:]):
        seg = math.hypot(b[0] - a[0], b[1] - a[1])
        lengths.append(seg)
        total += seg
    if total == 0.0:
        return points[0], (1.0, 0.0)
    goal = max(0.0, min(1.0, t)) * total
    walked = 0.0
    for (a, b), seg in zip(zip(points, points[1:]), lengths):
        if seg == 0.0:
            continue
        if walked + seg >= goal or (a, b) == (points[-2], points[-1]):
            f = (goal - walked) / seg
            point = (a[0] + (b[0] - a[0]) * f, a[1] + (b[1] - a[1]) * f)
            tangent = ((b[0] - a[0]) / seg, (b[1] - a[1]) / seg)
            return point, tangent
        walked += seg
    a, b = points[-2], points[-1]
    seg = math.hypot(b[0] - a[0], b[1] - a[1])
    return b, ((b[0] - a[0]) / seg, (b[1] - a[1]) / seg) if seg else (1.0, 0.0)


def label_center(route: RoutedConnection, t: float, distance: float) -> tuple[float, float]:
    """Label anchor: route point at ``t`` pushed ``distance`` along the left
    normal of the tangent (screen coordinates, y grows downward)."""
    (px, py), (tx, ty) = point_at(route, t)
    nx, ny = ty, -tx
    return (px + nx * distance, py + ny * distance)


def route_points_bbox(route: RoutedConnection) -> tuple[float, float, float, float] | None:
    points = route_polyline(route)
    if not points:
        return None
    xs = [p[0] for p in points]
    ys = [p[1] for p in points]
    return (min(xs), min(ys), max(xs), max(ys))
