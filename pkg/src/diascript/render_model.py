"""Serializable render model: the contract between engine and graphical view.

Schema version 1. The tree mirrors the layouted elements one to one, with the
same ids the SVG groups carry, so the interactive view can hit-test and the
editor can reveal source spans.
"""

from __future__ import annotations

from .layout import LayoutedDiagram, LayoutedElement
from .routing import RoutedConnection

SCHEMA_VERSION = 1

_JSON_SCALARS = (str, float, int, bool, type(None))


def _route_dict(route: RoutedConnection) -> dict:
    return {
        "segments": [
            {"mode": seg.mode, "points": [[p[0], p[1]] for p in seg.points]}
            for seg in route.segments
        ],
        "startMarker": route.start_marker,
        "endMarker": route.end_marker,
        "markerSize": route.marker_size,
    }


def _element_dict(element: LayoutedElement) -> dict:
    attrs = {}
    for key, value in element.attributes.items():
        if isinstance(value, list):
            attrs[key] = [float(v) for v in value]
        elif isinstance(value, _JSON_SCALARS):
            attrs[key] = value
    out = {
        "id": element.id,
        "kind": element.kind,
        "x": element.x,
        "y": element.y,
        "width": element.width,
        "height": element.height,
        "attributes": attrs,
        "originSpan": (
            [element.origin_span.start, element.origin_span.end]
            if element.origin_span is not None
            else None
        ),
        "children": [_element_dict(c) for c in element.children],
    }
    if element.route is not None:
        out["route"] = _route_dict(element.route)
    return out


def to_render_model(layouted: LayoutedDiagram) -> dict:
    """JSON-serializable tree consumed by the session protocol and web view."""
    return {"schemaVersion": SCHEMA_VERSION, "root": _element_dict(layouted.root)}


def iter_model_elements(model: dict):
    def walk(node):
        yield node
        for child in node.get("children", ()):
            yield from walk(child)

    yield from walk(model["root"])


def validate_render_model(model: dict) -> list[str]:
    """Schema check used by tests and the protocol goldens; [] when valid."""
    problems: list[str] = []
    if model.get("schemaVersion") != SCHEMA_VERSION:
        problems.append(f"schemaVersion must be {SCHEMA_VERSION}")
    root = model.get("root")
    if not isinstance(root, dict):
        return problems + ["missing root element"]
    seen: set[str] = set()

    def check(node: dict, path: str) -> None:
        for key in ("id", "kind", "x", "y", "width", "height", "attributes", "children"):
            if key not in node:
                problems.append(f"{path}: missing field {key!r}")
                return
        if not isinstance(node["id"], str) or not node["id"]:
            problems.append(f"{path}: bad id")
        if node["id"] in seen:
            problems.append(f"{path}: duplicate id {node['id']}")
        seen.add(node["id"])
        for key in ("x", "y", "width", "height"):
            if not isinstance(node[key], (int, float)) or isinstance(node[key], bool):
                problems.append(f"{path}: field {key!r} is not a number")
        if not isinstance(node["attributes"], dict):
            problems.append(f"{path}: attributes is not an object")
        span = node.get("originSpan")
        if span is not None and (
            not isinstance(span, list)
            or len(span) != 2
            or not all(isinstance(v, int) for v in span)
        ):
            problems.append(f"{path}: bad originSpan")
        if node["kind"] == "canvasConnection":
            route = node.get("route")
            if not isinstance(route, dict) or "segments" not in route:
                problems.append(f"{path}: connection without route")
            else:
                for i, seg in enumerate(route["segments"]):
                    if seg.get("mode") not in ("line", "axisAligned", "bezier"):
                        problems.append(f"{path}: segment {i} has bad mode")
                    pts = seg.get("points")
                    if not isinstance(pts, list) or any(
                        not isinstance(p, list) or len(p) != 2 for p in pts or []
                    ):
                        problems.append(f"{path}: segment {i} has bad points")
        for i, child in enumerate(node["children"]):
            check(child, f"{path}/{i}")

    check(root, "root")
    return problems
