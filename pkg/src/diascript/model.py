"""Diagram data structures: the element tree and its construction.

A diagram is a triple of an element tree, an ordered list of style rules, and
a set of font metrics. During execution elements are mutable builders; a
freeze pass assigns deterministic path-derived ids and produces the immutable
tree handed to layout.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING, Mapping

from .source import Span

if TYPE_CHECKING:
    from .fonts import FontCatalog
    from .styles import StyleRule

ELEMENT_KINDS = (
    "rect",
    "ellipse",
    "path",
    "text",
    "vbox",
    "hbox",
    "canvas",
    "canvasElement",
    "canvasConnection",
    "connectionSegment",
    "label",
)

# containers removed from the layouted output
LAYOUT_ONLY_KINDS = ("vbox", "hbox")

# attributes consumed by layout; everything else is visual
LAYOUT_ATTRIBUTES = frozenset(
    {"pos", "width", "height", "padding", "margin", "gap", "alignment", "route",
     "source", "target", "t", "distance"}
)


class IllegalChild(Exception):
    pass


@dataclass(frozen=True)
class AbsolutePoint:
    """Position in canvas coordinates, as produced by ``apos(x, y)``."""

    x: float
    y: float

    def dsl_get_field(self, name: str):
        if name == "x":
            return self.x
        if name == "y":
            return self.y
        return None


@dataclass(frozen=True)
class RelativePoint:
    """Offset from another element's top-left, as produced by ``rpos``.

    ``target`` is an ElementBuilder during execution and an element id string
    after the freeze pass.
    """

    target: object
    dx: float
    dy: float

    def dsl_get_field(self, name: str):
        if name == "dx":
            return self.dx
        if name == "dy":
            return self.dy
        if name == "target":
            return self.target
        return None


def _check_parent_child(parent_kind: str, child_kind: str) -> None:
    if child_kind not in ELEMENT_KINDS:
        raise IllegalChild(f"unknown element kind '{child_kind}'")
    if child_kind in ("canvasElement", "canvasConnection") and parent_kind != "canvas":
        raise IllegalChild(f"'{child_kind}' is only legal under a canvas")
    if child_kind in ("connectionSegment", "label") and parent_kind != "canvasConnection":
        raise IllegalChild(f"'{child_kind}' is only legal under a canvasConnection")
    if parent_kind == "canvas" and child_kind not in ("canvasElement", "canvasConnection"):
        raise IllegalChild(f"a canvas cannot contain '{child_kind}'")
    if parent_kind == "text":
        raise IllegalChild("text elements are leaves")


class ElementBuilder:
    """Mutable element under construction; frozen into ElementNode later."""

    __slots__ = ("kind", "attributes", "classes", "children", "origin_span", "methods", "edit_sites")

    def __init__(
        self,
        kind: str,
        attributes: dict | None = None,
        classes=(),
        origin_span: Span | None = None,
    ):
        if kind not in ELEMENT_KINDS:
            raise IllegalChild(f"unknown element kind '{kind}'")
        self.kind = kind
        self.attributes: dict[str, object] = dict(attributes or {})
        self.classes: list[str] = list(classes)
        self.children: list[ElementBuilder] = []
        self.origin_span = origin_span
        self.methods: dict[str, object] = {}
        self.edit_sites: object | None = None

    def append(self, child: "ElementBuilder") -> "ElementBuilder":
        _check_parent_child(self.kind, child.kind)
        self.children.append(child)
        return child

    # DSL field access: methods injected by layer-3 modules win, then attributes
    def dsl_get_field(self, name: str):
        if name in self.methods:
            return self.methods[name]
        return self.attributes.get(name)

    def __repr__(self) -> str:
        return f"<element {self.kind} ({len(self.children)} children)>"


def create_element(
    kind: str,
    attributes: dict | None = None,
    classes=(),
    children=(),
    origin_span: Span | None = None,
) -> ElementBuilder:
    """Construct an element, validating child legality for the kind."""
    builder = ElementBuilder(kind, attributes, classes, origin_span)
    for child in children:
        builder.append(child)
    return builder


@dataclass(frozen=True)
class ElementNode:
    """Immutable element with a deterministic path-derived id."""

    id: str
    kind: str
    attributes: Mapping[str, object]
    classes: frozenset[str]
    children: tuple["ElementNode", ...]
    origin_span: Span | None = None


@dataclass(frozen=True)
class Diagram:
    """The pre-layout triple: element tree, style rules, fonts."""

    root: ElementNode
    style_rules: tuple["StyleRule", ...] = ()
    fonts: "FontCatalog | None" = None


@dataclass(frozen=True)
class FrozenTree:
    root: ElementNode
    origins: dict[str, Span]
    edit_sites: dict[str, object]
    ids_by_builder: dict[int, str]


def freeze_tree(root: ElementBuilder) -> FrozenTree:
    """Assign ids, resolve element references to ids, and freeze the tree.

    Ids are ``parent-id + "/" + kind + index`` with the index counted per kind
    among siblings, so appending a new element never renames earlier ones.
    """
    ids: dict[int, str] = {}

    def assign(builder: ElementBuilder, own_id: str) -> None:
        ids[id(builder)] = own_id
        counters: dict[str, int] = {}
        for child in builder.children:
            n = counters.get(child.kind, 0)
            counters[child.kind] = n + 1
            assign(child, f"{own_id}/{child.kind}{n}")

    assign(root, f"{root.kind}0")

    origins: dict[str, Span] = {}
    edit_sites: dict[str, object] = {}

    def resolve_value(value):
        if isinstance(value, ElementBuilder):
            return ids[id(value)]
        if isinstance(value, RelativePoint) and isinstance(value.target, ElementBuilder):
            return RelativePoint(ids[id(value.target)], value.dx, value.dy)
        if isinstance(value, list):
            return [resolve_value(v) for v in value]
        return value

    def build(builder: ElementBuilder) -> ElementNode:
        own_id = ids[id(builder)]
        if builder.origin_span is not None:
            origins[own_id] = builder.origin_span
        if builder.edit_sites is not None:
            edit_sites[own_id] = builder.edit_sites
        attrs = {k: resolve_value(v) for k, v in builder.attributes.items()}
        children = tuple(build(c) for c in builder.children)
        return ElementNode(own_id, builder.kind, attrs, frozenset(builder.classes), children,
                           builder.origin_span)

    return FrozenTree(build(root), origins, edit_sites, ids)


def find_element(root: ElementNode, element_id: str) -> ElementNode | None:
    if root.id == element_id:
        return root
    if not element_id.startswith(root.id + "/"):
        return None
    for child in root.children:
        found = find_element(child, element_id)
        if found is not None:
            return found
    return None


def replace_attributes(diagram: Diagram, element_id: str, updates: Mapping[str, object]) -> Diagram:
    """New diagram with ``updates`` merged into one element's attributes.

    This is the substrate for interaction predictions: patch the value a text
    edit would produce, then re-layout without re-executing the program.
    """

    def rebuild(node: ElementNode) -> ElementNode:
        if node.id == element_id:
            attrs = dict(node.attributes)
            attrs.update(updates)
            return ElementNode(node.id, node.kind, attrs, node.classes, node.children,
                               node.origin_span)
        if not element_id.startswith(node.id + "/"):
            return node
        children = tuple(rebuild(c) for c in node.children)
        if all(new is old for new, old in zip(children, node.children)):
            return node
        return ElementNode(node.id, node.kind, node.attributes, node.classes, children,
                           node.origin_span)

    root = rebuild(diagram.root)
    if root is diagram.root and find_element(diagram.root, element_id) is None:
        raise KeyError(element_id)
    return Diagram(root, diagram.style_rules, diagram.fonts)


def iter_elements(root: ElementNode):
    yield root
    for child in root.children:
        yield from iter_elements(child)
