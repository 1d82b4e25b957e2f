"""Graphical-interaction edit engine.

At interaction start we compute, once, how arbitrary parameter values (dx,
dy, ...) map to text edits: which number literals to rewrite, or where to
insert a layout block when none exists. During the interaction each update
materializes the plan cumulatively against the start snapshot (idempotent per
params), and a prediction is computed by patching the last executed diagram
model with the quantized values and re-running layout only. Because the full
re-execution parses the very literals the plan wrote, prediction and full
render agree bit-for-bit unless the program derives other values from layout
input (the documented flicker case, reconciled by the next full update).
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .interpreter import ExecutionResult
from .layout import LayoutedDiagram, LayoutedElement, iter_layouted, layout_diagram
from .model import AbsolutePoint, Diagram, RelativePoint, find_element, replace_attributes
from .render_model import _route_dict
from .routing import EndAnchor, RouteSpec
from .source import SourceDocument, Span, TextEdit, format_number, parse_number


class NotEditable(Exception):
    """The interaction cannot be mapped to text edits; carries the span of
    the expression that computes the value, for UI display."""

    def __init__(self, message: str, span: Span | None = None):
        super().__init__(message)
        self.message = message
        self.span = span


class UnknownElement(Exception):
    pass


@dataclass(frozen=True)
class InteractionParams:
    """Cumulative parameters relative to interaction start."""

    kind: str  # moveElement | resizeElement | moveConnectionAnchor | moveLabel
    dx: float = 0.0
    dy: float = 0.0
    d_width: float = 0.0
    d_height: float = 0.0
    d_param: float = 0.0

    @staticmethod
    def zero(kind: str) -> "InteractionParams":
        return InteractionParams(kind)

    @staticmethod
    def from_dict(kind: str, data: dict) -> "InteractionParams":
        def num(name: str) -> float:
            v = data.get(name, 0.0)
            return float(v) if isinstance(v, (int, float)) and not isinstance(v, bool) else 0.0

        return InteractionParams(
            kind, num("dx"), num("dy"), num("dWidth"), num("dHeight"), num("dParam")
        )


# edit-site records, filled in by layer-3 modules during execution


@dataclass
class LiteralSite:
    span: Span
    base: float


@dataclass
class EditSites:
    """Where an element's editable literals live in the source text."""

    has_pos: bool = False
    pos_relative: bool = False
    pos_x: LiteralSite | None = None
    pos_y: LiteralSite | None = None
    pos_expr_span: Span | None = None  # pos exists but is computed
    width: LiteralSite | None = None
    height: LiteralSite | None = None
    width_expr_span: Span | None = None
    height_expr_span: Span | None = None
    anchor_start: LiteralSite | None = None
    anchor_end: LiteralSite | None = None
    label_t: LiteralSite | None = None
    layout_block_insert: int | None = None
    class_block_insert: int | None = None
    call_end: int | None = None


# the plan itself


def _wrap_mod1(value: float) -> float:
    return value % 1.0


def _wrap_clamp01(value: float) -> float:
    return min(max(value, 0.0), 1.0)


_PARAM_OF = {
    "x": lambda p: p.dx,
    "y": lambda p: p.dy,
    "w": lambda p: p.d_width,
    "h": lambda p: p.d_height,
    "t": lambda p: p.d_param,
}

_WRAPS = {"mod1": _wrap_mod1, "clamp01": _wrap_clamp01, None: lambda v: v}


@dataclass(frozen=True)
class PlanSlot:
    """One text range replaced per update: a literal span or an insertion
    point (zero-width span)."""

    span: Span
    original: str
    # "literal": formatted base+delta; "insert_*": whole generated snippets
    form: str
    axis: str | None = None
    base_x: float = 0.0
    base_y: float = 0.0
    wrap: str | None = None

    def render(self, params: InteractionParams) -> str:
        if self.form == "literal":
            base = self.base_y if self.axis in ("y", "h") else self.base_x
            value = _WRAPS[self.wrap](base + _PARAM_OF[self.axis](params))
            return format_number(value)
        fx = format_number(self.base_x + params.dx)
        fy = format_number(self.base_y + params.dy)
        if self.form == "insert_pos":
            return f"\n    pos = apos({fx}, {fy})\n"
        if self.form == "insert_layout":
            return f"\n    layout {{ pos = apos({fx}, {fy}) }}\n"
        if self.form == "insert_block":
            return f" {{ layout {{ pos = apos({fx}, {fy}) }} }}"
        fw = format_number(self.base_x + params.d_width)
        fh = format_number(self.base_y + params.d_height)
        if self.form == "insert_size":
            return f"\n    width = {fw}\n    height = {fh}\n"
        if self.form == "insert_layout_size":
            return f"\n    layout {{\n    width = {fw}\n    height = {fh} }}\n"
        if self.form == "insert_block_size":
            return f" {{ layout {{\n    width = {fw}\n    height = {fh} }} }}"
        raise AssertionError(self.form)


@dataclass
class EditPlan:
    """Interaction-start mapping from parameters to text edits and, for
    predictions, to a model attribute patch."""

    element_id: str
    kind: str
    doc_version: int
    slots: tuple[PlanSlot, ...]
    patch_kind: str  # abs_pos | rel_pos | size | anchor | label
    base_x: float = 0.0
    base_y: float = 0.0
    rel_target: str | None = None
    route_spec: RouteSpec | None = None
    anchor_end: str = "end"
    wrap: str | None = None

    def replacements(self, params: InteractionParams) -> list[str]:
        return [slot.render(params) for slot in self.slots]

    def patch(self, params: InteractionParams) -> dict:
        q = lambda base, axis, wrap=None: parse_number(
            format_number(_WRAPS[wrap](base + _PARAM_OF[axis](params)))
        )
        if self.patch_kind == "abs_pos":
            return {"pos": AbsolutePoint(q(self.base_x, "x"), q(self.base_y, "y"))}
        if self.patch_kind == "rel_pos":
            return {"pos": RelativePoint(self.rel_target, q(self.base_x, "x"), q(self.base_y, "y"))}
        if self.patch_kind == "size":
            return {"width": q(self.base_x, "w"), "height": q(self.base_y, "h")}
        if self.patch_kind == "label":
            return {"t": q(self.base_x, "t", "clamp01")}
        if self.patch_kind == "anchor":
            value = q(self.base_x, "t", "mod1")
            spec = self.route_spec
            if self.anchor_end == "start":
                return {"route": replace(spec, start_param=value)}
            steps = list(spec.steps)
            last = steps[-1]
            steps[-1] = replace(last, target=EndAnchor(value))
            return {"route": replace(spec, steps=tuple(steps))}
        raise AssertionError(self.patch_kind)


def _climb_to_kind(layouted_by_id: dict[str, LayoutedElement], element_id: str, kind: str) -> str | None:
    candidate = element_id
    while candidate:
        node = layouted_by_id.get(candidate)
        if node is not None and node.kind == kind:
            return candidate
        if "/" not in candidate:
            return None
        candidate = candidate.rsplit("/", 1)[0]
    return None


def build_plan(
    execution: ExecutionResult,
    layouted: LayoutedDiagram,
    diagram: Diagram,
    doc: SourceDocument,
    element_id: str,
    kind: str,
    anchor_end: str = "end",
) -> EditPlan:
    """Compute the interaction-start edit plan for one element.

    Raises UnknownElement when the id is not in the current render and
    NotEditable when the addressed value is computed by non-literal
    expressions (the interaction is refused with the expression's span).
    """
    by_id = {el.id: el for el in iter_layouted(layouted.root)}
    if element_id not in by_id:
        raise UnknownElement(element_id)
    text = doc.text
    doc_version = doc.version

    if kind in ("moveElement", "resizeElement"):
        target_id = _climb_to_kind(by_id, element_id, "canvasElement")
        if target_id is None:
            raise NotEditable(f"{element_id} is not a movable element")
        sites: EditSites | None = execution.edit_sites.get(target_id)
        node = by_id[target_id]
        if kind == "moveElement":
            return _build_move_plan(sites, node, diagram, target_id, doc_version, text)
        return _build_resize_plan(sites, node, target_id, doc_version, text)

    if kind == "moveConnectionAnchor":
        target_id = _climb_to_kind(by_id, element_id, "canvasConnection")
        if target_id is None:
            raise NotEditable(f"{element_id} is not a connection")
        sites = execution.edit_sites.get(target_id)
        site = None
        if sites is not None:
            site = sites.anchor_start if anchor_end == "start" else sites.anchor_end
        if site is None:
            raise NotEditable(
                f"the {anchor_end} anchor of {target_id} has no editable route literal"
            )
        element = find_element(diagram.root, target_id)
        spec = element.attributes.get("route") if element is not None else None
        if not isinstance(spec, RouteSpec):
            raise NotEditable(f"{target_id} has no explicit route")
        slot = PlanSlot(site.span, text[site.span.start : site.span.end], "literal", "t",
                        site.base, 0.0, "mod1")
        return EditPlan(target_id, kind, doc_version, (slot,), "anchor",
                        base_x=site.base, route_spec=spec, anchor_end=anchor_end, wrap="mod1")

    if kind == "moveLabel":
        target_id = _climb_to_kind(by_id, element_id, "label")
        sites = execution.edit_sites.get(target_id) if target_id else None
        if target_id is None or sites is None or sites.label_t is None:
            raise NotEditable(f"{element_id} has no editable label position")
        site = sites.label_t
        slot = PlanSlot(site.span, text[site.span.start : site.span.end], "literal", "t",
                        site.base, 0.0, "clamp01")
        return EditPlan(target_id, kind, doc_version, (slot,), "label",
                        base_x=site.base, wrap="clamp01")

    raise NotEditable(f"unknown interaction kind '{kind}'")


def _build_move_plan(sites, node: LayoutedElement, diagram: Diagram, target_id: str,
                     doc_version: int, text: str) -> EditPlan:
    if sites is not None and sites.has_pos:
        if sites.pos_x is not None and sites.pos_y is not None:
            slots = (
                PlanSlot(sites.pos_x.span, text[sites.pos_x.span.start : sites.pos_x.span.end],
                         "literal", "x", sites.pos_x.base, 0.0),
                PlanSlot(sites.pos_y.span, text[sites.pos_y.span.start : sites.pos_y.span.end],
                         "literal", "y", 0.0, sites.pos_y.base),
            )
            slots = tuple(sorted(slots, key=lambda s: s.span.start))
            if sites.pos_relative:
                element = find_element(diagram.root, target_id)
                pos = element.attributes.get("pos") if element is not None else None
                rel_target = pos.target if isinstance(pos, RelativePoint) else None
                return EditPlan(target_id, "moveElement", doc_version, slots, "rel_pos",
                                sites.pos_x.base, sites.pos_y.base, rel_target=rel_target)
            return EditPlan(target_id, "moveElement", doc_version, slots, "abs_pos",
                            sites.pos_x.base, sites.pos_y.base)
        raise NotEditable(
            "position is computed by an expression; edit the source instead",
            sites.pos_expr_span,
        )
    # no pos anywhere: insert one at the element's current canvas position
    base_x, base_y = node.x, node.y
    if sites is not None and sites.layout_block_insert is not None:
        slot = PlanSlot(Span(sites.layout_block_insert, sites.layout_block_insert), "",
                        "insert_pos", None, base_x, base_y)
    elif sites is not None and sites.class_block_insert is not None:
        slot = PlanSlot(Span(sites.class_block_insert, sites.class_block_insert), "",
                        "insert_layout", None, base_x, base_y)
    elif sites is not None and sites.call_end is not None:
        slot = PlanSlot(Span(sites.call_end, sites.call_end), "", "insert_block", None,
                        base_x, base_y)
    else:
        raise NotEditable(f"{target_id} has no editable definition")
    return EditPlan(target_id, "moveElement", doc_version, (slot,), "abs_pos", base_x, base_y)


def _build_resize_plan(sites, node: LayoutedElement, target_id: str, doc_version: int,
                       text: str) -> EditPlan:
    if sites is None:
        raise NotEditable(f"{target_id} has no editable definition")
    if sites.width_expr_span is not None:
        raise NotEditable("width is computed by an expression", sites.width_expr_span)
    if sites.height_expr_span is not None:
        raise NotEditable("height is computed by an expression", sites.height_expr_span)
    base_w = sites.width.base if sites.width is not None else node.width
    base_h = sites.height.base if sites.height is not None else node.height
    slots: list[PlanSlot] = []
    if sites.width is not None:
        slots.append(PlanSlot(sites.width.span, text[sites.width.span.start : sites.width.span.end],
                              "literal", "w", sites.width.base, 0.0))
    if sites.height is not None:
        slots.append(PlanSlot(sites.height.span, text[sites.height.span.start : sites.height.span.end],
                              "literal", "h", 0.0, sites.height.base))
    if sites.width is None or sites.height is None:
        if sites.width is None and sites.height is None:
            if sites.layout_block_insert is not None:
                slots.append(PlanSlot(Span(sites.layout_block_insert, sites.layout_block_insert),
                                      "", "insert_size", None, base_w, base_h))
            elif sites.class_block_insert is not None:
                slots.append(PlanSlot(Span(sites.class_block_insert, sites.class_block_insert),
                                      "", "insert_layout_size", None, base_w, base_h))
            elif sites.call_end is not None:
                slots.append(PlanSlot(Span(sites.call_end, sites.call_end), "",
                                      "insert_block_size", None, base_w, base_h))
            else:
                raise NotEditable(f"{target_id} has no editable definition")
        else:
            raise NotEditable(
                "resize needs both width and height literals, or neither",
                sites.width.span if sites.width is not None else sites.height.span,
            )
    slots.sort(key=lambda s: s.span.start)
    return EditPlan(target_id, "resizeElement", doc_version, tuple(slots), "size", base_w, base_h)


# applying plans


def edits_between(plan: EditPlan, previous: list[str] | None,
                  params: InteractionParams) -> tuple[list[TextEdit], list[str]]:
    """Text edits transforming the document from its previous materialization
    (or the start snapshot when ``previous`` is None) to ``params``.

    Spans are tracked against the start snapshot; offsets shift by the length
    differences of earlier replacements, so updates stay cumulative and
    idempotent per params value.
    """
    new_texts = plan.replacements(params)
    if previous is None:
        previous = [slot.original for slot in plan.slots]
    edits: list[TextEdit] = []
    shift = 0
    for slot, old_text, new_text in zip(plan.slots, previous, new_texts):
        start = slot.span.start + shift
        if new_text != old_text:
            edits.append(TextEdit(Span(start, start + len(old_text)), new_text))
        shift += len(old_text) - slot.span.length
    return edits, new_texts


def patched_diagram(plan: EditPlan, diagram: Diagram, params: InteractionParams) -> Diagram:
    """The prediction model: the last executed diagram with the quantized
    parameter values applied to the target element's attributes."""
    return replace_attributes(diagram, plan.element_id, plan.patch(params))


def diff_layouts(old: LayoutedDiagram, new: LayoutedDiagram) -> list[dict]:
    """Per-element geometry deltas between two layouted trees.

    Each entry carries the incremental translation plus the authoritative
    resulting geometry (and new route points for connections); entries exist
    only for elements whose geometry changed.
    """
    old_by_id = {el.id: el for el in iter_layouted(old.root)}
    deltas: list[dict] = []
    for el in iter_layouted(new.root):
        before = old_by_id.get(el.id)
        if before is None:
            continue
        changed = (
            before.x != el.x
            or before.y != el.y
            or before.width != el.width
            or before.height != el.height
            or before.route != el.route
        )
        if not changed:
            continue
        entry = {
            "id": el.id,
            "ddx": el.x - before.x,
            "ddy": el.y - before.y,
            "x": el.x,
            "y": el.y,
            "width": el.width,
            "height": el.height,
        }
        if el.route is not None and el.route != before.route:
            entry["route"] = _route_dict(el.route)
        deltas.append(entry)
    return deltas


def predict(plan: EditPlan, base_diagram: Diagram, base_layouted: LayoutedDiagram,
            params: InteractionParams) -> tuple[LayoutedDiagram, list[dict]]:
    """Predicted layout at ``params`` plus the delta against the base render."""
    layouted = layout_diagram(patched_diagram(plan, base_diagram, params))
    return layouted, diff_layouts(base_layouted, layouted)
