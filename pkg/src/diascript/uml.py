"""Layer-3 module: the class diagram DSL.

``classDiagram { ... }`` evaluates its block with the diagram vocabulary in
scope: ``class``/``enum`` constructors, visibility sections, association
operators, the ``with`` route builder, ``layout`` and ``styles`` scope
functions, and the ``apos``/``rpos`` position constructors. Defining a class
also binds a variable of the same name, so associations read naturally:
``Menu --> Dish``.

While evaluating, the module records where editable literals live in the
source (positions, sizes, anchors, label parameters), which is what lets the
edit engine translate graphical interactions back into text edits.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from .editing import EditSites, LiteralSite
from .fonts import default_catalog
from .interpreter import CallContext, Interpreter
from .model import (
    AbsolutePoint,
    Diagram,
    ElementBuilder,
    RelativePoint,
    create_element,
    freeze_tree,
)
from .nodes import Assign, Call, FunctionLit, Ident, Node, NumberLit
from .routing import EndAnchor, RouteSpec, RouteStep
from .source import Span
from .styles import KNOWN_ATTRIBUTES, Selector, StyleRule
from .values import DslObject, Environment, NativeFunction, ScriptFunction, type_name

# operator -> (marker at source end, marker at target end, dashed line)
ASSOCIATION_OPERATORS: dict[str, tuple[str | None, str | None, bool]] = {
    "--": (None, None, False),
    "-->": (None, "openArrow", False),
    "<--": ("openArrow", None, False),
    "<-->": ("openArrow", "openArrow", False),
    "!--": ("cross", None, False),
    "--!": (None, "cross", False),
    "<>--": ("diamondHollow", None, False),
    "--<>": (None, "diamondHollow", False),
    "*--": ("diamondFilled", None, False),
    "--*": (None, "diamondFilled", False),
    "extends": (None, "triangleHollow", False),
    "implements": (None, "triangleHollow", True),
}

SECTION_PREFIXES = {"public": "+", "private": "-", "protected": "#", "package": "~"}

_COMPARTMENT_PADDING = 6.0
_DASH_PATTERN = "6 4"


@dataclass
class _DiagramState:
    canvas: ElementBuilder
    # (selector chain, attributes, scope builder) resolved to rules at freeze
    pending_rules: list[tuple[tuple[Selector, ...], dict, ElementBuilder]] = field(
        default_factory=list
    )
    # the classDiagram block environment: class names bind here so elements
    # created inside loops stay addressable afterwards
    env: Environment | None = None


def _require_block(ctx: CallContext, value, what: str) -> ScriptFunction:
    if isinstance(value, ScriptFunction):
        return value
    raise ctx.error(f"{what} must be a block, got {type_name(value)}")


def _require_number(ctx: CallContext, value, what: str) -> float:
    if isinstance(value, float) and not isinstance(value, bool):
        return value
    raise ctx.error(f"{what} must be a number, got {type_name(value)}")


def _run_block(
    interp: Interpreter,
    block: ScriptFunction,
    bindings: dict,
    target: DslObject | None = None,
):
    env = Environment(parent=block.env, assign_target=target)
    env.bindings.update(bindings)
    value = None
    for stmt in block.body:
        value = interp.evaluate(stmt, env)
    return value


# position constructors


def _native_apos(ctx: CallContext, args, named):
    if len(args) != 2:
        raise ctx.error("apos(x, y) takes exactly two arguments")
    return AbsolutePoint(_require_number(ctx, args[0], "x"), _require_number(ctx, args[1], "y"))


def _native_rpos(ctx: CallContext, args, named):
    if len(args) != 3:
        raise ctx.error("rpos(target, dx, dy) takes exactly three arguments")
    target = args[0]
    if not isinstance(target, ElementBuilder) or target.kind != "canvasElement":
        raise ctx.error(f"rpos target must be a class element, got {type_name(target)}")
    return RelativePoint(
        target, _require_number(ctx, args[1], "dx"), _require_number(ctx, args[2], "dy")
    )


# layout scope function


def _literal(node: Node) -> tuple[Span, float] | None:
    if isinstance(node, NumberLit):
        return node.span, node.value
    return None


def _positional_args(call: Call) -> list[Node]:
    return [a for a in call.args if not (isinstance(a, Assign) and isinstance(a.target, Ident))]


def _scan_layout_block(block_node: FunctionLit, sites: EditSites) -> None:
    """Record the literal spans of pos/width/height assignments.

    Only direct statements count: values produced inside control flow are not
    analyzable at interaction start and stay NotEditable.
    """
    for stmt in block_node.body:
        if not (isinstance(stmt, Assign) and isinstance(stmt.target, Ident)):
            continue
        name = stmt.target.name
        value = stmt.value
        if name == "pos":
            sites.has_pos = True
            sites.pos_x = sites.pos_y = None
            sites.pos_expr_span = value.span
            if isinstance(value, Call) and isinstance(value.callee, Ident):
                positional = _positional_args(value)
                if value.callee.name == "apos" and len(positional) == 2:
                    lx, ly = _literal(positional[0]), _literal(positional[1])
                    if lx and ly:
                        sites.pos_x, sites.pos_y = LiteralSite(*lx), LiteralSite(*ly)
                        sites.pos_relative = False
                        sites.pos_expr_span = None
                elif value.callee.name == "rpos" and len(positional) == 3:
                    lx, ly = _literal(positional[1]), _literal(positional[2])
                    if lx and ly:
                        sites.pos_x, sites.pos_y = LiteralSite(*lx), LiteralSite(*ly)
                        sites.pos_relative = True
                        sites.pos_expr_span = None
        elif name == "width":
            lit = _literal(value)
            sites.width = LiteralSite(*lit) if lit else None
            sites.width_expr_span = None if lit else value.span
        elif name == "height":
            lit = _literal(value)
            sites.height = LiteralSite(*lit) if lit else None
            sites.height_expr_span = None if lit else value.span


def _make_layout_native(element: ElementBuilder):
    def layout_native(ctx: CallContext, args, named):
        if len(args) != 1:
            raise ctx.error("layout { ... } takes exactly one block")
        block = _require_block(ctx, args[0], "layout argument")
        target = DslObject()
        ctx.interp.eval_block_with_target(block, target)
        for name, value in target.fields.items():
            if name == "pos":
                if not isinstance(value, (AbsolutePoint, RelativePoint)):
                    raise ctx.error(f"pos must be apos(...) or rpos(...), got {type_name(value)}")
            elif name in ("width", "height"):
                _require_number(ctx, value, name)
            else:
                ctx.report("warning", f"unknown layout attribute '{name}'")
                continue
            element.attributes[name] = value
        sites = element.edit_sites
        if not isinstance(sites, EditSites):
            sites = element.edit_sites = EditSites()
        block_node = ctx.arg_nodes[0] if ctx.arg_nodes else None
        if isinstance(block_node, FunctionLit):
            sites.layout_block_insert = block_node.span.start + 1
            _scan_layout_block(block_node, sites)
        return element

    return NativeFunction("layout", layout_native)


# styles scope function


def _make_styles_native(state: _DiagramState, scope: ElementBuilder,
                        attr_target: ElementBuilder | None = None):
    """Element-specific styles. Scoped rules attach beneath ``scope``; bare
    assignments become local attributes of ``attr_target`` (for a class, the
    visible box rect rather than the positioning wrapper)."""
    attr_target = attr_target if attr_target is not None else scope

    def styles_native(ctx: CallContext, args, named):
        if len(args) != 1:
            raise ctx.error("styles { ... } takes exactly one block")
        block = _require_block(ctx, args[0], "styles argument")
        chain: list[Selector] = []

        def check_attrs(fields: dict) -> dict:
            for name in fields:
                if name not in KNOWN_ATTRIBUTES:
                    ctx.report("warning", f"unknown style attribute '{name}'")
            return dict(fields)

        def run(inner_block: ScriptFunction) -> dict:
            recorder = DslObject()
            _run_block(ctx.interp, inner_block, {"cls": cls_native, "type": type_native}, recorder)
            return check_attrs(recorder.fields)

        def selector_native(selector_kind: str):
            def native(ctx2: CallContext, args2, named2):
                if len(args2) != 2:
                    raise ctx2.error(f"{selector_kind}(name, block) takes two arguments")
                name = args2[0]
                if not isinstance(name, str):
                    raise ctx2.error(f"selector name must be a string, got {type_name(name)}")
                inner = _require_block(ctx2, args2[1], "style rule body")
                chain.append(Selector("class" if selector_kind == "cls" else "type", name))
                attrs = run(inner)
                if attrs:
                    state.pending_rules.append((tuple(chain), attrs, scope))
                chain.pop()
                return None

            return NativeFunction(selector_kind, native)

        cls_native = selector_native("cls")
        type_native = selector_native("type")

        attr_target.attributes.update(run(block))
        return scope

    return NativeFunction("styles", styles_native)


# class / enum construction


def _text_el(text: str, classes, origin: Span | None, attrs: dict | None = None) -> ElementBuilder:
    merged: dict = {"text": text}
    if attrs:
        merged.update(attrs)
    return create_element("text", merged, classes, origin_span=origin)


@dataclass
class _Row:
    order: int
    prefix: str
    text: str
    span: Span | None
    is_method: bool


def _make_section_native(section: str, rows: list[_Row], counter: list[int]):
    prefix = SECTION_PREFIXES[section]

    def native(ctx: CallContext, args, named):
        if len(args) != 1:
            raise ctx.error(f"{section} {{ ... }} takes exactly one block")
        block = _require_block(ctx, args[0], f"{section} argument")
        env = Environment(parent=block.env)
        for stmt in block.body:
            value = ctx.interp.evaluate(stmt, env)
            if isinstance(stmt, Assign):
                continue  # scaffolding, not a member row
            if isinstance(value, str):
                counter[0] += 1
                rows.append(_Row(counter[0], prefix, value, stmt.span, "(" in value))
            else:
                ctx.report(
                    "warning",
                    f"{section} entries must be strings, got {type_name(value)}",
                    stmt.span,
                )
        return None

    return NativeFunction(section, native)


def _assemble_box(
    box: ElementBuilder,
    name: str,
    rows: list[_Row],
    stereotype: str | None,
    abstract: bool,
    origin: Span,
    name_span: Span | None,
) -> None:
    """Fill the class box rect with title and member compartments."""
    title_children: list[ElementBuilder] = []
    if stereotype:
        title_children.append(
            _text_el("«" + stereotype + "»", ["stereotype"], name_span or origin)
        )
    title_attrs = {"fontStyle": "italic"} if abstract else None
    title_children.append(_text_el(name, ["title"], name_span or origin, title_attrs))

    def compartment(children, alignment: str, extra_class: str) -> ElementBuilder:
        return create_element(
            "vbox",
            {"padding": _COMPARTMENT_PADDING, "alignment": alignment},
            ["compartment", extra_class],
            children=children,
            origin_span=origin,
        )

    compartments = [compartment(title_children, "center", "title-compartment")]
    ordered = sorted(rows, key=lambda r: r.order)
    attribute_rows = [r for r in ordered if not r.is_method]
    method_rows = [r for r in ordered if r.is_method]
    for group, cls in ((attribute_rows, "attributes-compartment"), (method_rows, "methods-compartment")):
        if not group:
            continue
        texts = [
            _text_el(f"{r.prefix} {r.text}" if r.prefix else r.text, ["member"], r.span)
            for r in group
        ]
        compartments.append(compartment(texts, "start", cls))

    outer = create_element("vbox", {"alignment": "stretch", "padding": 0.0}, origin_span=origin)
    for i, comp in enumerate(compartments):
        if i > 0:
            outer.append(
                create_element("rect", {"height": 1.0, "padding": 0.0}, ["separator"],
                               origin_span=origin)
            )
        outer.append(comp)
    box.append(outer)


def _block_offsets(ctx: CallContext) -> tuple[int | None, int | None]:
    """(offset just after the trailing block's '{', end of the whole call)."""
    block_node = None
    for node in ctx.arg_nodes:
        if isinstance(node, FunctionLit):
            block_node = node
    call_end = ctx.span.end if ctx.span is not None else None
    if block_node is not None:
        return block_node.span.start + 1, call_end
    return None, call_end


def _make_class_native(state: _DiagramState, kind_label: str, forced_stereotype: str | None):
    def native(ctx: CallContext, args, named):
        if ctx.interp.slots.get("uml_state") is not state:
            raise ctx.error(f"{kind_label}(...) outside its classDiagram")
        if not args or not isinstance(args[0], str):
            raise ctx.error(f"{kind_label}(name, ...) needs a string name")
        if len(args) > 2:
            raise ctx.error(f"{kind_label} takes a name and an optional block")
        name = args[0]
        block = _require_block(ctx, args[1], f"{kind_label} body") if len(args) > 1 else None
        abstract = named.get("abstract") is True
        stereotype = forced_stereotype
        if isinstance(named.get("stereotype"), str):
            stereotype = named["stereotype"]

        origin = ctx.span or Span(0, 0)
        element = create_element(
            "canvasElement", {}, [f"{kind_label}-element"], origin_span=origin
        )
        box = create_element("rect", {"padding": 0.0}, [kind_label], origin_span=origin)
        element.append(box)
        sites = EditSites()
        sites.class_block_insert, sites.call_end = _block_offsets(ctx)
        element.edit_sites = sites
        element.methods["layout"] = _make_layout_native(element)
        element.methods["styles"] = _make_styles_native(state, element, attr_target=box)
        state.canvas.append(element)

        rows: list[_Row] = []
        counter = [0]
        if block is not None:
            bindings = {
                "layout": element.methods["layout"],
                "styles": element.methods["styles"],
            }
            if kind_label == "class":
                for section in SECTION_PREFIXES:
                    bindings[section] = _make_section_native(section, rows, counter)
            env = Environment(parent=block.env)
            env.bindings.update(bindings)
            for stmt in block.body:
                value = ctx.interp.evaluate(stmt, env)
                if kind_label == "enum" and not isinstance(stmt, Assign):
                    if isinstance(value, str):
                        counter[0] += 1
                        rows.append(_Row(counter[0], "", value, stmt.span, False))
                    elif not isinstance(value, ElementBuilder) and value is not None:
                        ctx.report(
                            "warning",
                            f"enum literals must be strings, got {type_name(value)}",
                            stmt.span,
                        )

        name_span = ctx.arg_nodes[0].span if ctx.arg_nodes else None
        _assemble_box(box, name, rows, stereotype, abstract, origin, name_span)

        bind_env = state.env if state.env is not None else ctx.env
        if bind_env is not None:
            found, _ = bind_env.lookup(name)
            if found:
                ctx.report("warning", f"'{name}' is already bound; variable not rebound")
            else:
                bind_env.define(name, element)
        return element

    return NativeFunction(kind_label, native)


# associations and routes


@dataclass(frozen=True)
class _EndMark:
    param: float
    site: LiteralSite | None


@dataclass(frozen=True)
class _RouteBuilder:
    start_param: float
    start_site: LiteralSite | None
    steps: tuple[RouteStep, ...] = ()
    end_site: LiteralSite | None = None
    end_count: int = 0

    def dsl_get_field(self, name: str):
        if name not in ("line", "axisAligned", "bezier"):
            return None
        builder = self

        def native(ctx: CallContext, args, named):
            return _extend_route(ctx, builder, name, args)

        return NativeFunction(name, native)


def _as_target(ctx: CallContext, value) -> tuple[object, _EndMark | None]:
    if isinstance(value, _EndMark):
        return EndAnchor(value.param), value
    if isinstance(value, AbsolutePoint):
        return (value.x, value.y), None
    raise ctx.error("segment target must be end(...) or apos(...)")


def _extend_route(ctx: CallContext, builder: _RouteBuilder, mode: str, args) -> _RouteBuilder:
    if mode == "line":
        if len(args) != 1:
            raise ctx.error("line(target) takes exactly one argument")
        target, mark = _as_target(ctx, args[0])
        step = RouteStep("line", target)
    elif mode == "axisAligned":
        if len(args) != 2:
            raise ctx.error("axisAligned(fraction, target) takes two arguments")
        fraction = _require_number(ctx, args[0], "fraction")
        if not 0.0 <= fraction <= 1.0:
            raise ctx.error(f"invalid route: fraction {fraction} outside [0, 1]")
        target, mark = _as_target(ctx, args[1])
        step = RouteStep("axisAligned", target, fraction=fraction)
    else:
        if len(args) != 5:
            raise ctx.error("bezier(c1x, c1y, c2x, c2y, target) takes five arguments")
        c1 = (_require_number(ctx, args[0], "c1x"), _require_number(ctx, args[1], "c1y"))
        c2 = (_require_number(ctx, args[2], "c2x"), _require_number(ctx, args[3], "c2y"))
        target, mark = _as_target(ctx, args[4])
        step = RouteStep("bezier", target, c1=c1, c2=c2)
    end_site = builder.end_site
    end_count = builder.end_count
    if mark is not None:
        end_site = mark.site
        end_count += 1
    return replace(builder, steps=builder.steps + (step,), end_site=end_site, end_count=end_count)


def _native_start(ctx: CallContext, args, named):
    if len(args) != 1:
        raise ctx.error("start(fraction) takes exactly one argument")
    param = _require_number(ctx, args[0], "start fraction")
    if not 0.0 <= param < 1.0:
        raise ctx.error(f"invalid route: start fraction {param} outside [0, 1)")
    lit = _literal(ctx.arg_nodes[0]) if ctx.arg_nodes else None
    return _RouteBuilder(param, LiteralSite(*lit) if lit else None)


def _native_end(ctx: CallContext, args, named):
    if len(args) != 1:
        raise ctx.error("end(fraction) takes exactly one argument")
    param = _require_number(ctx, args[0], "end fraction")
    if not 0.0 <= param < 1.0:
        raise ctx.error(f"invalid route: end fraction {param} outside [0, 1)")
    lit = _literal(ctx.arg_nodes[0]) if ctx.arg_nodes else None
    return _EndMark(param, LiteralSite(*lit) if lit else None)


def _make_label_native(conn: ElementBuilder):
    def native(ctx: CallContext, args, named):
        if not args or not isinstance(args[0], str):
            raise ctx.error("label(text, t?, distance?) needs a string text")
        text = args[0]
        t = _require_number(ctx, args[1], "label position") if len(args) > 1 else 0.5
        distance = _require_number(ctx, args[2], "label distance") if len(args) > 2 else 5.0
        if not 0.0 <= t <= 1.0:
            raise ctx.error(f"invalid route: label position {t} outside [0, 1]")
        label = create_element(
            "label", {"text": text, "t": t, "distance": distance}, ["connection-label"],
            origin_span=ctx.span,
        )
        sites = EditSites()
        lit = _literal(ctx.arg_nodes[1]) if len(ctx.arg_nodes) > 1 else None
        if lit:
            sites.label_t = LiteralSite(*lit)
        label.edit_sites = sites
        conn.append(label)
        return label

    return NativeFunction("label", native)


def _apply_with(ctx: CallContext, conn, block) -> ElementBuilder:
    if not (isinstance(conn, ElementBuilder) and conn.kind == "canvasConnection"):
        raise ctx.error(f"with expects a connection, got {type_name(conn)}")
    block = _require_block(ctx, block, "with argument")
    recorder = DslObject()
    bindings = {
        "start": NativeFunction("start", _native_start),
        "end": NativeFunction("end", _native_end),
        "label": _make_label_native(conn),
    }
    _run_block(ctx.interp, block, bindings, recorder)
    over = recorder.get_field("over")
    if over is not None:
        if not isinstance(over, _RouteBuilder):
            raise ctx.error("invalid route: over must be built from start(...)")
        if not over.steps or not isinstance(over.steps[-1].target, EndAnchor):
            raise ctx.error("invalid route: the route must end at end(...)")
        conn.attributes["route"] = RouteSpec(over.start_param, over.steps)
        sites = conn.edit_sites
        if not isinstance(sites, EditSites):
            sites = conn.edit_sites = EditSites()
        sites.anchor_start = over.start_site
        sites.anchor_end = over.end_site if over.end_count == 1 else None
    return conn


def _native_with(ctx: CallContext, args, named):
    if len(args) != 2:
        raise ctx.error("with(connection, block) takes two arguments")
    return _apply_with(ctx, args[0], args[1])


def _make_operator_native(state: _DiagramState, op: str):
    start_marker, end_marker, dashed = ASSOCIATION_OPERATORS[op]

    def native(ctx: CallContext, args, named):
        if len(args) != 2:
            raise ctx.error(f"operator '{op}' takes two operands")
        left, right = args
        for side, value in (("left", left), ("right", right)):
            if not (isinstance(value, ElementBuilder) and value.kind == "canvasElement"):
                raise ctx.error(
                    f"{side} operand of '{op}' must be a class element, got {type_name(value)}"
                )
        siblings = state.canvas.children
        if not any(c is left for c in siblings) or not any(c is right for c in siblings):
            raise ctx.error(f"operands of '{op}' must belong to the same diagram")
        attrs: dict = {"source": left, "target": right}
        if start_marker:
            attrs["markerStart"] = start_marker
        if end_marker:
            attrs["markerEnd"] = end_marker
        if dashed:
            attrs["strokeDasharray"] = _DASH_PATTERN
        conn = create_element("canvasConnection", attrs, ["association"], origin_span=ctx.span)
        conn.edit_sites = EditSites()

        def bound_with(ctx2: CallContext, args2, named2):
            if len(args2) != 1:
                raise ctx2.error("with { ... } takes exactly one block")
            return _apply_with(ctx2, conn, args2[0])

        conn.methods["with"] = NativeFunction("with", bound_with)
        state.canvas.append(conn)
        return conn

    return NativeFunction(op, native)


# the diagram entry point


_BASE_RULES: tuple[tuple[Selector, dict], ...] = (
    (Selector("type", "rect"), {"fill": "#ffffff"}),
    (Selector("class", "title"), {"fontWeight": "bold"}),
    (Selector("class", "separator"), {"fill": "#000000", "stroke": "none", "strokeWidth": 0.0}),
)

_ROOT_ATTRIBUTES = {
    "fontSize": 12.0,
    "textFill": "#000000",
    "stroke": "#000000",
}


def _native_class_diagram(ctx: CallContext, args, named):
    if len(args) != 1:
        raise ctx.error("classDiagram { ... } takes exactly one block")
    block = _require_block(ctx, args[0], "classDiagram argument")
    interp = ctx.interp
    if interp.slots.get("uml_state") is not None:
        raise ctx.error("nested diagram")

    fonts = default_catalog()
    root_attrs = dict(_ROOT_ATTRIBUTES)
    root_attrs["fontFamily"] = fonts.default_family
    canvas = create_element("canvas", root_attrs, origin_span=ctx.span)
    state = _DiagramState(canvas=canvas)
    interp.slots["uml_state"] = state
    try:
        bindings: dict = {
            "class": _make_class_native(state, "class", None),
            "enum": _make_class_native(state, "enum", "enumeration"),
            "styles": _make_styles_native(state, canvas),
            "with": NativeFunction("with", _native_with),
        }
        for op in ASSOCIATION_OPERATORS:
            bindings[op] = _make_operator_native(state, op)
        env = Environment(parent=block.env)
        env.bindings.update(bindings)
        state.env = env
        for stmt in block.body:
            interp.evaluate(stmt, env)
    finally:
        interp.slots["uml_state"] = None

    frozen = freeze_tree(canvas)
    rules: list[StyleRule] = []
    for selector, attrs in _BASE_RULES:
        rules.append(StyleRule((selector,), dict(attrs), len(rules)))
    for selectors, attrs, scope in state.pending_rules:
        scope_id = frozen.ids_by_builder.get(id(scope))
        rules.append(StyleRule(selectors, attrs, len(rules), scope_id=scope_id))

    diagram = Diagram(frozen.root, tuple(rules), fonts)
    interp.slots["last_diagram"] = diagram
    interp.slots["element_origins"] = frozen.origins
    interp.slots["edit_sites"] = frozen.edit_sites
    return diagram


def install_uml(interp: Interpreter, env: Environment) -> None:
    env.define("classDiagram", NativeFunction("classDiagram", _native_class_diagram))
    env.define("apos", NativeFunction("apos", _native_apos))
    env.define("rpos", NativeFunction("rpos", _native_rpos))
