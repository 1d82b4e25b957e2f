import pytest

from diascript.layout import iter_layouted
from diascript.pipeline import run_pipeline
from diascript.routing import RouteSpec
from diascript.uml import ASSOCIATION_OPERATORS


def run_ok(source):
    result = run_pipeline(source)
    errors = [d for d in result.diagnostics if d.severity == "error"]
    assert not errors, errors
    return result


def flat(result):
    return {el.id: el for el in iter_layouted(result.layouted.root)}


def connection_of(result):
    for el in iter_layouted(result.layouted.root):
        if el.kind == "canvasConnection":
            return el
    raise AssertionError("no connection rendered")


def test_empty_block_gives_empty_canvas():
    result = run_ok("classDiagram { }")
    assert result.layouted.root.kind == "canvas"
    assert result.layouted.root.children == ()


def test_two_classes_give_two_canvas_elements():
    result = run_ok('classDiagram {\n  class("A")\n  class("B")\n}')
    kinds = [el.kind for el in result.layouted.root.children]
    assert kinds == ["canvasElement", "canvasElement"]


def test_nested_class_diagram_is_runtime_error():
    result = run_pipeline("classDiagram { classDiagram { } }")
    assert any("nested diagram" in d.message for d in result.diagnostics)


def test_class_binds_its_name():
    result = run_ok('classDiagram {\n  class("Dish")\n  Dish --> Dish\n}')
    assert connection_of(result) is not None


def test_class_assignment_also_works():
    result = run_ok('classDiagram {\n  x = class("A")\n  class("B")\n  x --> B\n}')
    assert connection_of(result) is not None


def test_duplicate_class_name_is_diagnostic_element_still_created():
    result = run_pipeline('classDiagram {\n  class("A")\n  class("A")\n}')
    warnings = [d for d in result.diagnostics if "already bound" in d.message]
    assert len(warnings) == 1
    elements = [el for el in result.layouted.root.children if el.kind == "canvasElement"]
    assert len(elements) == 2


def section_rows(source_rows, section="public"):
    body = "\n".join(f'      "{r}"' for r in source_rows)
    return f'classDiagram {{\n  class("T") {{\n    {section} {{\n{body}\n    }}\n  }}\n}}'


def texts_of(result):
    return [
        el.attributes.get("text")
        for el in iter_layouted(result.layouted.root)
        if el.kind == "text"
    ]


@pytest.mark.parametrize(
    "section,prefix",
    [("public", "+"), ("private", "-"), ("protected", "#"), ("package", "~")],
)
def test_visibility_prefixes(section, prefix):
    result = run_ok(section_rows(["count : int"], section))
    assert f"{prefix} count : int" in texts_of(result)


def test_attribute_rows_before_method_rows():
    source = (
        "classDiagram {\n"
        '  class("T") {\n'
        '    public { "render() : void" }\n'
        '    private { "count : int" }\n'
        "  }\n"
        "}"
    )
    result = run_ok(source)
    rows = [t for t in texts_of(result) if t not in ("T",)]
    assert rows.index("- count : int") < rows.index("+ render() : void")


def test_rows_preserve_source_order_within_compartment():
    result = run_ok(section_rows(["b : int", "a : int"]))
    rows = [t for t in texts_of(result) if t.startswith("+")]
    assert rows == ["+ b : int", "+ a : int"]


def test_non_string_entry_reports_warning():
    result = run_pipeline(section_rows([]).replace("{\n\n    }", "{ 42 }"))
    source = 'classDiagram {\n  class("T") {\n    public { 42 }\n  }\n}'
    result = run_pipeline(source)
    assert any("must be strings" in d.message for d in result.diagnostics)


def test_marker_table_is_total():
    # every operator yields exactly one marker configuration end to end
    for op, (start_marker, end_marker, dashed) in ASSOCIATION_OPERATORS.items():
        source = f'classDiagram {{\n  class("A")\n  class("B")\n  A {op} B\n}}'
        result = run_ok(source)
        conn = connection_of(result)
        assert conn.route.start_marker == start_marker, op
        assert conn.route.end_marker == end_marker, op
        assert (conn.attributes.get("strokeDasharray") == "6 4") == dashed, op


def test_association_with_non_element_is_type_mismatch():
    result = run_pipeline('classDiagram {\n  class("A")\n  A --> 5\n}')
    assert any("must be a class element" in d.message for d in result.diagnostics)


def test_connection_origin_is_infix_expression():
    source = 'classDiagram {\n  class("Menu")\n  class("Dish")\n  Menu --> Dish\n}'
    result = run_ok(source)
    conn = connection_of(result)
    assert source[conn.origin_span.start : conn.origin_span.end] == "Menu --> Dish"


def test_with_routes_and_labels():
    source = (
        "classDiagram {\n"
        '  class("A") { layout { pos = apos(0, 0) } }\n'
        '  class("B") { layout { pos = apos(300, 200) } }\n'
        "  A --> B with {\n"
        "    over = start(0.25).axisAligned(0.5, end(0.75))\n"
        '    label("1..*", 0.9, 8)\n'
        "  }\n"
        "}"
    )
    result = run_ok(source)
    conn = connection_of(result)
    assert conn.route.segments[0].mode == "axisAligned"
    labels = [el for el in iter_layouted(result.layouted.root) if el.kind == "label"]
    assert len(labels) == 1
    assert labels[0].attributes["text"] == "1..*"
    # label near the target end of the route
    points = conn.route.segments[0].points
    end = points[-1]
    assert abs(labels[0].x - end[0]) < 60 and abs(labels[0].y - end[1]) < 60


def test_with_method_style_call():
    source = (
        "classDiagram {\n"
        '  class("A")\n  class("B")\n'
        '  c = A --> B\n  c.with { label("x") }\n'
        "}"
    )
    result = run_ok(source)
    assert any(el.kind == "label" for el in iter_layouted(result.layouted.root))


def test_label_t_out_of_range_is_invalid_route():
    source = (
        'classDiagram {\n  class("A")\n  class("B")\n'
        '  A --> B with { label("x", 1.5) }\n}'
    )
    result = run_pipeline(source)
    assert any("invalid route" in d.message for d in result.diagnostics)


def test_route_must_end_at_end():
    source = (
        'classDiagram {\n  class("A")\n  class("B")\n'
        "  A --> B with { over = start(0.25).line(apos(5, 5)) }\n}"
    )
    result = run_pipeline(source)
    assert any("must end at end" in d.message for d in result.diagnostics)


def test_layout_scope_sets_position_and_size():
    source = (
        "classDiagram {\n"
        '  class("A") {\n'
        "    layout {\n      pos = apos(100, 200)\n      width = 180\n    }\n"
        "  }\n"
        "}"
    )
    result = run_ok(source)
    element = flat(result)["canvas0/canvasElement0"]
    assert (element.x, element.y, element.width) == (100.0, 200.0, 180.0)


def test_layout_width_beats_content():
    source = 'classDiagram {\n  class("A") { layout { width = 444 } }\n}'
    result = run_ok(source)
    assert flat(result)["canvas0/canvasElement0"].width == 444.0


def test_method_style_layout_call():
    source = 'classDiagram {\n  c = class("A")\n  c.layout { pos = apos(7, 9) }\n}'
    result = run_ok(source)
    element = flat(result)["canvas0/canvasElement0"]
    assert (element.x, element.y) == (7.0, 9.0)


def test_omitted_layout_uses_default_stacking():
    result = run_ok('classDiagram {\n  class("A")\n  class("B")\n}')
    a, b = [el for el in result.layouted.root.children if el.kind == "canvasElement"]
    assert (a.x, a.y) == (0.0, 0.0)
    assert b.x == 0.0 and b.y == a.height + 20.0


def test_rpos_layout_follows_target():
    source = (
        "classDiagram {\n"
        '  class("A") { layout { pos = apos(50, 50) } }\n'
        '  class("B") { layout { pos = rpos(A, 10, 0) } }\n'
        "}"
    )
    result = run_ok(source)
    a = flat(result)["canvas0/canvasElement0"]
    b = flat(result)["canvas0/canvasElement1"]
    assert (b.x, b.y) == (60.0, 50.0)


def test_element_styles_color_the_class_box():
    source = 'classDiagram {\n  class("A") { styles { fill = "#eeeeee" } }\n}'
    result = run_ok(source)
    assert 'fill="#eeeeee"' in result.svg


def test_diagram_level_type_rule_with_scoped_override():
    # equal specificity: the later-registered scoped rule wins under B only
    source = (
        "classDiagram {\n"
        '  class("A") { public { "x" } }\n'
        '  class("B")\n'
        '  styles { type("text", { fontSize = 14 }) }\n'
        '  B.styles { type("text", { fontSize = 9 }) }\n'
        "}"
    )
    result = run_ok(source)
    by_id = flat(result)
    a_texts = [el for id_, el in by_id.items()
               if id_.startswith("canvas0/canvasElement0") and el.kind == "text"]
    b_texts = [el for id_, el in by_id.items()
               if id_.startswith("canvas0/canvasElement1") and el.kind == "text"]
    assert a_texts and b_texts
    assert all(el.attributes["fontSize"] == 14.0 for el in a_texts)
    assert all(el.attributes["fontSize"] == 9.0 for el in b_texts)


def test_local_font_size_overrides_rules():
    source = (
        "classDiagram {\n"
        '  class("A") { public { "x" } }\n'
        '  styles { type("text", { fontSize = 14 }) }\n'
        "}"
    )
    result = run_ok(source)
    # title text: local attributes empty, rule applies
    texts = [el for el in iter_layouted(result.layouted.root) if el.kind == "text"]
    assert all(el.attributes["fontSize"] == 14.0 for el in texts)


def test_unknown_style_attribute_warns_but_is_stored():
    source = 'classDiagram {\n  class("A") { styles { wobble = 3 } }\n}'
    result = run_pipeline(source)
    assert any("unknown style attribute" in d.message for d in result.diagnostics)


def test_stereotype_and_abstract_render():
    source = 'classDiagram {\n  class("A", abstract = true, stereotype = "interface")\n}'
    result = run_ok(source)
    texts = texts_of(result)
    assert "«interface»" in texts
    title = [
        el for el in iter_layouted(result.layouted.root)
        if el.kind == "text" and el.attributes.get("text") == "A"
    ][0]
    assert title.attributes.get("fontStyle") == "italic"


def test_enum_renders_stereotype_and_literals():
    source = 'classDiagram {\n  enum("Color") {\n    "RED"\n    "GREEN"\n  }\n}'
    result = run_ok(source)
    texts = texts_of(result)
    assert "«enumeration»" in texts
    assert "RED" in texts and "GREEN" in texts
    assert texts.index("RED") < texts.index("GREEN")


def test_enum_binds_name_for_associations():
    source = (
        'classDiagram {\n  class("A")\n  enum("Color") { "RED" }\n  A --> Color\n}'
    )
    assert connection_of(run_ok(source)) is not None


def test_loops_create_elements():
    source = (
        "classDiagram {\n"
        '  names = ["A", "B", "C"]\n'
        "  forEach(names, { (name, i) ->\n"
        "    c = class(name)\n"
        "    c.layout { pos = apos(0 + i * 220, 0) }\n"
        "  })\n"
        "}"
    )
    result = run_ok(source)
    elements = [el for el in result.layouted.root.children if el.kind == "canvasElement"]
    assert [el.x for el in elements] == [0.0, 220.0, 440.0]


def test_route_spec_survives_into_model_attributes():
    source = (
        'classDiagram {\n  class("A")\n  class("B")\n'
        "  A --> B with { over = start(0.1).line(end(0.6)) }\n}"
    )
    result = run_ok(source)
    conn_node = [
        el for el in result.diagram.root.children if el.kind == "canvasConnection"
    ][0]
    assert isinstance(conn_node.attributes["route"], RouteSpec)
