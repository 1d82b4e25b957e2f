import pytest

from diascript.model import (
    AbsolutePoint,
    Diagram,
    IllegalChild,
    create_element,
    find_element,
    freeze_tree,
    iter_elements,
    replace_attributes,
)


def freeze(builder):
    return freeze_tree(builder).root


def test_children_get_per_kind_indexed_ids():
    rect = create_element(
        "rect",
        children=[create_element("text", {"text": "a"}), create_element("text", {"text": "b"})],
    )
    root = freeze(rect)
    assert root.id == "rect0"
    assert [c.id for c in root.children] == ["rect0/text0", "rect0/text1"]


def test_ids_deterministic_across_constructions():
    def build():
        canvas = create_element("canvas")
        for _ in range(2):
            canvas.append(create_element("canvasElement", children=[create_element("rect")]))
        return freeze(canvas)

    a, b = build(), build()
    assert [e.id for e in iter_elements(a)] == [e.id for e in iter_elements(b)]


def test_appending_last_sibling_keeps_existing_ids():
    canvas = create_element("canvas")
    canvas.append(create_element("canvasElement"))
    before = [e.id for e in iter_elements(freeze(canvas))]
    canvas.append(create_element("canvasElement"))
    after = [e.id for e in iter_elements(freeze(canvas))]
    assert after[: len(before)] == before
    assert after[-1] == "canvas0/canvasElement1"


def test_connection_segment_outside_connection_is_illegal():
    vbox = create_element("vbox")
    with pytest.raises(IllegalChild):
        vbox.append(create_element("connectionSegment"))


def test_canvas_element_requires_canvas_parent():
    with pytest.raises(IllegalChild):
        create_element("rect", children=[create_element("canvasElement")])


def test_canvas_accepts_only_canvas_children():
    canvas = create_element("canvas")
    with pytest.raises(IllegalChild):
        canvas.append(create_element("rect"))


def test_text_is_leaf():
    with pytest.raises(IllegalChild):
        create_element("text", children=[create_element("rect")])


def test_unknown_kind_rejected():
    with pytest.raises(IllegalChild):
        create_element("blob")


def test_freeze_resolves_element_references_to_ids():
    canvas = create_element("canvas")
    a = canvas.append(create_element("canvasElement"))
    b = canvas.append(create_element("canvasElement"))
    conn = create_element("canvasConnection", {"source": a, "target": b})
    canvas.append(conn)
    root = freeze(canvas)
    frozen_conn = root.children[2]
    assert frozen_conn.attributes["source"] == "canvas0/canvasElement0"
    assert frozen_conn.attributes["target"] == "canvas0/canvasElement1"


def test_replace_attributes_rebuilds_path_only():
    canvas = create_element("canvas")
    canvas.append(create_element("canvasElement", {"pos": AbsolutePoint(0.0, 0.0)}))
    canvas.append(create_element("canvasElement"))
    diagram = Diagram(freeze(canvas))
    patched = replace_attributes(
        diagram, "canvas0/canvasElement0", {"pos": AbsolutePoint(5.0, 6.0)}
    )
    moved = find_element(patched.root, "canvas0/canvasElement0")
    assert moved.attributes["pos"] == AbsolutePoint(5.0, 6.0)
    # untouched sibling is shared, not copied
    assert patched.root.children[1] is diagram.root.children[1]
    with pytest.raises(KeyError):
        replace_attributes(diagram, "canvas0/none", {})


def test_origin_spans_collected_per_id():
    from diascript.source import Span

    canvas = create_element("canvas")
    canvas.append(create_element("canvasElement", origin_span=Span(3, 9)))
    frozen = freeze_tree(canvas)
    assert frozen.origins["canvas0/canvasElement0"] == Span(3, 9)
