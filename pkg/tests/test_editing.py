import pytest

from diascript.editing import (
    InteractionParams,
    NotEditable,
    UnknownElement,
    build_plan,
    diff_layouts,
    edits_between,
    predict,
)
from diascript.layout import iter_layouted
from diascript.pipeline import run_pipeline
from diascript.source import apply_edits


def pipeline(source):
    result = run_pipeline(source)
    errors = [d for d in result.diagnostics if d.severity == "error"]
    assert not errors, errors
    return result


def plan_for(result, element_id, kind, anchor="end"):
    return build_plan(
        result.execution, result.layouted, result.diagram, result.document,
        element_id, kind, anchor,
    )


def move(dx, dy):
    return InteractionParams("moveElement", dx=dx, dy=dy)


def apply_plan(result, plan, params, previous=None):
    edits, texts = edits_between(plan, previous, params)
    doc = apply_edits(result.document, edits)
    return doc, texts


APOS_SRC = (
    "classDiagram {\n"
    '    class("Menu") {\n'
    "        layout { pos = apos(100, 200) }\n"
    "    }\n"
    '    class("Dish") { layout { pos = apos(320, 40) } }\n'
    "    Menu --> Dish\n"
    "}\n"
)


def test_move_plan_replaces_both_literals_additively():
    result = pipeline(APOS_SRC)
    plan = plan_for(result, "canvas0/canvasElement0", "moveElement")
    assert plan.patch_kind == "abs_pos"
    doc, _ = apply_plan(result, plan, move(30.0, 0.0))
    assert "apos(130, 200)" in doc.text
    rerun = pipeline(doc.text)
    element = [el for el in iter_layouted(rerun.layouted.root)
               if el.id == "canvas0/canvasElement0"][0]
    assert (element.x, element.y) == (130.0, 200.0)


def test_zero_params_yield_semantically_identical_document():
    result = pipeline(APOS_SRC)
    plan = plan_for(result, "canvas0/canvasElement0", "moveElement")
    doc, _ = apply_plan(result, plan, move(0.0, 0.0))
    assert doc.text == result.document.text  # literals were already canonical
    assert doc.version == result.document.version + 1


def test_updates_are_cumulative_and_idempotent():
    result = pipeline(APOS_SRC)
    plan = plan_for(result, "canvas0/canvasElement0", "moveElement")
    doc1, texts1 = apply_plan(result, plan, move(10.0, 0.0))
    edits2, texts2 = edits_between(plan, texts1, move(25.0, 0.0))
    doc2 = apply_edits(doc1, edits2)
    assert "apos(125, 200)" in doc2.text
    # repeating the same params is a no-op edit batch
    edits3, _ = edits_between(plan, texts2, move(25.0, 0.0))
    assert edits3 == []
    # and the text equals the single-step materialization
    direct, _ = apply_plan(result, plan, move(25.0, 0.0))
    assert doc2.text == direct.text


def test_rpos_plan_edits_relative_offsets():
    source = (
        "classDiagram {\n"
        '    class("A") { layout { pos = apos(50, 50) } }\n'
        '    class("B") { layout { pos = rpos(A, 10, 0) } }\n'
        "}\n"
    )
    result = pipeline(source)
    plan = plan_for(result, "canvas0/canvasElement1", "moveElement")
    assert plan.patch_kind == "rel_pos"
    doc, _ = apply_plan(result, plan, move(5.0, 7.0))
    assert "rpos(A, 15, 7)" in doc.text
    rerun = pipeline(doc.text)
    flat = {el.id: el for el in iter_layouted(rerun.layouted.root)}
    # B moved by exactly (5, 7); A unmoved
    assert (flat["canvas0/canvasElement1"].x, flat["canvas0/canvasElement1"].y) == (65.0, 57.0)
    assert (flat["canvas0/canvasElement0"].x, flat["canvas0/canvasElement0"].y) == (50.0, 50.0)


def test_computed_position_is_not_editable():
    source = (
        "classDiagram {\n"
        "    x = 40\n"
        '    class("A") { layout { pos = apos(x, 0) } }\n'
        "}\n"
    )
    result = pipeline(source)
    with pytest.raises(NotEditable) as err:
        plan_for(result, "canvas0/canvasElement0", "moveElement")
    span = err.value.span
    assert source[span.start : span.end] == "apos(x, 0)"


def test_unknown_element_rejected():
    result = pipeline(APOS_SRC)
    with pytest.raises(UnknownElement):
        plan_for(result, "canvas0/none", "moveElement")


def test_interaction_on_inner_rect_resolves_to_class_element():
    result = pipeline(APOS_SRC)
    plan = plan_for(result, "canvas0/canvasElement0/rect0", "moveElement")
    assert plan.element_id == "canvas0/canvasElement0"


def test_fallback_inserts_pos_into_existing_layout_block():
    source = (
        "classDiagram {\n"
        '    class("A") { layout { width = 120 } }\n'
        "}\n"
    )
    result = pipeline(source)
    plan = plan_for(result, "canvas0/canvasElement0", "moveElement")
    assert plan.slots[0].form == "insert_pos"
    doc, _ = apply_plan(result, plan, move(30.0, 10.0))
    assert "pos = apos(30, 10)" in doc.text
    rerun = pipeline(doc.text)
    element = [el for el in iter_layouted(rerun.layouted.root)
               if el.id == "canvas0/canvasElement0"][0]
    assert (element.x, element.y) == (30.0, 10.0)


def test_fallback_inserts_layout_block_into_class_block():
    source = 'classDiagram {\n    class("A") { public { "x" } }\n}\n'
    result = pipeline(source)
    plan = plan_for(result, "canvas0/canvasElement0", "moveElement")
    assert plan.slots[0].form == "insert_layout"
    doc, _ = apply_plan(result, plan, move(12.0, -8.0))
    assert "layout { pos = apos(12, -8) }" in doc.text
    rerun = pipeline(doc.text)
    element = [el for el in iter_layouted(rerun.layouted.root)
               if el.id == "canvas0/canvasElement0"][0]
    assert (element.x, element.y) == (12.0, -8.0)


def test_fallback_appends_block_to_blockless_class():
    source = 'classDiagram {\n    class("A")\n    class("B")\n}\n'
    result = pipeline(source)
    plan = plan_for(result, "canvas0/canvasElement0", "moveElement")
    assert plan.slots[0].form == "insert_block"
    doc, _ = apply_plan(result, plan, move(100.0, 50.0))
    assert 'class("A") { layout { pos = apos(100, 50) } }' in doc.text
    rerun = pipeline(doc.text)
    flat = {el.id: el for el in iter_layouted(rerun.layouted.root)}
    assert (flat["canvas0/canvasElement0"].x, flat["canvas0/canvasElement0"].y) == (100.0, 50.0)
    # B restacks to the top of the default placement column
    assert flat["canvas0/canvasElement1"].y == 0.0


def test_resize_plan_edits_width_and_height_literals():
    source = (
        "classDiagram {\n"
        '    class("A") { layout { pos = apos(0, 0)\n width = 100\n height = 80 } }\n'
        "}\n"
    )
    result = pipeline(source)
    plan = plan_for(result, "canvas0/canvasElement0", "resizeElement")
    params = InteractionParams("resizeElement", d_width=20.0, d_height=-10.0)
    doc, _ = apply_plan(result, plan, params)
    assert "width = 120" in doc.text
    assert "height = 70" in doc.text


def test_resize_inserts_both_dimensions_when_missing():
    source = 'classDiagram {\n    class("A") { layout { pos = apos(0, 0) } }\n}\n'
    result = pipeline(source)
    plan = plan_for(result, "canvas0/canvasElement0", "resizeElement")
    base_w = plan.base_x
    base_h = plan.base_y
    params = InteractionParams("resizeElement", d_width=10.0, d_height=0.0)
    doc, _ = apply_plan(result, plan, params)
    rerun = pipeline(doc.text)
    element = [el for el in iter_layouted(rerun.layouted.root)
               if el.id == "canvas0/canvasElement0"][0]
    assert element.width == float(f"{base_w + 10.0:.3f}")
    assert element.height == float(f"{base_h:.3f}")


ROUTED_SRC = (
    "classDiagram {\n"
    '    class("A") { layout { pos = apos(0, 0) } }\n'
    '    class("B") { layout { pos = apos(300, 200) } }\n'
    "    A --> B with {\n"
    "        over = start(0.25).axisAligned(0.5, end(0.75))\n"
    '        label("1..*", 0.5, 8)\n'
    "    }\n"
    "}\n"
)


def test_anchor_plan_moves_perimeter_fraction():
    result = pipeline(ROUTED_SRC)
    plan = plan_for(result, "canvas0/canvasConnection0", "moveConnectionAnchor", anchor="start")
    params = InteractionParams("moveConnectionAnchor", d_param=0.25)
    doc, _ = apply_plan(result, plan, params)
    assert "start(0.5)" in doc.text
    # wrap-around keeps the fraction in [0, 1)
    params = InteractionParams("moveConnectionAnchor", d_param=0.9)
    doc, _ = apply_plan(result, plan, params)
    assert "start(0.15)" in doc.text


def test_anchor_without_route_is_not_editable():
    result = pipeline(APOS_SRC)
    with pytest.raises(NotEditable):
        plan_for(result, "canvas0/canvasConnection0", "moveConnectionAnchor")


def test_label_plan_clamps_t():
    result = pipeline(ROUTED_SRC)
    plan = plan_for(result, "canvas0/canvasConnection0/label0", "moveLabel")
    params = InteractionParams("moveLabel", d_param=0.9)
    doc, _ = apply_plan(result, plan, params)
    assert 'label("1..*", 1, 8)' in doc.text


# predictions


def moved_ids(deltas):
    return {d["id"] for d in deltas}


def test_prediction_matches_full_render_bitwise():
    result = pipeline(APOS_SRC)
    plan = plan_for(result, "canvas0/canvasElement0", "moveElement")
    for params in (move(30.0, 0.0), move(-12.25, 7.5), move(0.125, -400.0)):
        predicted_layout, deltas = predict(plan, result.diagram, result.layouted, params)
        doc, _ = apply_plan(result, plan, params)
        full = pipeline(doc.text)
        predicted = {el.id: el for el in iter_layouted(predicted_layout.root)}
        rendered = {el.id: el for el in iter_layouted(full.layouted.root)}
        assert predicted.keys() == rendered.keys()
        for el_id, el in rendered.items():
            assert predicted[el_id].x == el.x, el_id
            assert predicted[el_id].y == el.y, el_id
            assert predicted[el_id].width == el.width
            assert predicted[el_id].height == el.height
            assert predicted[el_id].route == el.route
        # the delta message carries the authoritative absolute geometry
        for delta in deltas:
            assert delta["x"] == rendered[delta["id"]].x
            assert delta["y"] == rendered[delta["id"]].y


def test_prediction_covers_connection_reroute():
    result = pipeline(APOS_SRC)
    plan = plan_for(result, "canvas0/canvasElement0", "moveElement")
    _, deltas = predict(plan, result.diagram, result.layouted, move(50.0, 25.0))
    assert "canvas0/canvasConnection0" in moved_ids(deltas)
    route_delta = [d for d in deltas if d["id"] == "canvas0/canvasConnection0"][0]
    assert "route" in route_delta


def test_prediction_of_zero_params_is_empty():
    result = pipeline(APOS_SRC)
    plan = plan_for(result, "canvas0/canvasElement0", "moveElement")
    _, deltas = predict(plan, result.diagram, result.layouted, move(0.0, 0.0))
    assert deltas == []


def test_fallback_insertion_prediction_includes_restacked_neighbors():
    source = 'classDiagram {\n    class("A")\n    class("B")\n}\n'
    result = pipeline(source)
    plan = plan_for(result, "canvas0/canvasElement0", "moveElement")
    params = move(100.0, 50.0)
    predicted_layout, deltas = predict(plan, result.diagram, result.layouted, params)
    doc, _ = apply_plan(result, plan, params)
    full = pipeline(doc.text)
    rendered = {el.id: el for el in iter_layouted(full.layouted.root)}
    for el_id, el in {e.id: e for e in iter_layouted(predicted_layout.root)}.items():
        assert (el.x, el.y) == (rendered[el_id].x, rendered[el_id].y)
    assert "canvas0/canvasElement1" in moved_ids(deltas)  # B restacked


CONDITIONAL_SRC = (
    "classDiagram {\n"
    '    a = class("A") { layout { pos = apos(100, 100) } }\n'
    "    bx = if (a.pos.x > 150) { 500 } { 300 }\n"
    '    b = class("B")\n'
    "    b.layout { pos = apos(0, 0) }\n"
    "    b.layout { pos = rpos(a, 0, 120) }\n"
    "}\n"
)


def test_layout_dependent_conditional_breaks_prediction_then_full_update_fixes():
    # program whose geometry depends on a layout value: the prediction cannot
    # see the conditional re-evaluate, the full render can
    source = (
        "classDiagram {\n"
        '    a = class("A") { layout { pos = apos(100, 100) } }\n'
        "    bx = if (a.pos.x > 150) { 500 } { 300 }\n"
        '    b = class("B")\n'
        "    b.layout { pos = apos(bx, 0) }\n"
        "}\n"
    )
    result = pipeline(source)
    flat = {el.id: el for el in iter_layouted(result.layouted.root)}
    assert flat["canvas0/canvasElement1"].x == 300.0

    plan = plan_for(result, "canvas0/canvasElement0", "moveElement")
    params = move(100.0, 0.0)  # crosses the 150 threshold
    predicted_layout, _ = predict(plan, result.diagram, result.layouted, params)
    predicted = {el.id: el for el in iter_layouted(predicted_layout.root)}
    doc, _ = apply_plan(result, plan, params)
    full = pipeline(doc.text)
    rendered = {el.id: el for el in iter_layouted(full.layouted.root)}
    # the moved element itself is predicted exactly
    assert predicted["canvas0/canvasElement0"].x == rendered["canvas0/canvasElement0"].x == 200.0
    # the dependent element is mispredicted (stays at 300), the full render moves it
    assert predicted["canvas0/canvasElement1"].x == 300.0
    assert rendered["canvas0/canvasElement1"].x == 500.0
    # the reconciling full update overwrites the bad prediction
    catch_up = diff_layouts(predicted_layout, full.layouted)
    assert "canvas0/canvasElement1" in moved_ids(catch_up)


def test_closure_rerunning_final_text_reproduces_positions():
    result = pipeline(APOS_SRC)
    plan = plan_for(result, "canvas0/canvasElement0", "moveElement")
    texts = None
    doc = result.document
    for params in (move(10.0, 5.0), move(20.0, 10.0), move(50.0, 25.0)):
        edits, texts = edits_between(plan, texts, params)
        doc = apply_edits(doc, edits)
    fresh = pipeline(doc.text)
    element = [el for el in iter_layouted(fresh.layouted.root)
               if el.id == "canvas0/canvasElement0"][0]
    assert (element.x, element.y) == (150.0, 225.0)
