"""The live-edit cycle, driven directly through the edit engine.

A drag never mutates a diagram object: at interaction start the engine
computes which number literals realize the motion, every update rewrites
those literals cumulatively, and a prediction is produced by patching the
last executed model and re-running layout only. Re-executing the final text
from scratch reproduces the on-screen state exactly.
"""

from diascript import run_pipeline
from diascript.editing import InteractionParams, build_plan, edits_between, predict
from diascript.layout import iter_layouted
from diascript.source import apply_edits

SOURCE = """\
classDiagram {
    class("Menu") {
        public { "count : int" }
        layout { pos = apos(100, 200) }
    }
    class("Dish") { layout { pos = apos(360, 60) } }
    Menu --> Dish
}
"""

result = run_pipeline(SOURCE, uri="demo04")
assert result.ok

plan = build_plan(result.execution, result.layouted, result.diagram, result.document,
                  "canvas0/canvasElement0", "moveElement")
print("edit plan targets", plan.element_id, "through", len(plan.slots), "literal spans:")
for slot in plan.slots:
    original = SOURCE[slot.span.start:slot.span.end]
    print(f"  bytes {slot.span.start}..{slot.span.end} ({original!r}), axis {slot.axis}")

doc = result.document
texts = None
for step, (dx, dy) in enumerate([(12.0, -4.0), (30.0, -10.0), (55.5, -22.25)], 1):
    params = InteractionParams("moveElement", dx=dx, dy=dy)
    edits, texts = edits_between(plan, texts, params)
    doc = apply_edits(doc, edits)
    predicted, deltas = predict(plan, result.diagram, result.layouted, params)
    moved = [d for d in deltas if d["id"] == "canvas0/canvasElement0"][0]
    print(f"update {step}: dx={dx:+.2f} dy={dy:+.2f} -> "
          f"{len(edits)} text edits, predicted position ({moved['x']}, {moved['y']})")

print("\nfinal text around the layout block:")
start = doc.text.index("layout")
print("   ", doc.text[start : doc.text.index("}", start) + 1])

fresh = run_pipeline(doc.text, uri="demo04-final")
element = [el for el in iter_layouted(fresh.layouted.root)
           if el.id == "canvas0/canvasElement0"][0]
print("fresh pipeline places the element at", (element.x, element.y))
print("single source of truth closure:",
      (element.x, element.y) == (100.0 + 55.5, 200.0 - 22.25))

predicted, _ = predict(plan, result.diagram, result.layouted,
                       InteractionParams("moveElement", dx=55.5, dy=-22.25))
pairs = zip(iter_layouted(predicted.root), iter_layouted(fresh.layouted.root))
print("prediction equals the full render bit for bit:",
      all(a.x == b.x and a.y == b.y for a, b in pairs))
