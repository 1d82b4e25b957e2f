"""Manual layout and the style cascade.

Positions are explicit (apos) or relative (rpos); loops place element rows
programmatically. Styles resolve like a tiny CSS: rules sorted by
(class count, type count, source index), element-local attributes last,
fontFamily/fontSize/stroke/textFill inherited.
"""

from pathlib import Path

from diascript import run_pipeline
from diascript.layout import iter_layouted

SOURCE = """\
classDiagram {
    // a fixed anchor plus two satellites placed relative to it
    class("Core") {
        public { "tick() : void" }
        layout { pos = apos(300, 0)\n width = 170 }
    }
    class("Left")  { layout { pos = rpos(Core, -240, 160) } }
    class("Right") { layout { pos = rpos(Core, 240, 160) } }

    // a loop stamps out a row of workers, 210 units apart
    forEach(range(3), {
        w = class("Worker" + str(it))
        w.layout { pos = apos(60 + it * 210, 340) }
    })

    Core --> Left
    Core --> Right
    Left --> Worker0
    Right --> Worker2

    // element-local styling beats every rule
    Core.styles { fill = "#ffd166" }

    styles {
        type("text", { fontSize = 13 })
        cls("separator", { fill = "#444444" })
    }
}
"""

result = run_pipeline(SOURCE, uri="demo02")
for diagnostic in result.diagnostics:
    print(diagnostic.format("demo02"))
assert result.ok

print("element positions (canvas coordinates):")
for element in result.layouted.root.children:
    if element.kind == "canvasElement":
        print(f"  {element.id:28s} at ({element.x:7.2f}, {element.y:7.2f})"
              f" size {element.width:.1f} x {element.height:.1f}")

texts = [el for el in iter_layouted(result.layouted.root) if el.kind == "text"]
print("all text nodes resolved to fontSize",
      sorted({el.attributes["fontSize"] for el in texts}))

out = Path(__file__).parent / "out" / "layout_and_styles.svg"
out.parent.mkdir(exist_ok=True)
out.write_text(result.svg)
print(f"wrote {out}")
