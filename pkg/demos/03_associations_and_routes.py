"""Every association operator, plus the three route segment modes.

Connections anchor on element borders: by default at the intersection of
the center-to-center line, or at explicit perimeter fractions via
start(s)/end(e) inside a with block.
"""

from pathlib import Path

from diascript import run_pipeline
from diascript.uml import ASSOCIATION_OPERATORS

out_dir = Path(__file__).parent / "out"
out_dir.mkdir(exist_ok=True)

# one small diagram per operator: marker gallery
lines = ["classDiagram {"]
for i, op in enumerate(ASSOCIATION_OPERATORS):
    col, row = i % 3, i // 3
    a, b = f"L{i}", f"R{i}"
    lines.append(f'    class("{a}") {{ layout {{ pos = apos({col * 360}, {row * 110}) }} }}')
    lines.append(f'    class("{b}") {{ layout {{ pos = apos({col * 360 + 200}, {row * 110}) }} }}')
    lines.append(f"    {a} {op} {b} with {{ label(\"{op}\", 0.5, 10) }}")
lines.append("}")
gallery = "\n".join(lines) + "\n"

result = run_pipeline(gallery, uri="demo03-gallery")
assert result.ok, result.diagnostics
(out_dir / "operator_gallery.svg").write_text(result.svg)
print(f"operator gallery: {len(ASSOCIATION_OPERATORS)} operators ->",
      out_dir / "operator_gallery.svg")

ROUTES = """\
classDiagram {
    class("A") { layout { pos = apos(0, 0) } }
    class("B") { layout { pos = apos(320, 40) } }
    class("C") { layout { pos = apos(0, 220) } }
    class("D") { layout { pos = apos(320, 260) } }
    class("E") { layout { pos = apos(0, 440) } }
    class("F") { layout { pos = apos(320, 480) } }

    // straight line between explicit perimeter anchors
    A --> B with { over = start(0.2).line(end(0.8)) }

    // horizontal, vertical, horizontal with the bend at 40% of the way
    C --> D with {
        over = start(0.15).axisAligned(0.4, end(0.9))
        label("0..n", 0.5, 9)
    }

    // cubic bezier with absolute control points
    E --> F with { over = start(0.2).bezier(160, 420, 200, 620, end(0.85)) }
}
"""

result = run_pipeline(ROUTES, uri="demo03-routes")
assert result.ok, result.diagnostics
(out_dir / "route_modes.svg").write_text(result.svg)
print("route modes (line, axisAligned, bezier) ->", out_dir / "route_modes.svg")

for element in result.layouted.root.children:
    if element.kind == "canvasConnection":
        segment = element.route.segments[0]
        print(f"  {element.id}: {segment.mode} through {len(segment.points)} points")
