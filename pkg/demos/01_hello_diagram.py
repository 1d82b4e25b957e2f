"""Hello, diagram: run the whole pipeline on a small class diagram.

The source text is the single source of truth: parse it, execute it, lay it
out, and write deterministic SVG. Run from the repository root:

    python demos/01_hello_diagram.py
"""

from pathlib import Path

from diascript import run_pipeline

SOURCE = """\
classDiagram {
    class("Menu") {
        public {
            "count : int"
            "render() : void"
        }
        private { "items : List<Dish>" }
        layout { pos = apos(0, 0) }
    }

    class("Dish") {
        public { "name : string"; "price : float" }
        layout { pos = apos(280, 40) }
    }

    Menu --> Dish with { label("1..*", 0.85, 8) }
}
"""

out_dir = Path(__file__).parent / "out"
out_dir.mkdir(exist_ok=True)

result = run_pipeline(SOURCE, uri="demo01")
for diagnostic in result.diagnostics:
    print(diagnostic.format("demo01"))
assert result.ok

print(f"executed: {len(result.execution.element_origins)} elements with source spans")
print(f"rendered: {result.svg.count('<g id=')} SVG groups")

target = out_dir / "hello.svg"
target.write_text(result.svg)
print(f"wrote {target}")

# the same text always renders the same bytes
again = run_pipeline(SOURCE, uri="demo01")
print("byte-identical re-render:", again.svg == result.svg)
