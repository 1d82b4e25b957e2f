"""Golden SVG coverage of the class diagram vocabulary.

One golden file per association operator marker, visibility section,
stereotype/abstract/enum box, and per segment mode. Regenerate after an
intentional rendering change with:

    UPDATE_GOLDENS=1 pytest tests/test_uml_golden.py
"""

import os
from pathlib import Path

import pytest

from diascript.pipeline import run_pipeline
from diascript.uml import ASSOCIATION_OPERATORS

GOLDEN_DIR = Path(__file__).parent / "golden" / "uml"


def two_boxes(op):
    return (
        "classDiagram {\n"
        '    class("A") { layout { pos = apos(0, 0) } }\n'
        '    class("B") { layout { pos = apos(220, 10) } }\n'
        f"    A {op} B\n"
        "}\n"
    )


SECTION_CASE = (
    "classDiagram {\n"
    '    class("Account") {\n'
    '        public { "id : int"; "close() : void" }\n'
    '        private { "secret : string" }\n'
    '        protected { "audit() : void" }\n'
    '        package { "note : string" }\n'
    "        layout { pos = apos(0, 0) }\n"
    "    }\n"
    "}\n"
)

STEREOTYPE_CASE = (
    "classDiagram {\n"
    '    class("Shape", abstract = true, stereotype = "interface") {\n'
    '        public { "area() : float" }\n'
    "        layout { pos = apos(0, 0) }\n"
    "    }\n"
    "}\n"
)

ENUM_CASE = (
    "classDiagram {\n"
    '    enum("Color") {\n'
    '        "RED"\n        "GREEN"\n        "BLUE"\n'
    "        layout { pos = apos(0, 0) }\n"
    "    }\n"
    "}\n"
)

SEGMENT_CASES = {
    "segment_line": (
        "classDiagram {\n"
        '    class("A") { layout { pos = apos(0, 0) } }\n'
        '    class("B") { layout { pos = apos(260, 140) } }\n'
        "    A --> B with { over = start(0.125).line(end(0.625)) }\n"
        "}\n"
    ),
    "segment_axis_aligned": (
        "classDiagram {\n"
        '    class("A") { layout { pos = apos(0, 0) } }\n'
        '    class("B") { layout { pos = apos(260, 140) } }\n'
        "    A --> B with { over = start(0.25).axisAligned(0.5, end(0.875)) }\n"
        "}\n"
    ),
    "segment_bezier": (
        "classDiagram {\n"
        '    class("A") { layout { pos = apos(0, 0) } }\n'
        '    class("B") { layout { pos = apos(260, 140) } }\n'
        "    A --> B with {\n"
        "        over = start(0.25).bezier(120, 0, 160, 180, end(0.875))\n"
        '        label("1..*", 0.5, 8)\n'
        "    }\n"
        "}\n"
    ),
}

_OP_SLUGS = {
    "--": "plain",
    "-->": "arrow_right",
    "<--": "arrow_left",
    "<-->": "arrow_both",
    "!--": "cross_source",
    "--!": "cross_target",
    "<>--": "aggregate_source",
    "--<>": "aggregate_target",
    "*--": "compose_source",
    "--*": "compose_target",
    "extends": "extends",
    "implements": "implements",
}

CASES = {f"op_{slug}": two_boxes(op) for op, slug in _OP_SLUGS.items()}
CASES["sections"] = SECTION_CASE
CASES["stereotype_abstract"] = STEREOTYPE_CASE
CASES["enum"] = ENUM_CASE
CASES.update(SEGMENT_CASES)


@pytest.mark.parametrize("name", sorted(CASES))
def test_golden_svg(name):
    result = run_pipeline(CASES[name])
    errors = [d for d in result.diagnostics if d.severity == "error"]
    assert not errors, errors
    golden_path = GOLDEN_DIR / f"{name}.svg"
    if os.environ.get("UPDATE_GOLDENS"):
        golden_path.parent.mkdir(parents=True, exist_ok=True)
        golden_path.write_text(result.svg, encoding="utf-8")
    assert golden_path.exists(), f"golden missing; run with UPDATE_GOLDENS=1 ({golden_path})"
    assert result.svg == golden_path.read_text(encoding="utf-8"), name


def test_marker_table_and_goldens_cover_all_operators():
    assert set(_OP_SLUGS) == set(ASSOCIATION_OPERATORS)
