"""Text to SVG in one call: parse, execute, lay out, render.

This is the single code path behind the CLI, the session server, and the
tests, so every consumer sees identical results for identical text.
"""

from __future__ import annotations

from dataclasses import dataclass

from .diagnostics import Diagnostic, has_errors
from .interpreter import DEFAULT_STEP_BUDGET, ExecutionResult, evaluate_program
from .layout import LayoutedDiagram, layout_diagram
from .lexer import LexError
from .model import Diagram
from .parser import ParseResult, parse_text
from .render_model import to_render_model
from .source import SourceDocument
from .stdlib import install_stdlib
from .svg import render_svg
from .uml import install_uml

DEFAULT_MODULES = (install_stdlib, install_uml)


@dataclass
class PipelineResult:
    document: SourceDocument
    parse_result: ParseResult | None
    execution: ExecutionResult | None
    diagram: Diagram | None
    layouted: LayoutedDiagram | None
    render_model: dict | None
    svg: str | None
    diagnostics: list[Diagnostic]

    @property
    def ok(self) -> bool:
        return self.svg is not None and not has_errors(self.diagnostics)


def run_pipeline(
    text: str,
    uri: str = "inline:",
    version: int = 0,
    step_budget: int = DEFAULT_STEP_BUDGET,
) -> PipelineResult:
    document = SourceDocument(uri, text, version)
    diagnostics: list[Diagnostic] = []
    try:
        parsed = parse_text(text)
    except LexError as err:
        diagnostics.append(Diagnostic("error", err.span, err.message))
        return PipelineResult(document, None, None, None, None, None, None, diagnostics)

    execution = evaluate_program(parsed, modules=DEFAULT_MODULES, step_budget=step_budget)
    diagnostics.extend(execution.diagnostics)
    diagram = execution.diagram
    if diagram is None:
        diagnostics.append(Diagnostic("error", None, "the program produced no diagram"))
        return PipelineResult(document, parsed, execution, None, None, None, None, diagnostics)

    layouted = layout_diagram(diagram)
    diagnostics.extend(layouted.diagnostics)
    model = to_render_model(layouted)
    svg = render_svg(layouted)
    return PipelineResult(document, parsed, execution, diagram, layouted, model, svg, diagnostics)
