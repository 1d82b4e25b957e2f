"""diascript: a live-synchronized diagramming engine.

Diagrams are written in a small scripting language whose text is the single
source of truth; the engine renders deterministic SVG through a style cascade
and a two-phase layout, and translates graphical interactions back into
source edits with layout-only predictions between full re-executions.
"""

from .diagnostics import Diagnostic, has_errors
from .editing import (
    EditPlan,
    InteractionParams,
    NotEditable,
    UnknownElement,
    build_plan,
    diff_layouts,
    edits_between,
    patched_diagram,
    predict,
)
from .interpreter import BudgetExceeded, EvalError, ExecutionResult, evaluate_program
from .layout import (
    Constraints,
    LayoutedDiagram,
    LayoutedElement,
    MeasuredSize,
    layout_diagram,
)
from .lexer import LexError, tokenize
from .model import (
    AbsolutePoint,
    Diagram,
    ElementNode,
    IllegalChild,
    RelativePoint,
    create_element,
    freeze_tree,
)
from .nodes import node_at
from .parser import ParseResult, parse, parse_text
from .pipeline import PipelineResult, run_pipeline
from .render_model import to_render_model, validate_render_model
from .server import SessionServer
from .source import SourceDocument, Span, TextEdit, apply_edits, format_number
from .styles import Selector, StyleRule, match_styles, resolve_styles
from .svg import render_svg

__version__ = "0.1.0"
