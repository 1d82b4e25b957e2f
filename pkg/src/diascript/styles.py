"""Style rules: CSS-like selectors, specificity, and the resolution cascade.

Rules match with descendant-combinator chains over (kind, classes). Merge
order is ascending (class count, type count, source index), element-local
attributes last, so locals always win and later rules break ties.
fontFamily, fontSize, stroke, and textFill inherit from ancestors when unset.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from .model import Diagram, ElementNode

INHERITED_ATTRIBUTES = ("fontFamily", "fontSize", "stroke", "textFill")

# attribute names the cascade knows about; unknown names are kept but reported
KNOWN_ATTRIBUTES = frozenset(
    {
        "fill",
        "stroke",
        "strokeWidth",
        "strokeDasharray",
        "fontFamily",
        "fontSize",
        "fontWeight",
        "fontStyle",
        "textFill",
        "padding",
        "margin",
        "gap",
        "alignment",
        "pos",
        "width",
        "height",
        "markerSize",
        "text",
    }
)


@dataclass(frozen=True, slots=True)
class Selector:
    kind: str  # "type" | "class" | "any"
    name: str | None = None

    def matches(self, element: ElementNode) -> bool:
        if self.kind == "type":
            return element.kind == self.name
        if self.kind == "class":
            return self.name in element.classes
        return True


@dataclass(frozen=True)
class StyleRule:
    """Descendant-combinator selector chain; the last selector matches the
    element itself. ``scope_id`` restricts the rule to one subtree."""

    selectors: tuple[Selector, ...]
    attributes: Mapping[str, object]
    source_index: int
    scope_id: str | None = None

    @property
    def specificity(self) -> tuple[int, int, int]:
        classes = sum(1 for s in self.selectors if s.kind == "class")
        types = sum(1 for s in self.selectors if s.kind == "type")
        return (classes, types, self.source_index)


def rule_matches(rule: StyleRule, element: ElementNode, ancestors: tuple[ElementNode, ...]) -> bool:
    """``ancestors`` is the path from root to the element's parent."""
    if rule.scope_id is not None:
        if element.id != rule.scope_id and all(a.id != rule.scope_id for a in ancestors):
            return False
    if not rule.selectors:
        return False
    if not rule.selectors[-1].matches(element):
        return False
    # remaining selectors must match ancestors in order, innermost last
    needed = rule.selectors[:-1]
    i = len(needed) - 1
    for candidate in reversed(ancestors):
        if i < 0:
            break
        if needed[i].matches(candidate):
            i -= 1
    return i < 0


def match_styles(
    diagram: Diagram,
    element: ElementNode,
    ancestors: tuple[ElementNode, ...],
    inherited: Mapping[str, object] | None = None,
) -> dict[str, object]:
    """Resolved attribute map for one element (pure function of its path)."""
    resolved: dict[str, object] = {}
    for rule in sorted(diagram.style_rules, key=lambda r: r.specificity):
        if rule_matches(rule, element, ancestors):
            resolved.update(rule.attributes)
    resolved.update(element.attributes)
    if inherited:
        for key in INHERITED_ATTRIBUTES:
            if key not in resolved and key in inherited:
                resolved[key] = inherited[key]
    return resolved


def resolve_styles(diagram: Diagram) -> dict[str, dict[str, object]]:
    """Resolve the cascade for every element, flowing inherited attributes
    down the tree. Returns element id -> attribute map."""
    rules = sorted(diagram.style_rules, key=lambda r: r.specificity)
    out: dict[str, dict[str, object]] = {}

    def visit(element: ElementNode, ancestors: tuple[ElementNode, ...], inherited: dict) -> None:
        resolved: dict[str, object] = {}
        for rule in rules:
            if rule_matches(rule, element, ancestors):
                resolved.update(rule.attributes)
        resolved.update(element.attributes)
        for key in INHERITED_ATTRIBUTES:
            if key not in resolved and key in inherited:
                resolved[key] = inherited[key]
        out[element.id] = resolved
        child_inherited = {k: resolved[k] for k in INHERITED_ATTRIBUTES if k in resolved}
        for child in element.children:
            visit(child, ancestors + (element,), child_inherited)

    visit(diagram.root, (), {})
    return out
