"""Source text primitives: byte spans, versioned documents, and batch text edits."""

from __future__ import annotations

from dataclasses import dataclass


class EditConflict(Exception):
    """Raised when a text edit batch overlaps itself or exceeds the document."""


@dataclass(frozen=True, slots=True)
class Span:
    """Half-open byte range [start, end) into a document's text."""

    start: int
    end: int

    def __post_init__(self) -> None:
        if self.start < 0 or self.end < self.start:
            raise ValueError(f"invalid span ({self.start}, {self.end})")

    def contains(self, offset: int) -> bool:
        return self.start <= offset < self.end

    def contains_span(self, other: Span) -> bool:
        return self.start <= other.start and other.end <= self.end

    def overlaps(self, other: Span) -> bool:
        return self.start < other.end and other.start < self.end

    @property
    def length(self) -> int:
        return self.end - self.start


@dataclass(frozen=True, slots=True)
class TextEdit:
    """Replace the text at ``span`` with ``new_text``."""

    span: Span
    new_text: str


@dataclass(frozen=True, slots=True)
class SourceDocument:
    """Versioned text document. The text alone defines the diagram."""

    uri: str
    text: str
    version: int = 0


def validate_edit_batch(edits: list[TextEdit], text_length: int) -> None:
    """Edits must be sorted ascending, pairwise disjoint, and inside the text."""
    for i, edit in enumerate(edits):
        if edit.span.end > text_length:
            raise EditConflict(
                f"edit {i} spans {edit.span.start}..{edit.span.end}, "
                f"document has {text_length} bytes"
            )
        if i > 0 and edits[i - 1].span.end > edit.span.start:
            raise EditConflict(f"edits {i - 1} and {i} overlap or are unsorted")


def apply_edits(doc: SourceDocument, edits: list[TextEdit]) -> SourceDocument:
    """Apply a batch of disjoint edits, bumping the version by exactly one.

    Replacements are applied right-to-left so earlier spans stay valid.
    An empty batch still produces a new version (the edit was accepted).
    """
    validate_edit_batch(edits, len(doc.text))
    text = doc.text
    for edit in reversed(edits):
        text = text[: edit.span.start] + edit.new_text + text[edit.span.end :]
    return SourceDocument(doc.uri, text, doc.version + 1)


def format_number(value: float) -> str:
    """Canonical number literal: at most 3 fractional digits, no trailing
    zeros, -0 normalized to 0. Used for all generated edits and SVG output."""
    s = f"{value:.3f}".rstrip("0").rstrip(".")
    if s in ("-0", ""):
        return "0"
    return s


def parse_number(literal: str) -> float:
    """Inverse of the literal grammar; used to quantize generated values."""
    return float(literal)
