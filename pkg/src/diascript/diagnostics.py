"""Diagnostic records shared by the parser, interpreter, layout, and server."""

from __future__ import annotations

from dataclasses import dataclass

from .source import Span

SEVERITIES = ("error", "warning", "info")


@dataclass(frozen=True, slots=True)
class Diagnostic:
    severity: str
    span: Span | None
    message: str

    def format(self, uri: str = "") -> str:
        where = "?" if self.span is None else f"{self.span.start}..{self.span.end}"
        prefix = f"{uri}:" if uri else ""
        return f"{prefix}{where}: {self.severity}: {self.message}"


def has_errors(diagnostics) -> bool:
    return any(d.severity == "error" for d in diagnostics)
