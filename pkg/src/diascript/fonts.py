"""Metrics-only font handling.

No font files are parsed and nothing is rasterized: a bundled metrics table
(advance widths per codepoint) makes text measurement bit-exact on every
platform. The metrics file format is JSON, schemaVersion 1:

    {"schemaVersion": 1, "family": str, "unitsPerEm": number,
     "ascent": number, "descent": number (negative),
     "advances": {"<codepoint decimal>": number, ...}}

Codepoints missing from the table fall back to the advance of "?" or half an
em when that is missing too.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from typing import Mapping

LINE_SPACING_FACTOR = 1.2

DEFAULT_FAMILY = "Diascript Sans"


class UnknownFont(Exception):
    pass


@dataclass(frozen=True)
class FontMetrics:
    family: str
    units_per_em: float
    ascent: float
    descent: float  # negative, in font units
    advances: Mapping[int, float]

    @property
    def fallback_advance(self) -> float:
        return self.advances.get(ord("?"), self.units_per_em / 2)

    def advance(self, codepoint: int) -> float:
        return self.advances.get(codepoint, self.fallback_advance)

    @staticmethod
    def from_json(data: dict) -> "FontMetrics":
        if data.get("schemaVersion") != 1:
            raise ValueError(f"unsupported font metrics schema: {data.get('schemaVersion')!r}")
        advances = {int(cp): float(adv) for cp, adv in data["advances"].items()}
        return FontMetrics(
            family=data["family"],
            units_per_em=float(data["unitsPerEm"]),
            ascent=float(data["ascent"]),
            descent=float(data["descent"]),
            advances=advances,
        )


@dataclass(frozen=True)
class FontCatalog:
    fonts: Mapping[str, FontMetrics] = field(default_factory=dict)
    default_family: str | None = None

    def resolve(self, family: str | None) -> FontMetrics:
        if family is not None and family in self.fonts:
            return self.fonts[family]
        if family is None and self.default_family is not None:
            return self.fonts[self.default_family]
        if self.default_family is not None:
            return self.fonts[self.default_family]
        raise UnknownFont(f"font family {family!r} unavailable and no default configured")

    def with_font(self, metrics: FontMetrics) -> "FontCatalog":
        fonts = dict(self.fonts)
        fonts[metrics.family] = metrics
        return FontCatalog(fonts, self.default_family or metrics.family)


def measure_text(text: str, metrics: FontMetrics, font_size: float) -> tuple[float, float]:
    """Width and height of a text block at the given size.

    Width sums advance widths per line (scaled once, so doubling the size
    doubles the width exactly); height is line count times the spaced line
    height. The empty string is one line high and zero wide.
    """
    scale = font_size / metrics.units_per_em
    lines = text.split("\n")
    width_units = max(sum(metrics.advance(ord(ch)) for ch in line) for line in lines)
    line_height = (metrics.ascent - metrics.descent) * scale * LINE_SPACING_FACTOR
    return width_units * scale, len(lines) * line_height


def line_height(metrics: FontMetrics, font_size: float) -> float:
    scale = font_size / metrics.units_per_em
    return (metrics.ascent - metrics.descent) * scale * LINE_SPACING_FACTOR


def baseline_offset(metrics: FontMetrics, font_size: float) -> float:
    """Distance from a line box's top to its baseline (leading split evenly)."""
    scale = font_size / metrics.units_per_em
    natural = (metrics.ascent - metrics.descent) * scale
    leading = natural * (LINE_SPACING_FACTOR - 1.0)
    return leading / 2 + metrics.ascent * scale


def default_catalog() -> FontCatalog:
    """Catalog holding the bundled sans family."""
    data = json.loads(resources.files("diascript.data").joinpath("default_font.json").read_text())
    metrics = FontMetrics.from_json(data)
    return FontCatalog({metrics.family: metrics}, metrics.family)
