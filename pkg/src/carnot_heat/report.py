"""Deterministic JSON reports, time-series CSV and small SVG line charts."""

from __future__ import annotations

import json
import math
from pathlib import Path
from xml.sax.saxutils import escape

SCHEMA_VERSION = 1

__all__ = ["SCHEMA_VERSION", "write_json", "dumps", "write_series", "svg_line_chart"]


def _clean(obj):
    """JSON has no inf/nan; encode them as strings so reports stay valid."""
    if isinstance(obj, float) and not math.isfinite(obj):
        return repr(obj)
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if hasattr(obj, "item") and callable(obj.item):  # numpy scalar
        return _clean(obj.item())
    return obj


def dumps(obj) -> str:
    return json.dumps(_clean(obj), sort_keys=True, indent=2) + "\n"


def write_json(path, obj) -> None:
    Path(path).write_text(dumps(obj))


def write_series(path, columns: dict) -> None:
    """CSV with one column per entry of ``columns`` (equal lengths)."""
    names = list(columns)
    rows = zip(*(columns[n] for n in names))
    lines = [",".join(names)] + [",".join(format(float(v), ".17g") for v in row) for row in rows]
    Path(path).write_text("\n".join(lines) + "\n")


def svg_line_chart(x, y, title: str = "", xlabel: str = "t", ylabel: str = "", width=480, height=300) -> str:
    """Self-contained SVG polyline of ``y`` against ``x``; non-finite points are dropped."""
    pts = [(float(a), float(b)) for a, b in zip(x, y) if math.isfinite(a) and math.isfinite(b)]
    ml, mr, mt, mb = 64, 16, 28, 40
    w, h = width - ml - mr, height - mt - mb
    if pts:
        x0, x1 = min(p[0] for p in pts), max(p[0] for p in pts)
        y0, y1 = min(p[1] for p in pts), max(p[1] for p in pts)
    else:
        x0 = x1 = y0 = y1 = 0.0
    if x1 == x0:
        x1 = x0 + 1.0
    if y1 == y0:
        y0, y1 = y0 - 0.5, y1 + 0.5

    def sx(v):
        return ml + (v - x0) / (x1 - x0) * w

    def sy(v):
        return mt + h - (v - y0) / (y1 - y0) * h

    poly = " ".join(f"{sx(a):.2f},{sy(b):.2f}" for a, b in pts)
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">',
        '<rect width="100%" height="100%" fill="white"/>',
        f'<rect x="{ml}" y="{mt}" width="{w}" height="{h}" fill="none" stroke="#888"/>',
        f'<polyline fill="none" stroke="#1f77b4" stroke-width="1.5" points="{poly}"/>',
        f'<text x="{ml + w / 2}" y="18" text-anchor="middle" font-size="13">{escape(title)}</text>',
        f'<text x="{ml + w / 2}" y="{height - 8}" text-anchor="middle" font-size="11">{escape(xlabel)}</text>',
        f'<text x="14" y="{mt + h / 2}" text-anchor="middle" font-size="11" '
        f'transform="rotate(-90 14 {mt + h / 2})">{escape(ylabel)}</text>',
        f'<text x="{ml - 4}" y="{mt + 4}" text-anchor="end" font-size="10">{y1:.3g}</text>',
        f'<text x="{ml - 4}" y="{mt + h}" text-anchor="end" font-size="10">{y0:.3g}</text>',
        f'<text x="{ml}" y="{mt + h + 14}" text-anchor="middle" font-size="10">{x0:.3g}</text>',
        f'<text x="{ml + w}" y="{mt + h + 14}" text-anchor="middle" font-size="10">{x1:.3g}</text>',
        "</svg>",
    ]
    return "\n".join(parts) + "\n"
