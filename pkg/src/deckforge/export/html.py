"""Self-contained HTML preview: one section per slide, charts as inline SVG."""

import base64
import html
import logging
import math
from pathlib import Path
from typing import Optional

from ..errors import ExportError, UnresolvableMediaError
from ..models.chart import ChartSpec
from ..models.content import ImageAsset
from ..models.deck import Deck
from .media import MediaResolver, mime_type

logger = logging.getLogger(__name__)

VIEW_W, VIEW_H = 400.0, 300.0
PALETTE = ("#4A90D9", "#7C3AED", "#10B981", "#F59E0B", "#EF4444", "#0EA5E9")

STYLE = """
body { margin: 0; background: #e5e7eb; font-family: sans-serif; }
section.slide { position: relative; width: 960px; height: 540px; margin: 24px auto;
  background: #fff; box-shadow: 0 1px 4px rgba(0,0,0,.2); overflow: hidden; }
section.slide > div { position: absolute; display: flex; align-items: center;
  justify-content: center; text-align: center; color: #1F2937; }
.title_text { font-size: 40px; font-weight: bold; }
.subtitle_text, .body_text { font-size: 24px; }
.caption_text { font-size: 18px; }
section.slide img, section.slide svg { max-width: 100%; max-height: 100%; }
"""


def _fmt(value: float) -> str:
    return f"{value:.6f}".rstrip("0").rstrip(".")


def _polar(cx: float, cy: float, r: float, degrees: float) -> tuple[float, float]:
    """Point at `degrees` clockwise from 12 o'clock (SVG y grows downward)."""
    rad = math.radians(degrees)
    return cx + r * math.sin(rad), cy - r * math.cos(rad)


def pie_wedge_svg(start: float, span: float, cx: float, cy: float, r: float, color: str) -> str:
    attrs = f'data-start="{_fmt(start)}" data-span="{_fmt(span)}" fill="{color}"'
    if span >= 360.0 - 1e-9:
        return f'<circle class="wedge" cx="{_fmt(cx)}" cy="{_fmt(cy)}" r="{_fmt(r)}" {attrs}/>'
    x0, y0 = _polar(cx, cy, r, start)
    x1, y1 = _polar(cx, cy, r, start + span)
    large = 1 if span > 180.0 else 0
    d = (
        f"M {_fmt(cx)} {_fmt(cy)} L {_fmt(x0)} {_fmt(y0)} "
        f"A {_fmt(r)} {_fmt(r)} 0 {large} 1 {_fmt(x1)} {_fmt(y1)} Z"
    )
    return f'<path class="wedge" d="{d}" {attrs}/>'


def _text(x: float, y: float, text: str, size: int = 12, anchor: str = "middle") -> str:
    return (
        f'<text x="{_fmt(x)}" y="{_fmt(y)}" font-size="{size}" text-anchor="{anchor}">'
        f"{html.escape(text)}</text>"
    )


def chart_svg(chart: ChartSpec) -> str:
    """Inline SVG: bars as rects, pie wedges as arc paths, scatter as circles."""
    parts = [_text(VIEW_W / 2, 22, chart.title, 16)]
    top, bottom = 40.0, VIEW_H - 30.0

    if chart.kind == "histogram":
        n = len(chart.categories)
        slot = VIEW_W / n
        peak = max(c.value for c in chart.categories) or 1.0
        for i, category in enumerate(chart.categories):
            height = (bottom - top) * category.value / peak
            x = i * slot + slot * 0.2
            parts.append(
                f'<rect class="bar" x="{_fmt(x)}" y="{_fmt(bottom - height)}" '
                f'width="{_fmt(slot * 0.6)}" height="{_fmt(height)}" '
                f'fill="{PALETTE[i % len(PALETTE)]}"/>'
            )
            parts.append(_text(i * slot + slot / 2, VIEW_H - 10, category.label))
    elif chart.kind == "pie":
        r = (bottom - top) / 2
        cx, cy = 20 + r, top + r
        total = chart.total()
        for i, (start, span) in enumerate(chart.wedge_angles()):
            color = PALETTE[i % len(PALETTE)]
            if span > 0:
                parts.append(pie_wedge_svg(start, span, cx, cy, r, color))
            category = chart.categories[i]
            label = f"{category.label} ({100.0 * category.value / total:.0f}%)"
            parts.append(_text(2 * r + 40, top + 16 + i * 20, label, anchor="start"))
    else:
        xs = [p[0] for p in chart.points]
        ys = [p[1] for p in chart.points]
        x_lo, x_hi = min(xs), max(xs)
        y_lo, y_hi = min(ys), max(ys)
        x_span = (x_hi - x_lo) or 1.0
        y_span = (y_hi - y_lo) or 1.0
        left, right = 40.0, VIEW_W - 10.0
        parts.append(
            f'<polyline class="axis" points="{_fmt(left)},{_fmt(top)} {_fmt(left)},{_fmt(bottom)} '
            f'{_fmt(right)},{_fmt(bottom)}" fill="none" stroke="#1F2937"/>'
        )
        for x, y in chart.points:
            px = left + (right - left) * (x - x_lo) / x_span
            py = bottom - (bottom - top) * (y - y_lo) / y_span
            parts.append(
                f'<circle class="point" cx="{_fmt(px)}" cy="{_fmt(py)}" r="4" fill="{PALETTE[0]}"/>'
            )
        if chart.axis_labels:
            parts.append(_text((left + right) / 2, VIEW_H - 8, chart.axis_labels[0]))
            parts.append(
                f'<text x="12" y="{_fmt((top + bottom) / 2)}" font-size="12" text-anchor="middle" '
                f'transform="rotate(-90 12 {_fmt((top + bottom) / 2)})">'
                f"{html.escape(chart.axis_labels[1])}</text>"
            )

    body = "".join(parts)
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" class="chart {chart.kind}" '
        f'viewBox="0 0 {_fmt(VIEW_W)} {_fmt(VIEW_H)}">{body}</svg>'
    )


def _image_html(asset: ImageAsset, resolver: Optional[MediaResolver]) -> str:
    alt = html.escape(asset.attribution or asset.asset_id, quote=True)
    src = asset.locator
    if resolver is not None:
        try:
            data = base64.b64encode(resolver.resolve(asset)).decode("ascii")
            src = f"data:{mime_type(asset.locator)};base64,{data}"
        except UnresolvableMediaError:
            logger.warning(f"Could not inline {asset.asset_id}, linking {asset.locator}")
    return f'<img src="{html.escape(src, quote=True)}" alt="{alt}">'


def render_html(deck: Deck, resolver: Optional[MediaResolver] = None) -> str:
    sections = []
    for index, slide in enumerate(deck.slides):
        template = deck.template_for(slide)
        boxes = []
        for placeholder in template.placeholders:
            g = placeholder.geometry
            style = (
                f"left:{_fmt(g.x * 100)}%;top:{_fmt(g.y * 100)}%;"
                f"width:{_fmt(g.width * 100)}%;height:{_fmt(g.height * 100)}%"
            )
            fill = slide.fills[placeholder.id]
            if fill.text is not None:
                inner = html.escape(fill.text)
            elif fill.image is not None:
                inner = _image_html(fill.image, resolver)
            else:
                inner = chart_svg(fill.chart)
            boxes.append(f'<div class="{placeholder.kind}" style="{style}">{inner}</div>')
        sections.append(
            f'<section class="slide" id="slide-{index + 1}" '
            f'data-generator="{html.escape(slide.meta.generator, quote=True)}" '
            f'data-seed="{html.escape(slide.meta.seed, quote=True)}">{"".join(boxes)}</section>'
        )
    title = html.escape(deck.topic.word)
    return (
        "<!DOCTYPE html>\n"
        f'<html lang="en"><head><meta charset="utf-8"><title>{title}</title>'
        f"<style>{STYLE}</style></head>\n<body>\n"
        + "\n".join(sections)
        + "\n</body></html>\n"
    )


def export_html(deck: Deck, path: Path | str, resolver: Optional[MediaResolver] = None) -> Path:
    """Write a single-file HTML preview of `deck`. Images are inlined as data
    URIs when `resolver` can load them, otherwise linked.

    Raises:
        ExportError: the file cannot be written
    """
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(render_html(deck, resolver), encoding="utf-8")
    except OSError as e:
        raise ExportError(f"cannot write {path}: {e}") from e
    return path
