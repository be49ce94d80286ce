"""PowerPoint export with python-pptx, byte-deterministic under fixed_epoch."""

import io
import logging
import zipfile
from pathlib import Path
from typing import Literal, Optional

from pptx import Presentation
from pptx.dml.color import RGBColor
from pptx.enum.shapes import MSO_CONNECTOR, MSO_SHAPE
from pptx.enum.text import MSO_ANCHOR, PP_ALIGN
from pptx.parts.image import Image
from pptx.util import Emu, Pt
from pydantic import BaseModel, ConfigDict, field_validator

from ..config import get_data_dir
from ..errors import ExportError
from ..models.chart import ChartSpec
from ..models.content import ImageAsset
from ..models.deck import Deck, Geometry
from ..utils.timestamps import FIXED_EPOCH
from .media import MediaResolver

logger = logging.getLogger(__name__)

BLANK_LAYOUT = 6
SLIDE_16_9 = (12192000, 6858000)
ZIP_EPOCH = (1980, 1, 1, 0, 0, 0)
# DrawingML angles are 60000ths of a degree; python-pptx normalizes by 100000.
PIE_ANGLE_SCALE = 0.6
POINT_SIZE = Emu(73152)

FONT_SIZES = {"title_text": 40, "subtitle_text": 24, "body_text": 24, "caption_text": 18}
DARK_TEXT = "1F2937"
PALETTE = ("4A90D9", "7C3AED", "10B981", "F59E0B", "EF4444", "0EA5E9")


class ExportOptions(BaseModel):
    model_config = ConfigDict(frozen=True)

    timestamp_policy: Literal["fixed_epoch", "system_clock"] = "fixed_epoch"
    slide_size: tuple[int, int] = SLIDE_16_9
    embed_media: bool = True

    @field_validator("slide_size")
    @classmethod
    def positive_size(cls, v: tuple[int, int]) -> tuple[int, int]:
        if min(v) <= 0:
            raise ValueError("slide dimensions must be positive")
        return v


class _Box:
    """A placeholder rectangle in EMU."""

    def __init__(self, left: int, top: int, width: int, height: int):
        self.left, self.top, self.width, self.height = left, top, width, height

    @classmethod
    def from_geometry(cls, geometry: Geometry, slide_size: tuple[int, int]) -> "_Box":
        w, h = slide_size
        return cls(
            int(geometry.x * w),
            int(geometry.y * h),
            int(geometry.width * w),
            int(geometry.height * h),
        )

    def split_top(self, fraction: float) -> tuple["_Box", "_Box"]:
        band = int(self.height * fraction)
        return (
            _Box(self.left, self.top, self.width, band),
            _Box(self.left, self.top + band, self.width, self.height - band),
        )


def drawing_angles(start: float, span: float) -> tuple[float, float]:
    """Pie adjustment angles (degrees clockwise from 3 o'clock) for a wedge
    given clockwise from 12 o'clock."""
    return (start + 270.0) % 360.0, (start + span + 270.0) % 360.0


def _color(index: int) -> RGBColor:
    return RGBColor.from_string(PALETTE[index % len(PALETTE)])


def _add_text(shapes, box: _Box, text: str, size: int, bold: bool = False, center: bool = True):
    shape = shapes.add_textbox(Emu(box.left), Emu(box.top), Emu(box.width), Emu(box.height))
    frame = shape.text_frame
    frame.word_wrap = True
    frame.vertical_anchor = MSO_ANCHOR.MIDDLE
    p = frame.paragraphs[0]
    p.text = text
    p.font.size = Pt(size)
    p.font.bold = bold
    p.font.color.rgb = RGBColor.from_string(DARK_TEXT)
    if center:
        p.alignment = PP_ALIGN.CENTER
    return shape


def _add_picture(shapes, box: _Box, blob: bytes):
    """Aspect-fit the image inside the box, centred."""
    px_w, px_h = Image.from_blob(blob).size
    scale = min(box.width / px_w, box.height / px_h)
    width, height = int(px_w * scale), int(px_h * scale)
    left = box.left + (box.width - width) // 2
    top = box.top + (box.height - height) // 2
    return shapes.add_picture(io.BytesIO(blob), Emu(left), Emu(top), Emu(width), Emu(height))


def _shape(shapes, kind, left: int, top: int, width: int, height: int):
    return shapes.add_shape(kind, Emu(left), Emu(top), Emu(width), Emu(height))


def _filled(shape, index: int):
    shape.fill.solid()
    shape.fill.fore_color.rgb = _color(index)
    shape.line.fill.background()
    return shape


def _draw_histogram(shapes, chart: ChartSpec, plot: _Box) -> None:
    bars, labels = plot.split_top(0.85)
    n = len(chart.categories)
    slot = bars.width // n
    peak = max(c.value for c in chart.categories) or 1.0
    for i, category in enumerate(chart.categories):
        height = max(int(bars.height * category.value / peak), 1)
        bar_w = int(slot * 0.6)
        left = bars.left + i * slot + (slot - bar_w) // 2
        top = bars.top + bars.height - height
        _filled(_shape(shapes, MSO_SHAPE.RECTANGLE, left, top, bar_w, height), i)
        label = _Box(bars.left + i * slot, labels.top, slot, labels.height)
        _add_text(shapes, label, category.label, 14)


def _draw_pie(shapes, chart: ChartSpec, plot: _Box) -> None:
    diameter = min(int(plot.width * 0.6), plot.height)
    left = plot.left + (int(plot.width * 0.6) - diameter) // 2
    top = plot.top + (plot.height - diameter) // 2
    total = chart.total()
    for i, (start, span) in enumerate(chart.wedge_angles()):
        if span <= 0:
            continue
        if span >= 360.0 - 1e-9:
            shape = _shape(shapes, MSO_SHAPE.OVAL, left, top, diameter, diameter)
        else:
            shape = _shape(shapes, MSO_SHAPE.PIE, left, top, diameter, diameter)
            begin, end = drawing_angles(start, span)
            shape.adjustments[0] = begin * PIE_ANGLE_SCALE
            shape.adjustments[1] = end * PIE_ANGLE_SCALE
        _filled(shape, i)

    legend_left = plot.left + int(plot.width * 0.62)
    row = plot.height // max(len(chart.categories), 1)
    for i, category in enumerate(chart.categories):
        share = 100.0 * category.value / total
        box = _Box(legend_left, plot.top + i * row, plot.width - (legend_left - plot.left), row)
        swatch = min(row // 2, POINT_SIZE * 2)
        swatch_top = box.top + (row - swatch) // 2
        _filled(_shape(shapes, MSO_SHAPE.RECTANGLE, box.left, swatch_top, swatch, swatch), i)
        text_box = _Box(box.left + swatch * 2, box.top, box.width - swatch * 2, row)
        _add_text(shapes, text_box, f"{category.label} ({share:.0f}%)", 14, center=False)


def _draw_scatter(shapes, chart: ChartSpec, plot: _Box) -> None:
    area, x_band = plot.split_top(0.88)
    y_band = _Box(area.left, area.top, int(area.width * 0.1), area.height)
    area = _Box(area.left + y_band.width, area.top, area.width - y_band.width, area.height)

    xs = [p[0] for p in chart.points]
    ys = [p[1] for p in chart.points]
    x_lo, x_hi = min(xs), max(xs)
    y_lo, y_hi = min(ys), max(ys)
    if x_hi == x_lo:
        x_hi = x_lo + 1.0
    if y_hi == y_lo:
        y_hi = y_lo + 1.0

    bottom = area.top + area.height
    right = area.left + area.width
    axes = ((area.left, bottom, right, bottom), (area.left, area.top, area.left, bottom))
    for x1, y1, x2, y2 in axes:
        shapes.add_connector(MSO_CONNECTOR.STRAIGHT, Emu(x1), Emu(y1), Emu(x2), Emu(y2))

    usable_w = area.width - POINT_SIZE
    usable_h = area.height - POINT_SIZE
    for x, y in chart.points:
        left = area.left + int(usable_w * (x - x_lo) / (x_hi - x_lo))
        top = area.top + int(usable_h * (1.0 - (y - y_lo) / (y_hi - y_lo)))
        _filled(_shape(shapes, MSO_SHAPE.OVAL, left, top, POINT_SIZE, POINT_SIZE), 0)

    if chart.axis_labels:
        x_label, y_label = chart.axis_labels
        _add_text(shapes, _Box(area.left, x_band.top, area.width, x_band.height), x_label, 14)
        _add_text(shapes, y_band, y_label, 14)


def draw_chart(shapes, chart: ChartSpec, box: _Box) -> None:
    """Chart as native shapes: title, then bars, wedges or points with labels."""
    title, plot = box.split_top(0.15)
    _add_text(shapes, title, chart.title, 24, bold=True)
    if chart.kind == "histogram":
        _draw_histogram(shapes, chart, plot)
    elif chart.kind == "pie":
        _draw_pie(shapes, chart, plot)
    else:
        _draw_scatter(shapes, chart, plot)


def _place_image(shapes, box: _Box, asset: ImageAsset, resolver: MediaResolver, embed: bool):
    if embed:
        return _add_picture(shapes, box, resolver.resolve(asset))
    frame = _shape(shapes, MSO_SHAPE.RECTANGLE, box.left, box.top, box.width, box.height)
    frame.text_frame.text = asset.locator
    return frame


def build_presentation(deck: Deck, options: ExportOptions, resolver: MediaResolver) -> Presentation:
    prs = Presentation()
    prs.slide_width, prs.slide_height = Emu(options.slide_size[0]), Emu(options.slide_size[1])
    layout = prs.slide_layouts[BLANK_LAYOUT]

    for slide in deck.slides:
        page = prs.slides.add_slide(layout)
        template = deck.template_for(slide)
        for placeholder in template.placeholders:
            fill = slide.fills[placeholder.id]
            box = _Box.from_geometry(placeholder.geometry, options.slide_size)
            if fill.text is not None:
                size = FONT_SIZES.get(placeholder.kind, 24)
                _add_text(page.shapes, box, fill.text, size, bold=placeholder.kind == "title_text")
            elif fill.image is not None:
                _place_image(page.shapes, box, fill.image, resolver, options.embed_media)
            else:
                draw_chart(page.shapes, fill.chart, box)

    props = prs.core_properties
    props.title = deck.topic.word
    props.last_modified_by = "deckforge"
    props.revision = 1
    if options.timestamp_policy == "fixed_epoch":
        epoch = FIXED_EPOCH.replace(tzinfo=None)
        props.created = epoch
        props.modified = epoch
    return prs


def repack_archive(data: bytes) -> bytes:
    """Rewrite a zip with sorted entries, constant timestamps and attributes."""
    out = io.BytesIO()
    with zipfile.ZipFile(io.BytesIO(data)) as src, zipfile.ZipFile(out, "w") as dst:
        for name in sorted(src.namelist()):
            info = zipfile.ZipInfo(name, date_time=ZIP_EPOCH)
            info.compress_type = zipfile.ZIP_DEFLATED
            info.create_system = 3
            info.external_attr = 0o644 << 16
            dst.writestr(info, src.read(name))
    return out.getvalue()


def export_pptx(
    deck: Deck,
    path: Path | str,
    options: Optional[ExportOptions] = None,
    resolver: Optional[MediaResolver] = None,
) -> Path:
    """Write `deck` as a .pptx file.

    Text placeholders become text boxes at the template geometry, images
    become aspect-fit pictures (identical bytes are stored once) and charts
    become native shapes. Under fixed_epoch the output bytes depend only on
    the deck and its media.

    Raises:
        UnresolvableMediaError, OversizedMediaError: media problems
        ExportError: the file cannot be written
    """
    options = options or ExportOptions()
    resolver = resolver or MediaResolver(get_data_dir() / "corpus")
    path = Path(path)

    prs = build_presentation(deck, options, resolver)
    buffer = io.BytesIO()
    prs.save(buffer)
    data = buffer.getvalue()
    if options.timestamp_policy == "fixed_epoch":
        data = repack_archive(data)

    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_bytes(data)
    except OSError as e:
        raise ExportError(f"cannot write {path}: {e}") from e
    logger.info(f"Wrote {len(deck)} slides to {path}")
    return path
