"""Deck exporters: PowerPoint, HTML preview and the JSON manifest."""

from .html import chart_svg, export_html, pie_wedge_svg, render_html
from .media import MediaResolver, mime_type
from .pptx import ExportOptions, drawing_angles, export_pptx, repack_archive

__all__ = [
    "ExportOptions",
    "MediaResolver",
    "chart_svg",
    "drawing_angles",
    "export_html",
    "export_pptx",
    "mime_type",
    "pie_wedge_svg",
    "render_html",
    "repack_archive",
]
