"""Back-conversion: draw a SimVec document as SVG.

The output canvas is the 1000-unit square, so normalization is the
identity and ingesting the rendered SVG reproduces the document
exactly (texts carry explicit textLength/font-size so their boxes
survive the round trip).
"""

from __future__ import annotations

from xml.sax.saxutils import escape

from .core import (
    LineElement,
    PolygonElement,
    RectElement,
    SimVecDoc,
    TextElement,
    serialize_simvec,
)
from .ingest import TEXT_HEIGHT_FACTOR


def _css(color) -> str:
    # hue bucket 20 is adjacent to 360; emitting 360 would wrap to bucket 0
    # on re-ingestion, so use the lowest hue the bucket covers instead
    hue = 351 if color.h == 20 else color.h * 18
    return f"hsl({hue}, {color.s * 5}%, {color.l * 5}%)"


def render_simvec_svg(doc: SimVecDoc) -> str:
    """Draw the four element kinds in paint order on a 1000x1000 canvas."""
    serialize_simvec(doc)  # surfaces validation errors before drawing
    body = []
    for el in doc.elements:
        if isinstance(el, RectElement):
            b = el.bbox
            body.append(f'<rect x="{b.left}" y="{b.top}" width="{b.width}" '
                        f'height="{b.height}" fill="{_css(el.color)}"/>')
        elif isinstance(el, LineElement):
            pts = " ".join(f"{p.x},{p.y}" for p in el.points)
            body.append(f'<polyline points="{pts}" fill="none" '
                        f'stroke="{_css(el.color)}" stroke-width="2"/>')
        elif isinstance(el, PolygonElement):
            pts = " ".join(f"{p.x},{p.y}" for p in el.points)
            body.append(f'<polygon points="{pts}" fill="{_css(el.color)}"/>')
        elif isinstance(el, TextElement):
            b = el.bbox
            font_size = b.height / TEXT_HEIGHT_FACTOR
            baseline = b.top + font_size
            body.append(f'<text x="{b.left}" y="{baseline!r}" '
                        f'font-size="{font_size!r}" textLength="{b.width}" '
                        f'text-anchor="start" fill="{_css(el.color)}" '
                        f'font-family="sans-serif">{escape(el.text)}</text>')
    inner = "\n".join(body)
    return ('<?xml version="1.0" encoding="utf-8"?>\n'
            '<svg xmlns="http://www.w3.org/2000/svg" width="1000" height="1000" '
            'viewBox="0 0 1000 1000">\n' + inner + "\n</svg>\n")
