"""Historical-style restyling of chart SVGs.

Three seeded, composable transforms: hand-drawn line jitter (stroked
geometry is subdivided and displaced, endpoints kept exact, fills left
alone so data marks keep their ground truth), paper texture (the
background is tinted toward parchment and low-opacity speckles are
scattered beneath the content), and handwriting font substitution
(a pass-through font-family name; no font files are shipped).
Zero-amplitude parameters are exact identities.
"""

from __future__ import annotations

import math
import re
import xml.etree.ElementTree as ET
from dataclasses import dataclass

from .core import round_half_away
from .ingest import (
    IngestError,
    _localname,
    _parse_style_attr,
    flatten_path,
    parse_css_color,
    resolve_viewport,
)
from .seeding import rng_for

SVG_NS = "http://www.w3.org/2000/svg"

PARCHMENT_HUE = 42
PARCHMENT_SAT = 48
SPECKLE_COLOR = "hsl(32, 45%, 38%)"
SPECKLE_OPACITY = 0.16

# Gaussian displacements are clamped here so the documented 3-sigma
# geometry bound survives integer renormalization.
JITTER_CLAMP_SIGMA = 2.5


@dataclass(frozen=True)
class AntiquaParams:
    jitter_amplitude: float = 0.0      # normalized units, std of displacement
    segment_length: float = 0.0        # normalized units, 0 disables subdivision
    thickness_variation: float = 0.0   # fraction of stroke width
    tint_strength: float = 0.0         # [0, 1] toward parchment
    speckle_density: float = 0.0       # speckles per 1e6 square source units
    font_name: str = ""
    seed: int = 0

    def __post_init__(self):
        for name in ("jitter_amplitude", "segment_length", "thickness_variation",
                     "speckle_density"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        if not 0.0 <= self.tint_strength <= 1.0:
            raise ValueError("tint_strength must be in [0, 1]")


HISTORICAL_PRESET = AntiquaParams(
    jitter_amplitude=3.0, segment_length=20.0, thickness_variation=0.25,
    tint_strength=0.55, speckle_density=40.0, font_name="Homemade Apple")

PRESETS = {
    "none": AntiquaParams(),
    "historical": HISTORICAL_PRESET,
}


def _register_namespaces() -> None:
    ET.register_namespace("", SVG_NS)
    ET.register_namespace("xlink", "http://www.w3.org/1999/xlink")


def _parse_svg(svg: str) -> ET.Element:
    _register_namespaces()
    try:
        return ET.fromstring(svg)
    except ET.ParseError as exc:
        raise IngestError(f"malformed SVG markup: {exc}") from None


def _serialize(root: ET.Element, original: str) -> str:
    out = ET.tostring(root, encoding="unicode")
    if original.lstrip().startswith("<?xml"):
        out = '<?xml version="1.0" encoding="utf-8"?>\n' + out
    return out


def _element_stroke(el: ET.Element) -> str | None:
    style = _parse_style_attr(el.get("style"))
    return style.get("stroke", el.get("stroke"))


def _is_stroked(el: ET.Element) -> bool:
    return parse_css_color(_element_stroke(el)) is not None


def _jitter_polyline(points, closed, rng, amp, seg):
    """Subdivide each edge and displace interior vertices perpendicular
    to it; original vertices (and so endpoints) stay exact."""
    out = []
    edges = list(zip(points, points[1:]))
    if closed and len(points) > 2:
        edges.append((points[-1], points[0]))
    for a, b in edges:
        out.append(a)
        length = math.hypot(b[0] - a[0], b[1] - a[1])
        if length == 0 or seg <= 0:
            continue
        n = max(1, round_half_away(length / seg))
        px, py = -(b[1] - a[1]) / length, (b[0] - a[0]) / length
        for k in range(1, n):
            t = k / n
            off = rng.gauss(0.0, amp)
            limit = JITTER_CLAMP_SIGMA * amp
            off = max(-limit, min(limit, off))
            out.append((a[0] + t * (b[0] - a[0]) + px * off,
                        a[1] + t * (b[1] - a[1]) + py * off))
    if not closed:
        out.append(points[-1])
    return out


def _fmt(x: float) -> str:
    return str(int(x)) if x == int(x) else repr(round(float(x), 3))


_STROKE_WIDTH_STYLE_RE = re.compile(r"(stroke-width\s*:\s*)([0-9.]+)")


def _modulate_width(el: ET.Element, factor: float) -> None:
    style = el.get("style")
    if style and _STROKE_WIDTH_STYLE_RE.search(style):
        el.set("style", _STROKE_WIDTH_STYLE_RE.sub(
            lambda m: m.group(1) + _fmt(float(m.group(2)) * factor), style, count=1))
        return
    width = el.get("stroke-width")
    base = float(width) if width else 1.0
    el.set("stroke-width", _fmt(base * factor))


def jitter_strokes(svg: str, params: AntiquaParams) -> str:
    """Redraw straight strokes with hand-drawn irregularity.

    Lines become polylines; stroked polylines/polygons/paths get their
    edges subdivided at roughly segment_length spacing with seeded
    Gaussian perpendicular displacement; stroke widths are modulated
    within thickness_variation.  Fills are untouched, so bar and area
    marks keep their exact geometry.
    """
    if params.jitter_amplitude == 0 and params.thickness_variation == 0:
        return svg
    root = _parse_svg(svg)
    viewport, _ = resolve_viewport(root)
    to_src = max(viewport.width, viewport.height) / 1000.0
    amp = params.jitter_amplitude * to_src
    seg = params.segment_length * to_src if params.segment_length > 0 else 20 * to_src

    for index, el in enumerate(root.iter()):
        tag = _localname(el.tag)
        if tag not in ("line", "polyline", "polygon", "path") or not _is_stroked(el):
            continue
        rng = rng_for(params.seed, "jitter", index)
        if params.thickness_variation > 0:
            factor = rng.uniform(1.0 - params.thickness_variation,
                                 1.0 + params.thickness_variation)
            _modulate_width(el, factor)
        if params.jitter_amplitude == 0:
            continue
        if tag == "line":
            pts = [(float(el.get("x1", 0)), float(el.get("y1", 0))),
                   (float(el.get("x2", 0)), float(el.get("y2", 0)))]
            jittered = _jitter_polyline(pts, False, rng, amp, seg)
            for attr in ("x1", "y1", "x2", "y2"):
                if attr in el.attrib:
                    del el.attrib[attr]
            el.tag = f"{{{SVG_NS}}}polyline"
            el.set("points", " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in jittered))
        elif tag in ("polyline", "polygon"):
            nums = [float(v) for v in re.findall(r"[-+]?[0-9.]+", el.get("points", ""))]
            pts = list(zip(nums[0::2], nums[1::2]))
            if len(pts) < 2:
                continue
            jittered = _jitter_polyline(pts, tag == "polygon", rng, amp, seg)
            el.set("points", " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in jittered))
        else:  # path
            d = el.get("d", "")
            if not d.strip():
                continue
            subpaths = flatten_path(d, tolerance=amp / 4 if amp else 0.5)
            parts = []
            for sp in subpaths:
                jittered = _jitter_polyline(sp.points, sp.closed, rng, amp, seg)
                part = "M" + "L".join(f"{_fmt(x)},{_fmt(y)}" for x, y in jittered)
                if sp.closed:
                    part += "Z"
                parts.append(part)
            if parts:
                el.set("d", "".join(parts))
    return _serialize(root, svg)


def _find_background(root: ET.Element, viewport) -> ET.Element | None:
    for el in root.iter():
        if _localname(el.tag) != "rect":
            continue
        try:
            x = float(el.get("x", 0))
            y = float(el.get("y", 0))
            w = float(el.get("width", 0))
            h = float(el.get("height", 0))
        except ValueError:
            continue
        if (abs(x) <= 1 and abs(y) <= 1
                and w >= 0.99 * viewport.width and h >= 0.99 * viewport.height):
            return el
    return None


_FILL_STYLE_RE = re.compile(r"(fill\s*:\s*)([^;\"]+)")


def _set_fill(el: ET.Element, value: str) -> None:
    style = el.get("style")
    if style and _FILL_STYLE_RE.search(style):
        el.set("style", _FILL_STYLE_RE.sub(lambda m: m.group(1) + value, style, count=1))
    else:
        el.set("fill", value)


def apply_paper_texture(svg: str, params: AntiquaParams) -> str:
    """Tint the background toward parchment and scatter aging speckles.

    The tint keeps the background's lightness and rotates hue/saturation
    toward parchment by tint_strength; speckles are seeded low-opacity
    dots beneath all chart content.
    """
    if params.tint_strength == 0 and params.speckle_density == 0:
        return svg
    root = _parse_svg(svg)
    viewport, _ = resolve_viewport(root)
    parents = {child: parent for parent in root.iter() for child in parent}

    bg = _find_background(root, viewport)
    if params.tint_strength > 0:
        if bg is not None:
            current = parse_css_color(
                _parse_style_attr(bg.get("style")).get("fill", bg.get("fill", "white")))
            lightness = current.l * 5 if current is not None else 100
        else:
            lightness = 100
        sat = round_half_away(params.tint_strength * PARCHMENT_SAT)
        tinted = f"hsl({PARCHMENT_HUE}, {sat}%, {round_half_away(lightness)}%)"
        if bg is not None:
            _set_fill(bg, tinted)
        else:
            bg = ET.Element(f"{{{SVG_NS}}}rect", {
                "class": "paper-background", "x": "0", "y": "0",
                "width": _fmt(viewport.width), "height": _fmt(viewport.height),
                "fill": tinted})
            root.insert(0, bg)
            parents[bg] = root

    count = round_half_away(
        params.speckle_density * viewport.width * viewport.height / 1e6)
    if count > 0:
        rng = rng_for(params.seed, "speckles")
        group = ET.Element(f"{{{SVG_NS}}}g", {"class": "paper-speckles"})
        for _ in range(count):
            group.append(ET.Element(f"{{{SVG_NS}}}circle", {
                "cx": _fmt(rng.uniform(0, viewport.width)),
                "cy": _fmt(rng.uniform(0, viewport.height)),
                "r": _fmt(rng.uniform(1.6, 3.0)),
                "fill": SPECKLE_COLOR,
                "fill-opacity": str(SPECKLE_OPACITY)}))
        if bg is not None and bg in parents:
            parent = parents[bg]
            parent.insert(list(parent).index(bg) + 1, group)
        else:
            root.insert(0, group)
    return _serialize(root, svg)


_FONT_ATTR_RE = re.compile(r'font-family="[^"]*"')
_FONT_STYLE_RE = re.compile(r"(font-family\s*:\s*)([^;\"]+)")


def substitute_fonts(svg: str, font_name: str) -> str:
    """Replace every font-family declaration with `font_name`.

    Text content, positions, and sizes are untouched, so the chart's
    SimVec ground truth stays valid.  Texts with no declaration at all
    get an explicit font-family attribute.
    """
    if not font_name:
        raise ValueError("font name must be non-empty")
    out = _FONT_ATTR_RE.sub(f'font-family="{font_name}"', svg)
    out = _FONT_STYLE_RE.sub(lambda m: m.group(1) + font_name, out)

    root = _parse_svg(out)
    bare = [el for el in root.iter()
            if _localname(el.tag) == "text"
            and "font-family" not in _parse_style_attr(el.get("style"))
            and el.get("font-family") is None]
    if not bare:
        return out
    for el in bare:
        el.set("font-family", font_name)
    return _serialize(root, out)


def oldify(svg: str, params: AntiquaParams) -> str:
    """Full historical mock-up: jittered strokes, handwriting font,
    paper texture underneath, in that z-order."""
    out = jitter_strokes(svg, params)
    if params.font_name:
        out = substitute_fonts(out, params.font_name)
    return apply_paper_texture(out, params)
