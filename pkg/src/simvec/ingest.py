"""SVG to SimVec compilation.

Walks an SVG document in paint order, flattening nested groups and
transform attributes, canonicalizing the zoo of SVG primitives into the
four SimVec kinds, normalizing coordinates to the 1000-unit canvas, and
quantizing colors.  Styling that does not survive into SimVec
(font-family, filters, shadows, opacity) is dropped, as are invisible
elements.
"""

from __future__ import annotations

import colorsys
import math
import re
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field

from .core import (
    Element,
    HslQ,
    LineElement,
    NBBox,
    NPoint,
    PolygonElement,
    RectElement,
    SimVecDoc,
    TextElement,
    dedupe_consecutive,
    quantize_color,
    round_half_away,
)


class IngestError(Exception):
    """Raised for malformed markup, missing viewports, and strict-mode failures."""


@dataclass(frozen=True)
class AffineMatrix:
    """2x3 affine transform: x' = a*x + c*y + e, y' = b*x + d*y + f."""

    a: float = 1.0
    b: float = 0.0
    c: float = 0.0
    d: float = 1.0
    e: float = 0.0
    f: float = 0.0

    def apply(self, x: float, y: float) -> tuple[float, float]:
        return (self.a * x + self.c * y + self.e,
                self.b * x + self.d * y + self.f)

    def multiply(self, other: "AffineMatrix") -> "AffineMatrix":
        """self @ other: apply `other` first, then self."""
        return AffineMatrix(
            a=self.a * other.a + self.c * other.b,
            b=self.b * other.a + self.d * other.b,
            c=self.a * other.c + self.c * other.d,
            d=self.b * other.c + self.d * other.d,
            e=self.a * other.e + self.c * other.f + self.e,
            f=self.b * other.e + self.d * other.f + self.f,
        )

    @property
    def determinant(self) -> float:
        return self.a * self.d - self.b * self.c

    @property
    def is_identity(self) -> bool:
        return self == IDENTITY

    @property
    def is_axis_aligned(self) -> bool:
        return self.b == 0.0 and self.c == 0.0

    @staticmethod
    def translate(tx: float, ty: float = 0.0) -> "AffineMatrix":
        return AffineMatrix(e=tx, f=ty)

    @staticmethod
    def scale(sx: float, sy: float | None = None) -> "AffineMatrix":
        return AffineMatrix(a=sx, d=sx if sy is None else sy)

    @staticmethod
    def rotate(degrees: float, cx: float = 0.0, cy: float = 0.0) -> "AffineMatrix":
        rad = math.radians(degrees)
        cos, sin = math.cos(rad), math.sin(rad)
        m = AffineMatrix(a=cos, b=sin, c=-sin, d=cos)
        if cx or cy:
            return (AffineMatrix.translate(cx, cy)
                    .multiply(m)
                    .multiply(AffineMatrix.translate(-cx, -cy)))
        return m


IDENTITY = AffineMatrix()


def compose_transforms(stack: list[AffineMatrix]) -> AffineMatrix:
    """Compose outermost-first transforms into one matrix."""
    out = IDENTITY
    for m in stack:
        out = out.multiply(m)
    return out


_TRANSFORM_RE = re.compile(r"(matrix|translate|scale|rotate|skewX|skewY)\s*\(([^)]*)\)")
_NUMBER_RE = re.compile(r"[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?")


def parse_transform(text: str) -> AffineMatrix:
    """Parse an SVG `transform` attribute into one composed matrix."""
    out = IDENTITY
    for name, argtext in _TRANSFORM_RE.findall(text):
        args = [float(v) for v in _NUMBER_RE.findall(argtext)]
        if name == "matrix" and len(args) == 6:
            m = AffineMatrix(*args)
        elif name == "translate" and args:
            m = AffineMatrix.translate(args[0], args[1] if len(args) > 1 else 0.0)
        elif name == "scale" and args:
            m = AffineMatrix.scale(args[0], args[1] if len(args) > 1 else None)
        elif name == "rotate" and args:
            if len(args) >= 3:
                m = AffineMatrix.rotate(args[0], args[1], args[2])
            else:
                m = AffineMatrix.rotate(args[0])
        elif name == "skewX" and args:
            m = AffineMatrix(c=math.tan(math.radians(args[0])))
        elif name == "skewY" and args:
            m = AffineMatrix(b=math.tan(math.radians(args[0])))
        else:
            raise IngestError(f"bad transform arguments: {name}({argtext})")
        out = out.multiply(m)
    return out


# ---------------------------------------------------------------------------
# Raw primitives
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Viewport:
    width: float
    height: float

    @property
    def norm_scale(self) -> float:
        return 1000.0 / max(self.width, self.height)


@dataclass
class RawPrimitive:
    """One drawable in root coordinates, before canonicalization.

    kind: rect | polyline | polygon | ellipse24 | text
    (path/line/circle/ellipse sources are resolved while walking).
    """

    kind: str
    fill: HslQ | None
    stroke: HslQ | None
    # rect: (x, y, w, h); polyline/polygon: point list; text: bbox + content
    rect: tuple[float, float, float, float] | None = None
    points: list[tuple[float, float]] = field(default_factory=list)
    closed: bool = False
    text: str = ""

    @property
    def color(self) -> HslQ | None:
        return self.fill if self.fill is not None else self.stroke


@dataclass(frozen=True)
class IngestWarning:
    kind: str
    index: int
    reason: str

    def __str__(self) -> str:
        return f"warning\t{self.kind}\t{self.index}\t{self.reason}"


@dataclass
class IngestOptions:
    strict: bool = False
    curve_tolerance: float = 2.0   # normalized units
    circle_segments: int = 24


@dataclass
class IngestResult:
    doc: SimVecDoc
    warnings: list[IngestWarning]


# ---------------------------------------------------------------------------
# Colors
# ---------------------------------------------------------------------------

_NAMED_COLORS = {
    "black": (0, 0, 0), "white": (255, 255, 255), "red": (255, 0, 0),
    "green": (0, 128, 0), "blue": (0, 0, 255), "gray": (128, 128, 128),
    "grey": (128, 128, 128), "lightgray": (211, 211, 211),
    "lightgrey": (211, 211, 211), "darkgray": (169, 169, 169),
    "silver": (192, 192, 192), "yellow": (255, 255, 0),
    "orange": (255, 165, 0), "purple": (128, 0, 128),
    "brown": (165, 42, 42), "pink": (255, 192, 203),
    "cyan": (0, 255, 255), "magenta": (255, 0, 255),
}

_HSL_RE = re.compile(r"hsl\s*\(\s*([\d.]+)\s*,\s*([\d.]+)%?\s*,\s*([\d.]+)%?\s*\)")
_RGB_RE = re.compile(r"rgba?\s*\(\s*([\d.]+)\s*,\s*([\d.]+)\s*,\s*([\d.]+)")


def parse_css_color(value: str | None) -> HslQ | None:
    """Parse a fill/stroke value into a quantized color; None when invisible."""
    if value is None:
        return None
    value = value.strip()
    if not value or value in ("none", "transparent"):
        return None
    m = _HSL_RE.match(value)
    if m:
        return quantize_color(float(m.group(1)), float(m.group(2)), float(m.group(3)))
    m = _RGB_RE.match(value)
    if m:
        r, g, b = (min(255.0, float(m.group(i))) / 255.0 for i in (1, 2, 3))
        return _rgb_to_hslq(r, g, b)
    if value.startswith("#"):
        hexpart = value[1:]
        if len(hexpart) == 3:
            hexpart = "".join(ch * 2 for ch in hexpart)
        if len(hexpart) >= 6:
            try:
                r = int(hexpart[0:2], 16) / 255.0
                g = int(hexpart[2:4], 16) / 255.0
                b = int(hexpart[4:6], 16) / 255.0
            except ValueError:
                return None
            return _rgb_to_hslq(r, g, b)
        return None
    rgb = _NAMED_COLORS.get(value.lower())
    if rgb is not None:
        return _rgb_to_hslq(rgb[0] / 255.0, rgb[1] / 255.0, rgb[2] / 255.0)
    return None


def _rgb_to_hslq(r: float, g: float, b: float) -> HslQ:
    h, l, s = colorsys.rgb_to_hls(r, g, b)
    return quantize_color(h * 360.0, s * 100.0, l * 100.0)


# ---------------------------------------------------------------------------
# Path data
# ---------------------------------------------------------------------------

_PATH_TOKEN_RE = re.compile(r"([MmLlHhVvCcQqZzAaSsTt])|" + _NUMBER_RE.pattern)


def _cubic_point(p0, p1, p2, p3, t: float) -> tuple[float, float]:
    s = 1.0 - t
    x = s * s * s * p0[0] + 3 * s * s * t * p1[0] + 3 * s * t * t * p2[0] + t * t * t * p3[0]
    y = s * s * s * p0[1] + 3 * s * s * t * p1[1] + 3 * s * t * t * p2[1] + t * t * t * p3[1]
    return x, y


def _point_segment_dist(p, a, b) -> float:
    ax, ay = a
    dx, dy = b[0] - ax, b[1] - ay
    L2 = dx * dx + dy * dy
    if L2 == 0:
        return math.hypot(p[0] - ax, p[1] - ay)
    t = ((p[0] - ax) * dx + (p[1] - ay) * dy) / L2
    t = min(1.0, max(0.0, t))
    return math.hypot(p[0] - (ax + t * dx), p[1] - (ay + t * dy))


def _flatten_cubic(p0, p1, p2, p3, tolerance: float, out: list, depth: int = 0) -> None:
    # flat when both control points are within tolerance of the chord
    if depth > 24 or max(_point_segment_dist(p1, p0, p3),
                         _point_segment_dist(p2, p0, p3)) <= tolerance:
        out.append(p3)
        return
    mid = lambda a, b: ((a[0] + b[0]) / 2, (a[1] + b[1]) / 2)
    p01, p12, p23 = mid(p0, p1), mid(p1, p2), mid(p2, p3)
    p012, p123 = mid(p01, p12), mid(p12, p23)
    p0123 = mid(p012, p123)
    _flatten_cubic(p0, p01, p012, p0123, tolerance, out, depth + 1)
    _flatten_cubic(p0123, p123, p23, p3, tolerance, out, depth + 1)


def _quad_to_cubic(p0, p1, p2):
    c1 = (p0[0] + 2.0 / 3.0 * (p1[0] - p0[0]), p0[1] + 2.0 / 3.0 * (p1[1] - p0[1]))
    c2 = (p2[0] + 2.0 / 3.0 * (p1[0] - p2[0]), p2[1] + 2.0 / 3.0 * (p1[1] - p2[1]))
    return p0, c1, c2, p2


@dataclass
class Subpath:
    points: list[tuple[float, float]]
    closed: bool


def flatten_path(d: str, tolerance: float, strict: bool = False) -> list[Subpath]:
    """Flatten path data into polylines, one per subpath.

    Supports M, L, H, V, C, Q, Z in absolute and relative form.  Bezier
    segments are adaptively subdivided until the chord deviation is within
    `tolerance` (source units).  Arcs raise in strict mode and otherwise
    degrade to their endpoint chord.
    """
    tokens: list[str] = []
    for m in _PATH_TOKEN_RE.finditer(d):
        tokens.append(m.group(1) if m.group(1) else m.group(0))
    subpaths: list[Subpath] = []
    cur = (0.0, 0.0)
    start = (0.0, 0.0)
    pts: list[tuple[float, float]] = []
    i = 0
    cmd = ""

    def num() -> float:
        nonlocal i
        if i >= len(tokens):
            raise IngestError(f"path data ended inside {cmd!r} arguments")
        try:
            v = float(tokens[i])
        except ValueError:
            raise IngestError(f"expected number in path data, got {tokens[i]!r}") from None
        i += 1
        return v

    def flush(closed: bool) -> None:
        nonlocal pts
        if len(pts) >= 2:
            subpaths.append(Subpath(pts, closed))
        pts = []

    while i < len(tokens):
        tok = tokens[i]
        if tok.isalpha():
            cmd = tok
            i += 1
        elif not cmd:
            raise IngestError("path data must start with a command")
        rel = cmd.islower()
        op = cmd.upper()
        if op == "M":
            flush(False)
            x, y = num(), num()
            cur = (cur[0] + x, cur[1] + y) if rel else (x, y)
            start = cur
            pts = [cur]
            cmd = "l" if rel else "L"
        elif op == "L":
            x, y = num(), num()
            cur = (cur[0] + x, cur[1] + y) if rel else (x, y)
            pts.append(cur)
        elif op == "H":
            x = num()
            cur = (cur[0] + x if rel else x, cur[1])
            pts.append(cur)
        elif op == "V":
            y = num()
            cur = (cur[0], cur[1] + y if rel else y)
            pts.append(cur)
        elif op == "C":
            x1, y1, x2, y2, x, y = (num() for _ in range(6))
            if rel:
                c1 = (cur[0] + x1, cur[1] + y1)
                c2 = (cur[0] + x2, cur[1] + y2)
                end = (cur[0] + x, cur[1] + y)
            else:
                c1, c2, end = (x1, y1), (x2, y2), (x, y)
            seg: list[tuple[float, float]] = []
            _flatten_cubic(cur, c1, c2, end, tolerance, seg)
            pts.extend(seg)
            cur = end
        elif op == "Q":
            x1, y1, x, y = (num() for _ in range(4))
            if rel:
                cp = (cur[0] + x1, cur[1] + y1)
                end = (cur[0] + x, cur[1] + y)
            else:
                cp, end = (x1, y1), (x, y)
            seg = []
            _flatten_cubic(*_quad_to_cubic(cur, cp, end), tolerance, seg)
            pts.extend(seg)
            cur = end
        elif op == "Z":
            if pts:
                flush(True)
            cur = start
            pts = [cur]
        elif op == "A":
            if strict:
                raise IngestError("arc command 'A' is not supported in strict mode")
            for _ in range(5):
                num()
            x, y = num(), num()
            cur = (cur[0] + x, cur[1] + y) if rel else (x, y)
            pts.append(cur)
        elif op in ("S", "T"):
            if strict:
                raise IngestError(f"path command {cmd!r} is not supported in strict mode")
            n = 4 if op == "S" else 2
            vals = [num() for _ in range(n)]
            x, y = vals[-2], vals[-1]
            cur = (cur[0] + x, cur[1] + y) if rel else (x, y)
            pts.append(cur)
        else:
            raise IngestError(f"unsupported path command {cmd!r}")
    flush(False)
    return subpaths


# ---------------------------------------------------------------------------
# Transform application and canonicalization
# ---------------------------------------------------------------------------

def apply_transform(m: AffineMatrix, prim: RawPrimitive) -> RawPrimitive:
    """Map a primitive into the parent frame.

    Rects survive only axis-aligned transforms; otherwise they become
    4-point polygons.  Text boxes are re-boxed to the axis-aligned hull
    of their transformed corners.
    """
    if abs(m.determinant) < 1e-12:
        raise IngestError("degenerate transform matrix")
    if m.is_identity:
        return prim
    if prim.kind == "rect":
        x, y, w, h = prim.rect
        if m.is_axis_aligned:
            x0, y0 = m.apply(x, y)
            x1, y1 = m.apply(x + w, y + h)
            return RawPrimitive("rect", prim.fill, prim.stroke,
                                rect=(min(x0, x1), min(y0, y1),
                                      abs(x1 - x0), abs(y1 - y0)))
        corners = [m.apply(px, py) for px, py in
                   ((x, y), (x + w, y), (x + w, y + h), (x, y + h))]
        return RawPrimitive("polygon", prim.fill, prim.stroke,
                            points=corners, closed=True)
    if prim.kind == "text":
        x, y, w, h = prim.rect
        corners = [m.apply(px, py) for px, py in
                   ((x, y), (x + w, y), (x + w, y + h), (x, y + h))]
        xs = [p[0] for p in corners]
        ys = [p[1] for p in corners]
        return RawPrimitive("text", prim.fill, prim.stroke,
                            rect=(min(xs), min(ys), max(xs) - min(xs),
                                  max(ys) - min(ys)),
                            text=prim.text)
    mapped = [m.apply(px, py) for px, py in prim.points]
    return RawPrimitive(prim.kind, prim.fill, prim.stroke,
                        points=mapped, closed=prim.closed)


def normalize_coords(points, viewport: Viewport) -> list[NPoint]:
    """Scale source points onto the 1000-unit canvas and round to integers."""
    s = viewport.norm_scale
    return [NPoint(round_half_away(x * s), round_half_away(y * s)) for x, y in points]


def _normalize_bbox(rect, viewport: Viewport) -> NBBox:
    x, y, w, h = rect
    s = viewport.norm_scale
    left = round_half_away(x * s)
    top = round_half_away(y * s)
    right = round_half_away((x + w) * s)
    bottom = round_half_away((y + h) * s)
    return NBBox(left, top, right - left, bottom - top)


def _is_axis_aligned_quad(points: list[tuple[float, float]]) -> bool:
    if len(points) != 4:
        return False
    for i in range(4):
        x0, y0 = points[i]
        x1, y1 = points[(i + 1) % 4]
        if not (math.isclose(x0, x1, abs_tol=1e-9) or math.isclose(y0, y1, abs_tol=1e-9)):
            return False
    xs = {round(p[0], 9) for p in points}
    ys = {round(p[1], 9) for p in points}
    return len(xs) == 2 and len(ys) == 2


def canonicalize_primitive(prim: RawPrimitive, viewport: Viewport) -> Element | None:
    """Map a root-frame primitive to one SimVec element (None = skip)."""
    color = prim.color
    if color is None:
        return None
    if prim.kind == "text":
        if not prim.text:
            return None
        return TextElement(prim.text, _normalize_bbox(prim.rect, viewport), color)
    if prim.kind == "rect":
        x, y, w, h = prim.rect
        if w <= 0 or h <= 0:
            return None
        return RectElement(_normalize_bbox(prim.rect, viewport), color)
    if prim.kind in ("polyline", "polygon", "ellipse24"):
        points = list(prim.points)
        closed = prim.closed or prim.kind in ("polygon", "ellipse24")
        if closed and len(points) > 1 and points[0] == points[-1]:
            points = points[:-1]
        if closed and _is_axis_aligned_quad(points):
            xs = [p[0] for p in points]
            ys = [p[1] for p in points]
            rect = (min(xs), min(ys), max(xs) - min(xs), max(ys) - min(ys))
            if rect[2] <= 0 or rect[3] <= 0:
                return None
            return RectElement(_normalize_bbox(rect, viewport), color)
        npts = dedupe_consecutive(normalize_coords(points, viewport))
        if closed and len(npts) > 1 and npts[0] == npts[-1]:
            npts = npts[:-1]
        if closed:
            if len(npts) < 3:
                return None
            return PolygonElement(npts, color)
        if len(npts) < 2:
            return None
        return LineElement(npts, color)
    return None


def ellipse_to_polygon(cx: float, cy: float, rx: float, ry: float,
                       segments: int = 24) -> list[tuple[float, float]]:
    step = 2.0 * math.pi / segments
    return [(cx + rx * math.cos(k * step), cy + ry * math.sin(k * step))
            for k in range(segments)]


# ---------------------------------------------------------------------------
# Document walk
# ---------------------------------------------------------------------------

_UNIT_RE = re.compile(r"(px|pt|mm|cm|in|pc|em|ex|%)\s*$")


def _parse_length(value: str | None) -> float | None:
    if value is None:
        return None
    value = _UNIT_RE.sub("", value.strip())
    try:
        return float(value)
    except ValueError:
        return None


def _localname(tag) -> str:
    if not isinstance(tag, str):
        return ""
    return tag.rsplit("}", 1)[-1]


_STYLE_PROP_RE = re.compile(r"([-\w]+)\s*:\s*([^;]+)")


def _parse_style_attr(style: str | None) -> dict[str, str]:
    if not style:
        return {}
    return {k.strip(): v.strip() for k, v in _STYLE_PROP_RE.findall(style)}


_INHERITED_PROPS = ("fill", "stroke", "font-size", "font-family",
                    "text-anchor", "display", "visibility")


@dataclass
class _Style:
    props: dict[str, str]

    def child(self, el: ET.Element) -> "_Style":
        props = dict(self.props)
        styled = _parse_style_attr(el.get("style"))
        for name in _INHERITED_PROPS:
            v = el.get(name)
            if v is not None:
                props[name] = v
            if name in styled:
                props[name] = styled[name]
        return _Style(props)

    def get(self, name: str, default: str | None = None) -> str | None:
        return self.props.get(name, default)


_DEFAULT_FONT_SIZE = 16.0

# Fraction of the font size taken as per-character advance when no layout
# width is given; paired with 1.2em line height in the bbox estimator.
TEXT_WIDTH_FACTOR = 0.6
TEXT_HEIGHT_FACTOR = 1.2


def estimate_text_bbox(x: float, y: float, font_size: float, anchor: str,
                       text: str, text_length: float | None = None
                       ) -> tuple[float, float, float, float]:
    """Estimate a text layout box from baseline position and font size."""
    width = text_length if text_length is not None else TEXT_WIDTH_FACTOR * font_size * len(text)
    height = TEXT_HEIGHT_FACTOR * font_size
    shift = {"start": 0.0, "middle": 0.5, "end": 1.0}.get(anchor, 0.0)
    return (x - shift * width, y - font_size, width, height)


class _Walker:
    def __init__(self, viewport: Viewport, root_matrix: AffineMatrix,
                 options: IngestOptions, defs: dict[str, ET.Element],
                 gradient_colors: dict[str, str]):
        self.viewport = viewport
        self.options = options
        self.defs = defs
        self.gradient_colors = gradient_colors
        self.root_matrix = root_matrix
        self.elements: list[Element] = []
        self.warnings: list[IngestWarning] = []
        self.index = 0

    def warn(self, kind: str, reason: str) -> None:
        self.warnings.append(IngestWarning(kind, self.index, reason))

    def resolve_paint(self, value: str | None) -> HslQ | None:
        if value and value.strip().startswith("url("):
            ref = value.strip()[4:].rstrip(")").strip().lstrip("#")
            first_stop = self.gradient_colors.get(ref)
            return parse_css_color(first_stop)
        return parse_css_color(value)

    def walk(self, el: ET.Element, matrix: AffineMatrix, style: _Style) -> None:
        tag = _localname(el.tag)
        if tag in ("defs", "clipPath", "metadata", "title", "desc", "style",
                   "symbol", "marker", "pattern", "linearGradient",
                   "radialGradient", "filter", "script"):
            return
        style = style.child(el)
        if style.get("display") == "none" or style.get("visibility") == "hidden":
            return
        t = el.get("transform")
        if t:
            matrix = matrix.multiply(parse_transform(t))

        if tag in ("svg", "g", "a"):
            for child in el:
                self.walk(child, matrix, style)
            return
        if tag == "use":
            self.emit_use(el, matrix, style)
            return

        self.index += 1
        prim = self.local_primitive(el, tag, style)
        if prim is None:
            return
        if isinstance(prim, list):
            prims = prim
        else:
            prims = [prim]
        for p in prims:
            try:
                mapped = apply_transform(self.root_matrix.multiply(matrix), p)
            except IngestError as exc:
                if self.options.strict:
                    raise
                self.warn(tag, str(exc))
                continue
            element = canonicalize_primitive(mapped, self.viewport)
            if element is not None:
                self.elements.append(element)
            elif mapped.color is None:
                pass  # invisible: dropped silently
            else:
                self.warn(tag, "degenerate geometry after canonicalization")

    def emit_use(self, el: ET.Element, matrix: AffineMatrix, style: _Style) -> None:
        href = el.get("href") or el.get("{http://www.w3.org/1999/xlink}href") or ""
        target = self.defs.get(href.lstrip("#"))
        if target is None:
            self.warn("use", f"unresolved reference {href!r}")
            return
        x = _parse_length(el.get("x")) or 0.0
        y = _parse_length(el.get("y")) or 0.0
        if x or y:
            matrix = matrix.multiply(AffineMatrix.translate(x, y))
        if _localname(target.tag) == "use":
            self.warn("use", "nested use reference skipped")
            return
        self.walk(target, matrix, style)

    def local_primitive(self, el: ET.Element, tag: str, style: _Style):
        fill = self.resolve_paint(style.get("fill", "black"))
        stroke = self.resolve_paint(style.get("stroke"))
        if tag == "rect":
            x = _parse_length(el.get("x")) or 0.0
            y = _parse_length(el.get("y")) or 0.0
            w = _parse_length(el.get("width")) or 0.0
            h = _parse_length(el.get("height")) or 0.0
            return RawPrimitive("rect", fill, stroke, rect=(x, y, w, h))
        if tag == "line":
            pts = [(_parse_length(el.get("x1")) or 0.0, _parse_length(el.get("y1")) or 0.0),
                   (_parse_length(el.get("x2")) or 0.0, _parse_length(el.get("y2")) or 0.0)]
            return RawPrimitive("polyline", None, stroke or fill, points=pts)
        if tag in ("polyline", "polygon"):
            nums = [float(v) for v in _NUMBER_RE.findall(el.get("points", ""))]
            pts = list(zip(nums[0::2], nums[1::2]))
            if tag == "polygon":
                return RawPrimitive("polygon", fill, stroke, points=pts, closed=True)
            return RawPrimitive("polyline", fill, stroke, points=pts)
        if tag == "circle":
            cx = _parse_length(el.get("cx")) or 0.0
            cy = _parse_length(el.get("cy")) or 0.0
            r = _parse_length(el.get("r")) or 0.0
            if r <= 0:
                return None
            return RawPrimitive("ellipse24", fill, stroke, closed=True,
                                points=ellipse_to_polygon(cx, cy, r, r,
                                                          self.options.circle_segments))
        if tag == "ellipse":
            cx = _parse_length(el.get("cx")) or 0.0
            cy = _parse_length(el.get("cy")) or 0.0
            rx = _parse_length(el.get("rx")) or 0.0
            ry = _parse_length(el.get("ry")) or 0.0
            if rx <= 0 or ry <= 0:
                return None
            return RawPrimitive("ellipse24", fill, stroke, closed=True,
                                points=ellipse_to_polygon(cx, cy, rx, ry,
                                                          self.options.circle_segments))
        if tag == "path":
            d = el.get("d", "")
            if not d.strip():
                return None
            tol = self.options.curve_tolerance / self.viewport.norm_scale
            try:
                subpaths = flatten_path(d, tol, strict=self.options.strict)
            except IngestError as exc:
                if self.options.strict:
                    raise
                self.warn("path", str(exc))
                return None
            prims = []
            for sp in subpaths:
                if sp.closed:
                    prims.append(RawPrimitive("polygon", fill, stroke,
                                              points=sp.points, closed=True))
                else:
                    prims.append(RawPrimitive("polyline", fill, stroke,
                                              points=sp.points))
            return prims
        if tag == "text":
            content = "".join(el.itertext()).strip()
            if not content:
                return None
            x = _parse_length(el.get("x")) or 0.0
            y = _parse_length(el.get("y")) or 0.0
            fs = _parse_length(style.get("font-size")) or _DEFAULT_FONT_SIZE
            anchor = style.get("text-anchor", "start")
            tl = _parse_length(el.get("textLength"))
            bbox = estimate_text_bbox(x, y, fs, anchor, content, tl)
            return RawPrimitive("text", fill or stroke, None, rect=bbox, text=content)
        if self.options.strict:
            raise IngestError(f"unsupported element <{tag}>")
        self.warn(tag, "unsupported element skipped")
        return None


def _collect_ids(root: ET.Element) -> tuple[dict[str, ET.Element], dict[str, str]]:
    defs: dict[str, ET.Element] = {}
    gradients: dict[str, str] = {}
    for el in root.iter():
        el_id = el.get("id")
        if el_id:
            defs[el_id] = el
        if _localname(el.tag) in ("linearGradient", "radialGradient") and el_id:
            for stop in el:
                if _localname(stop.tag) == "stop":
                    color = stop.get("stop-color") or _parse_style_attr(
                        stop.get("style")).get("stop-color")
                    if color:
                        gradients[el_id] = color
                        break
    return defs, gradients


def resolve_viewport(root: ET.Element) -> tuple[Viewport, AffineMatrix]:
    """Read the drawing size; returns the viewport and the viewBox offset."""
    w = _parse_length(root.get("width"))
    h = _parse_length(root.get("height"))
    offset = IDENTITY
    vb = root.get("viewBox")
    if vb is not None:
        nums = [float(v) for v in _NUMBER_RE.findall(vb)]
        if len(nums) == 4:
            minx, miny, vw, vh = nums
            if w is None or h is None:
                w, h = vw, vh
            if minx or miny:
                offset = AffineMatrix.translate(-minx, -miny)
    if w is None or h is None or w <= 0 or h <= 0:
        raise IngestError("cannot resolve viewport: need width/height or viewBox")
    return Viewport(w, h), offset


def ingest_svg_full(svg: str, options: IngestOptions | None = None) -> IngestResult:
    """Compile SVG text into SimVec, returning the document and warnings."""
    options = options or IngestOptions()
    try:
        root = ET.fromstring(svg)
    except ET.ParseError as exc:
        raise IngestError(f"malformed SVG markup: {exc}") from None
    if _localname(root.tag) != "svg":
        raise IngestError(f"root element is <{_localname(root.tag)}>, expected <svg>")
    viewport, offset = resolve_viewport(root)
    defs, gradients = _collect_ids(root)
    walker = _Walker(viewport, offset, options, defs, gradients)
    walker.walk(root, IDENTITY, _Style({}))
    return IngestResult(SimVecDoc(tuple(walker.elements)), walker.warnings)


def ingest_svg(svg: str, options: IngestOptions | None = None) -> SimVecDoc:
    return ingest_svg_full(svg, options).doc
