"""SimVec data model and canonical text grammar.

A SimVec document is an ordered list of four element kinds (text, rect,
line, polygon) in paint order.  Coordinates are integers on a 1000-unit
canvas (1/1000 of the larger image dimension) and colors are HSL triples
quantized to the [0, 20] range.  The module provides the parser and the
canonical serializer for the text form, range validation, color
quantization, and the token counter used for compactness reports.
"""

from __future__ import annotations

import re
from dataclasses import dataclass


class SimVecError(Exception):
    """Base class for SimVec format errors."""


class SimVecParseError(SimVecError):
    """Syntax error in SimVec text, with source position."""

    def __init__(self, message: str, pos: int, line: int, col: int):
        super().__init__(f"{message} (line {line}, column {col})")
        self.pos = pos
        self.line = line
        self.col = col


class SimVecArityError(SimVecParseError):
    """Wrong number of values for a bbox, color, or point list."""


class SimVecValidationError(SimVecError):
    """Raised when serializing a document that fails validation."""

    def __init__(self, violations: list["Violation"]):
        summary = "; ".join(str(v) for v in violations[:5])
        if len(violations) > 5:
            summary += f"; ... ({len(violations)} total)"
        super().__init__(f"invalid document: {summary}")
        self.violations = violations


COORD_MAX = 1000
COLOR_MAX = 20


def round_half_away(x: float) -> int:
    """Round to nearest integer with halves away from zero."""
    if x >= 0:
        return int(x + 0.5)
    return -int(-x + 0.5)


@dataclass(frozen=True)
class HslQ:
    """HSL color with every channel quantized to [0, 20]."""

    h: int
    s: int
    l: int


@dataclass(frozen=True)
class NPoint:
    x: int
    y: int


@dataclass(frozen=True)
class NBBox:
    left: int
    top: int
    width: int
    height: int

    @property
    def center(self) -> tuple[float, float]:
        return (self.left + self.width / 2, self.top + self.height / 2)

    @property
    def corners(self) -> tuple[tuple[int, int], ...]:
        l, t, w, h = self.left, self.top, self.width, self.height
        return ((l, t), (l + w, t), (l + w, t + h), (l, t + h))


@dataclass(frozen=True)
class TextElement:
    text: str
    bbox: NBBox
    color: HslQ


@dataclass(frozen=True)
class RectElement:
    bbox: NBBox
    color: HslQ


@dataclass(frozen=True)
class LineElement:
    points: tuple[NPoint, ...]
    color: HslQ


@dataclass(frozen=True)
class PolygonElement:
    points: tuple[NPoint, ...]
    color: HslQ


Element = TextElement | RectElement | LineElement | PolygonElement


@dataclass(frozen=True)
class SimVecDoc:
    """Ordered element list; later elements draw on top."""

    elements: tuple[Element, ...] = ()

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)


@dataclass(frozen=True)
class Violation:
    """One validation failure: which element, which field, what value."""

    index: int
    field: str
    value: object

    def __str__(self) -> str:
        return f"element {self.index}: {self.field} = {self.value!r}"


def dedupe_consecutive(points: list[NPoint] | tuple[NPoint, ...]) -> tuple[NPoint, ...]:
    """Collapse runs of identical consecutive points."""
    out: list[NPoint] = []
    for p in points:
        if not out or out[-1] != p:
            out.append(p)
    return tuple(out)


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<int>[+-]?\d+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<string>"(?:[^"\\]|\\.)*")
  | (?P<punct>[{}\[\](),])
    """,
    re.VERBOSE,
)

_STRING_UNESCAPE = {'"': '"', "\\": "\\"}


class _Tokenizer:
    def __init__(self, source: str):
        self.source = source
        self.pos = 0

    def _position(self, pos: int) -> tuple[int, int]:
        line = self.source.count("\n", 0, pos) + 1
        col = pos - (self.source.rfind("\n", 0, pos) + 1) + 1
        return line, col

    def error(self, message: str, pos: int | None = None, arity: bool = False):
        pos = self.pos if pos is None else pos
        line, col = self._position(pos)
        cls = SimVecArityError if arity else SimVecParseError
        raise cls(message, pos, line, col)

    def next(self) -> tuple[str, str, int] | None:
        """Return (kind, value, pos) of the next token, or None at EOF."""
        while self.pos < len(self.source):
            m = _TOKEN_RE.match(self.source, self.pos)
            if m is None:
                self.error(f"unexpected character {self.source[self.pos]!r}")
            start = self.pos
            self.pos = m.end()
            if m.lastgroup == "ws":
                continue
            return m.lastgroup, m.group(), start
        return None

    def expect(self, kind: str, value: str | None = None) -> tuple[str, int]:
        tok = self.next()
        want = value if value is not None else kind
        if tok is None:
            self.error(f"expected {want!r} but reached end of input")
        tkind, tval, tpos = tok
        if tkind != kind or (value is not None and tval != value):
            self.error(f"expected {want!r}, got {tval!r}", tpos)
        return tval, tpos

    def peek(self) -> tuple[str, str, int] | None:
        saved = self.pos
        tok = self.next()
        self.pos = saved
        return tok


def _unescape(raw: str, tz: _Tokenizer, pos: int) -> str:
    body = raw[1:-1]
    out: list[str] = []
    i = 0
    while i < len(body):
        ch = body[i]
        if ch == "\\":
            nxt = body[i + 1] if i + 1 < len(body) else ""
            if nxt not in _STRING_UNESCAPE:
                tz.error(f"invalid escape sequence \\{nxt}", pos + 1 + i)
            out.append(_STRING_UNESCAPE[nxt])
            i += 2
        else:
            out.append(ch)
            i += 1
    return "".join(out)


def _escape(text: str) -> str:
    return text.replace("\\", "\\\\").replace('"', '\\"')


def _parse_int_list(tz: _Tokenizer, open_c: str, close_c: str) -> tuple[list[int], int]:
    """Parse `<open> int (, int)* <close>`; returns values and the open position."""
    _, open_pos = tz.expect("punct", open_c)
    values: list[int] = []
    while True:
        tok = tz.peek()
        if tok is not None and tok[0] == "punct" and tok[1] == close_c and values == []:
            tz.next()
            return values, open_pos
        val, _ = tz.expect("int")
        values.append(int(val))
        tok = tz.peek()
        if tok is None:
            tz.error(f"expected ',' or {close_c!r} but reached end of input")
        if tok[1] == ",":
            tz.next()
            continue
        tz.expect("punct", close_c)
        return values, open_pos


def _parse_bbox(tz: _Tokenizer) -> NBBox:
    values, pos = _parse_int_list(tz, "[", "]")
    if len(values) != 4:
        tz.error(f"bbox needs 4 numbers, got {len(values)}", pos, arity=True)
    return NBBox(*values)


def _parse_color(tz: _Tokenizer) -> HslQ:
    ident, pos = tz.expect("ident")
    if ident != "hsl":
        tz.error(f"expected 'hsl', got {ident!r}", pos)
    values, ppos = _parse_int_list(tz, "(", ")")
    if len(values) != 3:
        tz.error(f"color needs 3 numbers, got {len(values)}", ppos, arity=True)
    return HslQ(*values)


def _parse_points(tz: _Tokenizer, minimum: int, what: str) -> tuple[NPoint, ...]:
    _, open_pos = tz.expect("punct", "[")
    points: list[NPoint] = []
    while True:
        values, ppos = _parse_int_list(tz, "(", ")")
        if len(values) != 2:
            tz.error(f"point needs 2 numbers, got {len(values)}", ppos, arity=True)
        points.append(NPoint(*values))
        tok = tz.peek()
        if tok is None:
            tz.error("expected ',' or ']' but reached end of input")
        if tok[1] == ",":
            tz.next()
            continue
        tz.expect("punct", "]")
        break
    if len(points) < minimum:
        tz.error(f"{what} needs at least {minimum} points, got {len(points)}",
                 open_pos, arity=True)
    return tuple(points)


def parse_simvec(source: str) -> SimVecDoc:
    """Parse SimVec text into a document.

    Whitespace between tokens is insignificant; elements are returned in
    source order.  Raises SimVecParseError (or SimVecArityError) on bad
    input.
    """
    tz = _Tokenizer(source)
    elements: list[Element] = []
    while True:
        tok = tz.next()
        if tok is None:
            break
        kind, val, pos = tok
        if kind != "punct" or val != "{":
            tz.error(f"expected '{{', got {val!r}", pos)
        ident, ipos = tz.expect("ident")
        if ident == "text":
            raw, spos = tz.expect("string")
            content = _unescape(raw, tz, spos)
            bbox = _parse_bbox(tz)
            color = _parse_color(tz)
            elements.append(TextElement(content, bbox, color))
        elif ident == "rect":
            bbox = _parse_bbox(tz)
            color = _parse_color(tz)
            elements.append(RectElement(bbox, color))
        elif ident == "line":
            points = _parse_points(tz, 2, "line")
            color = _parse_color(tz)
            elements.append(LineElement(points, color))
        elif ident == "polygon":
            points = _parse_points(tz, 3, "polygon")
            color = _parse_color(tz)
            elements.append(PolygonElement(points, color))
        else:
            tz.error(f"unknown element keyword {ident!r}", ipos)
        tz.expect("punct", "}")
    return SimVecDoc(tuple(elements))


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------

def _fmt_color(c: HslQ) -> str:
    return f"hsl ({c.h}, {c.s}, {c.l})"


def _fmt_points(points: tuple[NPoint, ...]) -> str:
    return "[" + ", ".join(f"({p.x}, {p.y})" for p in points) + "]"


def serialize_element(el: Element) -> str:
    if isinstance(el, TextElement):
        b = el.bbox
        return (f'{{text "{_escape(el.text)}" '
                f"[{b.left}, {b.top}, {b.width}, {b.height}] {_fmt_color(el.color)}}}")
    if isinstance(el, RectElement):
        b = el.bbox
        return f"{{rect [{b.left}, {b.top}, {b.width}, {b.height}] {_fmt_color(el.color)}}}"
    if isinstance(el, LineElement):
        return f"{{line {_fmt_points(el.points)} {_fmt_color(el.color)}}}"
    if isinstance(el, PolygonElement):
        return f"{{polygon {_fmt_points(el.points)} {_fmt_color(el.color)}}}"
    raise TypeError(f"not a SimVec element: {el!r}")


def serialize_simvec(doc: SimVecDoc) -> str:
    """Render a document in canonical text form, one element per line.

    The document must validate; serialize-then-parse is the identity.
    """
    violations = validate(doc)
    if violations:
        raise SimVecValidationError(violations)
    return "".join(serialize_element(el) + "\n" for el in doc.elements)


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------

def _check_coord(out: list[Violation], idx: int, field: str, value: int) -> None:
    if not 0 <= value <= COORD_MAX:
        out.append(Violation(idx, field, value))


def _check_color(out: list[Violation], idx: int, color: HslQ) -> None:
    for ch in ("h", "s", "l"):
        v = getattr(color, ch)
        if not 0 <= v <= COLOR_MAX:
            out.append(Violation(idx, f"color.{ch}", v))


def _check_bbox(out: list[Violation], idx: int, bbox: NBBox) -> None:
    left_ok = 0 <= bbox.left <= COORD_MAX
    top_ok = 0 <= bbox.top <= COORD_MAX
    if not left_ok:
        out.append(Violation(idx, "bbox.left", bbox.left))
    if not top_ok:
        out.append(Violation(idx, "bbox.top", bbox.top))
    if bbox.width < 0:
        out.append(Violation(idx, "bbox.width", bbox.width))
    elif left_ok and bbox.left + bbox.width > COORD_MAX:
        out.append(Violation(idx, "bbox.left+width", bbox.left + bbox.width))
    if bbox.height < 0:
        out.append(Violation(idx, "bbox.height", bbox.height))
    elif top_ok and bbox.top + bbox.height > COORD_MAX:
        out.append(Violation(idx, "bbox.top+height", bbox.top + bbox.height))


def _check_points(out: list[Violation], idx: int, points: tuple[NPoint, ...],
                  minimum: int) -> None:
    if len(points) < minimum:
        out.append(Violation(idx, "points", len(points)))
    for i, p in enumerate(points):
        _check_coord(out, idx, f"points[{i}].x", p.x)
        _check_coord(out, idx, f"points[{i}].y", p.y)


def validate(doc: SimVecDoc) -> list[Violation]:
    """Return all canonical-range violations (empty list means valid)."""
    out: list[Violation] = []
    for idx, el in enumerate(doc.elements):
        if isinstance(el, TextElement):
            if not el.text:
                out.append(Violation(idx, "text", el.text))
            _check_bbox(out, idx, el.bbox)
            _check_color(out, idx, el.color)
        elif isinstance(el, RectElement):
            _check_bbox(out, idx, el.bbox)
            _check_color(out, idx, el.color)
        elif isinstance(el, LineElement):
            _check_points(out, idx, el.points, 2)
            _check_color(out, idx, el.color)
        elif isinstance(el, PolygonElement):
            _check_points(out, idx, el.points, 3)
            _check_color(out, idx, el.color)
        else:
            out.append(Violation(idx, "kind", type(el).__name__))
    return out


# ---------------------------------------------------------------------------
# Color quantization
# ---------------------------------------------------------------------------

def quantize_color(h: float, s: float, l: float) -> HslQ:
    """Quantize HSL (degrees, percent, percent) to the [0, 20] grid.

    Hue 360 is identified with 0 before bucketing, so the hue endpoint
    wraps to bucket 0; saturation and lightness endpoints map to 20.
    Rounding is half away from zero.
    """
    if not 0 <= h <= 360:
        raise ValueError(f"hue out of range [0, 360]: {h}")
    if not 0 <= s <= 100:
        raise ValueError(f"saturation out of range [0, 100]: {s}")
    if not 0 <= l <= 100:
        raise ValueError(f"lightness out of range [0, 100]: {l}")
    h = h % 360.0
    return HslQ(
        round_half_away(h / 360.0 * 20.0),
        round_half_away(s / 100.0 * 20.0),
        round_half_away(l / 100.0 * 20.0),
    )


def dequantize_color(c: HslQ) -> tuple[float, float, float]:
    """Map quantized channels back to (degrees, percent, percent).

    Bucket 20 on the hue channel dequantizes to 360, which is congruent
    to 0; quantize_color therefore sends it back to bucket 0, the one
    point where quantize(dequantize(q)) is the 360==0 identification
    rather than the identity.
    """
    return (c.h * 360.0 / 20.0, c.s * 100.0 / 20.0, c.l * 100.0 / 20.0)


# ---------------------------------------------------------------------------
# Token counting
# ---------------------------------------------------------------------------

# A token is a maximal alphanumeric/underscore run (with a sign prefix when
# the sign immediately precedes a digit), or a single non-whitespace
# punctuation character.  Whitespace only separates.
_COUNT_RE = re.compile(r"[+-]\d[0-9A-Za-z_]*|[0-9A-Za-z_]+|[^\s0-9A-Za-z_]")


def count_tokens(source: str) -> int:
    return len(_COUNT_RE.findall(source))


def iter_tokens(source: str) -> list[str]:
    """The token stream behind count_tokens, for reports and debugging."""
    return _COUNT_RE.findall(source)
