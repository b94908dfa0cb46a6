"""Synthetic chart generation with exact ground truth.

Builds randomized data tables from the topic bank, renders bar, line,
and area charts to verbose SVG (the kind charting libraries emit, with
group nesting, per-element styling, and invisible scaffolding), and in
the same pass emits the SimVec document directly from the internal
scene together with per-datum mark bindings.  Everything is a pure
function of the seeds involved.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from xml.sax.saxutils import escape, quoteattr

from .core import HslQ, LineElement, NBBox, NPoint, PolygonElement, RectElement, \
    SimVecDoc, TextElement, round_half_away
from .ingest import AffineMatrix, estimate_text_bbox
from .seeding import rng_for, stable_hash
from .topics import TOPIC_BANK, ProviderError, TopicProviderConfig, \
    TopicTemplate, fetch_from_provider

log = logging.getLogger(__name__)


class ChartError(Exception):
    """Incompatible chart/table combinations and bad generator inputs."""


# Canvas and plot box in source units; all fixed template constants.
LAYOUT = {
    "width": 800, "height": 500,
    "plot_left": 80, "plot_right": 600, "plot_top": 70, "plot_bottom": 430,
    "legend_x": 620, "legend_y": 85, "legend_step": 22, "legend_swatch": 14,
    "title_y": 40, "y_tick_count": 5,
    "font_title": 19, "font_label": 11, "font_axis_title": 12,
}

WHITE = HslQ(0, 0, 20)
TITLE_COLOR = HslQ(0, 0, 2)
LABEL_COLOR = HslQ(0, 0, 4)
AXIS_COLOR = HslQ(0, 0, 3)

# 12 categorical colors, stored quantized; grays always use h=s=0 so the
# rgb round trip through SVG stays in-bucket.
PALETTE = (
    HslQ(12, 12, 10),  # blue
    HslQ(2, 15, 11),   # orange
    HslQ(7, 11, 9),    # green
    HslQ(0, 15, 10),   # red
    HslQ(16, 9, 11),   # purple
    HslQ(1, 8, 7),     # brown
    HslQ(18, 13, 13),  # pink
    HslQ(9, 7, 10),    # sea green
    HslQ(10, 12, 12),  # cyan
    HslQ(4, 14, 12),   # olive
    HslQ(14, 10, 8),   # indigo
    HslQ(5, 9, 13),    # light green
)

FONT_STACK = "'Helvetica Neue', Arial, sans-serif"


# ---------------------------------------------------------------------------
# Data model
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DataSpec:
    topic: str
    title: str
    cat_name: str
    cat_values: tuple[str, ...]
    time_name: str
    time_values: tuple[str, ...]
    quant_name: str
    unit: str
    mode: str                       # absolute | percent-stacked
    value_range: tuple[float, float]

    def __post_init__(self):
        if len(self.cat_values) < 2:
            raise ChartError("need at least 2 categorical values")
        if len(self.time_values) < 3:
            raise ChartError("need at least 3 temporal values")
        if self.mode not in ("absolute", "percent-stacked"):
            raise ChartError(f"unknown mode {self.mode!r}")

    def to_dict(self) -> dict:
        return {
            "topic": self.topic, "title": self.title,
            "categorical": {"name": self.cat_name, "values": list(self.cat_values)},
            "temporal": {"name": self.time_name, "values": list(self.time_values)},
            "quantitative": {"name": self.quant_name, "unit": self.unit,
                             "mode": self.mode, "range": list(self.value_range)},
        }

    @staticmethod
    def from_dict(d: dict) -> "DataSpec":
        q = d["quantitative"]
        return DataSpec(
            d["topic"], d["title"],
            d["categorical"]["name"], tuple(d["categorical"]["values"]),
            d["temporal"]["name"], tuple(d["temporal"]["values"]),
            q["name"], q["unit"], q["mode"], tuple(q["range"]))


@dataclass(frozen=True)
class DataTable:
    spec: DataSpec
    values: dict  # (category, time) -> float

    def value(self, category: str, time: str) -> float:
        return self.values[(category, time)]

    def time_slice(self, time: str) -> list[tuple[str, float]]:
        return [(c, self.values[(c, time)]) for c in self.spec.cat_values]

    def series(self, category: str) -> list[tuple[str, float]]:
        return [(t, self.values[(category, t)]) for t in self.spec.time_values]

    def time_sum(self, time: str) -> float:
        return sum(v for _, v in self.time_slice(time))

    def to_dict(self) -> dict:
        return {"spec": self.spec.to_dict(),
                "rows": [[c, t, self.values[(c, t)]]
                         for c in self.spec.cat_values
                         for t in self.spec.time_values]}

    @staticmethod
    def from_dict(d: dict) -> "DataTable":
        spec = DataSpec.from_dict(d["spec"])
        return DataTable(spec, {(c, t): v for c, t, v in d["rows"]})


@dataclass(frozen=True)
class AxisScale:
    """Linear pixel/data map in normalized units; inverted y grows downward."""

    data_min: float
    data_max: float
    pixel_min: float
    pixel_max: float
    orientation: str    # x | y
    inverted: bool = False

    @property
    def data_span(self) -> float:
        return self.data_max - self.data_min

    @property
    def pixel_span(self) -> float:
        return self.pixel_max - self.pixel_min

    def apply(self, value: float) -> float:
        frac = (value - self.data_min) / self.data_span
        if self.inverted:
            return self.pixel_max - frac * self.pixel_span
        return self.pixel_min + frac * self.pixel_span

    def invert(self, pixel: float) -> float:
        if self.inverted:
            frac = (self.pixel_max - pixel) / self.pixel_span
        else:
            frac = (pixel - self.pixel_min) / self.pixel_span
        return self.data_min + frac * self.data_span

    def extent_of(self, value_span: float) -> float:
        """Pixel extent covered by a span of data values."""
        return value_span / self.data_span * self.pixel_span

    def value_from_extent(self, extent: float) -> float:
        return extent / self.pixel_span * self.data_span + self.data_min

    def to_dict(self) -> dict:
        return {"dataMin": self.data_min, "dataMax": self.data_max,
                "pixelMin": self.pixel_min, "pixelMax": self.pixel_max,
                "orientation": self.orientation, "inverted": self.inverted}

    @staticmethod
    def from_dict(d: dict) -> "AxisScale":
        return AxisScale(d["dataMin"], d["dataMax"], d["pixelMin"], d["pixelMax"],
                         d["orientation"], d["inverted"])


def make_scale(data_min: float, data_max: float, pixel_min: float,
               pixel_max: float, orientation: str, inverted: bool = False) -> AxisScale:
    if not data_max > data_min:
        raise ChartError(f"degenerate data range [{data_min}, {data_max}]")
    if not pixel_max > pixel_min:
        raise ChartError(f"degenerate pixel range [{pixel_min}, {pixel_max}]")
    return AxisScale(data_min, data_max, pixel_min, pixel_max, orientation, inverted)


@dataclass
class MarkBinding:
    mark_id: str
    element_index: int
    category: str
    time: str
    value: float
    geometry: dict

    def to_dict(self) -> dict:
        return {"markId": self.mark_id, "elementIndex": self.element_index,
                "category": self.category, "time": self.time,
                "value": self.value, "geometry": self.geometry}

    @staticmethod
    def from_dict(d: dict) -> "MarkBinding":
        return MarkBinding(d["markId"], d["elementIndex"], d["category"],
                           d["time"], d["value"], d["geometry"])


@dataclass
class ChartMeta:
    chart_type: str     # bar-grouped | bar-stacked | line | area-stacked
    width: float
    height: float
    x_scale: AxisScale
    y_scale: AxisScale
    bindings: list[MarkBinding]
    table: DataTable
    palette: tuple[HslQ, ...]
    seed: int

    @property
    def spec(self) -> DataSpec:
        return self.table.spec

    @property
    def baseline_px(self) -> float:
        return self.y_scale.apply(self.y_scale.data_min)

    def binding_for(self, category: str, time: str) -> MarkBinding:
        for b in self.bindings:
            if b.category == category and b.time == time:
                return b
        raise KeyError((category, time))

    def to_dict(self) -> dict:
        return {
            "chartType": self.chart_type,
            "viewport": [self.width, self.height],
            "xScale": self.x_scale.to_dict(),
            "yScale": self.y_scale.to_dict(),
            "bindings": [b.to_dict() for b in self.bindings],
            "table": self.table.to_dict(),
            "palette": [[c.h, c.s, c.l] for c in self.palette],
            "seed": self.seed,
            "layout": dict(LAYOUT),
        }

    @staticmethod
    def from_dict(d: dict) -> "ChartMeta":
        return ChartMeta(
            d["chartType"], d["viewport"][0], d["viewport"][1],
            AxisScale.from_dict(d["xScale"]), AxisScale.from_dict(d["yScale"]),
            [MarkBinding.from_dict(b) for b in d["bindings"]],
            DataTable.from_dict(d["table"]),
            tuple(HslQ(*c) for c in d["palette"]), d["seed"])


# ---------------------------------------------------------------------------
# Data synthesis
# ---------------------------------------------------------------------------

def spec_from_template(tpl: TopicTemplate, rng, mode: str) -> DataSpec:
    ncat = rng.randint(2, min(5, len(tpl.cat_values)))
    cats = tuple(rng.sample(tpl.cat_values, ncat))
    ntime = rng.randint(3, min(7, len(tpl.time_values)))
    start = rng.randrange(0, len(tpl.time_values) - ntime + 1)
    times = tpl.time_values[start:start + ntime]
    if mode == "percent-stacked":
        return DataSpec(tpl.topic, tpl.title_percent, tpl.cat_name, cats,
                        tpl.time_name, times, tpl.quant_percent, "%",
                        mode, (0.0, 100.0))
    return DataSpec(tpl.topic, tpl.title_absolute, tpl.cat_name, cats,
                    tpl.time_name, times, tpl.quant_absolute,
                    tpl.unit_absolute, mode, tpl.value_range)


def spec_from_provider_record(record: dict, mode: str) -> DataSpec:
    cat = record["categorical"]
    tmp = record["temporal"]
    q = record["quantitative"]
    rng_lo, rng_hi = q.get("range", (1.0, 100.0))
    return DataSpec(
        str(record.get("topic", "external")),
        str(record.get("title", record.get("topic", "External Topic"))),
        str(cat["name"]), tuple(str(v) for v in cat["values"]),
        str(tmp["name"]), tuple(str(v) for v in tmp["values"]),
        str(q["name"]), str(q.get("unit", "")), mode,
        (float(rng_lo), float(rng_hi)))


def synth_spec(topic_seed: int, mode: str | None = None,
               provider: TopicProviderConfig | None = None) -> DataSpec:
    """Deterministic data attributes for a seed, from the bank or a provider."""
    rng = rng_for(topic_seed, "spec")
    if mode is None:
        mode = rng.choice(["absolute", "percent-stacked"])
    if provider is not None:
        try:
            record = fetch_from_provider(provider, topic_seed)
            return spec_from_provider_record(record, mode)
        except (ProviderError, KeyError, TypeError, ValueError) as exc:
            log.warning("topic provider failed (%s); using built-in bank", exc)
    tpl = rng.choice(TOPIC_BANK)
    return spec_from_template(tpl, rng, mode)


def synth_table(spec: DataSpec, seed: int) -> DataTable:
    """Random values on the complete category x time grid, 2 decimals."""
    rng = rng_for(seed, "table")
    values: dict = {}
    if spec.mode == "percent-stacked":
        for t in spec.time_values:
            raw = [rng.uniform(0.5, 1.5) for _ in spec.cat_values]
            total = sum(raw)
            shares = [round(r / total * 100.0, 2) for r in raw[:-1]]
            shares.append(round(100.0 - sum(shares), 2))
            for c, v in zip(spec.cat_values, shares):
                values[(c, t)] = v
    else:
        lo, hi = spec.value_range
        for c in spec.cat_values:
            for t in spec.time_values:
                values[(c, t)] = round(rng.uniform(lo, hi), 2)
    return DataTable(spec, values)


_NICE_STEPS = (1.0, 1.25, 1.5, 2.0, 2.5, 3.0, 4.0, 5.0, 7.5, 10.0)


def nice_axis_max(vmax: float, tick_count: int = 5) -> float:
    """Smallest nice axis top (step * (tick_count-1)) covering vmax."""
    if vmax <= 0:
        raise ChartError(f"axis maximum must be positive, got {vmax}")
    intervals = tick_count - 1
    exp = math.floor(math.log10(vmax / intervals))
    for e in (exp, exp + 1, exp + 2):
        for mult in _NICE_STEPS:
            step = mult * 10.0 ** e
            if step * intervals >= vmax:
                return round(step * intervals, 10)
    raise ChartError("no nice axis step found")  # pragma: no cover


# ---------------------------------------------------------------------------
# Number/color formatting shared by SVG emission and CoT text
# ---------------------------------------------------------------------------

def fnum(x: float) -> str:
    """Shortest exact decimal for an SVG coordinate."""
    if x == int(x):
        return str(int(x))
    return repr(float(x))


def fmt_value(x: float) -> str:
    """Two-decimal value formatting with trailing zeros trimmed."""
    s = f"{x:.2f}".rstrip("0").rstrip(".")
    return s if s not in ("-0", "") else "0"


def hslq_to_css(c: HslQ) -> str:
    """Quantized color as an rgb() string that re-quantizes to itself."""
    # emit hue bucket 20 from inside its range so it does not wrap to 0
    h = 351.0 if c.h == 20 else c.h * 18.0
    s, l = c.s * 5.0, c.l * 5.0
    r, g, b = colorsys.hls_to_rgb(h / 360.0, l / 100.0, s / 100.0)
    return f"rgb({round(r * 255)}, {round(g * 255)}, {round(b * 255)})"


# ---------------------------------------------------------------------------
# Scene assembly
# ---------------------------------------------------------------------------

@dataclass
class _Scene:
    """Collects SimVec elements and SVG fragments in one paint order."""

    norm: float
    elements: list = field(default_factory=list)

    def npoint(self, x: float, y: float) -> NPoint:
        return NPoint(round_half_away(x * self.norm), round_half_away(y * self.norm))

    def nbbox(self, x: float, y: float, w: float, h: float) -> NBBox:
        left = round_half_away(x * self.norm)
        top = round_half_away(y * self.norm)
        right = round_half_away((x + w) * self.norm)
        bottom = round_half_away((y + h) * self.norm)
        return NBBox(left, top, right - left, bottom - top)

    def add_rect(self, x, y, w, h, color: HslQ) -> int:
        self.elements.append(RectElement(self.nbbox(x, y, w, h), color))
        return len(self.elements) - 1

    def add_polyline(self, pts, color: HslQ) -> int:
        self.elements.append(LineElement(tuple(self.npoint(x, y) for x, y in pts), color))
        return len(self.elements) - 1

    def add_polygon(self, pts, color: HslQ) -> int:
        self.elements.append(PolygonElement(tuple(self.npoint(x, y) for x, y in pts), color))
        return len(self.elements) - 1

    def add_text(self, text, x, y, font_size, anchor, color: HslQ,
                 matrix: AffineMatrix | None = None) -> int:
        bx, by, bw, bh = estimate_text_bbox(x, y, font_size, anchor, text)
        if matrix is not None:
            corners = [matrix.apply(px, py) for px, py in
                       ((bx, by), (bx + bw, by), (bx + bw, by + bh), (bx, by + bh))]
            xs = [p[0] for p in corners]
            ys = [p[1] for p in corners]
            bx, by, bw, bh = min(xs), min(ys), max(xs) - min(xs), max(ys) - min(ys)
        self.elements.append(TextElement(text, self.nbbox(bx, by, bw, bh), color))
        return len(self.elements) - 1


def _text_svg(text: str, x: float, y: float, font_size: float, anchor: str,
              color: HslQ, cls: str, weight: str | None = None) -> str:
    style = (f"font-family: {FONT_STACK}; font-size: {fnum(font_size)}px; "
             f"fill: {hslq_to_css(color)}; fill-opacity: 1; white-space: pre;")
    if weight:
        style += f" font-weight: {weight};"
    return (f'<text class="{cls}" x="{fnum(x)}" y="{fnum(y)}" '
            f'text-anchor="{anchor}" data-unformatted={quoteattr(text)} '
            f'data-math="N" style="{style}">{escape(text)}</text>')


def _invisible_bg(w: float, h: float) -> str:
    return (f'<path class="background" aria-hidden="true" '
            f'd="M0,0h{fnum(w)}v{fnum(h)}h-{fnum(w)}Z" '
            f'style="pointer-events: none; fill: none;"/>')


# Empty per-trace layer groups, mirroring the DOM that interactive chart
# libraries emit for features this trace does not use.
_TRACE_SCAFFOLD = ('<g class="errorbars" aria-hidden="true"/><g class="lines"/>'
                   '<g class="points"/><g class="trace-text"/>'
                   '<path class="foreground" aria-hidden="true" d="" '
                   'style="pointer-events: none; display: none; fill: none;"/>')

_CHART_CSS = """<style type="text/css">
.simvec-chart { font-family: 'Helvetica Neue', Arial, sans-serif; -webkit-tap-highlight-color: transparent; }
.simvec-chart .chart-title { font-weight: bold; letter-spacing: 0.2px; cursor: default; }
.simvec-chart .tick-label { cursor: default; user-select: none; -webkit-user-select: none; -moz-user-select: none; }
.simvec-chart .axis-title { cursor: default; user-select: none; }
.simvec-chart .legend-label { cursor: pointer; user-select: none; }
.simvec-chart .legend-swatch:hover { stroke: rgb(68, 68, 68); stroke-width: 1px; }
.simvec-chart .mark-rect:hover, .simvec-chart .mark-area:hover { opacity: 0.92; transition: opacity 0.15s ease-in; }
.simvec-chart .mark-line:hover { stroke-width: 3.5px; transition: stroke-width 0.15s ease-in; }
.simvec-chart .domain { shape-rendering: crispEdges; }
.simvec-chart .layer-interactions .drag { cursor: crosshair; touch-action: none; }
.simvec-chart .layer-interactions .drag:active { cursor: move; }
@media print { .simvec-chart .layer-interactions { display: none; } }
</style>"""

_SVG_METADATA = ('<metadata><rdf:RDF '
                 'xmlns:dc="http://purl.org/dc/elements/1.1/" '
                 'xmlns:cc="http://creativecommons.org/ns#" '
                 'xmlns:rdf="http://www.w3.org/1999/02/22-rdf-syntax-ns#">'
                 '<cc:Work rdf:about=""><dc:format>image/svg+xml</dc:format>'
                 '<dc:type rdf:resource="http://purl.org/dc/dcmitype/StillImage"/>'
                 '<dc:creator><cc:Agent><dc:title>simvec chart forge</dc:title>'
                 '</cc:Agent></dc:creator></cc:Work></rdf:RDF></metadata>')


# ---------------------------------------------------------------------------
# Chart rendering
# ---------------------------------------------------------------------------

def render_chart(table: DataTable, chart_type: str, style_seed: int
                 ) -> tuple[str, ChartMeta, SimVecDoc]:
    """Render one chart; returns (svg text, ground-truth meta, SimVec doc)."""
    spec = table.spec
    if chart_type not in ("bar-grouped", "bar-stacked", "line", "area-stacked"):
        raise ChartError(f"unknown chart type {chart_type!r}")
    if chart_type == "area-stacked" and spec.mode != "percent-stacked":
        raise ChartError("area-stacked charts need a percent-stacked table")

    L = LAYOUT
    W, H = L["width"], L["height"]
    norm = 1000.0 / max(W, H)
    px_l, px_r = L["plot_left"], L["plot_right"]
    py_t, py_b = L["plot_top"], L["plot_bottom"]
    plot_w, plot_h = px_r - px_l, py_b - py_t
    cats, times = spec.cat_values, spec.time_values
    C, T = len(cats), len(times)

    stacked = chart_type in ("bar-stacked", "area-stacked")
    if spec.mode == "percent-stacked":
        dmax = 100.0
    elif stacked:
        dmax = nice_axis_max(max(table.time_sum(t) for t in times))
    else:
        dmax = nice_axis_max(max(table.values.values()))

    def ys(v: float) -> float:
        return py_b - v / dmax * plot_h

    def xs(i: int) -> float:
        return px_l + (i + 0.5) * plot_w / T

    rng = rng_for(style_seed, "style")
    palette = list(PALETTE)
    rng.shuffle(palette)
    series_colors = tuple(palette[:C])

    y_scale = make_scale(0.0, dmax, py_t * norm, py_b * norm, "y", inverted=True)
    x_scale = make_scale(0.0, float(T - 1), xs(0) * norm, xs(T - 1) * norm, "x")

    scene = _Scene(norm)
    bindings: list[MarkBinding] = []
    svg: list[str] = []
    mark_word = {"bar-grouped": "bar", "bar-stacked": "bar",
                 "line": "line", "area-stacked": "area"}[chart_type]

    def aria(c: str, t: str, v: float) -> str:
        return quoteattr(f"{spec.time_name}: {t}; {spec.cat_name}: {c}; "
                         f"{spec.quant_name}: {fmt_value(v)}")

    # --- background layer ---
    scene.add_rect(0, 0, W, H, WHITE)
    svg.append('<g class="layer-background" role="presentation">')
    svg.append(_invisible_bg(W, H))
    svg.append(f'<rect class="chart-bg" x="0" y="0" width="{W}" height="{H}" '
               f'style="fill: {hslq_to_css(WHITE)}; fill-opacity: 1; stroke: none;"/>')
    svg.append("</g>")

    # --- marks layer (local coordinates inside a translated group) ---
    svg.append(f'<g class="layer-marks role-mark" transform="translate({px_l}, {py_t})" '
               f'clip-path="url(#plot-clip)">')
    svg.append(_invisible_bg(plot_w, plot_h))
    lx, ly = px_l, py_t  # integer translate: local = absolute - (lx, ly)

    def mark_style(color: HslQ, stroke: bool = False, width: float = 2.5) -> str:
        if stroke:
            return (f"fill: none; stroke: {hslq_to_css(color)}; stroke-opacity: 1; "
                    f"stroke-width: {fnum(width)}px; stroke-linecap: round; "
                    f"stroke-linejoin: round;")
        return (f"fill: {hslq_to_css(color)}; fill-opacity: 1; stroke: none; "
                f"stroke-width: 0;")

    def open_series(j: int, c: str, roledesc: str) -> None:
        label = quoteattr(f"{c}: {T} data points from {times[0]} to {times[-1]}")
        svg.append(f'<g class="trace series-{j}" role="graphics-object" '
                   f'aria-roledescription="{roledesc}" aria-label={label} '
                   f'data-series={quoteattr(c)} style="opacity: 1;">'
                   f'<g class="fills">')

    def close_series() -> None:
        svg.append("</g>" + _TRACE_SCAFFOLD + "</g>")

    if chart_type == "bar-grouped":
        band = plot_w / T
        group_w = band * 0.75
        bar_w = group_w / C
        for j, c in enumerate(cats):
            color = series_colors[j]
            open_series(j, c, "bar group")
            for i, t in enumerate(times):
                v = table.value(c, t)
                x0 = xs(i) - group_w / 2 + j * bar_w
                y0 = ys(v)
                idx = scene.add_rect(x0, y0, bar_w, py_b - y0, color)
                bindings.append(MarkBinding(
                    f"{c}|{t}", idx, c, t, v,
                    {"kind": "bar",
                     "bbox": _bbox_list(scene.elements[idx].bbox),
                     "measure": y_scale.extent_of(v)}))
                d = _rect_path(x0 - lx, y0 - ly, bar_w, py_b - y0)
                svg.append(f'<path class="mark-rect" role="graphics-symbol" '
                           f'aria-roledescription="bar" aria-label={aria(c, t, v)} '
                           f'd="{d}" style="{mark_style(color)}"/>')
            close_series()
    elif chart_type == "bar-stacked":
        band = plot_w / T
        bar_w = band * 0.55
        cum = {t: 0.0 for t in times}
        for j, c in enumerate(cats):
            color = series_colors[j]
            open_series(j, c, "bar group")
            for i, t in enumerate(times):
                v = table.value(c, t)
                lo, hi = cum[t], cum[t] + v
                cum[t] = hi
                x0 = xs(i) - bar_w / 2
                y_hi, y_lo = ys(hi), ys(lo)
                idx = scene.add_rect(x0, y_hi, bar_w, y_lo - y_hi, color)
                bindings.append(MarkBinding(
                    f"{c}|{t}", idx, c, t, v,
                    {"kind": "bar",
                     "bbox": _bbox_list(scene.elements[idx].bbox),
                     "measure": y_scale.extent_of(v)}))
                d = _rect_path(x0 - lx, y_hi - ly, bar_w, y_lo - y_hi)
                svg.append(f'<path class="mark-rect" role="graphics-symbol" '
                           f'aria-roledescription="bar" aria-label={aria(c, t, v)} '
                           f'd="{d}" style="{mark_style(color)}"/>')
            close_series()
    elif chart_type == "line":
        for j, c in enumerate(cats):
            color = series_colors[j]
            pts = [(xs(i), ys(table.value(c, t))) for i, t in enumerate(times)]
            idx = scene.add_polyline(pts, color)
            for i, t in enumerate(times):
                v = table.value(c, t)
                el = scene.elements[idx]
                bindings.append(MarkBinding(
                    f"{c}|{t}", idx, c, t, v,
                    {"kind": "vertex", "vertex_index": i,
                     "point": [el.points[i].x, el.points[i].y],
                     "measure": y_scale.extent_of(v)}))
            d = "M" + "L".join(f"{fnum(x - lx)},{fnum(y - ly)}" for x, y in pts)
            open_series(j, c, "line mark")
            svg.append(f'<path class="mark-line" role="graphics-symbol" '
                       f'aria-roledescription="line" '
                       f'aria-label={quoteattr(f"{spec.cat_name}: {c}")} '
                       f'd="{d}" style="vector-effect: non-scaling-stroke; '
                       f'{mark_style(color, stroke=True)}"/>')
            close_series()
    else:  # area-stacked
        cum = {t: 0.0 for t in times}
        for j, c in enumerate(cats):
            color = series_colors[j]
            lows = [cum[t] for t in times]
            highs = [cum[t] + table.value(c, t) for t in times]
            for t in times:
                cum[t] += table.value(c, t)
            upper_pts = [(xs(i), ys(highs[i])) for i in range(T)]
            lower_pts = [(xs(i), ys(lows[i])) for i in range(T)]
            poly = upper_pts + lower_pts[::-1]
            idx = scene.add_polygon(poly, color)
            el = scene.elements[idx]
            for i, t in enumerate(times):
                v = table.value(c, t)
                bindings.append(MarkBinding(
                    f"{c}|{t}", idx, c, t, v,
                    {"kind": "band", "vertex_index": i,
                     "upper": [el.points[i].x, el.points[i].y],
                     "lower": [el.points[2 * T - 1 - i].x, el.points[2 * T - 1 - i].y],
                     "measure": y_scale.extent_of(v)}))
            d = ("M" + "L".join(f"{fnum(x - lx)},{fnum(y - ly)}" for x, y in poly) + "Z")
            open_series(j, c, "area mark")
            svg.append(f'<path class="mark-area" role="graphics-symbol" '
                       f'aria-roledescription="area" '
                       f'aria-label={quoteattr(f"{spec.cat_name}: {c}")} '
                       f'd="{d}" style="{mark_style(color)}"/>')
            close_series()
    svg.append("</g>")

    # --- axes ---
    axis_style = (f"fill: none; stroke: {hslq_to_css(AXIS_COLOR)}; stroke-opacity: 1; "
                  f"stroke-width: 1.5px; stroke-linecap: square;")
    scene.add_polyline([(px_l, py_t), (px_l, py_b)], AXIS_COLOR)
    scene.add_polyline([(px_l, py_b), (px_r, py_b)], AXIS_COLOR)
    svg.append(f'<g class="layer-axes" transform="translate({px_l}, {py_t})">')
    svg.append(_invisible_bg(plot_w, plot_h))
    svg.append(f'<path class="domain axis-y" d="M0,0L0,{fnum(plot_h)}" '
               f'style="{axis_style}"/>')
    svg.append(f'<path class="domain axis-x" d="M0,{fnum(plot_h)}L{fnum(plot_w)},'
               f'{fnum(plot_h)}" style="{axis_style}"/>')
    svg.append("</g>")

    # --- title and labels ---
    svg.append('<g class="layer-labels" role="presentation">')
    svg.append(_invisible_bg(W, H))
    title_x = (px_l + px_r) / 2
    scene.add_text(spec.title, title_x, L["title_y"], L["font_title"], "middle",
                   TITLE_COLOR)
    svg.append(_text_svg(spec.title, title_x, L["title_y"], L["font_title"],
                         "middle", TITLE_COLOR, "chart-title", weight="bold"))
    tick_step = dmax / (L["y_tick_count"] - 1)
    for k in range(L["y_tick_count"]):
        v = k * tick_step
        label = fmt_value(v)
        ty = ys(v) + 4
        scene.add_text(label, px_l - 8, ty, L["font_label"], "end", LABEL_COLOR)
        svg.append(f'<g class="ytick" transform="translate(0,{fnum(ty)})scale(1)">'
                   + _text_svg(label, px_l - 8, 0, L["font_label"], "end",
                               LABEL_COLOR, "tick-label")
                   + "</g>")
    for i, t in enumerate(times):
        scene.add_text(t, xs(i), py_b + 22, L["font_label"], "middle", LABEL_COLOR)
        svg.append(f'<g class="xtick" transform="translate({fnum(xs(i))},0)scale(1)">'
                   + _text_svg(t, 0, py_b + 22, L["font_label"], "middle",
                               LABEL_COLOR, "tick-label")
                   + "</g>")
    # x axis title
    x_title = spec.time_name
    scene.add_text(x_title, title_x, py_b + 52, L["font_axis_title"], "middle",
                   LABEL_COLOR)
    svg.append(_text_svg(x_title, title_x, py_b + 52, L["font_axis_title"], "middle",
                         LABEL_COLOR, "axis-title"))
    # rotated y axis title
    y_title = f"{spec.quant_name} ({spec.unit})" if spec.unit else spec.quant_name
    ty_cx, ty_cy = 28, (py_t + py_b) / 2
    rot = AffineMatrix.translate(ty_cx, ty_cy).multiply(AffineMatrix.rotate(-90))
    scene.add_text(y_title, 0, 0, L["font_axis_title"], "middle", LABEL_COLOR,
                   matrix=rot)
    svg.append(f'<g class="axis-title-y" transform="translate({ty_cx}, {fnum(ty_cy)}) '
               f'rotate(-90)">'
               + _text_svg(y_title, 0, 0, L["font_axis_title"], "middle",
                           LABEL_COLOR, "axis-title")
               + "</g>")
    svg.append("</g>")

    # --- legend ---
    lg_x, lg_y, step, sw = L["legend_x"], L["legend_y"], L["legend_step"], L["legend_swatch"]
    svg.append(f'<g class="layer-legend" role="graphics-object" '
               f'aria-roledescription="legend" pointer-events="all" '
               f'transform="translate({lg_x}, {lg_y})">')
    for j, c in enumerate(cats):
        color = series_colors[j]
        scene.add_rect(lg_x, lg_y + j * step, sw, sw, color)
        svg.append(f'<g class="legend-item traces" data-index="{j}" '
                   f'style="opacity: 1;"><g class="legendsymbols">'
                   f'<g class="legendpoints">'
                   f'<path class="legend-swatch" d="{_rect_path(0, j * step, sw, sw)}" '
                   f'style="fill: {hslq_to_css(color)}; fill-opacity: 1; stroke: none; '
                   f'stroke-width: 0;"/></g></g></g>')
    for j, c in enumerate(cats):
        scene.add_text(c, lg_x + sw + 6, lg_y + j * step + 11, L["font_label"],
                       "start", LABEL_COLOR)
        svg.append(_text_svg(c, sw + 6, j * step + 11, L["font_label"], "start",
                             LABEL_COLOR, "legend-label"))
    svg.append("</g>")

    # --- invisible interaction scaffolding (dropped by ingestion) ---
    svg.append('<g class="layer-interactions">'
               f'<rect class="drag nsewdrag" data-subplot="xy" x="{px_l}" y="{py_t}" '
               f'width="{plot_w}" height="{plot_h}" '
               f'style="fill: transparent; stroke-width: 0; pointer-events: all;"/>'
               f'<rect class="drag nwdrag cursor-nw-resize" x="{px_l - 20}" '
               f'y="{py_t - 20}" width="20" height="20" '
               f'style="fill: transparent; stroke-width: 0; pointer-events: all;"/>'
               f'<rect class="drag nedrag cursor-ne-resize" x="{px_r}" '
               f'y="{py_t - 20}" width="20" height="20" '
               f'style="fill: transparent; stroke-width: 0; pointer-events: all;"/>'
               "</g>"
               '<g class="zoomlayer"/><g class="hoverlayer"/>'
               '<g class="shapelayer"/><g class="imagelayer"/>')

    header = (
        '<?xml version="1.0" encoding="utf-8"?>\n'
        f'<svg xmlns="http://www.w3.org/2000/svg" '
        f'xmlns:xlink="http://www.w3.org/1999/xlink" '
        f'id="chart-{stable_hash(style_seed, spec.topic) & 0xFFFFFF:06x}" '
        f'width="{W}" height="{H}" viewBox="0 0 {W} {H}" '
        f'preserveAspectRatio="xMinYMin meet" class="simvec-chart" '
        f'style="background: {hslq_to_css(WHITE)};">\n'
        f"{_SVG_METADATA}\n"
        f"<desc>{escape(spec.title)}: synthetic {mark_word} chart of "
        f"{escape(spec.quant_name)} by {escape(spec.cat_name)} and "
        f"{escape(spec.time_name)}.</desc>\n"
        f"{_CHART_CSS}\n"
        f'<defs><clipPath id="plot-clip"><rect x="0" y="0" width="{plot_w}" '
        f'height="{plot_h}"/></clipPath>'
        f'<filter id="drop-shadow" x="-20%" y="-20%" width="140%" height="140%">'
        f'<feGaussianBlur in="SourceAlpha" stdDeviation="2"/>'
        f'<feOffset dx="0" dy="1" result="offsetblur"/>'
        f'<feMerge><feMergeNode/><feMergeNode in="SourceGraphic"/></feMerge>'
        f'</filter></defs>\n'
    )
    svg_text = header + "\n".join(svg) + "\n</svg>\n"

    meta = ChartMeta(chart_type, float(W), float(H), x_scale, y_scale,
                     bindings, table, series_colors, style_seed)
    return svg_text, meta, SimVecDoc(tuple(scene.elements))


def _rect_path(x: float, y: float, w: float, h: float) -> str:
    x0, y0, x1, y1 = x, y, x + w, y + h
    return (f"M{fnum(x0)},{fnum(y0)}L{fnum(x1)},{fnum(y0)}"
            f"L{fnum(x1)},{fnum(y1)}L{fnum(x0)},{fnum(y1)}Z")


def _bbox_list(b: NBBox) -> list[int]:
    return [b.left, b.top, b.width, b.height]


# ---------------------------------------------------------------------------
# Corpus generation
# ---------------------------------------------------------------------------

@dataclass
class ChartBundle:
    index: int
    chart_kind: str     # bar | line | area
    svg: str
    meta: ChartMeta
    doc: SimVecDoc


def apportion(n: int, mix: dict[str, float]) -> dict[str, int]:
    """Largest-remainder apportionment of n items over mix weights."""
    total = sum(mix.values())
    if total <= 0:
        raise ChartError("mix weights must sum to a positive value")
    quotas = {k: n * w / total for k, w in mix.items()}
    counts = {k: int(q) for k, q in quotas.items()}
    remainder = n - sum(counts.values())
    by_frac = sorted(mix, key=lambda k: (-(quotas[k] - counts[k]), k))
    for k in by_frac[:remainder]:
        counts[k] += 1
    return counts


def kind_sequence(n: int, mix: dict[str, float]) -> list[str]:
    counts = apportion(n, mix)
    seq: list[str] = []
    for kind in ("bar", "line", "area"):
        seq.extend([kind] * counts.get(kind, 0))
    return seq


def build_chart(master_seed: int, index: int, chart_kind: str,
                provider: TopicProviderConfig | None = None) -> ChartBundle:
    """Build corpus item `index` from its derived seed alone."""
    seed = stable_hash(master_seed, index)
    rng = rng_for(seed, "kind")
    if chart_kind == "bar":
        chart_type = rng.choice(["bar-grouped", "bar-stacked"])
        mode = "percent-stacked" if chart_type == "bar-stacked" else "absolute"
    elif chart_kind == "line":
        mode = rng.choice(["absolute", "absolute", "percent-stacked"])
        chart_type = "line"
    elif chart_kind == "area":
        mode = "percent-stacked"
        chart_type = "area-stacked"
    else:
        raise ChartError(f"unknown chart kind {chart_kind!r}")
    spec = synth_spec(stable_hash(seed, "topic"), mode=mode, provider=provider)
    table = synth_table(spec, stable_hash(seed, "values"))
    svg, meta, doc = render_chart(table, chart_type, stable_hash(seed, "palette"))
    return ChartBundle(index, chart_kind, svg, meta, doc)


def gen_corpus(n: int, mix: dict[str, float], master_seed: int,
               provider: TopicProviderConfig | None = None) -> list[ChartBundle]:
    seq = kind_sequence(n, mix)
    return [build_chart(master_seed, i, kind, provider) for i, kind in enumerate(seq)]
