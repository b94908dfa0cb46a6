import math

import pytest

from simvec.core import (
    HslQ,
    LineElement,
    NBBox,
    PolygonElement,
    RectElement,
    TextElement,
)
from simvec.ingest import (
    AffineMatrix,
    IngestError,
    IngestOptions,
    RawPrimitive,
    Viewport,
    apply_transform,
    canonicalize_primitive,
    compose_transforms,
    flatten_path,
    ingest_svg,
    ingest_svg_full,
    normalize_coords,
    parse_css_color,
    parse_transform,
)

VIEW1000 = Viewport(1000, 1000)


def svg_doc(body: str, width=100, height=100) -> str:
    return (f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
            f'height="{height}">{body}</svg>')


def decasteljau(p0, p1, p2, p3, t):
    """Independent cubic Bezier evaluation oracle."""
    lerp = lambda a, b: (a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1]))
    q0, q1, q2 = lerp(p0, p1), lerp(p1, p2), lerp(p2, p3)
    r0, r1 = lerp(q0, q1), lerp(q1, q2)
    return lerp(r0, r1)


def dist_to_polyline(p, pts):
    best = math.inf
    for a, b in zip(pts, pts[1:]):
        dx, dy = b[0] - a[0], b[1] - a[1]
        L2 = dx * dx + dy * dy
        t = 0.0 if L2 == 0 else max(0.0, min(1.0, ((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / L2))
        best = min(best, math.hypot(p[0] - (a[0] + t * dx), p[1] - (a[1] + t * dy)))
    return best


class TestTransforms:
    def test_compose_empty_is_identity(self):
        m = compose_transforms([])
        assert m.apply(3.5, -2.0) == (3.5, -2.0)

    def test_compose_translations_add(self):
        m = compose_transforms([AffineMatrix.translate(10, 0),
                                AffineMatrix.translate(0, 5)])
        assert m.apply(0, 0) == (10.0, 5.0)

    def test_compose_scale_then_translate(self):
        # hand multiplication: scale(2) @ translate(3,0) maps (1,1) -> (8,2)
        m = compose_transforms([AffineMatrix.scale(2), AffineMatrix.translate(3, 0)])
        assert m.apply(1, 1) == (8.0, 2.0)
        assert (m.a, m.b, m.c, m.d, m.e, m.f) == (2, 0, 0, 2, 6, 0)

    def test_parse_transform_forms(self):
        m = parse_transform("translate(10,20) scale(2) rotate(90)")
        x, y = m.apply(1, 0)
        assert abs(x - 10) < 1e-9 and abs(y - 22) < 1e-9

    def test_rotate_about_center(self):
        m = parse_transform("rotate(180, 5, 5)")
        x, y = m.apply(0, 0)
        assert abs(x - 10) < 1e-9 and abs(y - 10) < 1e-9


class TestApplyTransform:
    def test_translate_rect(self):
        prim = RawPrimitive("rect", HslQ(0, 0, 0), None, rect=(0, 0, 50, 50))
        out = apply_transform(AffineMatrix.translate(10, 20), prim)
        assert out.kind == "rect" and out.rect == (10, 20, 50, 50)

    def test_scale_rect(self):
        prim = RawPrimitive("rect", HslQ(0, 0, 0), None, rect=(10, 10, 20, 20))
        out = apply_transform(AffineMatrix.scale(2), prim)
        assert out.rect == (20, 20, 40, 40)

    def test_negative_scale_renormalizes_rect(self):
        prim = RawPrimitive("rect", HslQ(0, 0, 0), None, rect=(10, 10, 20, 20))
        out = apply_transform(AffineMatrix.scale(-1, 1), prim)
        assert out.rect == (-30, 10, 20, 20)

    def test_rotation_turns_rect_into_polygon(self):
        prim = RawPrimitive("rect", HslQ(0, 0, 0), None, rect=(0, 0, 10, 20))
        m = AffineMatrix.rotate(90)
        out = apply_transform(m, prim)
        assert out.kind == "polygon"
        # oracle: rotate each corner by hand, (x, y) -> (-y, x)
        expected = [(0, 0), (0, 10), (-20, 10), (-20, 0)]
        for got, want in zip(out.points, expected):
            assert math.hypot(got[0] - want[0], got[1] - want[1]) < 1e-9

    def test_text_bbox_reboxed_under_rotation(self):
        prim = RawPrimitive("text", HslQ(0, 0, 0), None, rect=(0, 0, 40, 10),
                            text="hi")
        out = apply_transform(AffineMatrix.rotate(90), prim)
        x, y, w, h = out.rect
        assert (abs(x - (-10)) < 1e-9 and abs(y) < 1e-9
                and abs(w - 10) < 1e-9 and abs(h - 40) < 1e-9)

    def test_degenerate_matrix_rejected(self):
        prim = RawPrimitive("rect", HslQ(0, 0, 0), None, rect=(0, 0, 1, 1))
        with pytest.raises(IngestError, match="degenerate"):
            apply_transform(AffineMatrix(0, 0, 0, 0, 0, 0), prim)


class TestFlattenPath:
    def test_lines_only(self):
        subs = flatten_path("M 0 0 L 10 0 L 10 10", tolerance=0.5)
        assert len(subs) == 1 and not subs[0].closed
        assert subs[0].points == [(0, 0), (10, 0), (10, 10)]

    def test_close_tags_closed(self):
        subs = flatten_path("M 0 0 L 10 0 Z", tolerance=0.5)
        assert len(subs) == 1 and subs[0].closed

    def test_relative_commands(self):
        subs = flatten_path("m 5 5 l 10 0 v 10 h -10 z", tolerance=0.5)
        assert subs[0].points == [(5, 5), (15, 5), (15, 15), (5, 15)]
        assert subs[0].closed

    def test_cubic_flattening_against_decasteljau(self):
        p0, p1, p2, p3 = (0, 0), (0, 10), (10, 10), (10, 0)
        tol = 0.5
        subs = flatten_path("M 0 0 C 0 10 10 10 10 0", tolerance=tol)
        pts = subs[0].points
        assert pts[0] == (0, 0) and pts[-1] == (10, 0)
        # every emitted interior vertex lies on the true curve
        for p in pts[1:-1]:
            closest = min(math.hypot(p[0] - q[0], p[1] - q[1])
                          for q in (decasteljau(p0, p1, p2, p3, t / 400)
                                    for t in range(401)))
            assert closest <= tol
        # and the polyline stays within tolerance of the dense curve
        for t in range(0, 401):
            q = decasteljau(p0, p1, p2, p3, t / 400)
            assert dist_to_polyline(q, pts) <= tol + 1e-6

    def test_quadratic_flattening(self):
        subs = flatten_path("M 0 0 Q 5 10 10 0", tolerance=0.25)
        assert len(subs[0].points) > 3

    def test_arc_strict_vs_lenient(self):
        with pytest.raises(IngestError, match="arc"):
            flatten_path("M 0 0 A 5 5 0 0 1 10 0", tolerance=1, strict=True)
        subs = flatten_path("M 0 0 A 5 5 0 0 1 10 0", tolerance=1, strict=False)
        assert subs[0].points == [(0, 0), (10, 0)]

    def test_multiple_subpaths(self):
        subs = flatten_path("M 0 0 L 1 0 M 5 5 L 6 5", tolerance=0.5)
        assert len(subs) == 2

    def test_segment_after_close_starts_at_closepoint(self):
        subs = flatten_path("M 0 0 L 10 0 Z L 5 5", tolerance=0.5)
        assert subs[1].points[0] == (0, 0)


class TestCanonicalize:
    def test_axis_aligned_quad_becomes_rect(self):
        prim = RawPrimitive("polygon", HslQ(1, 2, 3), None, closed=True,
                            points=[(0, 0), (50, 0), (50, 100), (0, 100)])
        el = canonicalize_primitive(prim, VIEW1000)
        assert el == RectElement(NBBox(0, 0, 50, 100), HslQ(1, 2, 3))

    def test_two_point_polyline_is_line(self):
        prim = RawPrimitive("polyline", None, HslQ(0, 0, 5),
                            points=[(0, 0), (100, 100)])
        el = canonicalize_primitive(prim, VIEW1000)
        assert isinstance(el, LineElement) and len(el.points) == 2

    def test_circle_vertices_on_radius(self):
        svg = svg_doc('<circle cx="50" cy="50" r="10" fill="black"/>',
                      width=1000, height=1000)
        # scale here is 1, so normalized coordinates equal source ones
        el = ingest_svg(svg.replace('cx="50"', 'cx="500"').replace(
            'cy="50"', 'cy="500"').replace('r="10"', 'r="100"')).elements[0]
        assert isinstance(el, PolygonElement) and len(el.points) == 24
        for p in el.points:
            assert abs(math.hypot(p.x - 500, p.y - 500) - 100) <= 1.0

    def test_invisible_primitive_skipped(self):
        prim = RawPrimitive("polygon", None, None, closed=True,
                            points=[(0, 0), (1, 0), (1, 1)])
        assert canonicalize_primitive(prim, VIEW1000) is None

    def test_closing_duplicate_point_dropped(self):
        prim = RawPrimitive("polygon", HslQ(0, 0, 0), None, closed=True,
                            points=[(0, 0), (50, 10), (100, 0), (0, 0)])
        el = canonicalize_primitive(prim, VIEW1000)
        assert len(el.points) == 3


class TestNormalize:
    def test_wide_viewport(self):
        assert normalize_coords([(1000, 500)], Viewport(2000, 1000)) == [
            __import__("simvec.core", fromlist=["NPoint"]).NPoint(500, 250)]

    def test_small_viewport_scales_up(self):
        pts = normalize_coords([(100, 50)], Viewport(400, 300))
        assert (pts[0].x, pts[0].y) == (250, 125)

    def test_identity_viewport(self):
        pts = normalize_coords([(123, 456)], VIEW1000)
        assert (pts[0].x, pts[0].y) == (123, 456)


class TestIngest:
    def test_full_viewport_rect(self):
        svg = ('<svg xmlns="http://www.w3.org/2000/svg" width="2000" height="1000">'
               '<rect x="0" y="0" width="2000" height="1000" fill="black"/></svg>')
        doc = ingest_svg(svg)
        assert doc.elements == (RectElement(NBBox(0, 0, 1000, 500), HslQ(0, 0, 0)),)

    def test_translated_group(self):
        svg = svg_doc('<g transform="translate(10,20)">'
                      '<rect x="0" y="0" width="5" height="5" fill="black"/></g>',
                      width=1000, height=1000)
        doc = ingest_svg(svg)
        assert doc.elements[0].bbox == NBBox(10, 20, 5, 5)

    def test_paint_order_is_document_order(self):
        svg = svg_doc('<rect x="0" y="0" width="5" height="5" fill="black"/>'
                      '<text x="10" y="10" font-size="10" fill="black">a</text>'
                      '<line x1="0" y1="0" x2="5" y2="5" stroke="red"/>',
                      width=1000, height=1000)
        doc = ingest_svg(svg)
        kinds = [type(el).__name__ for el in doc.elements]
        assert kinds == ["RectElement", "TextElement", "LineElement"]

    def test_nesting_invariance(self):
        inner = '<rect x="5" y="5" width="20" height="10" fill="#123456"/>'
        plain = svg_doc(inner)
        wrapped = svg_doc('<g><g transform="translate(0,0)"><g>'
                          + inner + "</g></g></g>")
        assert ingest_svg(plain) == ingest_svg(wrapped)

    def test_transform_distribution(self):
        nested = svg_doc('<g transform="translate(4,6)"><g transform="scale(2)">'
                         '<rect x="1" y="2" width="3" height="4" fill="black"/>'
                         "</g></g>")
        direct = svg_doc('<rect x="6" y="10" width="6" height="8" fill="black"/>')
        assert ingest_svg(nested) == ingest_svg(direct)

    def test_encoding_invariance(self):
        as_rect = svg_doc('<rect x="10" y="10" width="30" height="20" fill="navy"/>'
                          .replace("navy", "#000080"))
        as_path = svg_doc('<path d="M10 10 L40 10 L40 30 L10 30 Z" fill="#000080"/>')
        as_polygon = svg_doc('<polygon points="10,10 40,10 40,30 10,30" fill="#000080"/>')
        docs = [ingest_svg(s) for s in (as_rect, as_path, as_polygon)]
        assert docs[0] == docs[1] == docs[2]
        assert isinstance(docs[0].elements[0], RectElement)

    def test_style_stripping(self):
        bare = svg_doc('<text x="10" y="20" font-size="10" fill="black">hi</text>')
        styled = svg_doc('<text x="10" y="20" font-size="10" fill="black" '
                         'font-family="Papyrus" filter="url(#f)" '
                         'style="text-shadow: 1px 1px;">hi</text>')
        assert ingest_svg(bare) == ingest_svg(styled)

    def test_invisible_elements_dropped(self):
        svg = svg_doc('<rect x="0" y="0" width="5" height="5" fill="none"/>'
                      '<rect x="0" y="0" width="0" height="5" fill="black"/>'
                      '<rect x="1" y="1" width="2" height="2" fill="transparent"/>'
                      '<g display="none"><rect x="0" y="0" width="5" height="5" '
                      'fill="black"/></g>')
        assert ingest_svg(svg).elements == ()

    def test_missing_viewport_rejected(self):
        with pytest.raises(IngestError, match="viewport"):
            ingest_svg('<svg xmlns="http://www.w3.org/2000/svg"></svg>')

    def test_malformed_markup_rejected(self):
        with pytest.raises(IngestError, match="malformed"):
            ingest_svg("<svg><rect</svg>")

    def test_viewbox_offset(self):
        svg = ('<svg xmlns="http://www.w3.org/2000/svg" '
               'viewBox="100 50 1000 1000">'
               '<rect x="100" y="50" width="10" height="10" fill="black"/></svg>')
        doc = ingest_svg(svg)
        assert doc.elements[0].bbox == NBBox(0, 0, 10, 10)

    def test_unsupported_element_warns_or_raises(self):
        svg = svg_doc('<foreignObject width="5" height="5"/>')
        result = ingest_svg_full(svg)
        assert result.doc.elements == ()
        assert any(w.kind == "foreignObject" for w in result.warnings)
        with pytest.raises(IngestError, match="unsupported"):
            ingest_svg(svg, IngestOptions(strict=True))

    def test_use_reference_expanded_once(self):
        svg = svg_doc('<defs><rect id="box" x="0" y="0" width="4" height="4" '
                      'fill="black"/></defs>'
                      '<use href="#box" x="10" y="0"/>')
        doc = ingest_svg(svg)
        assert len(doc.elements) == 1
        assert doc.elements[0].bbox == NBBox(100, 0, 40, 40)

    def test_gradient_uses_first_stop(self):
        svg = svg_doc('<defs><linearGradient id="g">'
                      '<stop offset="0" stop-color="#ff0000"/>'
                      '<stop offset="1" stop-color="#0000ff"/></linearGradient></defs>'
                      '<rect x="0" y="0" width="10" height="10" fill="url(#g)"/>')
        doc = ingest_svg(svg)
        assert doc.elements[0].color == HslQ(0, 20, 10)

    def test_inherited_styles_from_group(self):
        svg = svg_doc('<g fill="#000080" font-size="20">'
                      '<rect x="0" y="0" width="4" height="4"/>'
                      '<text x="10" y="30">t</text></g>')
        doc = ingest_svg(svg)
        assert doc.elements[0].color == doc.elements[1].color

    def test_stroke_only_uses_stroke_color(self):
        svg = svg_doc('<path d="M0 0 L10 10" fill="none" stroke="#000080"/>')
        el = ingest_svg(svg).elements[0]
        assert isinstance(el, LineElement)
        assert el.color == parse_css_color("#000080")


class TestColors:
    @pytest.mark.parametrize("css,expected", [
        ("hsl(0, 0%, 100%)", HslQ(0, 0, 20)),
        ("hsl(216, 60%, 50%)", HslQ(12, 12, 10)),
        ("#ffffff", HslQ(0, 0, 20)),
        ("#000", HslQ(0, 0, 0)),
        ("rgb(255, 0, 0)", HslQ(0, 20, 10)),
        ("white", HslQ(0, 0, 20)),
        ("none", None),
        ("transparent", None),
        (None, None),
    ])
    def test_css_color_parsing(self, css, expected):
        assert parse_css_color(css) == expected

    def test_forge_palette_roundtrips_through_rgb(self):
        from simvec.forge import (
            AXIS_COLOR, LABEL_COLOR, PALETTE, TITLE_COLOR, WHITE, hslq_to_css)
        for color in PALETTE + (WHITE, TITLE_COLOR, LABEL_COLOR, AXIS_COLOR):
            assert parse_css_color(hslq_to_css(color)) == color
