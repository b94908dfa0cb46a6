import itertools
import math
import random

import pytest

from simvec.core import (
    HslQ,
    LineElement,
    NBBox,
    NPoint,
    PolygonElement,
    RectElement,
    SimVecDoc,
    TextElement,
)
from simvec.qa import QaItem
from simvec.recon import (
    KINDS,
    ElementAssignment,
    aggregate_reports,
    color_distance,
    evaluate_reconstruction,
    kind_of,
    levenshtein,
    match_elements,
    pair_cost,
    position_distance_pair,
    resample_polyline,
    score_qa,
    text_metrics,
    text_similarity,
)

from conftest import random_doc


def oracle_levenshtein(a: str, b: str) -> int:
    """Full-matrix DP oracle, written independently of the implementation."""
    rows = len(a) + 1
    cols = len(b) + 1
    m = [[0] * cols for _ in range(rows)]
    for i in range(rows):
        m[i][0] = i
    for j in range(cols):
        m[0][j] = j
    for i in range(1, rows):
        for j in range(1, cols):
            sub = m[i - 1][j - 1] + (0 if a[i - 1] == b[j - 1] else 1)
            m[i][j] = min(sub, m[i - 1][j] + 1, m[i][j - 1] + 1)
    return m[rows - 1][cols - 1]


def brute_force_cost(pred: SimVecDoc, gt: SimVecDoc) -> float:
    """Exhaustive-permutation minimum assignment cost, per kind."""
    total = 0.0
    for kind in KINDS:
        p_idx = [i for i, el in enumerate(pred.elements) if kind_of(el) == kind]
        g_idx = [i for i, el in enumerate(gt.elements) if kind_of(el) == kind]
        if not p_idx or not g_idx:
            continue
        small, large, pred_small = ((p_idx, g_idx, True)
                                    if len(p_idx) <= len(g_idx)
                                    else (g_idx, p_idx, False))
        best = math.inf
        for perm in itertools.permutations(large, len(small)):
            cost = 0.0
            for s, l in zip(small, perm):
                p, g = (s, l) if pred_small else (l, s)
                cost += pair_cost(pred.elements[p], gt.elements[g])
            best = min(best, cost)
        total += best
    return total


def assignment_cost(assignment: ElementAssignment, pred, gt) -> float:
    return sum(pair_cost(pred.elements[p], gt.elements[g])
               for p, g in assignment.pairs)


def shifted(doc: SimVecDoc, dx: int, dy: int) -> SimVecDoc:
    out = []
    for el in doc.elements:
        if isinstance(el, TextElement):
            out.append(TextElement(el.text, NBBox(
                el.bbox.left + dx, el.bbox.top + dy,
                el.bbox.width, el.bbox.height), el.color))
        elif isinstance(el, RectElement):
            out.append(RectElement(NBBox(
                el.bbox.left + dx, el.bbox.top + dy,
                el.bbox.width, el.bbox.height), el.color))
        elif isinstance(el, LineElement):
            out.append(LineElement(tuple(
                NPoint(p.x + dx, p.y + dy) for p in el.points), el.color))
        else:
            out.append(PolygonElement(tuple(
                NPoint(p.x + dx, p.y + dy) for p in el.points), el.color))
    return SimVecDoc(tuple(out))


BLACK = HslQ(0, 0, 0)


class TestLevenshtein:
    def test_kitten_sitting(self):
        assert levenshtein("kitten", "sitting") == 3
        assert text_similarity("kitten", "sitting") == pytest.approx(1 - 3 / 7)

    def test_against_oracle_on_random_pairs(self):
        rng = random.Random(3)
        alphabet = "abcde "
        for _ in range(500):
            a = "".join(rng.choice(alphabet) for _ in range(rng.randint(0, 12)))
            b = "".join(rng.choice(alphabet) for _ in range(rng.randint(0, 12)))
            assert levenshtein(a, b) == oracle_levenshtein(a, b)

    def test_empty_vs_empty_is_identical(self):
        assert text_similarity("", "") == 1.0

    def test_empty_vs_nonempty(self):
        assert text_similarity("", "abc") == 0.0


class TestMatching:
    def test_identity_assignment(self):
        doc = random_doc(random.Random(1))
        a = match_elements(doc, doc)
        assert len(a.pairs) == len(doc.elements)
        assert not a.unmatched_pred and not a.unmatched_gt
        assert assignment_cost(a, doc, doc) == pytest.approx(0.0, abs=1e-12)

    def test_missing_text_left_unmatched(self):
        gt = SimVecDoc((
            TextElement("alpha", NBBox(0, 0, 50, 10), BLACK),
            TextElement("beta", NBBox(0, 100, 50, 10), BLACK)))
        pred = SimVecDoc((TextElement("alpha", NBBox(0, 0, 50, 10), BLACK),))
        a = match_elements(pred, gt)
        assert len(a.pairs) == 1
        assert a.unmatched_gt == [1] and a.unmatched_pred == []

    def test_swapped_texts_pair_by_content(self):
        gt = SimVecDoc((
            TextElement("alpha", NBBox(0, 0, 50, 10), BLACK),
            TextElement("beta", NBBox(0, 500, 50, 10), BLACK)))
        pred = SimVecDoc((
            TextElement("beta", NBBox(0, 490, 50, 10), BLACK),
            TextElement("alpha", NBBox(0, 10, 50, 10), BLACK)))
        a = match_elements(pred, gt)
        pairs = dict((g, p) for p, g in a.pairs)
        assert pairs == {0: 1, 1: 0}
        # brute force over both possible assignments confirms the choice
        straight = (pair_cost(pred.elements[0], gt.elements[0])
                    + pair_cost(pred.elements[1], gt.elements[1]))
        crossed = (pair_cost(pred.elements[1], gt.elements[0])
                   + pair_cost(pred.elements[0], gt.elements[1]))
        assert crossed < straight

    def test_never_pairs_across_kinds(self):
        gt = SimVecDoc((RectElement(NBBox(0, 0, 10, 10), BLACK),))
        pred = SimVecDoc((PolygonElement(
            (NPoint(0, 0), NPoint(10, 0), NPoint(5, 10)), BLACK),))
        a = match_elements(pred, gt)
        assert a.pairs == []
        assert a.unmatched_pred == [0] and a.unmatched_gt == [0]

    def test_optimal_against_brute_force(self):
        rng = random.Random(12)
        for _ in range(120):
            pred, gt = random_doc(rng, 6), random_doc(rng, 6)
            a = match_elements(pred, gt)
            got = assignment_cost(a, pred, gt)
            assert got == pytest.approx(brute_force_cost(pred, gt), abs=1e-9)


class TestTextMetrics:
    def test_identical_docs(self):
        doc = SimVecDoc((TextElement("Title", NBBox(10, 10, 50, 10), BLACK),))
        hit, sim, center = text_metrics(match_elements(doc, doc), doc, doc)
        assert (hit, sim, center) == (1.0, 1.0, 0.0)

    def test_kitten_sitting_single_pair(self):
        gt = SimVecDoc((TextElement("kitten", NBBox(0, 0, 50, 10), BLACK),))
        pred = SimVecDoc((TextElement("sitting", NBBox(0, 0, 50, 10), BLACK),))
        hit, sim, center = text_metrics(match_elements(pred, gt), pred, gt)
        assert sim == pytest.approx(1 - 3 / 7)
        assert hit == 1.0  # 0.571 > 0.5 threshold

    def test_shift_three_four_gives_center_five(self):
        gt = SimVecDoc((TextElement("x", NBBox(10, 10, 20, 10), BLACK),))
        pred = SimVecDoc((TextElement("x", NBBox(13, 14, 20, 10), BLACK),))
        _, _, center = text_metrics(match_elements(pred, gt), pred, gt)
        assert center == pytest.approx(5.0)

    def test_no_gt_texts_reported_absent(self):
        gt = SimVecDoc((RectElement(NBBox(0, 0, 10, 10), BLACK),))
        pred = SimVecDoc((TextElement("x", NBBox(0, 0, 10, 10), BLACK),))
        assert text_metrics(match_elements(pred, gt), pred, gt) == (None, None, None)

    def test_garbled_text_not_a_hit(self):
        gt = SimVecDoc((TextElement("Revenue", NBBox(0, 0, 50, 10), BLACK),))
        pred = SimVecDoc((TextElement("zzz", NBBox(0, 0, 50, 10), BLACK),))
        hit, sim, _ = text_metrics(match_elements(pred, gt), pred, gt)
        assert hit == 0.0 and sim < 0.5


class TestElementMetrics:
    def test_color_three_four_five(self):
        assert color_distance(HslQ(0, 0, 0), HslQ(3, 4, 0)) == 5.0

    def test_hue_is_linear_by_default_circular_behind_flag(self):
        near_wrap = color_distance(HslQ(0, 0, 0), HslQ(19, 0, 0))
        assert near_wrap == 19.0
        assert color_distance(HslQ(0, 0, 0), HslQ(19, 0, 0), circular_hue=True) == 1.0

    def test_rect_shift_three_four(self):
        gt = SimVecDoc((RectElement(NBBox(100, 100, 40, 20), BLACK),))
        pred = shifted(gt, 3, 4)
        report = evaluate_reconstruction(pred, gt)
        assert report.element_position_distance == pytest.approx(5.0)
        assert report.element_color_distance == 0.0

    def test_resampling_longer_to_shorter(self):
        pts = resample_polyline([(0, 0), (5, 0), (10, 0)], 2, closed=False)
        assert pts == [(0.0, 0.0), (10.0, 0.0)]
        pts = resample_polyline([(0, 0), (10, 0)], 3, closed=False)
        assert pts == [(0.0, 0.0), (5.0, 0.0), (10.0, 0.0)]

    def test_line_pairs_with_unequal_vertex_counts(self):
        gt = SimVecDoc((LineElement((NPoint(0, 0), NPoint(100, 0)), BLACK),))
        pred = SimVecDoc((LineElement(
            (NPoint(0, 0), NPoint(50, 0), NPoint(100, 0)), BLACK),))
        a = match_elements(pred, gt)
        d = position_distance_pair(pred.elements[0], gt.elements[0])
        assert d == pytest.approx(0.0)

    def test_metric_symmetry(self):
        rng = random.Random(7)
        for _ in range(30):
            a, b = random_doc(rng, 4), random_doc(rng, 4)
            fwd = match_elements(a, b)
            colors_ab = [color_distance(a.elements[p].color, b.elements[g].color)
                         for p, g in fwd.pairs]
            colors_ba = [color_distance(b.elements[g].color, a.elements[p].color)
                         for p, g in fwd.pairs]
            assert colors_ab == colors_ba
            pos_ab = [position_distance_pair(a.elements[p], b.elements[g])
                      for p, g in fwd.pairs]
            pos_ba = [position_distance_pair(b.elements[g], a.elements[p])
                      for p, g in fwd.pairs]
            assert pos_ab == pytest.approx(pos_ba)


class TestEvaluate:
    def test_self_evaluation_fixed_point(self, corpus300):
        for bundle in corpus300[:30]:
            r = evaluate_reconstruction(bundle.doc, bundle.doc)
            assert r.text_hit_rate == 1.0
            assert r.text_similarity == 1.0
            assert r.text_center_distance == 0.0
            assert r.element_color_distance == 0.0
            assert r.element_position_distance == 0.0
            assert r.unmatched_pred == 0 and r.unmatched_gt == 0

    def test_global_shift_is_exact(self, corpus300):
        doc = corpus300[0].doc
        r = evaluate_reconstruction(shifted(doc, 3, 4), doc)
        assert r.element_position_distance == pytest.approx(5.0, abs=1e-9)
        assert r.text_center_distance == pytest.approx(5.0, abs=1e-9)

    def test_aggregation_matches_independent_summation(self):
        rng = random.Random(5)
        tagged = []
        for k in range(12):
            gt = random_doc(rng, 5)
            pred = shifted(gt, k % 3, 0)
            tagged.append(("bar" if k % 2 else "line",
                           evaluate_reconstruction(pred, gt)))
        agg = aggregate_reports(tagged)
        for tag in ("bar", "line", "overall"):
            members = [r for t, r in tagged if t == tag or tag == "overall"]
            vals = [r.element_position_distance for r in members
                    if r.element_position_distance is not None]
            if vals:
                expected = sum(vals) / len(vals)
                assert agg[tag]["element_position_distance"] == pytest.approx(expected)
            assert agg[tag]["charts"] == len(members)


def qa_item(item_id, value=None, label=None, labels=(), span=100.0,
            chart_type="bar"):
    return QaItem(item_id, "q", "retrieve-value" if value is not None
                  else "extreme-which", {}, "", str(value or label),
                  answer_value=value, answer_label=label, labels=labels,
                  data_span=span, chart_type=chart_type)


class TestScoreQa:
    def test_exact_match_counts_everywhere(self):
        score = score_qa([("a", "the answer is 35")], [qa_item("a", 35.0)])
        assert score.overall == {0.05: 1.0, 0.10: 1.0, 0.20: 1.0}

    def test_exact_five_percent_is_not_less_than_five(self):
        # |38 - 40| / 40 is exactly 5%: fails <5%, passes <10%
        score = score_qa([("a", "38")], [qa_item("a", 40.0)])
        assert score.overall[0.05] == 0.0
        assert score.overall[0.10] == 1.0

    def test_four_percent_passes_all(self):
        score = score_qa([("a", "38.4")], [qa_item("a", 40.0)])
        assert score.overall == {0.05: 1.0, 0.10: 1.0, 0.20: 1.0}

    def test_bucket_boundaries(self):
        items = [qa_item(f"i{k}", 100.0) for k in range(5)]
        preds = [("i0", "104"), ("i1", "105"), ("i2", "109"),
                 ("i3", "119"), ("i4", "125")]
        score = score_qa(preds, items)
        assert score.overall[0.05] == pytest.approx(1 / 5)
        assert score.overall[0.10] == pytest.approx(3 / 5)
        assert score.overall[0.20] == pytest.approx(4 / 5)

    def test_zero_ground_truth_uses_span(self):
        item = qa_item("a", 0.0, span=100.0)
        assert score_qa([("a", "3")], [item]).overall[0.05] == 1.0
        assert score_qa([("a", "6")], [item]).overall[0.05] == 0.0

    def test_label_items_all_or_nothing(self):
        item = qa_item("a", label="Gas", labels=("Coal", "Gas"))
        good = score_qa([("a", "its gas")], [item])
        assert good.overall == {0.05: 1.0, 0.10: 1.0, 0.20: 1.0}
        bad = score_qa([("a", "coal")], [item])
        assert bad.overall == {0.05: 0.0, 0.10: 0.0, 0.20: 0.0}

    def test_missing_prediction_is_wrong_everywhere(self):
        score = score_qa([], [qa_item("a", 10.0)])
        assert score.overall == {0.05: 0.0, 0.10: 0.0, 0.20: 0.0}

    def test_unanswerable_counted_and_wrong(self):
        score = score_qa([("a", "no clue")], [qa_item("a", 10.0)])
        assert score.unanswerable == 1
        assert score.overall[0.20] == 0.0

    def test_unknown_item_rejected(self):
        with pytest.raises(KeyError):
            score_qa([("ghost", "1")], [qa_item("a", 1.0)])

    def test_monotone_thresholds(self):
        rng = random.Random(8)
        items = [qa_item(f"i{k}", rng.uniform(1, 100)) for k in range(40)]
        preds = [(it.item_id, str(it.answer_value * rng.uniform(0.7, 1.3)))
                 for it in items]
        score = score_qa(preds, items)
        assert (score.overall[0.05] <= score.overall[0.10]
                <= score.overall[0.20])
        for accs in score.per_type.values():
            assert accs[0.05] <= accs[0.10] <= accs[0.20]

    def test_per_chart_type_split(self):
        items = [qa_item("a", 10.0, chart_type="bar"),
                 qa_item("b", 10.0, chart_type="line")]
        score = score_qa([("a", "10"), ("b", "99")], items)
        assert score.per_type["bar"][0.05] == 1.0
        assert score.per_type["line"][0.05] == 0.0
        assert score.overall[0.05] == 0.5
