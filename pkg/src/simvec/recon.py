"""Reconstruction quality and QA accuracy metrics.

Predicted and ground-truth SimVec documents are compared per element
kind through a minimum-cost one-to-one assignment.  Text elements score
hit rate, normalized Levenshtein similarity, and center distance;
geometric elements score HSL color distance and vertex position
distance (in 1/1000 of the image size).  QA predictions score as the
fraction within 5/10/20 percent of the ground-truth value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linear_sum_assignment

from .core import (
    Element,
    LineElement,
    PolygonElement,
    RectElement,
    SimVecDoc,
    TextElement,
)
from .qa import UNANSWERABLE, QaItem, extract_final_answer

KINDS = ("text", "rect", "line", "polygon")

_COLOR_NORM = 20.0 * math.sqrt(3.0)


def kind_of(el: Element) -> str:
    if isinstance(el, TextElement):
        return "text"
    if isinstance(el, RectElement):
        return "rect"
    if isinstance(el, LineElement):
        return "line"
    return "polygon"


def levenshtein(a: str, b: str) -> int:
    """Classic dynamic-programming edit distance."""
    if not a:
        return len(b)
    if not b:
        return len(a)
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        cur = [i]
        for j, cb in enumerate(b, start=1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1,
                           prev[j - 1] + (ca != cb)))
        prev = cur
    return prev[-1]


def text_similarity(a: str, b: str) -> float:
    """1 - levenshtein / max(len); two empty strings count as identical."""
    longest = max(len(a), len(b))
    if longest == 0:
        return 1.0
    return 1.0 - levenshtein(a, b) / longest


def color_distance(a, b, circular_hue: bool = False) -> float:
    """Euclidean distance on quantized HSL channels.

    Hue is compared linearly by default; circular_hue folds the hue
    difference around the 20-step wheel instead.
    """
    dh = abs(a.h - b.h)
    if circular_hue:
        dh = min(dh, 20 - dh)
    return math.hypot(dh, a.s - b.s, a.l - b.l)


def _center(el: Element) -> tuple[float, float]:
    if isinstance(el, (TextElement, RectElement)):
        return el.bbox.center
    xs = [p.x for p in el.points]
    ys = [p.y for p in el.points]
    return (sum(xs) / len(xs), sum(ys) / len(ys))


def pair_cost(a: Element, b: Element) -> float:
    """Matching cost for two same-kind elements."""
    ca, cb = _center(a), _center(b)
    center = math.hypot(ca[0] - cb[0], ca[1] - cb[1]) / 1000.0
    if isinstance(a, TextElement):
        return (1.0 - text_similarity(a.text, b.text)) + center
    return center + color_distance(a.color, b.color) / _COLOR_NORM


@dataclass
class ElementAssignment:
    """One-to-one same-kind pairs of (predicted index, ground-truth index)."""

    pairs: list[tuple[int, int]] = field(default_factory=list)
    unmatched_pred: list[int] = field(default_factory=list)
    unmatched_gt: list[int] = field(default_factory=list)

    def kind_pairs(self, pred: SimVecDoc, kind: str) -> list[tuple[int, int]]:
        return [(p, g) for p, g in self.pairs
                if kind_of(pred.elements[p]) == kind]


def match_elements(pred: SimVecDoc, gt: SimVecDoc) -> ElementAssignment:
    """Optimal bipartite assignment per element kind."""
    out = ElementAssignment()
    for kind in KINDS:
        p_idx = [i for i, el in enumerate(pred.elements) if kind_of(el) == kind]
        g_idx = [i for i, el in enumerate(gt.elements) if kind_of(el) == kind]
        if not p_idx or not g_idx:
            out.unmatched_pred.extend(p_idx)
            out.unmatched_gt.extend(g_idx)
            continue
        cost = np.array([[pair_cost(pred.elements[p], gt.elements[g])
                          for g in g_idx] for p in p_idx])
        rows, cols = linear_sum_assignment(cost)
        taken_p, taken_g = set(), set()
        for r, c in zip(rows, cols):
            out.pairs.append((p_idx[r], g_idx[c]))
            taken_p.add(p_idx[r])
            taken_g.add(g_idx[c])
        out.unmatched_pred.extend(i for i in p_idx if i not in taken_p)
        out.unmatched_gt.extend(i for i in g_idx if i not in taken_g)
    out.pairs.sort(key=lambda pg: pg[1])
    out.unmatched_pred.sort()
    out.unmatched_gt.sort()
    return out


# Normalized similarity above which a ground-truth text counts as recovered.
TEXT_HIT_THRESHOLD = 0.5


def text_metrics(assignment: ElementAssignment, pred: SimVecDoc, gt: SimVecDoc
                 ) -> tuple[float | None, float | None, float | None]:
    """(hit rate, mean similarity, mean center distance) over text pairs.

    Absent (None) when the ground truth has no texts, or for the pair
    means when nothing was matched.
    """
    total_gt = sum(1 for el in gt.elements if isinstance(el, TextElement))
    if total_gt == 0:
        return None, None, None
    sims = []
    centers = []
    hits = 0
    for p, g in assignment.kind_pairs(pred, "text"):
        a, b = pred.elements[p], gt.elements[g]
        sim = text_similarity(a.text, b.text)
        sims.append(sim)
        if sim > TEXT_HIT_THRESHOLD:
            hits += 1
        ca, cb = a.bbox.center, b.bbox.center
        centers.append(math.hypot(ca[0] - cb[0], ca[1] - cb[1]))
    hit_rate = hits / total_gt
    if not sims:
        return hit_rate, None, None
    return hit_rate, sum(sims) / len(sims), sum(centers) / len(centers)


def _points_of(el: Element) -> list[tuple[float, float]]:
    if isinstance(el, (RectElement, TextElement)):
        return [(float(x), float(y)) for x, y in el.bbox.corners]
    return [(float(p.x), float(p.y)) for p in el.points]


def resample_polyline(points, n: int, closed: bool) -> list[tuple[float, float]]:
    """n points uniformly spaced by arc length along the polyline."""
    if len(points) == n:
        return [(float(x), float(y)) for x, y in points]
    pts = [(float(x), float(y)) for x, y in points]
    if closed:
        pts = pts + [pts[0]]
    seg_len = [math.hypot(b[0] - a[0], b[1] - a[1]) for a, b in zip(pts, pts[1:])]
    total = sum(seg_len)
    if total == 0:
        return [pts[0]] * n
    if closed:
        targets = [total * i / n for i in range(n)]
    else:
        targets = [total * i / (n - 1) for i in range(n)] if n > 1 else [0.0]
    out = []
    seg = 0
    walked = 0.0
    for t in targets:
        while seg < len(seg_len) - 1 and walked + seg_len[seg] < t:
            walked += seg_len[seg]
            seg += 1
        a, b = pts[seg], pts[seg + 1]
        frac = 0.0 if seg_len[seg] == 0 else (t - walked) / seg_len[seg]
        frac = min(1.0, max(0.0, frac))
        out.append((a[0] + frac * (b[0] - a[0]), a[1] + frac * (b[1] - a[1])))
    return out


def position_distance_pair(a: Element, b: Element) -> float:
    """Mean distance between corresponding vertices of two elements.

    Rects compare corner to corner; point lists resample the longer one
    to the shorter length by uniform arc length first.
    """
    pa, pb = _points_of(a), _points_of(b)
    if len(pa) != len(pb):
        closed = isinstance(a, (PolygonElement, RectElement))
        n = min(len(pa), len(pb))
        if len(pa) > n:
            pa = resample_polyline(pa, n, closed)
        else:
            pb = resample_polyline(pb, n, closed)
    dists = [math.hypot(x1 - x2, y1 - y2) for (x1, y1), (x2, y2) in zip(pa, pb)]
    return sum(dists) / len(dists)


def element_metrics(assignment: ElementAssignment, pred: SimVecDoc, gt: SimVecDoc,
                    circular_hue: bool = False) -> tuple[float | None, float | None]:
    """(mean color distance, mean position distance) over geometric pairs."""
    colors = []
    positions = []
    for kind in ("rect", "line", "polygon"):
        for p, g in assignment.kind_pairs(pred, kind):
            a, b = pred.elements[p], gt.elements[g]
            colors.append(color_distance(a.color, b.color, circular_hue))
            positions.append(position_distance_pair(a, b))
    if not colors:
        return None, None
    return sum(colors) / len(colors), sum(positions) / len(positions)


@dataclass
class ReconReport:
    text_hit_rate: float | None
    text_similarity: float | None
    text_center_distance: float | None
    element_color_distance: float | None
    element_position_distance: float | None
    matched: int = 0
    unmatched_pred: int = 0
    unmatched_gt: int = 0
    per_kind_position: dict = field(default_factory=dict)

    FIELDS = ("text_hit_rate", "text_similarity", "text_center_distance",
              "element_color_distance", "element_position_distance")

    def to_dict(self) -> dict:
        return {
            "textHitRate": self.text_hit_rate,
            "textSimilarity": self.text_similarity,
            "textCenterDistance": self.text_center_distance,
            "elementColorDistance": self.element_color_distance,
            "elementPositionDistance": self.element_position_distance,
            "matched": self.matched,
            "unmatchedPred": self.unmatched_pred,
            "unmatchedGt": self.unmatched_gt,
            "perKindPosition": self.per_kind_position,
        }


def evaluate_reconstruction(pred: SimVecDoc, gt: SimVecDoc,
                            circular_hue: bool = False) -> ReconReport:
    assignment = match_elements(pred, gt)
    hit, sim, center = text_metrics(assignment, pred, gt)
    color, position = element_metrics(assignment, pred, gt, circular_hue)
    per_kind: dict = {}
    for kind in ("rect", "line", "polygon"):
        vals = [position_distance_pair(pred.elements[p], gt.elements[g])
                for p, g in assignment.kind_pairs(pred, kind)]
        if vals:
            per_kind[kind] = sum(vals) / len(vals)
    return ReconReport(hit, sim, center, color, position,
                       matched=len(assignment.pairs),
                       unmatched_pred=len(assignment.unmatched_pred),
                       unmatched_gt=len(assignment.unmatched_gt),
                       per_kind_position=per_kind)


def aggregate_reports(tagged: list[tuple[str, ReconReport]]) -> dict[str, dict]:
    """Unweighted per-chart means of each metric, per tag and overall."""
    groups: dict[str, list[ReconReport]] = {}
    for tag, report in tagged:
        groups.setdefault(tag, []).append(report)
        groups.setdefault("overall", []).append(report)
    out: dict[str, dict] = {}
    for tag, reports in groups.items():
        agg = {"charts": len(reports)}
        for name in ReconReport.FIELDS:
            vals = [getattr(r, name) for r in reports if getattr(r, name) is not None]
            agg[name] = sum(vals) / len(vals) if vals else None
        out[tag] = agg
    return out


# ---------------------------------------------------------------------------
# QA scoring
# ---------------------------------------------------------------------------

THRESHOLDS = (0.05, 0.10, 0.20)


@dataclass
class QaScore:
    thresholds: tuple[float, ...]
    overall: dict[float, float]
    per_type: dict[str, dict[float, float]]
    total: int
    unanswerable: int = 0

    def to_dict(self) -> dict:
        return {
            "thresholds": list(self.thresholds),
            "overall": {str(t): v for t, v in self.overall.items()},
            "perType": {k: {str(t): v for t, v in d.items()}
                        for k, d in self.per_type.items()},
            "total": self.total,
            "unanswerable": self.unanswerable,
        }


def _item_correct(item: QaItem, raw_text: str | None,
                  thresholds=THRESHOLDS) -> dict[float, bool]:
    if raw_text is None:
        return {t: False for t in thresholds}
    if item.answer_value is not None:
        pred = extract_final_answer(raw_text, "numeric")
        if pred == UNANSWERABLE:
            return {t: False for t in thresholds}
        gt = item.answer_value
        if abs(gt) < 1e-9:
            if not item.data_span:
                return {t: False for t in thresholds}
            deviation = abs(pred - gt) / item.data_span
        else:
            deviation = abs(pred - gt) / abs(gt)
        return {t: deviation < t for t in thresholds}
    pred = extract_final_answer(raw_text, "label", item.labels)
    ok = (pred != UNANSWERABLE and item.answer_label is not None
          and pred.lower() == item.answer_label.lower())
    return {t: ok for t in thresholds}


def score_qa(predictions: list[tuple[str, str]], gt_items: list[QaItem],
             thresholds=THRESHOLDS) -> QaScore:
    """Accuracy at each deviation threshold, per chart type and overall.

    `predictions` are (item id, raw model text); items without a
    prediction count as wrong at every threshold.
    """
    by_id = {item.item_id: item for item in gt_items}
    pred_map: dict[str, str] = {}
    for item_id, raw in predictions:
        if item_id not in by_id:
            raise KeyError(f"prediction references unknown item {item_id!r}")
        pred_map[item_id] = raw

    counts: dict[str, dict[float, int]] = {}
    totals: dict[str, int] = {}
    unanswerable = 0
    for item in gt_items:
        raw = pred_map.get(item.item_id)
        if raw is not None:
            expected = "numeric" if item.answer_value is not None else "label"
            if extract_final_answer(raw, expected, item.labels) == UNANSWERABLE:
                unanswerable += 1
        verdicts = _item_correct(item, raw, thresholds)
        for tag in (item.chart_type or "unknown", "overall"):
            totals[tag] = totals.get(tag, 0) + 1
            bucket = counts.setdefault(tag, {t: 0 for t in thresholds})
            for t, ok in verdicts.items():
                bucket[t] += ok
    def acc(tag: str) -> dict[float, float]:
        return {t: counts[tag][t] / totals[tag] for t in thresholds}

    per_type = {tag: acc(tag) for tag in sorted(totals) if tag != "overall"}
    return QaScore(tuple(thresholds), acc("overall") if totals else {},
                   per_type, totals.get("overall", 0), unanswerable)
