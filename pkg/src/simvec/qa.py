"""Data-centric QA generation with chain-of-thought traces.

Questions cover value retrieval and extremes.  Every generated trace
follows the same four-part shape: the axis pixel/data mapping, the
measurement of the target mark(s) in normalized units (called pixels
throughout, the canvas being 1000 of them), the explicit arithmetic,
and the conclusion.  The arithmetic re-evaluates exactly to the stored
answer, which is what manifest verification checks.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .forge import ChartMeta, MarkBinding, fmt_value
from .seeding import rng_for

UNANSWERABLE = "<unanswerable>"

RETRIEVE_VALUE = "retrieve-value"
EXTREME_WHICH = "extreme-which"
EXTREME_VALUE = "extreme-value"


@dataclass(frozen=True)
class CotTrace:
    """Axis mapping, mark measurement, arithmetic, conclusion - in order."""

    axis: str
    geometry: str
    arithmetic: str | None
    conclusion: str

    @property
    def text(self) -> str:
        parts = [self.axis, self.geometry]
        if self.arithmetic:
            parts.append(self.arithmetic)
        parts.append(self.conclusion)
        return " ".join(parts)


@dataclass
class QaItem:
    item_id: str
    question: str
    task_kind: str
    target: dict
    cot: str
    answer: str
    answer_value: float | None = None
    answer_label: str | None = None
    labels: tuple[str, ...] = ()
    unit: str = ""
    data_span: float = 0.0
    chart_type: str = ""

    def to_dict(self) -> dict:
        return {
            "itemId": self.item_id, "question": self.question,
            "taskKind": self.task_kind, "target": self.target,
            "cot": self.cot, "answer": self.answer,
            "answerValue": self.answer_value, "answerLabel": self.answer_label,
            "labels": list(self.labels), "unit": self.unit,
            "dataSpan": self.data_span, "chartType": self.chart_type,
        }

    @staticmethod
    def from_dict(d: dict) -> "QaItem":
        return QaItem(
            d["itemId"], d["question"], d["taskKind"], d["target"], d["cot"],
            d["answer"], d.get("answerValue"), d.get("answerLabel"),
            tuple(d.get("labels", ())), d.get("unit", ""),
            d.get("dataSpan", 0.0), d.get("chartType", ""))


def unit_suffix(unit: str) -> str:
    if unit == "%":
        return "%"
    return f" {unit}" if unit else ""


def fmt_measure(x: float) -> str:
    """Pixel measurements quoted in traces.

    Four decimals keep the formula's reevaluation inside the two-decimal
    answer precision even when the data span exceeds the pixel span.
    """
    s = f"{x:.4f}".rstrip("0").rstrip(".")
    return s if s not in ("-0", "") else "0"


def _measure_sentence(chart_type: str, category: str, time: str, measure: float) -> str:
    m = fmt_measure(measure)
    if chart_type in ("bar-grouped", "bar-stacked"):
        return f"The height of the bar representing {category} in {time} is {m} pixels."
    if chart_type == "line":
        return f"The point for {category} in {time} lies {m} pixels above the baseline."
    return f"The vertical thickness of the {category} band in {time} is {m} pixels."


def _axis_sentence(meta: ChartMeta) -> str:
    spec = meta.spec
    y = meta.y_scale
    sfx = unit_suffix(spec.unit)
    range_word = "percentage" if spec.unit == "%" else spec.quant_name.lower()
    return (f"The Y-axis of the chart maps from {fmt_value(y.pixel_min)} pixels "
            f"to {fmt_value(y.pixel_max)} pixels, corresponding to a {range_word} "
            f"range of {fmt_value(y.data_min)}{sfx} to {fmt_value(y.data_max)}{sfx}.")


def _formula(meta: ChartMeta, measure: float) -> str:
    y = meta.y_scale
    base = (f"({fmt_measure(measure)}/({fmt_value(y.pixel_max)} - "
            f"{fmt_value(y.pixel_min)}))×{fmt_value(y.data_span)}")
    if y.data_min:
        base += f" + {fmt_value(y.data_min)}"
    return base


def gen_retrieve_value(meta: ChartMeta, key: tuple[str, str]) -> QaItem:
    """Question asking for the value encoded by one mark."""
    category, time = key
    binding = meta.binding_for(category, time)
    spec = meta.spec
    sfx = unit_suffix(spec.unit)
    measure = binding.geometry["measure"]
    answer = binding.value
    q_word = spec.quant_name.lower()
    question = f"What is the {q_word} of {category} in {time}?"

    geometry = _measure_sentence(meta.chart_type, category, time, measure)
    arithmetic = (f"Thus, {category} in {time} accounts for "
                  f"{_formula(meta, measure)}= {fmt_value(answer)}{sfx}.")
    conclusion = f"So the answer is {fmt_value(answer)}{sfx}."
    trace = CotTrace(_axis_sentence(meta), geometry, arithmetic, conclusion)

    return QaItem(
        item_id="", question=question, task_kind=RETRIEVE_VALUE,
        target={"category": category, "time": time}, cot=trace.text,
        answer=f"{fmt_value(answer)}{sfx}", answer_value=answer,
        unit=spec.unit, data_span=meta.y_scale.data_span,
        chart_type=meta.chart_type)


def _scope_candidates(meta: ChartMeta, scope: dict) -> tuple[list[tuple[str, MarkBinding]], str]:
    spec = meta.spec
    if scope["type"] == "slice":
        t = scope["time"]
        cands = [(c, meta.binding_for(c, t)) for c in spec.cat_values]
        return cands, spec.cat_name
    c = scope["category"]
    cands = [(t, meta.binding_for(c, t)) for t in spec.time_values]
    return cands, spec.time_name


def gen_extreme(meta: ChartMeta, scope: dict, kind: str, answer_form: str) -> QaItem:
    """Question asking which mark is extreme in a scope, or its value.

    Ties go to the first occurrence in attribute-list order, and the
    trace says so.
    """
    if kind not in ("max", "min"):
        raise ValueError(f"kind must be max or min, got {kind!r}")
    if answer_form not in ("which", "value"):
        raise ValueError(f"answer_form must be which or value, got {answer_form!r}")
    candidates, label_name = _scope_candidates(meta, scope)
    if len(candidates) < 2:
        raise ValueError("extreme scope needs at least 2 data points")
    spec = meta.spec
    sfx = unit_suffix(spec.unit)
    q_word = spec.quant_name.lower()
    high = kind == "max"
    superl = "highest" if high else "lowest"

    best_i = 0
    for i, (_, b) in enumerate(candidates):
        if (b.value > candidates[best_i][1].value if high
                else b.value < candidates[best_i][1].value):
            best_i = i
    best_label, best_binding = candidates[best_i]
    tied = [lab for i, (lab, b) in enumerate(candidates)
            if i != best_i and b.value == best_binding.value]
    measure = best_binding.geometry["measure"]

    mark_word = {"bar-grouped": "bar", "bar-stacked": "bar segment",
                 "line": "point", "area-stacked": "band"}[meta.chart_type]
    if scope["type"] == "slice":
        question = (f"Which {spec.cat_name.lower()} has the {superl} {q_word} "
                    f"in {scope['time']}?")
        listing = f"In {scope['time']}, the {mark_word}s measure: "
    else:
        question = (f"In which {spec.time_name.lower()} did {scope['category']} "
                    f"have its {superl} {q_word}?")
        listing = f"For {scope['category']}, the {mark_word}s measure: "
    if answer_form == "value":
        if scope["type"] == "slice":
            question = f"What is the {superl} {q_word} in {scope['time']}?"
        else:
            question = (f"What is the {superl} {q_word} of {scope['category']} "
                        f"across all {spec.time_name.lower()}s?")

    listing += ", ".join(
        f"{lab} {fmt_measure(b.geometry['measure'])} pixels"
        for lab, b in candidates) + "."
    comparison = (f"The {'largest' if high else 'smallest'} of these is "
                  f"{best_label} at {fmt_measure(measure)} pixels.")
    if tied:
        comparison += (f" {best_label} and {', '.join(tied)} measure the same; "
                       f"{best_label} comes first in {label_name.lower()} order.")
    geometry = f"{listing} {comparison}"

    if answer_form == "value":
        answer_value = best_binding.value
        arithmetic = (f"Thus, the {superl} {q_word} is "
                      f"{_formula(meta, measure)}= {fmt_value(answer_value)}{sfx}.")
        conclusion = f"So the answer is {fmt_value(answer_value)}{sfx}."
        trace = CotTrace(_axis_sentence(meta), geometry, arithmetic, conclusion)
        return QaItem(
            item_id="", question=question, task_kind=EXTREME_VALUE,
            target={"scope": scope, "kind": kind}, cot=trace.text,
            answer=f"{fmt_value(answer_value)}{sfx}", answer_value=answer_value,
            unit=spec.unit, data_span=meta.y_scale.data_span,
            chart_type=meta.chart_type)

    labels = tuple(lab for lab, _ in candidates)
    conclusion = f"So the answer is {best_label}."
    trace = CotTrace(_axis_sentence(meta), geometry, None, conclusion)
    return QaItem(
        item_id="", question=question, task_kind=EXTREME_WHICH,
        target={"scope": scope, "kind": kind}, cot=trace.text,
        answer=best_label, answer_label=best_label, labels=labels,
        unit=spec.unit, data_span=meta.y_scale.data_span,
        chart_type=meta.chart_type)


# Minimum pixel separation between the winner and the runner-up for an
# extreme question to be answerable from the rendered chart.
MIN_EXTREME_GAP_PX = 1.0


def _degenerate_scope(meta: ChartMeta, scope: dict, kind: str) -> bool:
    candidates, _ = _scope_candidates(meta, scope)
    if len(candidates) < 2:
        return True
    measures = sorted((b.geometry["measure"] for _, b in candidates),
                      reverse=(kind == "max"))
    return abs(measures[0] - measures[1]) < MIN_EXTREME_GAP_PX


def gen_qa_suite(meta: ChartMeta, seed: int) -> list[QaItem]:
    """One retrieve-value item plus up to two extreme items per chart."""
    rng = rng_for(seed, "qa")
    spec = meta.spec
    items: list[QaItem] = []
    key = (rng.choice(spec.cat_values), rng.choice(spec.time_values))
    items.append(gen_retrieve_value(meta, key))
    if rng.random() < 0.5:
        scope = {"type": "slice", "time": rng.choice(spec.time_values)}
    else:
        scope = {"type": "series", "category": rng.choice(spec.cat_values)}
    for kind in ("max", "min"):
        if _degenerate_scope(meta, scope, kind):
            continue
        form = rng.choice(["which", "value"])
        items.append(gen_extreme(meta, scope, kind, form))
    for i, item in enumerate(items):
        item.item_id = f"q{i}"
    return items


# ---------------------------------------------------------------------------
# Answer extraction and CoT arithmetic
# ---------------------------------------------------------------------------

_NUMERIC_RE = re.compile(
    r"[-+]?\d{1,3}(?:,\d{3})+(?:\.\d+)?|[-+]?\d+(?:\.\d+)?|[-+]?\.\d+")


def extract_final_answer(text: str, expected: str, labels=None):
    """Recover the final answer from free-form text.

    expected="numeric": the last numeric literal (thousands separators,
    decimals, and a trailing percent sign are all tolerated).
    expected="label": the last case-insensitive occurrence of any of the
    given labels, returned in canonical casing.  Returns UNANSWERABLE
    when nothing matches.
    """
    if expected == "numeric":
        matches = _NUMERIC_RE.findall(text)
        if not matches:
            return UNANSWERABLE
        return float(matches[-1].replace(",", ""))
    if expected == "label":
        if not labels:
            return UNANSWERABLE
        best = None
        best_key = (-1, -1)
        for label in labels:
            pattern = (r"(?<![A-Za-z0-9])" + re.escape(label) + r"(?![A-Za-z0-9])")
            for m in re.finditer(pattern, text, re.IGNORECASE):
                # latest occurrence wins; overlapping labels ending at the
                # same spot resolve to the longest one
                key = (m.end(), len(label))
                if key > best_key:
                    best_key = key
                    best = label
        return best if best is not None else UNANSWERABLE
    raise ValueError(f"expected must be 'numeric' or 'label', got {expected!r}")


class _ExprParser:
    """Arithmetic over + - x / and parentheses, as written in CoT traces."""

    def __init__(self, text: str):
        self.text = text.replace("−", "-").replace("×", "*").replace("×", "*")
        self.pos = 0

    def _skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos] in " \t":
            self.pos += 1

    def _peek(self) -> str:
        self._skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def parse(self) -> float:
        value = self._expr()
        self._skip_ws()
        if self.pos != len(self.text):
            raise ValueError(f"trailing input in expression: {self.text[self.pos:]!r}")
        return value

    def _expr(self) -> float:
        value = self._term()
        while self._peek() and self._peek() in "+-":
            op = self.text[self.pos]
            self.pos += 1
            rhs = self._term()
            value = value + rhs if op == "+" else value - rhs
        return value

    def _term(self) -> float:
        value = self._factor()
        while self._peek() and self._peek() in "*/":
            op = self.text[self.pos]
            self.pos += 1
            rhs = self._factor()
            value = value * rhs if op == "*" else value / rhs
        return value

    def _factor(self) -> float:
        ch = self._peek()
        if ch == "(":
            self.pos += 1
            value = self._expr()
            if self._peek() != ")":
                raise ValueError("unbalanced parenthesis in expression")
            self.pos += 1
            return value
        if ch == "-":
            self.pos += 1
            return -self._factor()
        m = re.match(r"\d+(?:\.\d+)?|\.\d+", self.text[self.pos:])
        if not m:
            raise ValueError(f"expected number at {self.text[self.pos:]!r}")
        self.pos += len(m.group())
        return float(m.group())


def eval_arithmetic(expr: str) -> float:
    return _ExprParser(expr).parse()


_FORMULA_RE = re.compile(r"([0-9.()+−×*\-/ ]+)=")


def cot_formula(cot: str) -> str | None:
    """The arithmetic expression preceding the last '=' in a trace."""
    matches = _FORMULA_RE.findall(cot)
    for m in reversed(matches):
        candidate = m.strip()
        if any(op in candidate for op in "×*/+") or "−" in candidate:
            return candidate
    return None


def verify_cot_arithmetic(item: QaItem) -> bool:
    """Re-evaluate the trace arithmetic against the stored answer.

    Answers are stored at two decimals, so the formula result is rounded
    to two decimals before the exact comparison.  Label answers have no
    arithmetic and verify through extraction instead.
    """
    if item.answer_value is None:
        return extract_final_answer(item.cot, "label", item.labels) == item.answer_label
    expr = cot_formula(item.cot)
    if expr is None:
        return False
    try:
        value = eval_arithmetic(expr)
    except (ValueError, ZeroDivisionError):
        return False
    return round(value, 2) == round(item.answer_value, 2)
