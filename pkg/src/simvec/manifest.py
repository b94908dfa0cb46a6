"""Dataset manifests: line-delimited chart records and their verification.

One JSON record per line binds a chart id to its SVG/SimVec/PNG paths
(relative to the manifest), the embedded ground-truth meta, and the QA
items.  Verification re-opens everything: files exist, SimVec parses
and validates, bindings agree with the axis scales, and every QA
trace's arithmetic still evaluates to its stored answer.
"""

from __future__ import annotations

import json
import os
import subprocess
import tempfile
from dataclasses import dataclass
from pathlib import Path

from . import __version__
from .core import parse_simvec, validate
from .forge import ChartMeta
from .qa import QaItem, extract_final_answer, verify_cot_arithmetic

GENERATOR = f"simvec {__version__}"


@dataclass
class ManifestRecord:
    id: str
    chart_type: str
    style: str                 # digital | historical
    svg_path: str
    simvec_path: str
    meta: ChartMeta
    qa: list[QaItem]
    png_path: str | None = None
    generator: str = GENERATOR
    master_seed: int = 0

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "chartType": self.chart_type,
            "style": self.style,
            "svgPath": self.svg_path,
            "pngPath": self.png_path,
            "simvecPath": self.simvec_path,
            "meta": self.meta.to_dict(),
            "qa": [item.to_dict() for item in self.qa],
            "generator": self.generator,
            "masterSeed": self.master_seed,
        }

    @staticmethod
    def from_dict(d: dict) -> "ManifestRecord":
        return ManifestRecord(
            id=d["id"], chart_type=d["chartType"], style=d["style"],
            svg_path=d["svgPath"], simvec_path=d["simvecPath"],
            meta=ChartMeta.from_dict(d["meta"]),
            qa=[QaItem.from_dict(q) for q in d["qa"]],
            png_path=d.get("pngPath"),
            generator=d.get("generator", GENERATOR),
            master_seed=d.get("masterSeed", 0))


def atomic_write_text(path: Path, text: str) -> None:
    """Write through a temp file and rename, so readers never see partials."""
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name + ".", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_manifest(records: list[ManifestRecord], path: Path) -> None:
    lines = [json.dumps(r.to_dict(), separators=(",", ":"), sort_keys=True)
             for r in records]
    atomic_write_text(Path(path), "\n".join(lines) + ("\n" if lines else ""))


def read_manifest(path: Path) -> list[ManifestRecord]:
    records = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                records.append(ManifestRecord.from_dict(json.loads(line)))
            except (json.JSONDecodeError, KeyError) as exc:
                raise ValueError(f"{path}:{lineno}: bad manifest record: {exc}") from exc
    return records


@dataclass(frozen=True)
class RasterizerAdapter:
    """External SVG rasterizer: a command template with {svg} {png} {width}
    placeholders, or an HTTP endpoint.  Optional; absence only disables
    the pngPath column."""

    command: str | None = None
    width: int = 800
    timeout: float = 60.0

    def rasterize(self, svg_path: Path, png_path: Path) -> bool:
        if not self.command:
            return False
        cmd = self.command.format(svg=str(svg_path), png=str(png_path),
                                  width=self.width)
        try:
            proc = subprocess.run(cmd, shell=True, capture_output=True,
                                  timeout=self.timeout)
        except (OSError, subprocess.TimeoutExpired):
            return False
        return proc.returncode == 0 and png_path.exists()


# ---------------------------------------------------------------------------
# Verification
# ---------------------------------------------------------------------------

_GEOMETRY_TOL = 1.0 + 1e-6


def _check_binding(meta: ChartMeta, binding, doc) -> str | None:
    if not 0 <= binding.element_index < len(doc.elements):
        return f"binding {binding.mark_id}: element index {binding.element_index} out of range"
    geo = binding.geometry
    y = meta.y_scale
    if geo["kind"] == "bar":
        extent = geo["bbox"][3]
        if abs(y.extent_of(binding.value) - extent) > _GEOMETRY_TOL:
            return (f"binding {binding.mark_id}: value {binding.value} maps to "
                    f"extent {y.extent_of(binding.value):.3f}, geometry has {extent}")
    elif geo["kind"] == "vertex":
        if abs(y.apply(binding.value) - geo["point"][1]) > _GEOMETRY_TOL:
            return (f"binding {binding.mark_id}: value {binding.value} maps to "
                    f"y {y.apply(binding.value):.3f}, geometry has {geo['point'][1]}")
    elif geo["kind"] == "band":
        extent = geo["lower"][1] - geo["upper"][1]
        if abs(y.extent_of(binding.value) - extent) > _GEOMETRY_TOL:
            return (f"binding {binding.mark_id}: value {binding.value} maps to "
                    f"extent {y.extent_of(binding.value):.3f}, geometry has {extent}")
    else:
        return f"binding {binding.mark_id}: unknown geometry kind {geo['kind']!r}"
    return None


def verify_manifest(path: Path) -> list[str]:
    """Re-validate a packaged manifest; returns a list of problems."""
    path = Path(path)
    problems: list[str] = []
    try:
        records = read_manifest(path)
    except (OSError, ValueError) as exc:
        return [str(exc)]
    seen_ids = set()
    base = path.parent
    for rec in records:
        where = f"record {rec.id}"
        if rec.id in seen_ids:
            problems.append(f"{where}: duplicate id")
        seen_ids.add(rec.id)
        svg_file = base / rec.svg_path
        simvec_file = base / rec.simvec_path
        if not svg_file.is_file():
            problems.append(f"{where}: missing SVG file {rec.svg_path}")
        if not simvec_file.is_file():
            problems.append(f"{where}: missing SimVec file {rec.simvec_path}")
            continue
        if rec.png_path and not (base / rec.png_path).is_file():
            problems.append(f"{where}: missing PNG file {rec.png_path}")
        try:
            doc = parse_simvec(simvec_file.read_text(encoding="utf-8"))
        except Exception as exc:
            problems.append(f"{where}: SimVec does not parse: {exc}")
            continue
        violations = validate(doc)
        if violations:
            problems.append(f"{where}: SimVec invalid: {violations[0]}")
        grid = set(rec.meta.table.values)
        for binding in rec.meta.bindings:
            issue = _check_binding(rec.meta, binding, doc)
            if issue:
                problems.append(f"{where}: {issue}")
        for item in rec.qa:
            t = item.target
            if item.task_kind == "retrieve-value":
                if (t.get("category"), t.get("time")) not in grid:
                    problems.append(f"{where}/{item.item_id}: key not in table")
            else:
                scope = t.get("scope", {})
                if scope.get("type") == "slice":
                    ok = scope.get("time") in rec.meta.spec.time_values
                else:
                    ok = scope.get("category") in rec.meta.spec.cat_values
                if not ok:
                    problems.append(f"{where}/{item.item_id}: scope not in table")
            if not verify_cot_arithmetic(item):
                problems.append(f"{where}/{item.item_id}: CoT arithmetic does not "
                                f"reproduce the answer")
            expected = "numeric" if item.answer_value is not None else "label"
            got = extract_final_answer(item.cot, expected, item.labels)
            want = (round(item.answer_value, 2) if item.answer_value is not None
                    else item.answer_label)
            if got != want:
                problems.append(f"{where}/{item.item_id}: final answer in CoT is "
                                f"{got!r}, expected {want!r}")
    return problems
