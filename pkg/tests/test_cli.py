import json
from pathlib import Path

from simvec.cli import main, parse_mix
from simvec.core import parse_simvec, validate
from simvec.ingest import ingest_svg
from simvec.manifest import read_manifest, verify_manifest
from simvec.render import render_simvec_svg

import random

from conftest import random_doc


def run(*argv) -> int:
    return main([str(a) for a in argv])


def synth(tmp_path: Path, *extra, n=6, seed=5) -> Path:
    out = tmp_path / "ds"
    code = run("synth", "--n", n, "--seed", seed, "--out", out, *extra)
    assert code == 0
    return out / "manifest.jsonl"


class TestSynth:
    def test_writes_expected_records(self, tmp_path):
        manifest = synth(tmp_path)
        records = read_manifest(manifest)
        assert len(records) == 6
        kinds = [r.chart_type.split("-")[0] for r in records]
        assert kinds.count("bar") == kinds.count("line") == kinds.count("area") == 2
        for rec in records:
            assert (manifest.parent / rec.svg_path).is_file()
            doc = parse_simvec(
                (manifest.parent / rec.simvec_path).read_text(encoding="utf-8"))
            assert validate(doc) == []

    def test_manifest_verifies(self, tmp_path):
        manifest = synth(tmp_path)
        assert verify_manifest(manifest) == []
        assert run("manifest-verify", manifest) == 0

    def test_oldify_preset_doubles_records(self, tmp_path):
        manifest = synth(tmp_path, "--oldify-preset", "historical")
        records = read_manifest(manifest)
        assert len(records) == 12
        styles = [r.style for r in records]
        assert styles.count("digital") == styles.count("historical") == 6
        hist = [r for r in records if r.style == "historical"]
        for rec in hist:
            assert rec.id.endswith("-hist")
            # shares the clean ground truth
            assert rec.simvec_path == rec.id.replace("-hist", "").join(
                ["charts/", ".simvec"])
        assert verify_manifest(manifest) == []

    def test_deterministic_across_worker_counts(self, tmp_path):
        m1 = synth(tmp_path / "a", "--workers", 1, n=8)
        m2 = synth(tmp_path / "b", "--workers", 3, n=8)
        assert m1.read_text() == m2.read_text()
        for rel in ("charts/c00003.svg", "charts/c00003.simvec"):
            assert (m1.parent / rel).read_bytes() == (m2.parent / rel).read_bytes()

    def test_rasterizer_adapter_invoked(self, tmp_path):
        stub = tmp_path / "raster.py"
        stub.write_text(
            "import sys, pathlib\n"
            "svg, png, width = sys.argv[1:4]\n"
            "assert pathlib.Path(svg).exists() and width == '640'\n"
            "pathlib.Path(png).write_bytes(b'PNGSTUB')\n")
        manifest = synth(
            tmp_path, "--rasterizer-cmd", f"python3 {stub} {{svg}} {{png}} {{width}}",
            "--rasterizer-width", 640, n=2)
        records = read_manifest(manifest)
        assert all(r.png_path for r in records)
        assert (manifest.parent / records[0].png_path).read_bytes() == b"PNGSTUB"
        assert verify_manifest(manifest) == []

    def test_topic_provider_cmd(self, tmp_path):
        record = {
            "topic": "stub-topic", "title": "Stub Topic",
            "categorical": {"name": "Kind", "values": ["A", "B", "C"]},
            "temporal": {"name": "Step", "values": ["1", "2", "3", "4"]},
            "quantitative": {"name": "score", "unit": "pts",
                             "mode": "absolute", "range": [5.0, 50.0]},
        }
        stub = tmp_path / "prov.py"
        stub.write_text("import json,sys\njson.load(sys.stdin)\n"
                        f"print(json.dumps({record!r}))\n")
        manifest = synth(tmp_path, "--topic-provider-cmd", f"python3 {stub}", n=2)
        records = read_manifest(manifest)
        assert all(r.meta.spec.topic == "stub-topic" for r in records)
        assert verify_manifest(manifest) == []

    def test_config_file_with_flag_override(self, tmp_path):
        cfg = tmp_path / "simvec.ini"
        cfg.write_text("[synth]\nn = 3\nseed = 9\nmix = equal\n"
                       f"out = {tmp_path / 'from-config'}\n")
        assert run("synth", "--config", cfg) == 0
        assert len(read_manifest(tmp_path / "from-config" / "manifest.jsonl")) == 3
        # flag overrides config
        assert run("synth", "--config", cfg, "--n", 2,
                   "--out", tmp_path / "flag-wins") == 0
        assert len(read_manifest(tmp_path / "flag-wins" / "manifest.jsonl")) == 2


class TestConvertRender:
    def test_convert_chart_svg(self, tmp_path):
        manifest = synth(tmp_path, n=2)
        svg = manifest.parent / "charts" / "c00000.svg"
        out = tmp_path / "converted.simvec"
        assert run("convert", svg, "--out", out) == 0
        direct = (manifest.parent / "charts" / "c00000.simvec").read_text()
        converted = out.read_text()
        a, b = parse_simvec(converted), parse_simvec(direct)
        assert len(a) == len(b)

    def test_render_ingest_round_trip_table1(self, tmp_path):
        text = ('{text "Title" [100, 50, 200, 30] hsl (0, 0, 18)}\n'
                "{rect [100, 100, 50, 150] hsl (10, 15, 12)}\n"
                "{line [(0, 0), (100, 100)] hsl (0, 0, 5)}\n"
                "{polygon [(0, 0), (50, 50), (100, 0)] hsl (5, 10, 15)}\n")
        src = tmp_path / "doc.simvec"
        src.write_text(text)
        out = tmp_path / "doc.svg"
        assert run("render", src, "--out", out) == 0
        svg = out.read_text()
        for tag in ("<text", "<rect", "<polyline", "<polygon"):
            assert svg.count(tag) == 1
        assert ingest_svg(svg) == parse_simvec(text)

    def test_render_empty_doc(self, tmp_path):
        src = tmp_path / "empty.simvec"
        src.write_text("")
        out = tmp_path / "empty.svg"
        assert run("render", src, "--out", out) == 0
        assert ingest_svg(out.read_text()).elements == ()

    def test_render_round_trip_random_docs(self):
        rng = random.Random(99)
        for _ in range(25):
            doc = random_doc(rng)
            assert ingest_svg(render_simvec_svg(doc)) == doc

    def test_convert_viewport_only_svg_is_empty_doc(self, tmp_path):
        src = tmp_path / "blank.svg"
        src.write_text('<svg xmlns="http://www.w3.org/2000/svg" '
                       'width="200" height="100"/>')
        out = tmp_path / "blank.simvec"
        assert run("convert", src, "--out", out) == 0
        assert out.read_text() == ""

    def test_convert_malformed_exits_2(self, tmp_path):
        bad = tmp_path / "bad.svg"
        bad.write_text("<svg><rect</svg>")
        assert run("convert", bad) == 2

    def test_missing_file_exits_3(self, tmp_path):
        assert run("convert", tmp_path / "missing.svg") == 3

    def test_usage_error_exits_1(self):
        assert run("no-such-command") == 1
        assert run("eval", "--manifest", "x") == 1  # missing required flags


class TestOldifyCommand:
    def test_oldify_to_file(self, tmp_path):
        manifest = synth(tmp_path, n=2)
        svg = manifest.parent / "charts" / "c00001.svg"
        out = tmp_path / "old.svg"
        assert run("oldify", svg, "--out", out, "--preset", "historical",
                   "--seed", 3) == 0
        assert "paper-speckles" in out.read_text()

    def test_override_flags(self, tmp_path):
        manifest = synth(tmp_path, n=2)
        svg = manifest.parent / "charts" / "c00001.svg"
        out = tmp_path / "old.svg"
        assert run("oldify", svg, "--out", out, "--preset", "historical",
                   "--speckle-density", 0, "--tint-strength", 0) == 0
        assert "paper-speckles" not in out.read_text()


class TestEvalAndTokens:
    def test_recon_eval_perfect_on_ground_truth(self, tmp_path):
        manifest = synth(tmp_path, n=3)
        preds = tmp_path / "preds.jsonl"
        with preds.open("w") as fh:
            for rec in read_manifest(manifest):
                text = (manifest.parent / rec.simvec_path).read_text()
                fh.write(json.dumps({"chartId": rec.id, "simvecText": text}) + "\n")
        out = tmp_path / "reports"
        assert run("eval", "--manifest", manifest, "--predictions", preds,
                   "--mode", "recon", "--out", out) == 0
        tsv = (out / "recon_report.tsv").read_text().splitlines()
        summary = [l for l in tsv if l.startswith("summary:overall")][0]
        cells = summary.split("\t")
        assert cells[2] == "1.0" and cells[3] == "1.0"
        assert float(cells[4]) == 0.0
        assert (out / "recon_report.txt").exists()
        assert (out / "recon_report.png").stat().st_size > 500

    def test_qa_eval_on_ground_truth_answers(self, tmp_path):
        manifest = synth(tmp_path, n=3)
        preds = tmp_path / "qa_preds.jsonl"
        with preds.open("w") as fh:
            for rec in read_manifest(manifest):
                for item in rec.qa:
                    fh.write(json.dumps({
                        "itemId": item.item_id,
                        "rawText": f"I think the answer is {item.answer}."}) + "\n")
        out = tmp_path / "reports"
        assert run("eval", "--manifest", manifest, "--predictions", preds,
                   "--mode", "qa", "--out", out) == 0
        txt = (out / "qa_report.txt").read_text()
        assert "100.00%" in txt
        assert (out / "qa_report.png").stat().st_size > 500

    def test_eval_unknown_chart_rejected(self, tmp_path):
        manifest = synth(tmp_path, n=2)
        preds = tmp_path / "preds.jsonl"
        preds.write_text(json.dumps({"chartId": "ghost", "simvecText": ""}) + "\n")
        assert run("eval", "--manifest", manifest, "--predictions", preds,
                   "--mode", "recon", "--out", tmp_path / "r") == 2

    def test_tokens_report(self, tmp_path):
        manifest = synth(tmp_path, n=4)
        out = tmp_path / "reports"
        assert run("tokens", "--manifest", manifest, "--out", out) == 0
        lines = (out / "tokens_report.tsv").read_text().splitlines()
        assert len(lines) == 5
        for line in lines[1:]:
            reduction = float(line.split("\t")[4])
            assert reduction >= 0.8
        assert "median reduction" in (out / "tokens_report.txt").read_text()
        assert (out / "tokens_report.png").stat().st_size > 500

    def test_tokens_deterministic(self, tmp_path):
        manifest = synth(tmp_path, n=2)
        out1, out2 = tmp_path / "r1", tmp_path / "r2"
        assert run("tokens", "--manifest", manifest, "--out", out1) == 0
        assert run("tokens", "--manifest", manifest, "--out", out2) == 0
        assert ((out1 / "tokens_report.tsv").read_text()
                == (out2 / "tokens_report.tsv").read_text())

    def test_empty_manifest_tokens(self, tmp_path):
        manifest = tmp_path / "manifest.jsonl"
        manifest.write_text("")
        out = tmp_path / "reports"
        assert run("tokens", "--manifest", manifest, "--out", out) == 0
        assert (out / "tokens_report.tsv").read_text().startswith("chartId")


class TestManifestVerify:
    def test_detects_missing_file(self, tmp_path):
        manifest = synth(tmp_path, n=2)
        (manifest.parent / "charts" / "c00001.svg").unlink()
        problems = verify_manifest(manifest)
        assert any("missing SVG" in p for p in problems)
        assert run("manifest-verify", manifest) == 2

    def test_detects_corrupt_simvec(self, tmp_path):
        manifest = synth(tmp_path, n=2)
        (manifest.parent / "charts" / "c00000.simvec").write_text("{rect oops}")
        problems = verify_manifest(manifest)
        assert any("does not parse" in p for p in problems)

    def test_detects_tampered_answer(self, tmp_path):
        manifest = synth(tmp_path, n=1)
        lines = manifest.read_text().splitlines()
        record = json.loads(lines[0])
        record["qa"][0]["answerValue"] = 12345.0
        manifest.write_text(json.dumps(record) + "\n")
        problems = verify_manifest(manifest)
        assert any("CoT arithmetic" in p or "final answer" in p for p in problems)

    def test_detects_duplicate_ids(self, tmp_path):
        manifest = synth(tmp_path, n=1)
        line = manifest.read_text().strip()
        manifest.write_text(line + "\n" + line + "\n")
        assert any("duplicate id" in p for p in verify_manifest(manifest))


def test_parse_mix_forms():
    assert parse_mix("equal") == {"bar": 1.0, "line": 1.0, "area": 1.0}
    assert parse_mix("1012:1012:975") == {"bar": 1012.0, "line": 1012.0,
                                          "area": 975.0}
