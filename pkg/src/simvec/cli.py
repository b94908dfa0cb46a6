"""Command-line pipeline: synth, convert, render, oldify, eval, tokens,
manifest-verify.

Exit codes: 0 ok, 1 usage, 2 validation/format failure, 3 I/O failure.
Every flag can also come from an INI config file (section named after
the subcommand); explicit flags win.
"""

from __future__ import annotations

import argparse
import configparser
import dataclasses
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import __version__
from .antiqua import PRESETS, oldify
from .core import SimVecError, count_tokens, parse_simvec, serialize_simvec, validate
from .forge import ChartError, build_chart, kind_sequence
from .ingest import IngestError, IngestOptions, ingest_svg_full
from .manifest import (
    ManifestRecord,
    RasterizerAdapter,
    atomic_write_text,
    read_manifest,
    verify_manifest,
    write_manifest,
)
from .qa import gen_qa_suite
from .recon import aggregate_reports, evaluate_reconstruction, score_qa
from .seeding import stable_hash
from .topics import TopicProviderConfig

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VALIDATION = 2
EXIT_IO = 3


class CliError(Exception):
    def __init__(self, message: str, code: int = EXIT_VALIDATION):
        super().__init__(message)
        self.code = code


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def parse_mix(text: str) -> dict[str, float]:
    """'1012:1012:975' as bar:line:area weights; 'equal' for a 1:1:1 split."""
    if text == "equal":
        return {"bar": 1.0, "line": 1.0, "area": 1.0}
    parts = text.split(":")
    if len(parts) != 3:
        raise CliError(f"--mix wants bar:line:area weights, got {text!r}", EXIT_USAGE)
    try:
        weights = [float(p) for p in parts]
    except ValueError:
        raise CliError(f"--mix weights must be numeric, got {text!r}", EXIT_USAGE) from None
    return dict(zip(("bar", "line", "area"), weights))


# ---------------------------------------------------------------------------
# synth
# ---------------------------------------------------------------------------

def _synth_worker(job: tuple) -> list[dict]:
    (master_seed, index, kind, out_dir, oldify_name, provider_cmd, provider_url,
     raster_cmd, raster_width) = job
    provider = None
    if provider_cmd or provider_url:
        provider = TopicProviderConfig(command=provider_cmd, url=provider_url)
    bundle = build_chart(master_seed, index, kind, provider)
    chart_id = f"c{index:05d}"
    charts = Path(out_dir) / "charts"
    svg_rel = f"charts/{chart_id}.svg"
    simvec_rel = f"charts/{chart_id}.simvec"
    atomic_write_text(charts / f"{chart_id}.svg", bundle.svg)
    atomic_write_text(charts / f"{chart_id}.simvec", serialize_simvec(bundle.doc))

    qa_items = gen_qa_suite(bundle.meta, stable_hash(master_seed, index, "qa"))
    for item in qa_items:
        item.item_id = f"{chart_id}:{item.item_id}"
        item.chart_type = bundle.chart_kind

    adapter = RasterizerAdapter(raster_cmd, raster_width) if raster_cmd else None
    png_rel = None
    if adapter is not None:
        png_path = charts / f"{chart_id}.png"
        if adapter.rasterize(charts / f"{chart_id}.svg", png_path):
            png_rel = f"charts/{chart_id}.png"

    record = ManifestRecord(
        id=chart_id, chart_type=bundle.meta.chart_type, style="digital",
        svg_path=svg_rel, simvec_path=simvec_rel, meta=bundle.meta,
        qa=qa_items, png_path=png_rel, master_seed=master_seed)
    records = [record]

    if oldify_name and oldify_name != "none":
        params = dataclasses.replace(
            PRESETS[oldify_name], seed=stable_hash(master_seed, index, "oldify"))
        hist_id = f"{chart_id}-hist"
        hist_rel = f"charts/{hist_id}.svg"
        atomic_write_text(charts / f"{hist_id}.svg", oldify(bundle.svg, params))
        hist_png = None
        if adapter is not None:
            png_path = charts / f"{hist_id}.png"
            if adapter.rasterize(charts / f"{hist_id}.svg", png_path):
                hist_png = f"charts/{hist_id}.png"
        hist_qa = [dataclasses.replace(
            item, item_id=item.item_id.replace(f"{chart_id}:", f"{hist_id}:", 1))
            for item in qa_items]
        records.append(ManifestRecord(
            id=hist_id, chart_type=bundle.meta.chart_type, style="historical",
            svg_path=hist_rel, simvec_path=simvec_rel, meta=bundle.meta,
            qa=hist_qa, png_path=hist_png, master_seed=master_seed))
    return [r.to_dict() for r in records]


def cmd_synth(args) -> int:
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    mix = parse_mix(args.mix)
    kinds = kind_sequence(args.n, mix)
    jobs = [(args.seed, i, kind, str(out_dir), args.oldify_preset,
             args.topic_provider_cmd, args.topic_provider_url,
             args.rasterizer_cmd, args.rasterizer_width)
            for i, kind in enumerate(kinds)]
    if args.workers > 1:
        with ProcessPoolExecutor(max_workers=args.workers) as pool:
            results = list(pool.map(_synth_worker, jobs, chunksize=16))
    else:
        results = [_synth_worker(job) for job in jobs]
    record_dicts = [d for group in results for d in group]
    lines = [json.dumps(d, separators=(",", ":"), sort_keys=True)
             for d in record_dicts]
    atomic_write_text(out_dir / "manifest.jsonl",
                      "\n".join(lines) + ("\n" if lines else ""))
    n_qa = sum(len(d["qa"]) for d in record_dicts)
    print(f"wrote {len(record_dicts)} records ({len(kinds)} charts, "
          f"{n_qa} QA items) to {out_dir / 'manifest.jsonl'}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# convert / render / oldify
# ---------------------------------------------------------------------------

def cmd_convert(args) -> int:
    svg_text = Path(args.svg).read_text(encoding="utf-8")
    result = ingest_svg_full(svg_text, IngestOptions(strict=args.strict))
    for warning in result.warnings:
        print(warning, file=sys.stderr)
    out = Path(args.out) if args.out else Path(args.svg).with_suffix(".simvec")
    atomic_write_text(out, serialize_simvec(result.doc))
    print(f"wrote {out} ({len(result.doc)} elements)")
    return EXIT_OK


def cmd_render(args) -> int:
    from .render import render_simvec_svg

    doc = parse_simvec(Path(args.simvec).read_text(encoding="utf-8"))
    violations = validate(doc)
    if violations:
        raise CliError(f"invalid SimVec: {violations[0]}")
    out = Path(args.out) if args.out else Path(args.simvec).with_suffix(".svg")
    atomic_write_text(out, render_simvec_svg(doc))
    print(f"wrote {out}")
    return EXIT_OK


def cmd_oldify(args) -> int:
    params = PRESETS[args.preset]
    overrides = {}
    for name in ("jitter_amplitude", "segment_length", "thickness_variation",
                 "tint_strength", "speckle_density", "font_name", "seed"):
        value = getattr(args, name)
        if value is not None:
            overrides[name] = value
    params = dataclasses.replace(params, **overrides)
    svg_text = Path(args.svg).read_text(encoding="utf-8")
    out = Path(args.out) if args.out else Path(args.svg).with_suffix(".old.svg")
    atomic_write_text(out, oldify(svg_text, params))
    print(f"wrote {out}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# eval / tokens / manifest-verify
# ---------------------------------------------------------------------------

def _read_predictions(path: Path, key: str, value: str) -> dict[str, str]:
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                rec = json.loads(line)
                out[str(rec[key])] = str(rec[value])
            except (json.JSONDecodeError, KeyError) as exc:
                raise CliError(f"{path}:{lineno}: bad prediction record: {exc}")
    return out


def _chart_kind(chart_type: str) -> str:
    return chart_type.split("-")[0]


def cmd_eval(args) -> int:
    from .reports import write_qa_report, write_recon_report

    records = read_manifest(Path(args.manifest))
    base = Path(args.manifest).parent
    out_dir = Path(args.out)
    if args.mode == "recon":
        preds = _read_predictions(Path(args.predictions), "chartId", "simvecText")
        unknown = set(preds) - {r.id for r in records}
        if unknown:
            raise CliError(f"predictions reference unknown charts: {sorted(unknown)[:5]}")
        per_chart = []
        tagged = []
        for rec in records:
            if rec.id not in preds:
                continue
            gt = parse_simvec((base / rec.simvec_path).read_text(encoding="utf-8"))
            pred = parse_simvec(preds[rec.id])
            report = evaluate_reconstruction(pred, gt)
            per_chart.append((rec.id, _chart_kind(rec.chart_type), report))
            tagged.append((_chart_kind(rec.chart_type), report))
        if not per_chart:
            raise CliError("no predictions matched any manifest record")
        paths = write_recon_report(per_chart, aggregate_reports(tagged), out_dir)
    else:
        preds = _read_predictions(Path(args.predictions), "itemId", "rawText")
        items = [item for rec in records for item in rec.qa]
        known = {item.item_id for item in items}
        unknown = set(preds) - known
        if unknown:
            raise CliError(f"predictions reference unknown items: {sorted(unknown)[:5]}")
        score = score_qa(list(preds.items()), items)
        paths = write_qa_report(score, out_dir)
    print("wrote " + ", ".join(str(p) for p in paths))
    return EXIT_OK


def cmd_tokens(args) -> int:
    from .reports import write_tokens_report

    records = read_manifest(Path(args.manifest))
    base = Path(args.manifest).parent
    rows = []
    for rec in records:
        svg_tokens = count_tokens((base / rec.svg_path).read_text(encoding="utf-8"))
        simvec_tokens = count_tokens((base / rec.simvec_path).read_text(encoding="utf-8"))
        rows.append((rec.id, _chart_kind(rec.chart_type), svg_tokens, simvec_tokens))
    paths = write_tokens_report(rows, Path(args.out))
    print("wrote " + ", ".join(str(p) for p in paths))
    return EXIT_OK


def cmd_manifest_verify(args) -> int:
    problems = verify_manifest(Path(args.manifest))
    if problems:
        for p in problems:
            print(p, file=sys.stderr)
        print(f"manifest verification failed with {len(problems)} problems",
              file=sys.stderr)
        return EXIT_VALIDATION
    records = read_manifest(Path(args.manifest))
    print(f"manifest ok: {len(records)} records, "
          f"{sum(len(r.qa) for r in records)} QA items")
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser wiring
# ---------------------------------------------------------------------------

def _apply_config(args: argparse.Namespace, defaults: dict) -> None:
    """Fill unset args from the INI config, then from hard defaults."""
    section = {}
    if args.config:
        cp = configparser.ConfigParser()
        read = cp.read(args.config)
        if not read:
            raise CliError(f"config file not found: {args.config}", EXIT_IO)
        if cp.has_section(args.command):
            section = dict(cp[args.command])
    for name, fallback in defaults.items():
        if getattr(args, name, None) is None:
            key = name.replace("_", "-")
            if key in section or name in section:
                raw = section.get(key, section.get(name))
                caster = type(fallback) if fallback is not None else str
                if caster is bool:
                    setattr(args, name, raw.lower() in ("1", "true", "yes", "on"))
                else:
                    setattr(args, name, caster(raw))
            else:
                setattr(args, name, fallback)


def build_parser() -> _Parser:
    parser = _Parser(prog="simvec", description=__doc__)
    parser.add_argument("--version", action="version", version=f"simvec {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("synth", help="generate a chart/QA dataset")
    p.add_argument("--n", type=int, default=None, help="number of charts")
    p.add_argument("--mix", default=None, help="bar:line:area weights, or 'equal'")
    p.add_argument("--seed", type=int, default=None, help="master seed")
    p.add_argument("--out", default=None, help="output directory")
    p.add_argument("--oldify-preset", choices=sorted(PRESETS), default=None,
                   help="also emit historical-style variants")
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--rasterizer-cmd", default=None,
                   help="command template with {svg} {png} {width} placeholders")
    p.add_argument("--rasterizer-width", type=int, default=None)
    p.add_argument("--topic-provider-cmd", default=None)
    p.add_argument("--topic-provider-url", default=None)
    p.add_argument("--config", default=None)
    p.set_defaults(func=cmd_synth, config_defaults={
        "n": 100, "mix": "equal", "seed": 0, "out": "dataset",
        "oldify_preset": "none", "workers": 1, "rasterizer_cmd": None,
        "rasterizer_width": 800, "topic_provider_cmd": None,
        "topic_provider_url": None})

    p = sub.add_parser("convert", help="compile an SVG file to SimVec")
    p.add_argument("svg")
    p.add_argument("--out", default=None)
    p.add_argument("--strict", action="store_true")
    p.add_argument("--config", default=None)
    p.set_defaults(func=cmd_convert, config_defaults={})

    p = sub.add_parser("render", help="draw a SimVec file as SVG")
    p.add_argument("simvec")
    p.add_argument("--out", default=None)
    p.add_argument("--config", default=None)
    p.set_defaults(func=cmd_render, config_defaults={})

    p = sub.add_parser("oldify", help="restyle a chart SVG as historical")
    p.add_argument("svg")
    p.add_argument("--out", default=None)
    p.add_argument("--preset", choices=sorted(PRESETS), default="historical")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--jitter-amplitude", type=float, default=None)
    p.add_argument("--segment-length", type=float, default=None)
    p.add_argument("--thickness-variation", type=float, default=None)
    p.add_argument("--tint-strength", type=float, default=None)
    p.add_argument("--speckle-density", type=float, default=None)
    p.add_argument("--font-name", default=None)
    p.add_argument("--config", default=None)
    p.set_defaults(func=cmd_oldify, config_defaults={})

    p = sub.add_parser("eval", help="score predictions against a manifest")
    p.add_argument("--manifest", required=True)
    p.add_argument("--predictions", required=True)
    p.add_argument("--mode", choices=("recon", "qa"), required=True)
    p.add_argument("--out", default=None)
    p.add_argument("--config", default=None)
    p.set_defaults(func=cmd_eval, config_defaults={"out": "reports"})

    p = sub.add_parser("tokens", help="token compactness report for a manifest")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", default=None)
    p.add_argument("--config", default=None)
    p.set_defaults(func=cmd_tokens, config_defaults={"out": "reports"})

    p = sub.add_parser("manifest-verify", help="re-validate a packaged manifest")
    p.add_argument("manifest")
    p.add_argument("--config", default=None)
    p.set_defaults(func=cmd_manifest_verify, config_defaults={})

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        _apply_config(args, args.config_defaults)
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except (SimVecError, IngestError, ChartError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
