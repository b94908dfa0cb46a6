"""Evaluation reports: TSV for machines, aligned text for eyes, PNG figures.

Every report path writes three artifacts side by side: a tab-separated
table, a fixed-width plain-text rendering, and a matplotlib figure.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .manifest import atomic_write_text
from .recon import QaScore

CHART_TYPE_ORDER = ("line", "bar", "area")

RECON_ROWS = (
    ("text_hit_rate", "Text Hit Rate", "pct"),
    ("text_similarity", "Text Similarity", "pct"),
    ("text_center_distance", "Text Center Distance", "dist"),
    ("element_color_distance", "Element Color Distance", "dist"),
    ("element_position_distance", "Element Position Distance", "dist"),
)


def _fmt_cell(value, style: str) -> str:
    if value is None:
        return "-"
    if style == "pct":
        return f"{value * 100:.2f}%"
    return f"{value:.2f}"


def _aligned_table(header: list[str], rows: list[list[str]]) -> str:
    widths = [max(len(header[i]), *(len(r[i]) for r in rows)) if rows else len(header[i])
              for i in range(len(header))]
    def line(cells, pad=" "):
        return "  ".join(c.ljust(w) if i == 0 else c.rjust(w)
                         for i, (c, w) in enumerate(zip(cells, widths)))
    sep = "-" * (sum(widths) + 2 * (len(widths) - 1))
    return "\n".join([line(header), sep] + [line(r) for r in rows]) + "\n"


def _column_tags(aggregated: dict) -> list[str]:
    tags = [t for t in CHART_TYPE_ORDER if t in aggregated]
    tags += sorted(t for t in aggregated if t not in tags and t != "overall")
    if "overall" in aggregated:
        tags.append("overall")
    return tags


def write_recon_report(per_chart: list[tuple[str, str, object]],
                       aggregated: dict, out_dir: Path) -> list[Path]:
    """per_chart rows are (chart id, chart type, ReconReport)."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    tags = _column_tags(aggregated)

    tsv_lines = ["chartId\tchartType\t" + "\t".join(k for k, _, _ in RECON_ROWS)]
    for chart_id, chart_type, rep in per_chart:
        cells = [str(getattr(rep, k)) if getattr(rep, k) is not None else ""
                 for k, _, _ in RECON_ROWS]
        tsv_lines.append(f"{chart_id}\t{chart_type}\t" + "\t".join(cells))
    tsv_lines.append("")
    for tag in tags:
        agg = aggregated[tag]
        cells = [str(agg[k]) if agg[k] is not None else "" for k, _, _ in RECON_ROWS]
        tsv_lines.append(f"summary:{tag}\t{agg['charts']}\t" + "\t".join(cells))
    tsv_path = out_dir / "recon_report.tsv"
    atomic_write_text(tsv_path, "\n".join(tsv_lines) + "\n")

    header = ["Index"] + [t.capitalize() for t in tags]
    rows = []
    for key, label, style in RECON_ROWS:
        rows.append([label] + [_fmt_cell(aggregated[t][key], style) for t in tags])
    txt_path = out_dir / "recon_report.txt"
    atomic_write_text(txt_path, "Reconstruction quality by chart type "
                      "(distances in 1/1000 of image size)\n\n"
                      + _aligned_table(header, rows))

    fig, axes = plt.subplots(1, 2, figsize=(10, 4))
    plot_tags = [t for t in tags if t != "overall"] or tags
    x = range(len(plot_tags))
    for key, label, style in RECON_ROWS[:2]:
        vals = [(aggregated[t][key] or 0) * 100 for t in plot_tags]
        axes[0].plot(x, vals, marker="o", label=label)
    axes[0].set_xticks(list(x), [t.capitalize() for t in plot_tags])
    axes[0].set_ylabel("%")
    axes[0].set_ylim(0, 105)
    axes[0].set_title("Text recovery")
    axes[0].legend(fontsize=8)
    width = 0.25
    for off, (key, label, style) in enumerate(RECON_ROWS[2:]):
        vals = [aggregated[t][key] or 0 for t in plot_tags]
        axes[1].bar([i + (off - 1) * width for i in x], vals, width, label=label)
    axes[1].set_xticks(list(x), [t.capitalize() for t in plot_tags])
    axes[1].set_ylabel("distance (1/1000 image)")
    axes[1].set_title("Spatial and color error")
    axes[1].legend(fontsize=8)
    fig.tight_layout()
    png_path = out_dir / "recon_report.png"
    fig.savefig(png_path, dpi=120)
    plt.close(fig)
    return [tsv_path, txt_path, png_path]


def write_qa_report(score: QaScore, out_dir: Path) -> list[Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    thresholds = score.thresholds
    tags = [t for t in CHART_TYPE_ORDER if t in score.per_type]
    tags += sorted(t for t in score.per_type if t not in tags)

    tsv_lines = ["group\t" + "\t".join(f"lt_{int(t * 100)}pct" for t in thresholds)]
    for tag in tags + ["overall"]:
        accs = score.per_type.get(tag, score.overall)
        tsv_lines.append(tag + "\t" + "\t".join(str(accs[t]) for t in thresholds))
    tsv_path = out_dir / "qa_report.tsv"
    atomic_write_text(tsv_path, "\n".join(tsv_lines) + "\n")

    header = ["Group"] + [f"< {int(t * 100)}%" for t in thresholds]
    rows = []
    for tag in tags:
        rows.append([tag.capitalize()]
                    + [f"{score.per_type[tag][t] * 100:.2f}%" for t in thresholds])
    rows.append(["Overall"] + [f"{score.overall[t] * 100:.2f}%" for t in thresholds])
    txt_path = out_dir / "qa_report.txt"
    atomic_write_text(txt_path,
                      f"QA accuracy at deviation thresholds "
                      f"({score.total} items, {score.unanswerable} unanswerable)\n\n"
                      + _aligned_table(header, rows))

    fig, ax = plt.subplots(figsize=(7, 4))
    groups = tags + ["overall"]
    width = 0.8 / len(thresholds)
    for k, t in enumerate(thresholds):
        vals = [(score.per_type.get(g, score.overall))[t] * 100 for g in groups]
        ax.bar([i + k * width for i in range(len(groups))], vals, width,
               label=f"< {int(t * 100)}%")
    ax.set_xticks([i + width for i in range(len(groups))],
                  [g.capitalize() for g in groups])
    ax.set_ylabel("accuracy (%)")
    ax.set_ylim(0, 105)
    ax.set_title("QA accuracy by deviation threshold")
    ax.legend()
    fig.tight_layout()
    png_path = out_dir / "qa_report.png"
    fig.savefig(png_path, dpi=120)
    plt.close(fig)
    return [tsv_path, txt_path, png_path]


def write_tokens_report(rows: list[tuple[str, str, int, int]],
                        out_dir: Path) -> list[Path]:
    """rows are (chart id, chart type, svg tokens, simvec tokens)."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    tsv_lines = ["chartId\tchartType\tsvgTokens\tsimvecTokens\treduction"]
    reductions = []
    for chart_id, chart_type, svg_tokens, simvec_tokens in rows:
        reduction = 1.0 - simvec_tokens / svg_tokens if svg_tokens else 0.0
        reductions.append(reduction)
        tsv_lines.append(f"{chart_id}\t{chart_type}\t{svg_tokens}\t"
                         f"{simvec_tokens}\t{reduction:.6f}")
    tsv_path = out_dir / "tokens_report.tsv"
    atomic_write_text(tsv_path, "\n".join(tsv_lines) + "\n")

    if reductions:
        ordered = sorted(reductions)
        median = ordered[len(ordered) // 2]
        mean = sum(reductions) / len(reductions)
        lo, hi = ordered[0], ordered[-1]
    else:
        median = mean = lo = hi = 0.0
    txt = (f"Token compactness over {len(rows)} charts\n\n"
           f"  median reduction  {median * 100:.2f}%\n"
           f"  mean reduction    {mean * 100:.2f}%\n"
           f"  min / max         {lo * 100:.2f}% / {hi * 100:.2f}%\n")
    txt_path = out_dir / "tokens_report.txt"
    atomic_write_text(txt_path, txt)

    fig, ax = plt.subplots(figsize=(7, 4))
    if reductions:
        ax.hist([r * 100 for r in reductions], bins=30, color="#4878a8",
                edgecolor="white")
        ax.axvline(median * 100, color="#c44e52", linestyle="--",
                   label=f"median {median * 100:.1f}%")
        ax.legend()
    ax.set_xlabel("token reduction (%)")
    ax.set_ylabel("charts")
    ax.set_title("SVG to SimVec token reduction")
    fig.tight_layout()
    png_path = out_dir / "tokens_report.png"
    fig.savefig(png_path, dpi=120)
    plt.close(fig)
    return [tsv_path, txt_path, png_path]
