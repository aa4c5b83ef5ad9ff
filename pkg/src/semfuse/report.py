"""Evaluation reports: JSON lines plus rendered summary figures.

Per-utterance records carry the raw metric values; a final summary
record reports each metric as "mean ± std". The figure renderer writes
static PNGs next to the report so a batch run leaves both a
machine-readable file and something a human can glance at.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np


def format_mean_std(mean: float, std: float, digits: int = 2) -> str:
    """Table-style "m ± s" formatting, e.g. 7.32 ± 0.61."""
    return f"{mean:.{digits}f} ± {std:.{digits}f}"


def summarize(rows: list[dict], metric_names=("mcd", "cer", "wer")) -> dict:
    """Summary record over successful rows: count, skips, and m ± s per metric."""
    good = [r for r in rows if "error" not in r]
    summary = {
        "summary": True,
        "count": len(good),
        "skipped": len(rows) - len(good),
    }
    for name in metric_names:
        values = np.array([r[name] for r in good if name in r], dtype=np.float64)
        if values.size == 0:
            continue
        mean = float(values.mean())
        std = float(values.std(ddof=1)) if values.size > 1 else 0.0
        summary[name] = format_mean_std(mean, std)
        summary[f"{name}_mean"] = mean
        summary[f"{name}_std"] = std
    return summary


def write_report(rows: list[dict], path, metric_names=("mcd", "cer", "wer")) -> dict:
    """Write per-utterance lines then the summary line; returns the summary."""
    summary = summarize(rows, metric_names)
    with open(path, "w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(json.dumps(row, ensure_ascii=False) + "\n")
        fh.write(json.dumps(summary, ensure_ascii=False) + "\n")
    return summary


def render_report_figures(rows: list[dict], out_dir, metric_names=("mcd", "cer", "wer")) -> list:
    """Render one bar chart per metric into ``out_dir``; returns written paths."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    good = [r for r in rows if "error" not in r]
    written = []
    for name in metric_names:
        ids = [r["utt_id"] for r in good if name in r]
        values = [r[name] for r in good if name in r]
        if not values:
            continue
        fig, ax = plt.subplots(figsize=(max(4.0, 0.6 * len(ids)), 3.2))
        ax.bar(range(len(values)), values, color="#4878a8")
        ax.set_xticks(range(len(ids)))
        ax.set_xticklabels(ids, rotation=45, ha="right", fontsize=8)
        ax.set_ylabel(name.upper())
        mean = float(np.mean(values))
        ax.axhline(mean, color="#a84848", linewidth=1, linestyle="--", label=f"mean {mean:.3g}")
        ax.legend(fontsize=8)
        fig.tight_layout()
        target = out_dir / f"{name}_by_utterance.png"
        fig.savefig(target, dpi=120)
        plt.close(fig)
        written.append(target)
    return written
