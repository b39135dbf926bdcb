"""Matplotlib renderings written next to the delimited report output."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def render_f1_histogram(model_f1s: list[float], path, title: str = "Per-question F1") -> Path:
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.hist(model_f1s, bins=20, range=(0.0, 1.0), color="#4878a8", edgecolor="white")
    ax.set_xlabel("token F1")
    ax.set_ylabel("questions")
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return Path(path)


def render_aggregate_bars(aggregates: dict, path, title: str = "Aggregates (%)") -> Path:
    labels = ["F1", "HEQ-Q", "HEQ-D"]
    values = [aggregates["f1"], aggregates["heq_q"], aggregates["heq_d"]]
    fig, ax = plt.subplots(figsize=(5, 4))
    bars = ax.bar(labels, values, color=["#4878a8", "#6aa84f", "#b45f06"])
    ax.bar_label(bars, fmt="%.1f")
    ax.set_ylim(0, 105)
    ax.set_ylabel("percent")
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return Path(path)


def render_ablation_bars(rows: list[tuple[str, float]], path,
                         title: str = "SR slot ablation (F1 %)") -> Path:
    """Three labeled bars: full SR and the two slot-removed variants."""
    labels = [label for label, _ in rows]
    values = [f1 for _, f1 in rows]
    fig, ax = plt.subplots(figsize=(6, 4))
    bars = ax.bar(labels, values, color="#4878a8")
    ax.bar_label(bars, fmt="%.1f")
    ax.set_ylabel("F1 (%)")
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return Path(path)


def render_stats_bars(rows: list[dict], path,
                      title: str = "Question statistics by method") -> Path:
    """Grouped bars of avg length / pronouns / proper nouns per method, with
    the F1 column annotated in the legend labels."""
    metrics = [("avg_length", "Avg Length"), ("avg_pronouns", "Pronoun"),
               ("avg_proper_nouns", "Proper Noun")]
    fig, ax = plt.subplots(figsize=(7, 4))
    width = 0.8 / max(1, len(rows))
    for i, row in enumerate(rows):
        xs = [j + i * width for j in range(len(metrics))]
        label = row["method"]
        if row.get("f1") is not None:
            label += f" (F1 {row['f1']:.1f})"
        ax.bar(xs, [row[key] for key, _ in metrics], width=width, label=label)
    ax.set_xticks([j + 0.4 - width / 2 for j in range(len(metrics))])
    ax.set_xticklabels([name for _, name in metrics])
    ax.set_title(title)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return Path(path)
