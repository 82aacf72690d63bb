"""Chart rendering for sweep tables and single-run reports.

All charts are written as SVG so diffs stay readable and no display is
needed; matplotlib runs on the Agg backend.
"""

import csv
from collections import defaultdict
from pathlib import Path

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

METRIC_COLUMNS = ("of_snd_dlv", "of_snd_blc", "of_eds_dlv", "of_eds_blc",
                  "of_ord_dlv", "of_ord_blc")


def read_table(csv_path) -> list:
    with open(csv_path, newline="") as fh:
        return list(csv.DictReader(fh))


def _as_number(raw: str):
    if raw is None or raw == "":
        return None
    if raw in ("true", "false"):
        return 1.0 if raw == "true" else 0.0
    try:
        return float(raw)
    except ValueError:
        return None


def aggregate(table, x: str, y: str, group=None) -> dict:
    """Mean of `y` over seeds for each (group value, x value).

    Returns {group_label: (xs, ys)} with xs sorted; rows whose y cell is
    empty (failed runs) are skipped.
    """
    buckets = defaultdict(list)
    for row in table:
        value = _as_number(row.get(y, ""))
        if value is None:
            continue
        key = row.get(group, "") if group else ""
        buckets[(key, row[x])].append(value)
    series = defaultdict(dict)
    for (key, xval), values in buckets.items():
        series[key][xval] = sum(values) / len(values)
    out = {}
    for key, points in series.items():
        def sort_key(v):
            num = _as_number(v)
            return (0, num, v) if num is not None else (1, 0.0, v)
        xs = sorted(points, key=sort_key)
        out[key] = (xs, [points[v] for v in xs])
    return out


def plot_metric(table, x: str, y: str, group, out_path) -> Path:
    """Line chart of one column against one axis, one line per group value."""
    fig, ax = plt.subplots(figsize=(6, 4))
    for label, (xs, ys) in sorted(aggregate(table, x, y, group).items()):
        name = f"{group}={label}" if group else y
        ax.plot(range(len(xs)), ys, marker="o", label=name)
        ax.set_xticks(range(len(xs)), xs)
    ax.set_xlabel(x)
    ax.set_ylabel(y)
    ax.set_title(f"{y} vs {x}")
    ax.grid(True, alpha=0.3)
    if group:
        ax.legend(fontsize=8)
    out_path = Path(out_path)
    fig.tight_layout()
    fig.savefig(out_path)
    plt.close(fig)
    return out_path


def plot_sweep_grid(table, x: str, group, out_path) -> Path:
    """3x2 panel chart: all six order-fairness columns against one axis."""
    fig, axes = plt.subplots(3, 2, figsize=(10, 10), sharex=True)
    for ax, column in zip(axes.flat, METRIC_COLUMNS):
        for label, (xs, ys) in sorted(aggregate(table, x, column, group).items()):
            ax.plot(range(len(xs)), ys, marker="o", markersize=3,
                    label=f"{group}={label}" if group else column)
            ax.set_xticks(range(len(xs)), xs)
        ax.set_title(column, fontsize=10)
        ax.grid(True, alpha=0.3)
    for ax in axes[-1]:
        ax.set_xlabel(x)
    if group:
        axes[0][0].legend(fontsize=7)
    out_path = Path(out_path)
    fig.tight_layout()
    fig.savefig(out_path)
    plt.close(fig)
    return out_path


def plot_run_report(report, out_path) -> Path:
    """Bar chart of the six violation counts from a single run."""
    counts = [getattr(report, c) for c in METRIC_COLUMNS]
    fig, ax = plt.subplots(figsize=(7, 4))
    bars = ax.bar(range(len(METRIC_COLUMNS)), counts, color="#4878a8")
    ax.set_xticks(range(len(METRIC_COLUMNS)), METRIC_COLUMNS,
                  rotation=20, ha="right", fontsize=8)
    ax.set_ylabel("violation count")
    title = "order-fairness violations"
    if report.score_target is not None:
        title += f" (target score {float(report.score_target):.3f})"
    ax.set_title(title)
    ax.bar_label(bars, fontsize=8)
    out_path = Path(out_path)
    fig.tight_layout()
    fig.savefig(out_path)
    plt.close(fig)
    return out_path


def plot_endorsement_theory(n: int, q: int, b_values, out_path,
                            samples: int = 101) -> Path:
    """Endorsement probability against solve-race odds, one curve per b."""
    from .endorsing import endorsement_probability

    xs = [i / (samples - 1) for i in range(samples)]
    fig, ax = plt.subplots(figsize=(6, 4))
    for b in b_values:
        ys = [endorsement_probability(n, b, q, x) for x in xs]
        ax.plot(xs, ys, label=f"b={b}")
    ax.set_xlabel("per-peer win probability x")
    ax.set_ylabel(f"P(at least {q} of the honest peers endorse)")
    ax.set_title(f"endorsement probability, n={n}, q={q}")
    ax.grid(True, alpha=0.3)
    ax.legend(fontsize=8)
    out_path = Path(out_path)
    fig.tight_layout()
    fig.savefig(out_path)
    plt.close(fig)
    return out_path
