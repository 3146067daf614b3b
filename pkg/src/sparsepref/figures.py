"""Figure rendering for trial reports.

Written alongside the delimited output by ``emit_report``. When the metric
rows vary along one of n, d, d_int, q, or K, each chart plots the metric
against that axis; a single row degrades to a labeled bar.
"""

from __future__ import annotations

import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .harness import Metrics

_METRICS = [
    ("mean_regret", "mean regret ratio"),
    ("mean_questions", "mean questions asked"),
    ("mean_time_s", "mean execution time (s)"),
    ("outperformance_rate", "outperformance rate"),
]
_AXES = ["n", "d", "d_int", "q", "K"]


def _sweep_axis(rows: list[Metrics]) -> str | None:
    for axis in _AXES:
        vals = {getattr(m, axis) for m in rows}
        if len(vals) == len(rows) and len(rows) > 1:
            return axis
    return None


def render_metric_figures(rows: list[Metrics], out_dir) -> list[str]:
    axis = _sweep_axis(rows)
    paths = []
    for attr, label in _METRICS:
        fig, ax = plt.subplots(figsize=(4.5, 3.2))
        if axis:
            ordered = sorted(rows, key=lambda m: getattr(m, axis))
            xs = [getattr(m, axis) for m in ordered]
            ys = [getattr(m, attr) for m in ordered]
            ax.plot(xs, ys, marker="o")
            ax.set_xlabel(axis)
        else:
            xs = range(len(rows))
            ax.bar(list(xs), [getattr(m, attr) for m in rows])
            ax.set_xticks(list(xs))
            ax.set_xticklabels([f"{m.mode} d={m.d}" for m in rows], rotation=30)
        ax.set_ylabel(label)
        ax.grid(True, alpha=0.3)
        fig.tight_layout()
        path = os.path.join(out_dir, f"{attr}.png")
        fig.savefig(path, dpi=120)
        plt.close(fig)
        paths.append(path)
    return paths
