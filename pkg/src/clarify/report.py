"""Text tables and PNG figures for simulation and reward runs.

Figures use the Agg backend with PNG metadata stripped, so identical inputs
give byte-identical files.
"""

from __future__ import annotations

import math
from collections import Counter
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .simulator import QUERY_TYPES, MetricsReport, score  # noqa: E402

_PNG_META = {"Software": None}


def by_query_type(traces, scenarios) -> dict:
    """One MetricsReport per query type present, in the usual order."""
    out = {}
    for qtype in QUERY_TYPES:
        idx = [i for i, sc in enumerate(scenarios) if sc.query_type == qtype]
        if idx:
            out[qtype] = score([traces[i] for i in idx], [scenarios[i] for i in idx])
    return out


def summary_table(overall: MetricsReport, per_type: dict) -> str:
    cols = ("scenarios", "coverage", "tool", "param", "avg_q")
    rows = [("all", overall), *per_type.items()]
    width = max(len(name) for name, _ in rows)
    lines = [" ".join([" " * width, *(c.rjust(9) for c in cols)])]
    for name, rep in rows:
        vals = (
            f"{len(rep.scenarios)}",
            f"{rep.coverage:.4f}",
            f"{rep.tool_match_rate:.4f}",
            f"{rep.param_match_rate:.4f}",
            f"{rep.avg_questions:.4f}",
        )
        lines.append(" ".join([name.ljust(width), *(v.rjust(9) for v in vals)]))
    return "\n".join(lines) + "\n"


def status_counts(report: MetricsReport) -> Counter:
    return Counter(s for m in report.scenarios for s in m.statuses)


def _save(fig, path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, format="png", dpi=100, metadata=_PNG_META)
    plt.close(fig)
    return path


def metrics_figure(per_type: dict, path) -> Path:
    """Grouped bars of coverage and match rates per query type."""
    names = list(per_type)
    series = [
        ("coverage", [per_type[n].coverage for n in names]),
        ("tool match", [per_type[n].tool_match_rate for n in names]),
        ("param match", [per_type[n].param_match_rate for n in names]),
    ]
    fig, ax = plt.subplots(figsize=(6, 3.5))
    w = 0.8 / len(series)
    for j, (label, vals) in enumerate(series):
        ax.bar([i + j * w for i in range(len(names))], vals, w, label=label)
    ax.set_xticks([i + w for i in range(len(names))], names)
    ax.set_ylim(0, 1.05)
    ax.set_ylabel("rate")
    ax.legend(loc="lower right", fontsize=8)
    fig.tight_layout()
    return _save(fig, Path(path))


def questions_figure(per_type: dict, path) -> Path:
    """Histogram of questions asked per scenario, one series per query type."""
    fig, ax = plt.subplots(figsize=(6, 3.5))
    top = max((m.questions for r in per_type.values() for m in r.scenarios), default=0)
    bins = [b - 0.5 for b in range(top + 2)]
    for name, rep in per_type.items():
        ax.hist([m.questions for m in rep.scenarios], bins=bins, alpha=0.6, label=name)
    ax.set_xlabel("questions asked")
    ax.set_ylabel("scenarios")
    ax.legend(fontsize=8)
    fig.tight_layout()
    return _save(fig, Path(path))


def reward_figure(means: dict, path) -> Path:
    """Mean total reward per predicted action."""
    names = sorted(means)
    fig, ax = plt.subplots(figsize=(5, 3))
    ax.bar(names, [means[n] for n in names])
    ax.set_ylabel("mean total reward")
    fig.tight_layout()
    return _save(fig, Path(path))


def mean_by_action(breakdowns) -> dict:
    groups = {}
    for b in breakdowns:
        groups.setdefault(b.action, []).append(b.total)
    return {k: math.fsum(v) / len(v) for k, v in sorted(groups.items())}


__all__ = [
    "by_query_type",
    "mean_by_action",
    "metrics_figure",
    "questions_figure",
    "reward_figure",
    "status_counts",
    "summary_table",
]
