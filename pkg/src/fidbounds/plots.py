"""Deterministic SVG charts for sweep summaries and cumulative curves."""
from __future__ import annotations

from pathlib import Path
from typing import Iterable, Mapping

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from .harness import SweepRow
from .stats import CumulativeSeries

plt.rcParams["svg.hashsalt"] = "fidbounds"
plt.rcParams["figure.dpi"] = 100

_SAVE_KW = dict(format="svg", metadata={"Date": None}, bbox_inches="tight")


def _sorted_rows(rows: Iterable[SweepRow]) -> list[SweepRow]:
    return sorted(rows, key=lambda r: (r.cnots, r.n, r.k))


def plot_sweep(rows: Iterable[SweepRow], path: str | Path, title: str = "Fidelity bounds by state") -> Path:
    """Bounds per state, sorted by CNOT count, with CI bands (one point per state)."""
    rows = _sorted_rows(rows)
    xs = range(len(rows))
    labels = [f"{r.label}:({r.cnots})" for r in rows]
    lb = [r.report.lower_bound for r in rows]
    msp = [r.report.msp for r in rows]
    fig, ax = plt.subplots(figsize=(max(6, 0.45 * len(rows) + 2), 4.2))
    ax.fill_between(xs, [r.report.lb_ci_lo for r in rows], [r.report.lb_ci_hi for r in rows],
                    alpha=0.25, color="tab:blue", linewidth=0)
    ax.plot(xs, lb, "o-", color="tab:blue", label="lower bound")
    ax.fill_between(xs, [r.report.msp_ci_lo for r in rows], [r.report.msp_ci_hi for r in rows],
                    alpha=0.25, color="tab:green", linewidth=0)
    ax.plot(xs, msp, "s-", color="tab:green", label="MSP upper bound")
    if rows and rows[0].report.somma_lower_bound is not None:
        ax.plot(xs, [r.report.somma_lower_bound for r in rows], "^--", color="tab:orange",
                label="quadratic-variant lower bound")
    ax.set_xticks(list(xs))
    ax.set_xticklabels(labels, rotation=60, ha="right", fontsize=7)
    ax.set_ylabel("bound value")
    ax.set_title(title)
    ax.grid(alpha=0.3)
    ax.legend(fontsize=8)
    return _save(fig, path)


def plot_comparison(rows: Iterable[SweepRow], path: str | Path) -> Path:
    """Sharp-indicator lower bound against the quadratic variant on shared shots."""
    rows = [r for r in _sorted_rows(rows) if r.report.somma_lower_bound is not None]
    xs = range(len(rows))
    fig, ax = plt.subplots(figsize=(max(6, 0.45 * len(rows) + 2), 4.2))
    ax.plot(xs, [r.report.lower_bound for r in rows], "o-", color="tab:blue", label="lower bound")
    ax.plot(xs, [r.report.somma_lower_bound for r in rows], "^--", color="tab:orange",
            label="quadratic-variant lower bound")
    ax.set_xticks(list(xs))
    ax.set_xticklabels([f"{r.label}:({r.cnots})" for r in rows], rotation=60, ha="right", fontsize=7)
    ax.set_ylabel("bound value")
    ax.set_title("Indicator vs quadratic lower bound")
    ax.grid(alpha=0.3)
    ax.legend(fontsize=8)
    return _save(fig, path)


def plot_cumulative(series: Mapping[str, CumulativeSeries], path: str | Path,
                    title: str = "Cumulative bound estimates") -> Path:
    """Bound estimates recomputed on shot prefixes, with CI bands."""
    fig, ax = plt.subplots(figsize=(7, 4.2))
    colors = {"lower_bound": "tab:blue", "msp": "tab:green", "somma_lower_bound": "tab:orange",
              "sj2_term": "tab:purple", "sgx": "tab:purple", "sgz": "tab:red"}
    for name in sorted(series):
        s = series[name]
        color = colors.get(name, "tab:gray")
        ax.plot(s.shot_indices, s.values, color=color, label=name, linewidth=1.2)
        if name in ("lower_bound", "msp"):
            ax.fill_between(s.shot_indices, s.ci_lo, s.ci_hi, color=color, alpha=0.2, linewidth=0)
    ax.set_xlabel("shots")
    ax.set_ylabel("estimate")
    ax.set_title(title)
    ax.grid(alpha=0.3)
    ax.legend(fontsize=8)
    return _save(fig, path)


def emit_plots(
    rows: Iterable[SweepRow] | None = None,
    series: Mapping[str, CumulativeSeries] | None = None,
    output_dir: str | Path = ".",
    stem: str = "",
) -> list[Path]:
    """Render the chart(s) appropriate for the given inputs; returns paths."""
    out = Path(output_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    if rows is not None:
        rows = list(rows)
        if not rows:
            raise ValueError("no rows to plot")
        paths.append(plot_sweep(rows, out / f"{stem}sweep.svg"))
        if rows[0].report.somma_lower_bound is not None:
            paths.append(plot_comparison(rows, out / f"{stem}comparison.svg"))
    if series is not None:
        if not series:
            raise ValueError("no series to plot")
        paths.append(plot_cumulative(series, out / f"{stem}cumulative.svg"))
    if rows is None and series is None:
        raise ValueError("nothing to plot")
    return paths


def _save(fig, path: str | Path) -> Path:
    path = Path(path)
    fig.savefig(path, **_SAVE_KW)
    plt.close(fig)
    return path
