"""CSV and figure outputs for experiment grids, training curves, and
sensitivity surfaces.

CSV is the canonical, byte-reproducible output; figures are rendered
alongside as PNG for quick inspection. All floats are written with fixed
formatting so reruns of the same config produce identical files.
"""

from __future__ import annotations

import csv
import math
from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .sensitivity import SensitivitySurface
from .simulator import ExperimentReport, TrainingCurve

TABLE_HEADER = ("emulator", "af", "budget", "mean", "stderr", "runs")
CURVE_HEADER = ("budget", "train_acc_mean", "train_acc_sigma", "eval_acc_mean", "eval_acc_sigma")

UNDEFINED = "undefined"


def _fmt(value: float) -> str:
    if isinstance(value, float) and math.isnan(value):
        return "nan"
    return f"{value:.6f}"


def write_csv(path: str | Path, header: Sequence[str], rows: Sequence[Sequence]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(header)
        writer.writerows(rows)
    return path


def table_rows(report: ExperimentReport) -> list[tuple]:
    return [
        (report.emulator, report.af, budget, _fmt(report.mean[i]), _fmt(report.stderr[i]), report.runs)
        for i, budget in enumerate(report.checkpoints)
    ]


def undefined_rows(emulator: str, af: str, checkpoints: Sequence[int], runs: int) -> list[tuple]:
    return [(emulator, af, budget, UNDEFINED, UNDEFINED, runs) for budget in checkpoints]


def write_table_csv(path: str | Path, rows: Sequence[Sequence]) -> Path:
    return write_csv(path, TABLE_HEADER, rows)


def write_curve_csv(path: str | Path, curve: TrainingCurve) -> Path:
    rows = [
        (
            budget,
            _fmt(curve.train_mean[i]),
            _fmt(curve.train_sigma[i]),
            _fmt(curve.eval_mean[i]),
            _fmt(curve.eval_sigma[i]),
        )
        for i, budget in enumerate(curve.budgets)
    ]
    return write_csv(path, CURVE_HEADER, rows)


def write_surface_csvs(surface: SensitivitySurface, out_dir: str | Path, basename: str) -> list[Path]:
    out_dir = Path(out_dir)
    grid = surface.grid
    p1, p2 = grid.param_pair
    raw_rows = []
    for i, a in enumerate(grid.offsets):
        for j, b in enumerate(grid.offsets):
            raw_rows.append(
                (
                    _fmt(a),
                    _fmt(b),
                    _fmt(grid.defaults[0] * 10.0**a),
                    _fmt(grid.defaults[1] * 10.0**b),
                    _fmt(grid.accuracy[i][j]),
                )
            )
    raw_path = write_csv(
        out_dir / f"{basename}_raw.csv",
        (f"{p1}_log10_offset", f"{p2}_log10_offset", p1, p2, "accuracy"),
        raw_rows,
    )
    smooth_rows = []
    for i, a in enumerate(surface.display_offsets):
        for j, b in enumerate(surface.display_offsets):
            smooth_rows.append((_fmt(a), _fmt(b), _fmt(surface.smoothed[i][j])))
    smooth_path = write_csv(
        out_dir / f"{basename}_smoothed.csv",
        (f"{p1}_log10_offset", f"{p2}_log10_offset", "posterior_mean"),
        smooth_rows,
    )
    summary_path = write_csv(
        out_dir / f"{basename}_summary.csv",
        ("key", "value"),
        [
            ("emulator", grid.emulator),
            ("param_pair", f"{p1}/{p2}"),
            ("budget", grid.budget),
            ("runs_per_point", grid.runs_per_point),
            ("argmax_offset_1", _fmt(surface.argmax_offsets[0])),
            ("argmax_offset_2", _fmt(surface.argmax_offsets[1])),
            ("optimum_value", _fmt(surface.optimum_value)),
            ("default_value", _fmt(surface.default_value)),
            ("raw_range", _fmt(surface.raw_range)),
            ("smoothed_range", _fmt(surface.smoothed_range)),
            ("tolerance", _fmt(surface.tolerance)),
            ("defaults_near_optimal", str(surface.defaults_near_optimal).lower()),
        ],
    )
    return [raw_path, smooth_path, summary_path]


# -- figures -------------------------------------------------------------------


def render_table_heatmap(
    rows: Sequence[Sequence],
    emulators: Sequence[str],
    afs: Sequence[str],
    budget: int,
    path: str | Path,
) -> Path:
    """Heatmap of mean accuracy per (emulator, af) cell at one budget."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    values = np.full((len(emulators), len(afs)), np.nan)
    for row in rows:
        emulator, af, row_budget, mean = row[0], row[1], int(row[2]), row[3]
        if row_budget != budget or mean == UNDEFINED:
            continue
        values[emulators.index(emulator), afs.index(af)] = float(mean)

    fig, ax = plt.subplots(figsize=(1.2 * len(afs) + 2, 0.6 * len(emulators) + 2))
    masked = np.ma.masked_invalid(values)
    im = ax.imshow(masked, cmap="Greens", aspect="auto")
    ax.set_xticks(range(len(afs)), afs, rotation=45, ha="right")
    ax.set_yticks(range(len(emulators)), emulators)
    for i in range(len(emulators)):
        for j in range(len(afs)):
            label = "-" if np.isnan(values[i, j]) else f"{100 * values[i, j]:.1f}%"
            ax.text(j, i, label, ha="center", va="center", fontsize=8)
    ax.set_title(f"Evaluation accuracy after {budget} training matches")
    fig.colorbar(im, ax=ax, shrink=0.8)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def render_curve(curve: TrainingCurve, path: str | Path) -> Path:
    """Training and evaluation accuracy with +/-1 sigma bands over runs."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    budgets = np.asarray(curve.budgets)
    fig, ax = plt.subplots(figsize=(7, 4.5))
    for label, mean, sigma, color in (
        ("train", curve.train_mean, curve.train_sigma, "tab:orange"),
        ("eval", curve.eval_mean, curve.eval_sigma, "tab:blue"),
    ):
        mean = np.asarray(mean)
        sigma = np.asarray(sigma)
        ok = ~np.isnan(mean)
        ax.plot(budgets[ok], mean[ok], label=label, color=color)
        ax.fill_between(
            budgets[ok], (mean - sigma)[ok], (mean + sigma)[ok], color=color, alpha=0.2
        )
    ax.set_xlabel("training matches")
    ax.set_ylabel("accuracy")
    ax.set_title(f"{curve.emulator} + {curve.af} AF ({curve.runs} runs)")
    ax.legend()
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def render_surface(surface: SensitivitySurface, path: str | Path) -> Path:
    """Smoothed accuracy surface with the defaults marked by a red cross."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    grid = surface.grid
    p1, p2 = grid.param_pair
    display = np.asarray(surface.display_offsets)
    values = np.asarray(surface.smoothed)

    fig, ax = plt.subplots(figsize=(5.5, 4.5))
    im = ax.pcolormesh(display, display, values.T, cmap="viridis", shading="auto")
    ax.plot(0.0, 0.0, "x", color="red", markersize=12, markeredgewidth=3)
    ax.plot(*surface.argmax_offsets, "o", color="white", markersize=6, fillstyle="none")
    ax.set_xlabel(f"log10({p1} / default)")
    ax.set_ylabel(f"log10({p2} / default)")
    ax.set_title(f"{grid.emulator}: accuracy over {p1} vs {p2}")
    fig.colorbar(im, ax=ax, label="smoothed accuracy")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path
