"""Figure rendering for the CLI report path.

Each writer renders one PNG next to the delimited output it illustrates:
residual traces for a family solve, resolvent curves for a Green's-function
run, and the matvec comparison for a benchmark.  Rendering is headless (Agg).
"""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .family import FamilySolveReport
from .greens import GreensResult

__all__ = ["plot_bench", "plot_greens", "plot_residuals"]

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def _figure(width: float = 6.4, panels: int = 1):
    fig, axes = plt.subplots(1, panels, figsize=(width * panels, width * _GOLDEN))
    return fig, axes


def plot_residuals(report: FamilySolveReport, path) -> str:
    """Seed residual trace plus the final per-shift true residuals."""
    fig, (ax_trace, ax_final) = _figure(panels=2)

    if report.histories is not None:
        seed_trace = report.histories[report.initial_seed]
        ax_trace.semilogy(np.arange(len(seed_trace)), seed_trace, lw=1.0, label=f"seed {report.initial_seed}")
        for ev in report.switch_events:
            ax_trace.axvline(ev.iteration, color="0.7", lw=0.8, ls="--")
            h = report.histories[ev.new_seed]
            ax_trace.semilogy(np.arange(len(h)), h, lw=1.0, label=f"seed {ev.new_seed}")
        ax_trace.legend(fontsize=8)
    ax_trace.set_xlabel("iteration")
    ax_trace.set_ylabel("recursive relative residual")
    ax_trace.axhline(report.eps1, color="0.5", lw=0.8)

    ax_final.semilogy(np.arange(report.num_shifts), np.maximum(report.true_relative_residuals, 1e-300), lw=0.9)
    ax_final.axhline(report.eps2, color="0.5", lw=0.8)
    for s in report.seed_sequence:
        ax_final.axvline(s, color="0.8", lw=0.8, ls=":")
    ax_final.set_xlabel("shift index")
    ax_final.set_ylabel("true relative residual")

    fig.suptitle(f"{report.num_shifts} shifts, {report.total_mvs} matvecs, {len(report.switch_events)} switches")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return str(path)


def plot_greens(result: GreensResult, path) -> str:
    """Re/Im of the resolvent and the spectral curve across the grid."""
    energies = result.grid.energies()
    fig, (ax_g, ax_spec) = _figure(panels=2)
    for a, i in enumerate(result.probe_rows):
        ax_g.plot(energies, result.values[a].real, lw=1.0, label=f"Re G[{i},{result.column}]")
        ax_g.plot(energies, result.values[a].imag, lw=1.0, ls="--", label=f"Im G[{i},{result.column}]")
    ax_g.set_xlabel("energy")
    ax_g.set_ylabel("resolvent element")
    ax_g.legend(fontsize=8)
    if result.column in result.probe_rows:
        ax_spec.plot(energies, result.spectral_function(), lw=1.0)
        ax_spec.set_xlabel("energy")
        ax_spec.set_ylabel(r"$-\mathrm{Im}\,G/\pi$")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return str(path)


def plot_bench(rows: list, path) -> str:
    """Total matvecs per benchmark configuration, log scale."""
    fig, ax = _figure()
    labels = [row["label"] for row in rows]
    mvs = [max(row["total_mvs"], 1) for row in rows]
    ax.bar(np.arange(len(rows)), mvs, color="#4878a8")
    ax.set_yscale("log")
    ax.set_xticks(np.arange(len(rows)))
    ax.set_xticklabels(labels, rotation=20, ha="right", fontsize=8)
    ax.set_ylabel("total matvecs")
    for k, v in enumerate(mvs):
        ax.text(k, v, f"{v}", ha="center", va="bottom", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return str(path)
