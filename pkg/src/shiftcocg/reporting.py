"""Run configuration echo and CSV/JSON serialization of solve reports.

Every output embeds the exact configuration that produced it, so a run can
be reproduced (and `check --report` re-verified) from the artifact alone.
CSV numbers are written in scientific notation with 17 significant digits;
JSON output is deterministic apart from the wall-time field.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field

import numpy as np

from .family import FamilySolveReport
from .greens import GreensResult

__all__ = [
    "RunConfig",
    "family_report_dict",
    "write_bench_csv",
    "write_greens_csv",
    "write_report_json",
    "write_residual_csv",
    "write_solutions_csv",
]


def _fmt(x: float) -> str:
    """Full-precision scientific notation (17 significant digits)."""
    return f"{x:.16e}"


@dataclass
class RunConfig:
    """Everything needed to reproduce a CLI run; echoed into every output."""

    command: str
    matrix_path: str | None = None
    chain: dict | None = None  # {"n", "onsite", "hopping", "periodic"}
    grid: dict | None = None  # {"start", "step", "count", "delta"}
    shift_list: list | None = None  # explicit shifts as [re, im] pairs
    column: int = 0
    probe_rows: list | None = None
    rhs_index: int = 0
    eps1: float = 1e-12
    eps2: float = 1e-12
    seed_index: int | None = None
    switching: bool = True
    max_iter: int | None = None
    history: str = "full"
    threads: int | None = None
    seeds: list | None = None  # bench: list of initial seed indices
    baseline: bool = True  # bench: run the per-shift baseline
    out_dir: str = "."
    prefix: str | None = None
    plot: bool = True
    solutions: bool = True

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        return cls(**{k: v for k, v in data.items() if k in known})


def _complex_pair(z: complex) -> list:
    return [float(np.real(z)), float(np.imag(z))]


def family_report_dict(report: FamilySolveReport) -> dict:
    """JSON-ready view of a family solve report (histories live in the CSV)."""
    return {
        "dim": report.dim,
        "num_shifts": report.num_shifts,
        "eps1": report.eps1,
        "eps2": report.eps2,
        "initial_seed": report.initial_seed,
        "switching_enabled": report.switching_enabled,
        "status": report.status,
        "total_mvs": report.total_mvs,
        "verification_mvs": report.verification_mvs,
        "iterations_total": report.iterations_total,
        "seed_sequence": list(report.seed_sequence),
        "switch_events": [
            {
                "iteration": ev.iteration,
                "old_seed": ev.old_seed,
                "new_seed": ev.new_seed,
                "unsolved_before": ev.unsolved_before,
                "unsolved_after": ev.unsolved_after,
            }
            for ev in report.switch_events
        ],
        "unsolved_indices": list(report.unsolved_indices),
        "stagnation_switch_used": report.stagnation_switch_used,
        "breakdown_info": report.breakdown_info,
        "shifts": [_complex_pair(s) for s in report.shifts],
        "shift_status": list(report.shift_status),
        "iterations_at_solve": list(report.iterations_at_solve),
        "final_recursive_residuals": [
            None if np.isnan(v) else float(v) for v in report.final_recursive_residuals
        ],
        "true_relative_residuals": [float(v) for v in report.true_relative_residuals],
        "suspect_indices": [int(i) for i in np.flatnonzero(report.suspect)],
    }


def write_report_json(report_dict: dict, config: RunConfig, path, extra: dict | None = None) -> None:
    """Write {"config": ..., "report": ...} (plus extras) as stable JSON."""
    payload = {"config": config.to_dict(), "report": report_dict}
    if extra:
        payload.update(extra)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=1)
        fh.write("\n")


def write_residual_csv(report: FamilySolveReport, path, mode: str = "full") -> None:
    """Residual-history export: one row per (shift, iteration).

    The recursive norm is available at every recorded iteration; the true
    relative residual is only computed once, by the closing verification
    pass, so that column is filled on each shift's final row and left empty
    elsewhere.  ``mode="final"`` writes just the final row per shift.
    """
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("shift_index,sigma_re,sigma_im,iteration,recursive_relative_residual,true_relative_residual\n")
        for k in range(report.num_shifts):
            sigma = report.shifts[k]
            trace = report.history_for(k) if mode == "full" else None
            last_iter = report.iterations_at_solve[k]
            if last_iter is None:
                last_iter = report.iterations_total
            if trace is not None and len(trace):
                for n, value in enumerate(trace):
                    true_part = _fmt(report.true_relative_residuals[k]) if n == len(trace) - 1 else ""
                    fh.write(
                        f"{k},{_fmt(sigma.real)},{_fmt(sigma.imag)},{n},"
                        f"{'' if np.isnan(value) else _fmt(value)},{true_part}\n"
                    )
            else:
                final = report.final_recursive_residuals[k]
                fh.write(
                    f"{k},{_fmt(sigma.real)},{_fmt(sigma.imag)},{last_iter},"
                    f"{'' if np.isnan(final) else _fmt(final)},{_fmt(report.true_relative_residuals[k])}\n"
                )


def write_solutions_csv(solutions: np.ndarray, shifts: np.ndarray, path) -> None:
    """Solution vectors, one row per (shift, component)."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("shift_index,sigma_re,sigma_im,component,x_re,x_im\n")
        for k in range(solutions.shape[0]):
            sigma = shifts[k]
            for j in range(solutions.shape[1]):
                v = solutions[k, j]
                fh.write(
                    f"{k},{_fmt(sigma.real)},{_fmt(sigma.imag)},{j},{_fmt(v.real)},{_fmt(v.imag)}\n"
                )


def write_greens_csv(result: GreensResult, path) -> None:
    """Resolvent values, one row per (grid point, probe row).

    The spectral column -Im G / pi is filled for the diagonal element
    (probe row equal to the source column).
    """
    import math

    with open(path, "w", encoding="utf-8") as fh:
        fh.write("grid_index,sigma,delta,row,col,g_re,g_im,spectral\n")
        energies = result.grid.energies()
        for k in range(result.grid.count):
            for a, i in enumerate(result.probe_rows):
                g = result.values[a, k]
                spectral = _fmt(-g.imag / math.pi) if i == result.column else ""
                fh.write(
                    f"{k},{_fmt(energies[k])},{_fmt(result.grid.delta)},{i},{result.column},"
                    f"{_fmt(g.real)},{_fmt(g.imag)},{spectral}\n"
                )


def write_bench_csv(rows: list, path) -> None:
    """Benchmark comparison table, one row per configuration."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("label,initial_seed,switching,switches,total_mvs,iterations,unsolved,wall_time_s\n")
        for row in rows:
            fh.write(
                f"{row['label']},{row.get('initial_seed', '')},{row.get('switching', '')},"
                f"{row.get('switches', '')},{row['total_mvs']},{row.get('iterations', '')},"
                f"{row.get('unsolved', '')},{_fmt(row['wall_time_s'])}\n"
            )
