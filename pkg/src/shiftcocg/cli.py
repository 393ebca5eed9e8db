"""Command-line surface: solve, greens, bench and check subcommands.

Exit codes: 0 on full convergence (or all checks passing), 2 on partial
convergence or failed numeric checks, 1 on usage or input errors.  Every
output embeds the run configuration; the report path writes figures next to
the delimited files unless ``--no-plot`` is given.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .checks import run_invariant_checks
from .family import FamilyOptions, ShiftFamily, solve_family
from .greens import EnergyGrid, compute_green_column, make_tight_binding_chain
from .linalg import SparseSymmetricMatrix, unit_vector
from .mmio import MatrixMarketError, read_matrix_market
from .oracle import per_shift_cocg_baseline
from .reporting import (
    RunConfig,
    family_report_dict,
    write_bench_csv,
    write_greens_csv,
    write_report_json,
    write_residual_csv,
    write_solutions_csv,
)

__all__ = ["main"]


class _Parser(argparse.ArgumentParser):
    """argparse with usage errors mapped to exit code 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _parse_grid(text: str) -> dict:
    parts = text.split(":")
    if len(parts) != 3:
        raise ValueError(f"grid must be start:step:count, got {text!r}")
    return {"start": float(parts[0]), "step": float(parts[1]), "count": int(parts[2])}


def _parse_complex_list(text: str) -> list:
    values = []
    for tok in text.split(","):
        tok = tok.strip()
        if tok:
            z = complex(tok)
            values.append([z.real, z.imag])
    if not values:
        raise ValueError("empty shift list")
    return values


def _parse_int_list(text: str) -> list:
    return [int(tok) for tok in text.split(",") if tok.strip()]


def _add_matrix_args(p: _Parser) -> None:
    p.add_argument("--matrix", metavar="PATH", help="Matrix Market coordinate file")
    p.add_argument("--chain", type=int, metavar="N", help="generate a tight-binding chain of N sites")
    p.add_argument("--onsite", type=float, default=0.0, help="chain onsite energy (default 0)")
    p.add_argument("--hopping", type=float, default=-1.0, help="chain hopping (default -1)")
    p.add_argument("--periodic", action="store_true", help="close the chain into a ring")


def _add_solver_args(p: _Parser) -> None:
    p.add_argument("--eps1", type=float, default=1e-12, help="seed stopping tolerance (default 1e-12)")
    p.add_argument("--eps2", type=float, default=1e-12, help="shifted-system tolerance (default 1e-12)")
    p.add_argument("--seed", type=int, default=None, help="initial seed index (default: middle of the grid)")
    p.add_argument("--no-switching", action="store_true", help="disable seed switching")
    p.add_argument("--max-iter", type=int, default=None, help="iteration cap (default 4N)")
    p.add_argument(
        "--history", choices=("full", "final", "none"), default="full", help="residual history volume"
    )
    p.add_argument("--threads", type=int, default=None, help="thread-count hint (advisory)")


def _add_output_args(p: _Parser) -> None:
    p.add_argument("--out", default=".", metavar="DIR", help="output directory (default .)")
    p.add_argument("--prefix", default=None, help="output file prefix (default: command name)")
    p.add_argument("--no-plot", action="store_true", help="skip figure rendering")


def _build_parser() -> _Parser:
    parser = _Parser(prog="shiftcocg", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", help="solve one shifted family, emit solutions and report")
    _add_matrix_args(p_solve)
    p_solve.add_argument("--grid", help="shift grid start:step:count (with --delta)")
    p_solve.add_argument("--delta", type=float, default=None, help="imaginary part of the grid shifts")
    p_solve.add_argument("--shifts", help="explicit comma-separated complex shifts, e.g. 0.4+0.001j,0.5+0.001j")
    p_solve.add_argument("--rhs-unit", type=int, default=0, help="unit-vector right-hand side index (default 0)")
    p_solve.add_argument("--no-solutions", action="store_true", help="skip the solutions CSV")
    _add_solver_args(p_solve)
    _add_output_args(p_solve)

    p_greens = sub.add_parser("greens", help="resolvent column over an energy grid")
    _add_matrix_args(p_greens)
    p_greens.add_argument("--grid", required=True, help="energy grid start:step:count")
    p_greens.add_argument("--delta", type=float, required=True, help="imaginary part of the energy")
    p_greens.add_argument("--col", type=int, default=0, help="source column j of G_ij (default 0)")
    p_greens.add_argument("--rows", default=None, help="comma-separated probe rows i (default: the column)")
    _add_solver_args(p_greens)
    _add_output_args(p_greens)

    p_bench = sub.add_parser("bench", help="shifted solve vs per-shift baseline on one problem")
    _add_matrix_args(p_bench)
    p_bench.add_argument("--grid", required=True, help="shift grid start:step:count")
    p_bench.add_argument("--delta", type=float, required=True, help="imaginary part of the grid shifts")
    p_bench.add_argument("--col", type=int, default=0, help="unit right-hand side index (default 0)")
    p_bench.add_argument("--seeds", default=None, help="comma-separated initial seed indices")
    p_bench.add_argument("--skip-baseline", action="store_true", help="skip the per-shift COCG baseline")
    _add_solver_args(p_bench)
    _add_output_args(p_bench)

    p_check = sub.add_parser("check", help="run the invariant suite on a matrix, or re-verify a report")
    _add_matrix_args(p_check)
    p_check.add_argument("--report", metavar="JSON", help="re-run the config embedded in a report and compare")
    return parser


# -- config assembly ---------------------------------------------------------


def _config_from_args(args) -> RunConfig:
    config = RunConfig(command=args.command)
    config.matrix_path = getattr(args, "matrix", None)
    if getattr(args, "chain", None):
        config.chain = {
            "n": args.chain,
            "onsite": args.onsite,
            "hopping": args.hopping,
            "periodic": bool(args.periodic),
        }
    if getattr(args, "grid", None):
        config.grid = _parse_grid(args.grid)
        if getattr(args, "delta", None) is not None:
            config.grid["delta"] = args.delta
    if getattr(args, "shifts", None):
        config.shift_list = _parse_complex_list(args.shifts)
    if hasattr(args, "col"):
        config.column = args.col
    if getattr(args, "rows", None):
        config.probe_rows = _parse_int_list(args.rows)
    if hasattr(args, "rhs_unit"):
        config.rhs_index = args.rhs_unit
    for name in ("eps1", "eps2", "max_iter", "history", "threads"):
        if hasattr(args, name):
            setattr(config, name, getattr(args, name))
    if hasattr(args, "seed"):
        config.seed_index = args.seed
    if hasattr(args, "no_switching"):
        config.switching = not args.no_switching
    if getattr(args, "seeds", None):
        config.seeds = _parse_int_list(args.seeds)
    if hasattr(args, "skip_baseline"):
        config.baseline = not args.skip_baseline
    if hasattr(args, "out"):
        config.out_dir = args.out
        config.prefix = args.prefix
        config.plot = not args.no_plot
    if hasattr(args, "no_solutions"):
        config.solutions = not args.no_solutions
    return config


def _load_matrix(config: RunConfig) -> SparseSymmetricMatrix:
    if config.matrix_path and config.chain:
        raise ValueError("give either --matrix or --chain, not both")
    if config.matrix_path:
        return read_matrix_market(config.matrix_path)
    if config.chain:
        return make_tight_binding_chain(
            config.chain["n"],
            onsite=config.chain.get("onsite", 0.0),
            hopping=config.chain.get("hopping", -1.0),
            periodic=config.chain.get("periodic", False),
        )
    raise ValueError("a matrix source is required (--matrix or --chain)")


def _shifts_from_config(config: RunConfig) -> np.ndarray:
    if config.grid and config.shift_list:
        raise ValueError("give either --grid/--delta or --shifts, not both")
    if config.grid:
        if "delta" not in config.grid:
            raise ValueError("--grid requires --delta")
        grid = EnergyGrid(**config.grid)
        return grid.shifts()
    if config.shift_list:
        return np.array([complex(re, im) for re, im in config.shift_list])
    raise ValueError("shifts are required (--grid/--delta or --shifts)")


def _family_options(config: RunConfig) -> FamilyOptions:
    return FamilyOptions(
        max_iter=config.max_iter,
        switching=config.switching,
        history=config.history,
    )


def _seed_or_middle(config: RunConfig, count: int) -> int:
    return config.seed_index if config.seed_index is not None else count // 2


# -- command execution --------------------------------------------------------


def _execute_solve(config: RunConfig):
    A = _load_matrix(config)
    shifts = _shifts_from_config(config)
    family = ShiftFamily(
        shifts=shifts,
        b=unit_vector(A.dim, config.rhs_index),
        seed_index=_seed_or_middle(config, shifts.size),
        eps1=config.eps1,
        eps2=config.eps2,
    )
    solutions, report = solve_family(A, family, _family_options(config))
    payload = {"report": family_report_dict(report)}
    return payload, {"report": report, "solutions": solutions}, (0 if report.converged else 2)


def _execute_greens(config: RunConfig):
    H = _load_matrix(config)
    grid = EnergyGrid(**config.grid)
    result = compute_green_column(
        H,
        grid,
        config.column,
        probe_rows=config.probe_rows,
        eps1=config.eps1,
        eps2=config.eps2,
        seed_index=config.seed_index,
        opts=_family_options(config),
    )
    payload = {
        "report": family_report_dict(result.report),
        "greens": {
            "column": result.column,
            "probe_rows": list(result.probe_rows),
            "values": [[[v.real, v.imag] for v in row] for row in result.values],
        },
    }
    return payload, {"result": result}, (0 if result.report.converged else 2)


def _execute_bench(config: RunConfig):
    A = _load_matrix(config)
    shifts = _shifts_from_config(config)
    b = unit_vector(A.dim, config.column)
    seeds = config.seeds if config.seeds else [shifts.size // 2]
    rows = []
    reports = []
    code = 0
    for s in seeds:
        family = ShiftFamily(shifts=shifts, b=b, seed_index=s, eps1=config.eps1, eps2=config.eps2)
        _, report = solve_family(A, family, _family_options(config))
        reports.append(report)
        rows.append(
            {
                "label": f"shifted seed={s}",
                "initial_seed": s,
                "switching": config.switching,
                "switches": len(report.switch_events),
                "total_mvs": report.total_mvs,
                "iterations": report.iterations_total,
                "unsolved": len(report.unsolved_indices),
                "wall_time_s": report.wall_time_s,
            }
        )
        if not report.converged:
            code = 2
    baseline_mvs = None
    if config.baseline:
        import time

        t0 = time.perf_counter()
        _, mv_counts, statuses = per_shift_cocg_baseline(
            A, shifts, b, eps=config.eps2, max_iter=config.max_iter
        )
        baseline_mvs = int(mv_counts.sum())
        rows.append(
            {
                "label": "per-shift baseline",
                "switching": False,
                "switches": 0,
                "total_mvs": baseline_mvs,
                "iterations": baseline_mvs,
                "unsolved": sum(1 for st in statuses if st != "converged"),
                "wall_time_s": time.perf_counter() - t0,
            }
        )
    payload = {
        "report": family_report_dict(reports[0]),
        "bench": {
            "rows": rows,
            "baseline_mvs": baseline_mvs,
            "summary": _bench_summary(rows[0]["total_mvs"], baseline_mvs),
        },
    }
    return payload, {"rows": rows, "reports": reports}, code


def _bench_summary(total_mvs: int, baseline_mvs: int | None) -> str:
    if baseline_mvs is None:
        return f"total_mvs={total_mvs}, baseline skipped"
    ratio = 100.0 * total_mvs / baseline_mvs if baseline_mvs else float("nan")
    return f"total_mvs={total_mvs}, sum_of_individual_cocg_mvs={baseline_mvs}, ratio={ratio:.3f}%"


def _strip_volatile(obj):
    """Drop wall-time fields before determinism comparisons."""
    if isinstance(obj, dict):
        return {k: _strip_volatile(v) for k, v in obj.items() if k != "wall_time_s"}
    if isinstance(obj, list):
        return [_strip_volatile(v) for v in obj]
    return obj


_EXECUTORS = {"solve": _execute_solve, "greens": _execute_greens, "bench": _execute_bench}


def _run_and_write(config: RunConfig) -> int:
    out_dir = Path(config.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    prefix = config.prefix if config.prefix is not None else f"{config.command}-"
    payload, artifacts, code = _EXECUTORS[config.command](config)
    write_report_json(
        payload["report"], config, out_dir / f"{prefix}report.json",
        extra={k: v for k, v in payload.items() if k != "report"},
    )
    written = [out_dir / f"{prefix}report.json"]
    if config.command == "solve":
        report = artifacts["report"]
        if config.history != "none":
            write_residual_csv(report, out_dir / f"{prefix}residuals.csv", mode=config.history)
            written.append(out_dir / f"{prefix}residuals.csv")
        if config.solutions:
            write_solutions_csv(artifacts["solutions"], report.shifts, out_dir / f"{prefix}solutions.csv")
            written.append(out_dir / f"{prefix}solutions.csv")
        if config.plot:
            from .figures import plot_residuals

            written.append(plot_residuals(report, out_dir / f"{prefix}residuals.png"))
    elif config.command == "greens":
        result = artifacts["result"]
        write_greens_csv(result, out_dir / f"{prefix}values.csv")
        written.append(out_dir / f"{prefix}values.csv")
        if config.history != "none":
            write_residual_csv(result.report, out_dir / f"{prefix}residuals.csv", mode=config.history)
            written.append(out_dir / f"{prefix}residuals.csv")
        if config.plot:
            from .figures import plot_greens, plot_residuals

            written.append(plot_greens(result, out_dir / f"{prefix}values.png"))
            written.append(plot_residuals(result.report, out_dir / f"{prefix}residuals.png"))
    elif config.command == "bench":
        rows = artifacts["rows"]
        write_bench_csv(rows, out_dir / f"{prefix}summary.csv")
        written.append(out_dir / f"{prefix}summary.csv")
        if config.plot:
            from .figures import plot_bench

            written.append(plot_bench(rows, out_dir / f"{prefix}summary.png"))
        for row in rows:
            print(
                f"{row['label']}: total_mvs={row['total_mvs']}, switches={row.get('switches', 0)},"
                f" unsolved={row.get('unsolved', 0)}"
            )
        print(payload["bench"]["summary"])
    for path in written:
        print(f"wrote {path}", file=sys.stderr)
    if code == 2:
        diag = {
            "status": payload["report"]["status"],
            "unsolved_indices": payload["report"]["unsolved_indices"],
            "breakdown_info": payload["report"]["breakdown_info"],
        }
        print(f"shiftcocg: partial convergence: {json.dumps(diag)}", file=sys.stderr)
    return code


def _run_check(args) -> int:
    if args.report:
        with open(args.report, "r", encoding="utf-8") as fh:
            stored = json.load(fh)
        config = RunConfig.from_dict(stored["config"])
        payload, _, _ = _EXECUTORS[config.command](config)
        regenerated = _strip_volatile({k: v for k, v in payload.items()})
        recorded = _strip_volatile({k: v for k, v in stored.items() if k not in ("config",)})
        if regenerated == recorded:
            print("check report: PASS (re-run reproduces the stored report)")
            return 0
        print("check report: FAIL (re-run differs from the stored report)")
        return 2
    config = _config_from_args(args)
    A = _load_matrix(config)
    outcomes = run_invariant_checks(A)
    for outcome in outcomes:
        print(outcome.line())
    return 0 if all(o.passed for o in outcomes) else 2


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "check":
            return _run_check(args)
        config = _config_from_args(args)
        return _run_and_write(config)
    except (ValueError, IndexError, OSError, MatrixMarketError) as exc:
        print(f"shiftcocg: error: {exc}", file=sys.stderr)
        return 1
    except ArithmeticError as exc:
        print(f"shiftcocg: numeric failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
