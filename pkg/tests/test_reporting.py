import json

import numpy as np

from shiftcocg import EnergyGrid, ShiftFamily, compute_green_column, make_tight_binding_chain, solve_family
from shiftcocg.reporting import (
    RunConfig,
    family_report_dict,
    write_greens_csv,
    write_report_json,
    write_residual_csv,
    write_solutions_csv,
)

from conftest import random_complex_symmetric, random_complex_vector


def small_report(seed=110, history="full"):
    from shiftcocg import FamilyOptions

    A = random_complex_symmetric(20, density=0.25, seed=seed)
    b = random_complex_vector(20, seed=seed + 1)
    shifts = np.array([0.2 + 1e-3j, 0.6 + 1e-3j, 0.9 + 1e-3j])
    return solve_family(A, ShiftFamily(shifts=shifts, b=b, seed_index=1), FamilyOptions(history=history))


class TestRunConfig:
    def test_round_trip(self):
        config = RunConfig(
            command="greens",
            chain={"n": 64, "onsite": 0.0, "hopping": -1.0, "periodic": False},
            grid={"start": 0.4, "step": 0.02, "count": 11, "delta": 0.001},
            column=0,
            seed_index=5,
        )
        clone = RunConfig.from_dict(config.to_dict())
        assert clone == config

    def test_unknown_keys_ignored(self):
        config = RunConfig.from_dict({"command": "solve", "bogus": 1})
        assert config.command == "solve"


class TestReportDict:
    def test_json_ready_and_deterministic(self):
        _, report_a = small_report()
        _, report_b = small_report()
        da, db = family_report_dict(report_a), family_report_dict(report_b)
        assert da == db  # wall time excluded by construction
        json.dumps(da)  # must be serializable as-is

    def test_summary_fields(self):
        _, report = small_report()
        d = family_report_dict(report)
        assert d["total_mvs"] == report.iterations_total
        assert d["num_shifts"] == 3
        assert len(d["shifts"]) == 3
        assert d["shift_status"] == ["converged"] * 3


class TestCsvWriters:
    def test_residual_csv_full(self, tmp_path):
        _, report = small_report()
        path = tmp_path / "res.csv"
        write_residual_csv(report, path, mode="full")
        lines = path.read_text().splitlines()
        assert lines[0].startswith("shift_index,")
        expected_rows = sum(len(report.history_for(k)) for k in range(3))
        assert len(lines) == 1 + expected_rows
        # true residual appears only on each shift's final row
        filled = [ln for ln in lines[1:] if not ln.endswith(",")]
        assert len(filled) == 3

    def test_residual_csv_final(self, tmp_path):
        _, report = small_report(history="final")
        path = tmp_path / "res.csv"
        write_residual_csv(report, path, mode="final")
        lines = path.read_text().splitlines()
        assert len(lines) == 1 + 3

    def test_17_digit_precision(self, tmp_path):
        _, report = small_report()
        path = tmp_path / "res.csv"
        write_residual_csv(report, path, mode="final")
        value = path.read_text().splitlines()[1].split(",")[1]
        mantissa = value.split("e")[0].replace("-", "").replace(".", "")
        assert len(mantissa) == 17

    def test_solutions_csv(self, tmp_path):
        X, report = small_report()
        path = tmp_path / "sol.csv"
        write_solutions_csv(X, report.shifts, path)
        lines = path.read_text().splitlines()
        assert len(lines) == 1 + 3 * 20

    def test_greens_csv(self, tmp_path):
        H = make_tight_binding_chain(16)
        grid = EnergyGrid(0.4, 0.1, 3, 0.001)
        result = compute_green_column(H, grid, 0, probe_rows=[0, 2])
        path = tmp_path / "g.csv"
        write_greens_csv(result, path)
        lines = path.read_text().splitlines()
        assert len(lines) == 1 + 3 * 2
        # spectral column filled only for the diagonal probe
        diag_rows = [ln for ln in lines[1:] if ln.split(",")[3] == "0"]
        off_rows = [ln for ln in lines[1:] if ln.split(",")[3] == "2"]
        assert all(not ln.endswith(",") for ln in diag_rows)
        assert all(ln.endswith(",") for ln in off_rows)


class TestJsonWriter:
    def test_embeds_config_and_extras(self, tmp_path):
        _, report = small_report()
        config = RunConfig(command="solve", shift_list=[[0.2, 1e-3]])
        path = tmp_path / "report.json"
        write_report_json(family_report_dict(report), config, path, extra={"note": {"k": 1}})
        data = json.loads(path.read_text())
        assert data["config"]["command"] == "solve"
        assert data["report"]["status"] == "converged"
        assert data["note"] == {"k": 1}

    def test_byte_identical_across_runs(self, tmp_path):
        config = RunConfig(command="solve")
        paths = []
        for run in range(2):
            _, report = small_report()
            path = tmp_path / f"r{run}.json"
            write_report_json(family_report_dict(report), config, path)
            paths.append(path.read_bytes())
        assert paths[0] == paths[1]
