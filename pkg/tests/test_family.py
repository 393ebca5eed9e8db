import numpy as np
import pytest

from shiftcocg import (
    FamilyOptions,
    ShiftFamily,
    ShiftedSystemState,
    SparseSymmetricMatrix,
    cocg_init,
    cocg_solve,
    cocg_step,
    make_tight_binding_chain,
    norm2,
    shifted_system_step,
    solve_family,
    unit_vector,
)
from shiftcocg.oracle import dense_solve, per_shift_cocg_baseline

from conftest import random_complex_symmetric, random_complex_vector


class TestDegenerateFamilies:
    def test_single_shift_equals_plain_cocg(self):
        A = random_complex_symmetric(24, density=0.2, seed=70)
        b = random_complex_vector(24, seed=71)
        sigma = 0.3 + 1e-3j
        before = A.mv_count
        X, report = solve_family(A, ShiftFamily(shifts=[sigma], b=b))
        family_mvs = report.total_mvs
        reference = cocg_solve(A, sigma, b)
        assert report.status == "converged"
        assert family_mvs == reference.iterations
        assert np.array_equal(X[0], reference.x)
        assert A.mv_count - before == family_mvs + reference.iterations + 1  # + verification

    def test_identity_family_closed_form(self):
        A = SparseSymmetricMatrix.identity(6)
        b = unit_vector(6, 0)
        X, report = solve_family(A, ShiftFamily(shifts=[0.0, 1.0, 2.0], b=b, seed_index=1))
        assert report.status == "converged"
        assert report.iterations_at_solve == [1, 1, 1]
        for k, sigma in enumerate([0.0, 1.0, 2.0]):
            np.testing.assert_allclose(X[k], b / (1 + sigma), rtol=1e-14)

    def test_zero_rhs(self):
        A = random_complex_symmetric(10, seed=72)
        X, report = solve_family(A, ShiftFamily(shifts=[0.1, 0.2 + 1j], b=np.zeros(10)))
        assert report.status == "converged"
        assert report.iterations_total == 0
        assert report.total_mvs == 0
        assert report.iterations_at_solve == [0, 0]
        assert np.array_equal(X, np.zeros((2, 10)))

    def test_duplicate_of_seed_is_bitwise_identical(self):
        A = random_complex_symmetric(16, density=0.3, seed=73)
        b = random_complex_vector(16, seed=74)
        shifts = np.array([0.1 + 1e-3j, 0.4 + 2e-3j, 0.4 + 2e-3j])
        X, report = solve_family(A, ShiftFamily(shifts=shifts, b=b, seed_index=1))
        assert report.status == "converged"
        assert np.array_equal(X[1], X[2])
        assert report.iterations_at_solve[1] == report.iterations_at_solve[2]


class TestDriverAgreesWithScalarStepping:
    def test_batch_matches_sequential_updates(self):
        A = random_complex_symmetric(12, density=0.3, seed=9)
        b = random_complex_vector(12, seed=75)
        shifts = np.array([0.1 + 0.001j, 0.25 + 0.002j, 0.4 - 0.003j, 0.7 + 0.001j])
        steps = 10
        family = ShiftFamily(shifts=shifts, b=b, seed_index=1, eps1=1e-30, eps2=1e-30)
        X, report = solve_family(A, family, FamilyOptions(max_iter=steps, history="none"))
        assert report.status == "max_iter"

        seed_state = cocg_init(A, shifts[1], b)
        states = [ShiftedSystemState.fresh(12) for _ in shifts]
        for n in range(steps):
            r_n = seed_state.r
            cocg_step(seed_state, A, shifts[1])
            h = seed_state.history
            for i in (0, 2, 3):
                shifted_system_step(
                    states[i], r_n, h.alphas[n], h.alpha_at(n - 1), h.beta_at(n - 1), shifts[i] - shifts[1]
                )
        assert np.array_equal(X[1], seed_state.x)
        # scalar and SIMD complex kernels round differently, so the agreement
        # is to rounding rather than bitwise
        for i in (0, 2, 3):
            np.testing.assert_allclose(X[i], states[i].x, rtol=1e-12, atol=1e-300)

    def test_solutions_match_dense_oracle_with_switching(self):
        # grid straddling difficulty: forces at least one switch on this instance
        H = make_tight_binding_chain(64, onsite=-1.8)
        A = H.scaled(-1.0)
        b = unit_vector(64, 0)
        shifts = np.linspace(0.25, 1.4, 24) + 1e-3j
        family = ShiftFamily(shifts=shifts, b=b, seed_index=12)
        X, report = solve_family(A, family)
        assert report.status == "converged"
        dense = A.to_dense()
        for k, sigma in enumerate(shifts):
            ref = dense_solve(dense + sigma * np.eye(64), b)
            assert norm2(X[k] - ref) / norm2(ref) <= 1e-9


class TestEconomyAndCounters:
    def test_total_mvs_equals_iterations_and_beats_baseline(self):
        H = make_tight_binding_chain(64)
        A = H.scaled(-1.0)
        b = unit_vector(64, 0)
        shifts = (0.4 + 0.1 * np.arange(11)) + 1e-3j
        before = A.mv_count
        X, report = solve_family(A, ShiftFamily(shifts=shifts, b=b, seed_index=5))
        assert report.status == "converged"
        assert report.total_mvs == report.iterations_total
        assert report.verification_mvs == 11
        assert A.mv_count - before == report.total_mvs + report.verification_mvs
        _, baseline_counts, _ = per_shift_cocg_baseline(A, shifts, b)
        assert report.total_mvs < baseline_counts.sum()
        dense = A.to_dense()
        for k, sigma in enumerate(shifts):
            true_res = norm2(b - (dense + sigma * np.eye(64)) @ X[k]) / norm2(b)
            assert true_res <= 1e-10

    def test_mv_count_independent_of_family_size(self):
        A = random_complex_symmetric(40, density=0.15, seed=76)
        b = random_complex_vector(40, seed=77)
        base = np.linspace(0.1, 1.0, 12) + 1e-3j
        opts = FamilyOptions(switching=False, history="none")
        _, small = solve_family(A, ShiftFamily(shifts=base[:3], b=b, seed_index=1), opts)
        _, large = solve_family(A, ShiftFamily(shifts=base, b=b, seed_index=1), opts)
        assert small.total_mvs == large.total_mvs


class TestSwitchingBehavior:
    def test_partial_without_switching(self):
        H = make_tight_binding_chain(256, onsite=-1.8)
        A = H.scaled(-1.0)
        b = unit_vector(256, 0)
        shifts = (0.4 + 0.001 * np.arange(200)) + 1e-3j
        family = ShiftFamily(shifts=shifts, b=b, seed_index=199)
        _, report = solve_family(A, family, FamilyOptions(switching=False))
        assert report.status == "partial"
        assert len(report.unsolved_indices) > 0
        assert not report.switch_events

    def test_switching_resolves_everything(self):
        H = make_tight_binding_chain(256, onsite=-1.8)
        A = H.scaled(-1.0)
        b = unit_vector(256, 0)
        shifts = (0.4 + 0.001 * np.arange(200)) + 1e-3j
        family = ShiftFamily(shifts=shifts, b=b, seed_index=199)
        _, report = solve_family(A, family)
        assert report.status == "converged"
        assert len(report.switch_events) >= 1
        assert report.seed_sequence[0] == 199
        # switch events advance strictly and promote unsolved shifts
        iters = [ev.iteration for ev in report.switch_events]
        assert iters == sorted(iters)
        for ev in report.switch_events:
            assert ev.unsolved_after <= ev.unsolved_before
            assert ev.new_seed in report.seed_sequence

    def test_switch_costs_no_matvecs(self):
        H = make_tight_binding_chain(128, onsite=-1.8)
        A = H.scaled(-1.0)
        b = unit_vector(128, 0)
        shifts = (0.4 + 0.002 * np.arange(100)) + 1e-3j
        _, report = solve_family(A, ShiftFamily(shifts=shifts, b=b, seed_index=99))
        assert report.switch_events  # at least one switch happened
        assert report.total_mvs == report.iterations_total

    def test_stagnation_switch_smoke(self):
        H = make_tight_binding_chain(64, onsite=-1.8)
        A = H.scaled(-1.0)
        b = unit_vector(64, 0)
        shifts = (0.4 + 0.01 * np.arange(30)) + 1e-3j
        opts = FamilyOptions(stagnation_switch=True, stagnation_window=3, stagnation_factor=1e30)
        _, report = solve_family(A, ShiftFamily(shifts=shifts, b=b, seed_index=29), opts)
        assert report.stagnation_switch_used
        assert report.status == "converged"


class TestReportContents:
    def test_histories_capped_at_solve_iteration(self):
        A = random_complex_symmetric(30, density=0.2, seed=78)
        b = random_complex_vector(30, seed=79)
        shifts = np.array([0.2 + 1e-3j, 0.5 + 1e-3j, 0.9 + 1e-3j])
        X, report = solve_family(A, ShiftFamily(shifts=shifts, b=b, seed_index=1))
        for k in range(3):
            trace = report.history_for(k)
            assert len(trace) == report.iterations_at_solve[k] + 1
            assert not np.isnan(trace).any()
            assert trace[-1] <= report.eps2

    def test_solved_residuals_below_tolerance(self):
        A = random_complex_symmetric(30, density=0.2, seed=80)
        b = random_complex_vector(30, seed=81)
        shifts = np.array([0.2 + 1e-3j, 0.7 + 1e-3j])
        _, report = solve_family(A, ShiftFamily(shifts=shifts, b=b))
        assert all(st == "converged" for st in report.shift_status)
        assert np.all(report.final_recursive_residuals <= report.eps2)
        assert not report.suspect.any()

    def test_pi_log_shape_when_kept(self):
        A = random_complex_symmetric(20, density=0.2, seed=82)
        b = random_complex_vector(20, seed=83)
        shifts = np.array([0.2 + 1e-3j, 0.6 + 1e-3j])
        _, report = solve_family(A, ShiftFamily(shifts=shifts, b=b), FamilyOptions(keep_pi_log=True))
        assert report.pi_log is not None
        assert report.pi_log.shape[1] == 2
        assert report.pi_log.shape[0] >= report.iterations_total
        assert np.array_equal(report.pi_log[0], np.ones(2))

    def test_history_mode_none(self):
        A = random_complex_symmetric(20, density=0.2, seed=84)
        b = random_complex_vector(20, seed=85)
        _, report = solve_family(A, ShiftFamily(shifts=[0.3 + 1e-3j], b=b), FamilyOptions(history="none"))
        assert report.histories is None
        assert report.history_for(0) is None

    def test_invalid_history_mode(self):
        A = SparseSymmetricMatrix.identity(4)
        with pytest.raises(ValueError):
            solve_family(A, ShiftFamily(shifts=[0.0], b=np.ones(4)), FamilyOptions(history="bogus"))

    def test_family_validation(self):
        with pytest.raises(ValueError):
            ShiftFamily(shifts=[], b=np.ones(2))
        with pytest.raises(IndexError):
            ShiftFamily(shifts=[0.1], b=np.ones(2), seed_index=5)
        with pytest.raises(ValueError):
            ShiftFamily(shifts=[0.1], b=np.ones(2), eps1=0.0)

    def test_max_iter_reports_unsolved(self):
        A = random_complex_symmetric(40, density=0.2, seed=86)
        b = random_complex_vector(40, seed=87)
        _, report = solve_family(
            A, ShiftFamily(shifts=[0.2 + 1e-3j, 0.5 + 1e-3j], b=b), FamilyOptions(max_iter=2)
        )
        assert report.status == "max_iter"
        assert report.unsolved_indices
        assert report.iterations_total == 2
