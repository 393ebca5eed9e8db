"""Acceptance suite: one test per criterion, one printed pass/fail line each.

The large-scale scenarios run on a 2048-site chain whose spectrum sits just
below the energy grid, matching the benchmark regime this solver targets
(convergence ruled by conditioning, seed choice controlling the switch
pattern) rather than the degenerate regime where everything converges only by
Krylov-space exhaustion.
"""

import time

import numpy as np
import pytest

from shiftcocg import (
    EnergyGrid,
    FamilyOptions,
    ShiftFamily,
    SparseSymmetricMatrix,
    cocg_init,
    cocg_step,
    compute_green_column,
    make_tight_binding_chain,
    norm2,
    rebase_history,
    recompute_shift_tables,
    residual_polynomial,
    solve_family,
    unit_vector,
    update_pi,
)
from shiftcocg.oracle import jacobi_eigh, per_shift_cocg_baseline, resolvent_from_eig

from conftest import random_complex_symmetric, random_complex_vector

ONE = np.complex128(1.0)

BENCH_ONSITE = -1.8
BENCH_GRID = EnergyGrid(0.4, 0.001, 1001, 1e-3)


def report_line(number, name, ok, detail=""):
    print(f"\nACCEPTANCE {number:02d} {name}: {'PASS' if ok else 'FAIL'} {detail}")


def pi_chain(history, sigma_rel, length):
    seq = [ONE]
    pi_prev, pi_cur = ONE, ONE
    for k in range(length):
        pi_next = update_pi(
            pi_prev, pi_cur, history.alphas[k], history.alpha_at(k - 1), history.beta_at(k - 1), sigma_rel
        )
        pi_prev, pi_cur = pi_cur, pi_next
        seq.append(pi_cur)
    return np.array(seq)


@pytest.fixture(scope="module")
def bench_chain():
    return make_tight_binding_chain(2048, onsite=BENCH_ONSITE)


def test_criterion_1_collinearity():
    t0 = time.perf_counter()
    A = random_complex_symmetric(50, density=0.10, seed=1)
    b = random_complex_vector(50, seed=2, normalize=True)
    shifts = np.linspace(0.0, 1.0, 5) + 1e-3j
    s = 2  # the third shift seeds the family

    seed_state = cocg_init(A, shifts[s], b)
    seed_res = [seed_state.r.copy()]
    for _ in range(20):
        cocg_step(seed_state, A, shifts[s])
        seed_res.append(seed_state.r.copy())
    hist = seed_state.history

    worst = 0.0
    for i, sigma in enumerate(shifts):
        direct = cocg_init(A, sigma, b)
        seq = pi_chain(hist, np.complex128(sigma - shifts[s]), 20)
        for n in range(1, 21):
            cocg_step(direct, A, sigma)
            err = norm2(seed_res[n] - seq[n] * direct.r) / norm2(seed_res[n])
            worst = max(worst, err)
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-8 and elapsed < 1.0
    report_line(1, "collinearity", ok, f"worst={worst:.2e} time={elapsed:.2f}s")
    assert worst <= 1e-8
    assert elapsed < 1.0


def test_criterion_2_pi_identity():
    t0 = time.perf_counter()
    worst = 0.0
    for trial in range(10):
        A = random_complex_symmetric(40, density=0.15, seed=10 + trial)
        b = random_complex_vector(40, seed=40 + trial)
        sigma_s = 0.2 + 1e-3j
        state = cocg_init(A, sigma_s, b)
        for _ in range(30):
            cocg_step(state, A, sigma_s)
        hist = state.history
        rng = np.random.default_rng(trial)
        sigma_i = rng.uniform(-1, 1) + 1j * rng.uniform(1e-3, 0.1)
        seq = pi_chain(hist, np.complex128(sigma_i - sigma_s), 30)
        for n in range(1, 31):
            ref = residual_polynomial(hist, sigma_s - sigma_i, n)
            worst = max(worst, abs(seq[n] - ref) / abs(ref))
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-12 and elapsed < 1.0
    report_line(2, "pi-identity", ok, f"worst={worst:.2e} time={elapsed:.2f}s")
    assert worst <= 1e-12
    assert elapsed < 1.0


def test_criterion_3_switch_ratio_identity():
    t0 = time.perf_counter()
    A = random_complex_symmetric(50, density=0.10, seed=3)
    b = random_complex_vector(50, seed=4)
    shifts = np.linspace(0.0, 0.8, 5) + 1e-3j
    s, t = 2, 4
    n = 12

    state = cocg_init(A, shifts[s], b)
    for _ in range(n):
        cocg_step(state, A, shifts[s])
    hist = state.history
    seq_t = pi_chain(hist, np.complex128(shifts[t] - shifts[s]), n)
    rebased = rebase_history(hist, seq_t)
    others = [i for i in range(5) if i != t]
    table = recompute_shift_tables(rebased, shifts[others] - shifts[t])

    worst = 0.0
    for col, i in enumerate(others):
        seq_i = pi_chain(hist, np.complex128(shifts[i] - shifts[s]), n)
        for k in range(n + 1):
            worst = max(worst, abs(table[k, col] * seq_t[k] - seq_i[k]) / abs(seq_i[k]))
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-10 and elapsed < 1.0
    report_line(3, "switch-ratio-identity", ok, f"worst={worst:.2e} time={elapsed:.2f}s")
    assert worst <= 1e-10
    assert elapsed < 1.0


def test_criterion_4_oracle_equivalence():
    t0 = time.perf_counter()
    H = make_tight_binding_chain(64)
    grid = EnergyGrid(0.4, 0.02, 11, 1e-3)
    result = compute_green_column(H, grid, 0, eps1=1e-12, eps2=1e-12)
    evals, evecs = jacobi_eigh(H.to_dense().real)
    worst_g = 0.0
    for k, z in enumerate(grid.shifts()):
        ref = resolvent_from_eig(evals, evecs, z, 0, 0)
        worst_g = max(worst_g, abs(result.entry(0, k) - ref) / abs(ref))
    worst_res = float(result.report.true_relative_residuals.max())
    elapsed = time.perf_counter() - t0
    ok = worst_g <= 1e-9 and worst_res <= 1e-10 and elapsed < 5.0
    report_line(4, "oracle-equivalence", ok, f"worst_G={worst_g:.2e} worst_res={worst_res:.2e} time={elapsed:.2f}s")
    assert worst_g <= 1e-9
    assert worst_res <= 1e-10
    assert elapsed < 5.0


@pytest.mark.slow
def test_criterion_5_mv_economy(bench_chain):
    t0 = time.perf_counter()
    H = bench_chain
    A = H.scaled(-1.0)
    b = unit_vector(2048, 0)
    shifts = BENCH_GRID.shifts()
    quiet = FamilyOptions(history="none")

    # (a) shifted solve vs per-shift baseline
    result = compute_green_column(H, BENCH_GRID, 0, opts=quiet)
    report = result.report
    assert report.status == "converged"
    assert report.total_mvs == report.iterations_total
    _, baseline_counts, baseline_statuses = per_shift_cocg_baseline(A, shifts, b, eps=1e-12)
    baseline_total = int(baseline_counts.sum())
    ratio = report.total_mvs / baseline_total
    ok_a = ratio < 0.05 and all(s == "converged" for s in baseline_statuses)

    # (b) without switching, a corner seed strands shifts; switching rescues
    unsolved = {}
    for seed in (0, 1000):
        family = ShiftFamily(shifts=shifts, b=b, seed_index=seed)
        _, rep = solve_family(A, family, FamilyOptions(switching=False, history="none"))
        unsolved[seed] = len(rep.unsolved_indices)
    failing = [seed for seed, count in unsolved.items() if count > 0]
    ok_b_stranded = bool(failing)
    rescued = True
    for seed in failing:
        family = ShiftFamily(shifts=shifts, b=b, seed_index=seed)
        _, rep = solve_family(A, family, quiet)
        rescued &= rep.status == "converged"

    elapsed = time.perf_counter() - t0
    ok = ok_a and ok_b_stranded and rescued and elapsed < 180.0
    report_line(
        5,
        "mv-economy",
        ok,
        f"mvs={report.total_mvs} baseline={baseline_total} ratio={100*ratio:.3f}% "
        f"stranded={unsolved} time={elapsed:.1f}s",
    )
    assert ok_a, f"ratio {ratio:.4f} not below 5% or baseline failed"
    assert ok_b_stranded, f"no stranded shifts with switching disabled: {unsolved}"
    assert rescued
    assert elapsed < 180.0


@pytest.mark.slow
def test_criterion_6_seed_choice_robustness(bench_chain):
    t0 = time.perf_counter()
    H = bench_chain
    quiet = FamilyOptions(history="none")
    totals = {}
    switches = {}
    for seed in (301, 501):
        result = compute_green_column(H, BENCH_GRID, 0, seed_index=seed, opts=quiet)
        assert result.report.status == "converged"
        totals[seed] = result.report.total_mvs
        switches[seed] = len(result.report.switch_events)
    spread = abs(totals[301] - totals[501]) / max(totals.values())
    elapsed = time.perf_counter() - t0
    ok = spread < 0.10 and elapsed < 360.0
    report_line(
        6,
        "seed-choice-robustness",
        ok,
        f"mvs={totals} switches={switches} spread={100*spread:.2f}% time={elapsed:.1f}s",
    )
    assert spread < 0.10
    assert elapsed < 360.0


@pytest.mark.slow
def test_criterion_7_mv_counter_independence(bench_chain):
    t0 = time.perf_counter()
    H = bench_chain
    A = H.scaled(-1.0)
    b = unit_vector(2048, 0)
    opts = FamilyOptions(switching=False, history="none")
    totals = {}
    for count in (10, 1001):
        grid = EnergyGrid(0.4, 0.001, count, 1e-3)
        family = ShiftFamily(shifts=grid.shifts(), b=b, seed_index=5)
        _, rep = solve_family(A, family, opts)
        totals[count] = rep.total_mvs
    elapsed = time.perf_counter() - t0
    ok = totals[10] == totals[1001] and elapsed < 60.0
    report_line(7, "mv-counter-independence", ok, f"mvs={totals} time={elapsed:.1f}s")
    assert totals[10] == totals[1001]
    assert elapsed < 60.0


def test_criterion_8_degeneracy_suite():
    t0 = time.perf_counter()

    # duplicate of the seed: bitwise-identical iterates
    A = random_complex_symmetric(32, density=0.2, seed=5)
    b = random_complex_vector(32, seed=6)
    shifts = np.array([0.1 + 1e-3j, 0.5 + 2e-3j, 0.5 + 2e-3j, 0.9 + 1e-3j])
    X, rep = solve_family(A, ShiftFamily(shifts=shifts, b=b, seed_index=1))
    dup_ok = (
        rep.status == "converged"
        and np.array_equal(X[1], X[2])
        and rep.iterations_at_solve[1] == rep.iterations_at_solve[2]
    )

    # identity family: every shift solved at n = 1
    identity = SparseSymmetricMatrix.identity(8)
    Xi, rep_i = solve_family(identity, ShiftFamily(shifts=[0.0, 1.0, 2.0], b=unit_vector(8, 0), seed_index=1))
    identity_ok = rep_i.status == "converged" and rep_i.iterations_at_solve == [1, 1, 1]

    # zero right-hand side: zero solutions at n = 0
    Xz, rep_z = solve_family(A, ShiftFamily(shifts=shifts, b=np.zeros(32)))
    zero_ok = (
        rep_z.status == "converged"
        and rep_z.iterations_total == 0
        and rep_z.iterations_at_solve == [0, 0, 0, 0]
        and not Xz.any()
    )

    elapsed = time.perf_counter() - t0
    ok = dup_ok and identity_ok and zero_ok and elapsed < 1.0
    report_line(
        8, "degeneracy-suite", ok, f"dup={dup_ok} identity={identity_ok} zero={zero_ok} time={elapsed:.2f}s"
    )
    assert dup_ok
    assert identity_ok
    assert zero_ok
    assert elapsed < 1.0


def test_criterion_9_conjugate_orthogonality():
    t0 = time.perf_counter()
    A = random_complex_symmetric(100, density=0.08, seed=7)
    b = random_complex_vector(100, seed=8, normalize=True)
    state = cocg_init(A, 0.0, b)
    residuals = [state.r.copy()]
    for _ in range(20):
        cocg_step(state, A, 0.0)
        residuals.append(state.r.copy())
    worst = 0.0
    for i in range(len(residuals)):
        for j in range(i + 1, len(residuals)):
            value = abs(np.dot(residuals[i], residuals[j]))
            worst = max(worst, value / (norm2(residuals[i]) * norm2(residuals[j])))
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-8 and elapsed < 1.0
    report_line(9, "conjugate-orthogonality", ok, f"worst={worst:.2e} time={elapsed:.2f}s")
    assert worst <= 1e-8
    assert elapsed < 1.0
