"""Driver that solves a whole family of shifted systems from one seed run.

One COCG iteration (with its single matvec per step) is run on the seed
system; every other shift is advanced by the scalar collinearity recurrences.
Shifts are retired as soon as their recursive residual norm passes the guard,
and when the seed converges with work left, the seed is switched.  The total
matvec count of a solve therefore equals the number of seed iterations and is
independent of the number of shifts.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .cocg import (
    BREAKDOWN_TOL,
    BreakdownError,
    cocg_init,
    cocg_step,
)
from .linalg import SparseSymmetricMatrix, as_vector, bilinear_form, norm2
from .shifted import PI_VANISH_TOL, PiVanishedError, shifted_alpha, shifted_beta, update_pi
from .switching import SwitchEvent, rebase_history, recompute_shift_tables

__all__ = [
    "FamilyOptions",
    "FamilySolveReport",
    "ShiftFamily",
    "solve_family",
]

# per-shift outcome labels
CONVERGED = "converged"
UNCONVERGED = "unconverged"
PI_VANISHED = "pi_vanished"


@dataclass
class ShiftFamily:
    """A family (A + sigma_k I) x = b sharing one matrix and right-hand side.

    ``eps1`` governs the seed system, ``eps2`` the guard for all other
    shifts; both are relative to ||b||.  Duplicate shifts are legal --
    a duplicate of the seed reproduces the seed iterates exactly.
    """

    shifts: np.ndarray
    b: np.ndarray
    seed_index: int = 0
    eps1: float = 1e-12
    eps2: float = 1e-12

    def __post_init__(self):
        self.shifts = np.atleast_1d(np.asarray(self.shifts, dtype=np.complex128))
        self.b = as_vector(self.b)
        if self.shifts.size < 1:
            raise ValueError("a shift family needs at least one shift")
        if not np.all(np.isfinite(self.shifts.view(np.float64))):
            raise ValueError("shifts must be finite")
        if not 0 <= self.seed_index < self.shifts.size:
            raise IndexError(f"seed index {self.seed_index} out of range for {self.shifts.size} shifts")
        if self.eps1 <= 0 or self.eps2 <= 0:
            raise ValueError("tolerances must be positive")

    @property
    def num_shifts(self) -> int:
        return int(self.shifts.size)


@dataclass
class FamilyOptions:
    """Knobs for :func:`solve_family`.

    ``stagnation_switch`` is a defensive extension, off by default: it forces
    a seed switch when the seed residual has not improved by
    ``stagnation_factor`` over ``stagnation_window`` iterations while
    unsolved shifts remain.  Its use is flagged in the report.
    """

    max_iter: int | None = None  # default 4N
    switching: bool = True
    stagnation_switch: bool = False
    stagnation_window: int = 200
    stagnation_factor: float = 10.0
    history: str = "full"  # "full" | "final" | "none"
    breakdown_tol: float = BREAKDOWN_TOL
    keep_pi_log: bool = False


@dataclass
class FamilySolveReport:
    """Outcome record of a family solve (what the CSV/JSON writers consume).

    ``total_mvs`` counts the matvecs spent by the iteration itself and equals
    the number of seed iterations executed; the closing true-residual
    verification pass (one shifted matvec per shift) is reported separately
    as ``verification_mvs``.  Residual norms are relative to ||b||.
    """

    dim: int
    num_shifts: int
    eps1: float
    eps2: float
    initial_seed: int
    switching_enabled: bool
    status: str  # "converged" | "partial" | "breakdown" | "max_iter"
    shift_status: list
    iterations_at_solve: list
    final_recursive_residuals: np.ndarray
    true_relative_residuals: np.ndarray
    suspect: np.ndarray
    total_mvs: int
    verification_mvs: int
    iterations_total: int
    seed_sequence: list
    switch_events: list
    unsolved_indices: list
    stagnation_switch_used: bool
    wall_time_s: float
    shifts: np.ndarray
    histories: list | None = None
    pi_log: np.ndarray | None = None
    breakdown_info: str | None = None

    @property
    def converged(self) -> bool:
        return self.status == "converged"

    def history_for(self, index: int):
        """Recursive residual-norm trace of one shift (None without full history)."""
        if self.histories is None:
            return None
        return self.histories[index]


class _FamilyRun:
    """Mutable working set of one solve, kept out of the public surface."""

    def __init__(self, A: SparseSymmetricMatrix, family: ShiftFamily, opts: FamilyOptions):
        m, dim = family.num_shifts, A.dim
        self.A = A
        self.family = family
        self.opts = opts
        self.seed = family.seed_index
        self.bnorm = norm2(family.b)
        self.max_iter = opts.max_iter if opts.max_iter is not None else 4 * dim
        self.X = np.zeros((m, dim), dtype=np.complex128)
        self.P = np.zeros((m, dim), dtype=np.complex128)
        self.pi_prev = np.ones(m, dtype=np.complex128)
        self.pi_cur = np.ones(m, dtype=np.complex128)
        self.solved = np.zeros(m, dtype=bool)
        self.frozen = np.zeros(m, dtype=bool)
        self.solve_iter = np.full(m, -1, dtype=np.int64)
        self.final_rec = np.full(m, np.nan)
        self.pi_log = [np.ones(m, dtype=np.complex128)]
        self.hist_rows = [] if opts.history == "full" else None
        self.seed_sequence = [self.seed]
        self.events: list[SwitchEvent] = []
        self.stagnation_used = False
        self.state = cocg_init(A, family.shifts[self.seed], family.b)
        # stagnation reference (norm, iteration)
        self.ref_norm = self.state.history.residual_norms[-1]
        self.ref_n = 0

    # -- bookkeeping ------------------------------------------------------

    def record_and_mark(self) -> None:
        """Record the current residual row and retire shifts passing the guard."""
        seed_abs = self.state.history.residual_norms[-1]
        n = self.state.n
        m = self.family.num_shifts
        rel = np.full(m, np.nan)
        active_idx = np.flatnonzero(~self.solved & ~self.frozen)
        rel[active_idx] = seed_abs / np.abs(self.pi_cur[active_idx]) / self.bnorm
        if self.hist_rows is not None:
            self.hist_rows.append(rel)
        passed = rel[active_idx] <= self.family.eps2
        idx = active_idx[passed]
        idx = idx[idx != self.seed]  # the seed's own criterion is eps1
        if idx.size:
            self.solved[idx] = True
            self.solve_iter[idx] = n
            self.final_rec[idx] = rel[idx]

    def unsolved_count(self) -> int:
        return int((~self.solved & ~self.frozen).sum())

    def mark_seed_solved(self, seed_rel: float) -> None:
        self.solved[self.seed] = True
        self.solve_iter[self.seed] = self.state.n
        self.final_rec[self.seed] = seed_rel
        self.X[self.seed] = self.state.x

    # -- shifted update -----------------------------------------------------

    def update_shifts(self, r_n: np.ndarray, n: int) -> None:
        hist = self.state.history
        alpha = hist.alphas[n]
        alpha_prev = hist.alpha_at(n - 1)
        beta_prev = hist.beta_at(n - 1)
        act = np.flatnonzero(~self.solved & ~self.frozen)
        act = act[act != self.seed]
        if act.size:
            pp = self.pi_prev[act]
            pc = self.pi_cur[act]
            srel = self.family.shifts[act] - self.family.shifts[self.seed]
            pn = update_pi(pp, pc, alpha, alpha_prev, beta_prev, srel)
            dead = np.abs(pn) <= PI_VANISH_TOL
            if dead.any():
                self.frozen[act[dead]] = True
                live = act[~dead]
                pc_live, pn_live = pc[~dead], pn[~dead]
                pp_live = pp[~dead]
            else:
                live, pp_live, pc_live, pn_live = act, pp, pc, pn
            if live.size:
                beta_s = shifted_beta(pp_live, pc_live, beta_prev)
                alpha_s = shifted_alpha(pc_live, pn_live, alpha)
                p_rows = r_n[None, :] / pc_live[:, None] + beta_s[:, None] * self.P[live]
                self.X[live] += alpha_s[:, None] * p_rows
                self.P[live] = p_rows
            self.pi_prev[act] = pc
            self.pi_cur[act] = pn
        self.pi_log.append(self.pi_cur.copy())

    # -- seed switching -----------------------------------------------------

    def attempt_switch(self, seed_was_solved: bool, unsolved_before: int) -> bool:
        """Promote the worst unsolved shift to seed; False if no candidate works."""
        n = self.state.n
        seed_abs = self.state.history.residual_norms[-1]
        eligible = ~self.solved & ~self.frozen
        eligible[self.seed] = False
        if not eligible.any():
            return False
        cand_idx = np.flatnonzero(eligible)
        norms = seed_abs / np.abs(self.pi_cur[cand_idx])
        # largest norm first, ties by lowest shift index
        order = np.lexsort((cand_idx, -norms))
        pi_mat = np.vstack(self.pi_log)  # (n+1, m)
        chosen = None
        rebased = None
        for k in order:
            cand = int(cand_idx[k])
            pi_seq = pi_mat[:, cand]
            try:
                rebased = rebase_history(self.state.history, pi_seq)
            except PiVanishedError:
                continue
            chosen = cand
            break
        if chosen is None:
            return False
        if not seed_was_solved:
            # stagnation switch: the old seed rejoins the family as a shift
            self.X[self.seed] = self.state.x
            self.P[self.seed] = self.state.p_prev
        # continue the COCG iteration on the promoted system
        pi_seq = pi_mat[:, chosen]
        r_new = self.state.r / pi_seq[n]
        self.state.x = self.X[chosen].copy()
        self.state.r = r_new
        self.state.p_prev = self.P[chosen].copy()
        self.state.beta_prev = rebased.betas[-1] if rebased.betas else np.complex128(0.0)
        self.state.rtr = bilinear_form(r_new, r_new)
        self.state.history = rebased
        old_seed = self.seed
        self.seed = chosen
        # regenerate the factor tables of every remaining shift from the
        # rebased history (scalar work only)
        targets = np.flatnonzero(~self.solved & ~self.frozen)
        targets = targets[targets != chosen]
        if targets.size:
            srel = self.family.shifts[targets] - self.family.shifts[chosen]
            table = recompute_shift_tables(rebased, srel)
            bad = (np.abs(table[-1]) <= PI_VANISH_TOL) | (np.abs(table[-2]) <= PI_VANISH_TOL)
            if bad.any():
                self.frozen[targets[bad]] = True
            good_cols = np.flatnonzero(~bad)
            good = targets[good_cols]
            self.pi_prev[good] = table[-2, good_cols]
            self.pi_cur[good] = table[-1, good_cols]
            for j in range(n + 1):
                self.pi_log[j][good] = table[j, good_cols]
        self.pi_prev[chosen] = np.complex128(1.0)
        self.pi_cur[chosen] = np.complex128(1.0)
        for j in range(n + 1):
            self.pi_log[j][chosen] = 1.0
        self.seed_sequence.append(chosen)
        self.events.append(
            SwitchEvent(
                iteration=n,
                old_seed=old_seed,
                new_seed=chosen,
                unsolved_before=unsolved_before,
                unsolved_after=self.unsolved_count(),
            )
        )
        # reset the stagnation reference for the new seed
        self.ref_norm = norm2(self.state.r)
        self.ref_n = n
        return True

    def stagnated(self, seed_abs: float, n: int) -> bool:
        if seed_abs <= self.ref_norm / self.opts.stagnation_factor:
            self.ref_norm = seed_abs
            self.ref_n = n
            return False
        return (n - self.ref_n) >= self.opts.stagnation_window


def solve_family(
    A: SparseSymmetricMatrix,
    family: ShiftFamily,
    opts: FamilyOptions | None = None,
):
    """Solve (A + sigma_k I) x^(k) = b for all k; returns (solutions, report).

    Runs the seed COCG loop; each iteration advances every unsolved non-seed
    shift by the collinearity recurrences.  A shift is retired when its
    recursive residual norm passes eps2 * ||b||; when the seed meets eps1
    with unsolved shifts remaining and switching is enabled, the worst
    unsolved shift is promoted to seed.  Terminates when all systems are
    solved, the iteration cap is hit, or the seed breaks down.

    The returned solutions array has shape (m, N).  A closing verification
    pass computes the true relative residual of every shift (m shifted
    matvecs, reported separately from the solver matvec count); a retired
    shift whose true residual exceeds 100 * eps2 is flagged suspect rather
    than silently reported as converged.
    """
    if opts is None:
        opts = FamilyOptions()
    if opts.history not in ("full", "final", "none"):
        raise ValueError(f"unknown history mode {opts.history!r}")
    t0 = time.perf_counter()
    m, dim = family.num_shifts, A.dim
    if as_vector(family.b).shape[0] != dim:
        raise ValueError("right-hand side length does not match the operator dimension")

    run = _FamilyRun(A, family, opts)
    mv_start = A.mv_count
    status = None
    breakdown_info = None

    if run.bnorm == 0.0:
        # zero right-hand side: every system is solved by x = 0 at step 0
        run.solved[:] = True
        run.solve_iter[:] = 0
        run.final_rec[:] = 0.0
        if run.hist_rows is not None:
            run.hist_rows.append(np.zeros(m))
        status = "converged"
    else:
        run.record_and_mark()  # iteration 0
        while True:
            # invariant: the residual row for the current iteration is recorded
            seed_abs = run.state.history.residual_norms[-1]
            seed_rel = seed_abs / run.bnorm
            n = run.state.n
            if seed_rel <= family.eps1:
                unsolved_before = run.unsolved_count()
                run.mark_seed_solved(seed_rel)
                if run.unsolved_count() == 0:
                    status = "converged" if not run.frozen.any() else "partial"
                    break
                if not opts.switching:
                    status = "partial"
                    break
                if not run.attempt_switch(seed_was_solved=True, unsolved_before=unsolved_before):
                    status = "partial"
                    breakdown_info = "seed switch failed: no viable candidate"
                    break
                continue
            if n >= run.max_iter:
                status = "max_iter"
                run.X[run.seed] = run.state.x
                break
            if (
                opts.stagnation_switch
                and opts.switching
                and run.unsolved_count() > 1
                and run.stagnated(seed_abs, n)
            ):
                unsolved_before = run.unsolved_count()
                if run.attempt_switch(seed_was_solved=False, unsolved_before=unsolved_before):
                    run.stagnation_used = True
                    continue
            r_n = run.state.r
            try:
                cocg_step(run.state, A, family.shifts[run.seed], opts.breakdown_tol)
            except BreakdownError as exc:
                status = "breakdown"
                breakdown_info = str(exc)
                run.X[run.seed] = run.state.x
                break
            run.update_shifts(r_n, n)
            run.record_and_mark()

    solver_mvs = A.mv_count - mv_start
    # close out recursive residuals for whatever is still open
    seed_abs = run.state.history.residual_norms[-1]
    open_idx = np.flatnonzero(~run.solved & ~run.frozen)
    if open_idx.size and run.bnorm > 0:
        run.final_rec[open_idx] = seed_abs / np.abs(run.pi_cur[open_idx]) / run.bnorm

    # verification pass: one shifted matvec per shift, counted separately
    true_rel = np.zeros(m)
    if run.bnorm > 0:
        for i in range(m):
            resid = family.b - A.shifted_matvec(family.shifts[i], run.X[i])
            true_rel[i] = norm2(resid) / run.bnorm
    verification_mvs = A.mv_count - mv_start - solver_mvs

    shift_status = []
    for i in range(m):
        if run.frozen[i]:
            shift_status.append(PI_VANISHED)
        elif run.solved[i]:
            shift_status.append(CONVERGED)
        else:
            shift_status.append(UNCONVERGED)
    suspect = run.solved & (true_rel > 100.0 * family.eps2)
    unsolved_indices = [i for i in range(m) if shift_status[i] != CONVERGED]

    histories = None
    if run.hist_rows is not None:
        rows = np.vstack(run.hist_rows) if run.hist_rows else np.zeros((0, m))
        histories = []
        for i in range(m):
            col = rows[:, i]
            stop = run.solve_iter[i] + 1 if run.solved[i] else col.shape[0]
            histories.append(col[:stop])

    report = FamilySolveReport(
        dim=dim,
        num_shifts=m,
        eps1=family.eps1,
        eps2=family.eps2,
        initial_seed=family.seed_index,
        switching_enabled=opts.switching,
        status=status,
        shift_status=shift_status,
        iterations_at_solve=[int(k) if k >= 0 else None for k in run.solve_iter],
        final_recursive_residuals=run.final_rec,
        true_relative_residuals=true_rel,
        suspect=suspect,
        total_mvs=solver_mvs,
        verification_mvs=verification_mvs,
        iterations_total=run.state.n,
        seed_sequence=run.seed_sequence,
        switch_events=run.events,
        unsolved_indices=unsolved_indices,
        stagnation_switch_used=run.stagnation_used,
        wall_time_s=time.perf_counter() - t0,
        shifts=family.shifts.copy(),
        histories=histories,
        pi_log=np.vstack(run.pi_log) if opts.keep_pi_log else None,
        breakdown_info=breakdown_info,
    )
    return run.X, report
