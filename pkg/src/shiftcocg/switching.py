"""Seed switching: promote an unsolved shift to seed without restarting.

When the current seed converges, the accumulated Krylov information is not
discarded.  The worst unsolved shift is promoted to the new seed, its
residual and direction vectors are recovered from the collinearity identity,
and the scalar history is re-based so that the iteration continues as if the
new seed had been driven from the start.  The whole procedure costs scalar
work only: the matvec counter does not move during a switch.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cocg import SeedScalarHistory
from .shifted import PI_VANISH_TOL, PiVanishedError, update_pi

__all__ = [
    "NoUnsolvedError",
    "SwitchEvent",
    "rebase_history",
    "rebase_seed_vectors",
    "recompute_shift_tables",
    "select_new_seed",
]


class NoUnsolvedError(RuntimeError):
    """Seed selection was asked to pick from an empty candidate set."""


@dataclass(frozen=True)
class SwitchEvent:
    """One seed promotion: recorded in solve reports (strictly increasing n)."""

    iteration: int
    old_seed: int
    new_seed: int
    unsolved_before: int
    unsolved_after: int


def select_new_seed(shifted_norms, eligible) -> int:
    """Index of the eligible shift with the largest recursive residual norm.

    ``shifted_norms`` are the per-shift residual norms ||r_n|| / |pi_n| and
    ``eligible`` a boolean mask of unsolved candidates.  Ties break to the
    lowest index (deterministic).
    """
    shifted_norms = np.asarray(shifted_norms, dtype=np.float64)
    eligible = np.asarray(eligible, dtype=bool)
    if shifted_norms.shape != eligible.shape:
        raise ValueError("norms and eligibility mask must have equal shape")
    if not eligible.any():
        raise NoUnsolvedError("no unsolved systems to promote")
    masked = np.where(eligible, shifted_norms, -np.inf)
    return int(np.argmax(masked))


def rebase_seed_vectors(r, pi_next, beta_last, pi_cur, p):
    """Recover the new seed's residual and direction from the old seed's.

    Given the old seed's current residual ``r``, the candidate's collinearity
    factors at the last two iterations (``pi_cur``, ``pi_next``) and the old
    seed's latest beta, returns the pair (r_new, p_new) with

        r_new = r / pi_next
        p_new = r_new + (pi_cur / pi_next)**2 * beta_last * p

    from which the COCG iteration on the promoted system continues at the
    next step as if it had been run from scratch.
    """
    for value, what in ((pi_next, "rebase_seed_vectors"), (pi_cur, "rebase_seed_vectors")):
        if abs(value) <= PI_VANISH_TOL:
            raise PiVanishedError(what, float(abs(value)))
    r_new = r / pi_next
    ratio = pi_cur / pi_next
    beta_new = ratio * ratio * beta_last
    p_new = r_new + beta_new * p
    return r_new, p_new


def rebase_history(history: SeedScalarHistory, pi_sequence) -> SeedScalarHistory:
    """Re-base a seed scalar history onto a promoted shift.

    ``pi_sequence`` holds the candidate's collinearity factors pi_0 .. pi_n
    where n = len(history).  The rebased sequences are

        alpha_k' = (pi_k / pi_{k+1}) * alpha_k
        beta_k'  = (pi_k / pi_{k+1})**2 * beta_k

    and the recorded residual norms are rescaled by 1/|pi_k|, which is what a
    COCG run on the promoted system would have produced.  The input history
    is left untouched.
    """
    pi_seq = np.asarray(pi_sequence, dtype=np.complex128)
    n = len(history.alphas)
    if pi_seq.shape[0] < n + 1:
        raise ValueError(f"need {n + 1} collinearity factors, got {pi_seq.shape[0]}")
    mags = np.abs(pi_seq[: n + 1])
    if np.any(mags <= PI_VANISH_TOL):
        raise PiVanishedError("rebase_history", float(mags.min()))
    ratios = pi_seq[:n] / pi_seq[1 : n + 1]
    rebased = SeedScalarHistory()
    rebased.alphas = [ratios[k] * history.alphas[k] for k in range(n)]
    rebased.betas = [ratios[k] * ratios[k] * history.betas[k] for k in range(n)]
    rebased.residual_norms = [
        history.residual_norms[k] / mags[k] for k in range(len(history.residual_norms))
    ]
    return rebased


def recompute_shift_tables(rebased: SeedScalarHistory, sigma_rels) -> np.ndarray:
    """Regenerate collinearity-factor tables for the remaining shifts.

    Re-runs the pi recurrence from (1, 1) through the rebased history for
    every shift offset in ``sigma_rels`` (sigma_i - sigma_newseed).  Returns
    an array of shape (n+1, k) whose row j holds pi_j for all k shifts; the
    caller installs the last two rows as the live factor pair.  Scalar
    operations only -- no vector work, no matvecs.
    """
    srel = np.asarray(sigma_rels, dtype=np.complex128)
    n = len(rebased.alphas)
    table = np.empty((n + 1, srel.shape[0]), dtype=np.complex128)
    pi_prev = np.ones(srel.shape[0], dtype=np.complex128)
    pi_cur = np.ones(srel.shape[0], dtype=np.complex128)
    table[0] = pi_cur
    for k in range(n):
        pi_next = update_pi(
            pi_prev, pi_cur, rebased.alphas[k], rebased.alpha_at(k - 1), rebased.beta_at(k - 1), srel
        )
        pi_prev, pi_cur = pi_cur, pi_next
        table[k + 1] = pi_cur
    return table
