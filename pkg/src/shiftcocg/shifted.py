"""Collinearity recurrences that propagate one COCG seed run to shifted systems.

For the family (A + sigma_i I) x = b with a common right-hand side and zero
initial guesses, the residuals of every member are collinear with the seed's:
r_n = pi_n * r_n^(i).  The factor pi_n is the seed residual polynomial
evaluated at the (negated) shift offset and obeys a scalar three-term
recurrence driven by the seed's alpha/beta sequences.  From it, the shifted
alpha/beta and hence the shifted iterates follow with no additional matvecs.

All scalar functions here broadcast: they accept plain complex scalars or
numpy arrays of factors, which is how the family driver updates every shift
of one iteration in a single call.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "PI_VANISH_TOL",
    "PiVanishedError",
    "ShiftedSystemState",
    "shifted_alpha",
    "shifted_beta",
    "shifted_residual_norm",
    "shifted_system_step",
    "update_pi",
]

# |pi| at or below this is treated as a vanished collinearity factor: the
# seed residual polynomial has a root at that shift offset and the shifted
# recurrences would divide by (near) zero.
PI_VANISH_TOL = 1e-300


class PiVanishedError(RuntimeError):
    """A collinearity factor vanished; the affected shift cannot be advanced."""

    def __init__(self, context: str, magnitude: float):
        super().__init__(f"collinearity factor vanished in {context} (|pi| = {magnitude:.3e})")
        self.context = context
        self.magnitude = magnitude


def _require_nonvanished(pi, context: str) -> None:
    mag = np.min(np.abs(pi))
    if mag <= PI_VANISH_TOL:
        raise PiVanishedError(context, float(mag))


def update_pi(pi_prev, pi_cur, alpha, alpha_prev, beta_prev, sigma_rel):
    """Advance the collinearity factor by its three-term recurrence.

    ``sigma_rel`` is the shift offset sigma_i - sigma_seed; alpha/beta are the
    seed scalars of the current step (alpha_{-1} = 1, beta_{-1} = 0 for the
    first call).  Returns

        pi_next = (1 + (beta_prev/alpha_prev)*alpha + alpha*sigma_rel) * pi_cur
                  - (beta_prev/alpha_prev)*alpha * pi_prev

    evaluated in the equivalent incremental grouping
    ``pi_cur + coupling*(pi_cur - pi_prev) + alpha*sigma_rel*pi_cur`` so that a
    zero offset is exactly neutral: for sigma_rel == 0 the factor stays
    bitwise equal to 1 and a duplicate of the seed reproduces the seed
    iterates exactly.  The result equals the seed residual polynomial
    evaluated at ``-sigma_rel`` (see :func:`shiftcocg.cocg.residual_polynomial`).
    """
    coupling = (beta_prev / alpha_prev) * alpha
    return pi_cur + coupling * (pi_cur - pi_prev) + (alpha * sigma_rel) * pi_cur


def shifted_alpha(pi_cur, pi_next, alpha):
    """alpha of the shifted system: (pi_cur / pi_next) * alpha."""
    _require_nonvanished(pi_next, "shifted_alpha")
    return (pi_cur / pi_next) * alpha


def shifted_beta(pi_prev, pi_cur, beta_prev):
    """beta of the shifted system: (pi_prev / pi_cur)**2 * beta_prev."""
    _require_nonvanished(pi_cur, "shifted_beta")
    ratio = pi_prev / pi_cur
    # ratio * ratio, not ratio**2: the complex power kernel differs between
    # numpy scalars and arrays, and the scalar and batched update paths must
    # produce bitwise-identical factors
    return ratio * ratio * beta_prev


def shifted_residual_norm(pi_cur, seed_residual_norm):
    """Residual norm of the shifted system without forming its residual.

    Collinearity gives ||r_n^(i)|| = ||r_n|| / |pi_n|, so the convergence
    guard for every shift costs one scalar division per iteration.
    """
    _require_nonvanished(pi_cur, "shifted_residual_norm")
    return seed_residual_norm / np.abs(pi_cur)


@dataclass
class ShiftedSystemState:
    """Per-shift iterate advanced purely by scalar recurrences.

    Exactly two vectors (x, p) and the collinearity-factor triplet are kept
    per shift; the shifted residual vector is never formed.  ``pi_prev`` and
    ``pi_cur`` hold the factors at the two most recent iterations; ``pi_next``
    is the value computed by the latest step (equal to ``pi_cur`` after the
    rotation).  A solved state must never be stepped again.
    """

    x: np.ndarray
    p: np.ndarray
    pi_prev: complex
    pi_cur: complex
    pi_next: complex | None = None
    solved: bool = False
    iterations_at_solve: int | None = None

    @classmethod
    def fresh(cls, dim: int) -> "ShiftedSystemState":
        return cls(
            x=np.zeros(dim, dtype=np.complex128),
            p=np.zeros(dim, dtype=np.complex128),
            pi_prev=np.complex128(1.0),
            pi_cur=np.complex128(1.0),
        )


def shifted_system_step(
    state: ShiftedSystemState,
    r,
    alpha,
    alpha_prev,
    beta_prev,
    sigma_rel,
) -> ShiftedSystemState:
    """Advance one shifted system by one iteration of the seed it follows.

    ``r`` is the seed residual r_n and alpha/alpha_prev/beta_prev the seed
    scalars of step n.  In order: the factor triplet is advanced, the shifted
    beta and alpha derived, then p and x updated:

        p <- r / pi_cur + beta_shift * p
        x <- x + alpha_shift * p

    No matvec and no vectors beyond x and p are involved.  Raises
    :class:`PiVanishedError` (state untouched) if the new factor vanishes.
    """
    if state.solved:
        raise RuntimeError("attempted to step a solved shifted system")
    pi_next = update_pi(state.pi_prev, state.pi_cur, alpha, alpha_prev, beta_prev, sigma_rel)
    _require_nonvanished(pi_next, "shifted_system_step")
    beta_s = shifted_beta(state.pi_prev, state.pi_cur, beta_prev)
    alpha_s = shifted_alpha(state.pi_cur, pi_next, alpha)
    state.p = r / state.pi_cur + beta_s * state.p
    state.x = state.x + alpha_s * state.p
    state.pi_prev = state.pi_cur
    state.pi_cur = pi_next
    state.pi_next = pi_next
    return state
