"""Plain COCG iteration for a single complex symmetric system.

The iteration is the CG recurrence with every Hermitian inner product
replaced by the unconjugated bilinear form.  Each step exposes its scalars
(alpha_n, beta_n) through a history object; the shifted-family driver
consumes that history to propagate all other shifts without extra matvecs.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .linalg import SparseSymmetricMatrix, as_vector, bilinear_form, norm2

__all__ = [
    "BREAKDOWN_TOL",
    "BreakdownError",
    "CocgResult",
    "CocgState",
    "SeedScalarHistory",
    "cocg_init",
    "cocg_solve",
    "cocg_step",
    "residual_polynomial",
]

# Relative threshold below which a bilinear form counts as quasi-null.
BREAKDOWN_TOL = 1e-14


class BreakdownError(RuntimeError):
    """Quasi-null bilinear form (r.T r or p.T A p) halted the recurrence."""

    def __init__(self, kind: str, iteration: int, magnitude: float):
        super().__init__(f"{kind} breakdown at iteration {iteration} (|form| = {magnitude:.3e})")
        self.kind = kind
        self.iteration = iteration
        self.magnitude = magnitude


@dataclass
class SeedScalarHistory:
    """Scalar sequences produced by a COCG run.

    ``alphas[n]`` and ``betas[n]`` are the step-n coefficients;
    ``residual_norms[n]`` is ||r_n|| (so it has one more entry than alphas).
    The conventions alpha_{-1} = 1 and beta_{-1} = 0 are provided by
    :meth:`alpha_at` / :meth:`beta_at` for the shifted recurrences.
    """

    alphas: list = field(default_factory=list)
    betas: list = field(default_factory=list)
    residual_norms: list = field(default_factory=list)

    def alpha_at(self, n: int) -> complex:
        return np.complex128(1.0) if n < 0 else self.alphas[n]

    def beta_at(self, n: int) -> complex:
        return np.complex128(0.0) if n < 0 else self.betas[n]

    def __len__(self) -> int:
        return len(self.alphas)


@dataclass
class CocgState:
    """Mutable state of one COCG iteration (single owner, not shared).

    Fields follow the recurrence: going into step n the state holds x_n, r_n,
    the previous direction p_{n-1}, beta_{n-1} and the cached bilinear form
    r_n.T r_n.  ``p_prev`` starts as the zero vector and ``beta_prev`` as 0.
    """

    n: int
    x: np.ndarray
    r: np.ndarray
    p_prev: np.ndarray
    beta_prev: complex
    rtr: complex
    history: SeedScalarHistory


def cocg_init(A: SparseSymmetricMatrix, sigma: complex, b) -> CocgState:
    """Start a COCG run on (A + sigma*I) x = b.

    The initial iterate is fixed at x_0 = 0 (so r_0 = b with no matvec
    spent); the shifted-system recurrences built on top of this iteration
    are only valid for a zero initial guess, so it is not a parameter.
    """
    b = as_vector(b, A.dim)
    if not np.all(np.isfinite(b.view(np.float64))):
        raise ValueError("right-hand side must be finite")
    r0 = b.copy()
    history = SeedScalarHistory()
    history.residual_norms.append(norm2(r0))
    return CocgState(
        n=0,
        x=np.zeros(A.dim, dtype=np.complex128),
        r=r0,
        p_prev=np.zeros(A.dim, dtype=np.complex128),
        beta_prev=np.complex128(0.0),
        rtr=bilinear_form(r0, r0),
        history=history,
    )


def cocg_step(
    state: CocgState,
    A: SparseSymmetricMatrix,
    sigma: complex,
    breakdown_tol: float = BREAKDOWN_TOL,
) -> CocgState:
    """Advance one COCG step on (A + sigma*I); exactly one matvec.

    Updates, in order: p_n = r_n + beta_{n-1} p_{n-1};
    alpha_n = r_n.T r_n / p_n.T (A + sigma I) p_n; x_{n+1} = x_n + alpha_n p_n;
    r_{n+1} = r_n - alpha_n (A + sigma I) p_n; beta_n from the ratio of cached
    r.T r values.  alpha_n and beta_n are appended to the history.

    Raises :class:`BreakdownError` when a bilinear form is quasi-null
    relative to the corresponding Euclidean norm.
    """
    n = state.n
    r = state.r
    rnorm = state.history.residual_norms[-1]
    if abs(state.rtr) <= breakdown_tol * rnorm * rnorm:
        raise BreakdownError("r.T r", n, abs(state.rtr))
    p = r + state.beta_prev * state.p_prev
    Ap = A.shifted_matvec(sigma, p)
    pAp = bilinear_form(p, Ap)
    pnorm = norm2(p)
    if abs(pAp) <= breakdown_tol * pnorm * pnorm:
        raise BreakdownError("p.T A p", n, abs(pAp))
    alpha = state.rtr / pAp
    state.x += alpha * p
    r_new = r - alpha * Ap
    rtr_new = bilinear_form(r_new, r_new)
    beta = rtr_new / state.rtr
    state.history.alphas.append(alpha)
    state.history.betas.append(beta)
    state.history.residual_norms.append(norm2(r_new))
    state.r = r_new
    state.rtr = rtr_new
    state.p_prev = p
    state.beta_prev = beta
    state.n = n + 1
    return state


@dataclass
class CocgResult:
    x: np.ndarray
    history: SeedScalarHistory
    status: str  # "converged" | "max_iter" | "breakdown"
    iterations: int

    @property
    def converged(self) -> bool:
        return self.status == "converged"


def cocg_solve(
    A: SparseSymmetricMatrix,
    sigma: complex,
    b,
    eps: float = 1e-12,
    max_iter: int | None = None,
    breakdown_tol: float = BREAKDOWN_TOL,
) -> CocgResult:
    """Run COCG on (A + sigma*I) x = b until ||r_n|| <= eps * ||b||.

    Breakdown is surfaced as a result status, not an exception.  The default
    iteration cap is 4N: a Krylov method still unconverged past that signals
    conditioning trouble rather than lack of patience.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    if max_iter is None:
        max_iter = 4 * A.dim
    state = cocg_init(A, sigma, b)
    bnorm = state.history.residual_norms[0]
    threshold = eps * bnorm
    while True:
        if state.history.residual_norms[-1] <= threshold:
            return CocgResult(state.x, state.history, "converged", state.n)
        if state.n >= max_iter:
            return CocgResult(state.x, state.history, "max_iter", state.n)
        try:
            cocg_step(state, A, sigma, breakdown_tol)
        except BreakdownError:
            return CocgResult(state.x, state.history, "breakdown", state.n)


def residual_polynomial(history: SeedScalarHistory, lam: complex, n: int) -> complex:
    """Evaluate the COCG residual polynomial R_n at lam from recorded scalars.

    Three-term recurrence with R_0 = 1 and R_1 = 1 - alpha_0 * lam; the
    degree-n polynomial satisfies r_n = R_n(A + sigma*I) r_0 and R_n(0) = 1.
    Used as an independent oracle for the collinearity factors.
    """
    if n < 0 or n > len(history.alphas):
        raise IndexError(f"polynomial degree {n} outside recorded history of length {len(history.alphas)}")
    if n == 0:
        return np.complex128(1.0)
    r_prev = np.complex128(1.0)  # R_0
    r_cur = 1.0 - history.alphas[0] * lam  # R_1
    for k in range(2, n + 1):
        a_prev, a_prev2 = history.alphas[k - 1], history.alphas[k - 2]
        b_prev2 = history.betas[k - 2]
        coupling = (b_prev2 / a_prev2) * a_prev
        r_next = (1.0 + coupling - a_prev * lam) * r_cur - coupling * r_prev
        r_prev, r_cur = r_cur, r_next
    return r_cur
