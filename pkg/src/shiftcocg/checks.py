"""Invariant suite behind the ``check`` CLI command.

Runs the method's defining identities on a user-supplied matrix at reduced
tolerances: symmetry of the bilinear form, shifted-matvec consistency,
residual collinearity against independent per-shift runs, the collinearity
factor / residual polynomial identity, and (for small matrices) agreement
with the dense oracle.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cocg import cocg_init, cocg_step, residual_polynomial
from .family import FamilyOptions, ShiftFamily, solve_family
from .linalg import SparseSymmetricMatrix, bilinear_form, norm2
from .oracle import ORACLE_CAP, dense_solve
from .shifted import update_pi

__all__ = ["CheckOutcome", "run_invariant_checks"]


@dataclass
class CheckOutcome:
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f"check {self.name}: {'PASS' if self.passed else 'FAIL'} ({self.detail})"


def _check_shifts(A: SparseSymmetricMatrix) -> np.ndarray:
    scale = float(np.abs(A.data).max()) if A.nnz else 1.0
    scale = max(scale, 1.0)
    return scale * np.array([0.05 + 1e-3j, 0.15 + 1e-3j, 0.25 + 1e-3j])


def run_invariant_checks(A: SparseSymmetricMatrix, seed: int = 7, steps: int = 15) -> list:
    """Return one :class:`CheckOutcome` per invariant (reduced tolerances)."""
    rng = np.random.default_rng(seed)
    n = A.dim
    outcomes = []

    def vec() -> np.ndarray:
        return rng.standard_normal(n) + 1j * rng.standard_normal(n)

    # bilinear-form symmetry against the operator
    u, v = vec(), vec()
    lhs = bilinear_form(u, A.matvec(v))
    rhs = bilinear_form(v, A.matvec(u))
    scale = max(abs(lhs), abs(rhs), 1e-30)
    err = abs(lhs - rhs) / scale
    outcomes.append(CheckOutcome("bilinear-symmetry", err <= 1e-12, f"relative error {err:.2e}"))

    # shifted matvec equals matvec plus scaled vector
    sigma = 0.3 + 0.7j
    x = vec()
    direct = A.shifted_matvec(sigma, x)
    composed = A.matvec(x) + sigma * x
    denom = np.maximum(np.abs(composed), 1e-30)
    err = float(np.max(np.abs(direct - composed) / denom))
    outcomes.append(CheckOutcome("shifted-matvec", err <= 1e-14, f"max entry error {err:.2e}"))

    # collinearity of seed and per-shift residuals over a short window
    shifts = _check_shifts(A)
    b = vec()
    b /= norm2(b)
    seed_idx = 1
    window = min(steps, 4 * n)
    seed_state = cocg_init(A, shifts[seed_idx], b)
    seed_res = [seed_state.r.copy()]
    for _ in range(window):
        if seed_state.history.residual_norms[-1] <= 1e-13:
            break
        cocg_step(seed_state, A, shifts[seed_idx])
        seed_res.append(seed_state.r.copy())
    hist = seed_state.history
    worst = 0.0
    for i, sig in enumerate(shifts):
        if i == seed_idx:
            continue
        direct_state = cocg_init(A, sig, b)
        pi_prev, pi_cur = np.complex128(1.0), np.complex128(1.0)
        srel = sig - shifts[seed_idx]
        for k in range(len(seed_res) - 1):
            cocg_step(direct_state, A, sig)
            pi_next = update_pi(pi_prev, pi_cur, hist.alphas[k], hist.alpha_at(k - 1), hist.beta_at(k - 1), srel)
            pi_prev, pi_cur = pi_cur, pi_next
            rn = seed_res[k + 1]
            err = norm2(rn - pi_cur * direct_state.r) / max(norm2(rn), 1e-300)
            worst = max(worst, err)
    outcomes.append(CheckOutcome("collinearity", worst <= 1e-6, f"worst relative error {worst:.2e}"))

    # collinearity factor equals the residual polynomial
    worst = 0.0
    for sig in shifts:
        srel = sig - shifts[seed_idx]
        pi_prev, pi_cur = np.complex128(1.0), np.complex128(1.0)
        for k in range(len(hist.alphas)):
            pi_next = update_pi(pi_prev, pi_cur, hist.alphas[k], hist.alpha_at(k - 1), hist.beta_at(k - 1), srel)
            pi_prev, pi_cur = pi_cur, pi_next
            ref = residual_polynomial(hist, -srel, k + 1)
            worst = max(worst, abs(pi_cur - ref) / max(abs(ref), 1e-300))
    outcomes.append(CheckOutcome("pi-identity", worst <= 1e-10, f"worst relative error {worst:.2e}"))

    # family solve true residuals, cross-checked against the dense oracle
    family = ShiftFamily(shifts=shifts, b=b, seed_index=seed_idx, eps1=1e-10, eps2=1e-10)
    solutions, report = solve_family(A, family, FamilyOptions(history="none"))
    worst_true = float(np.max(report.true_relative_residuals))
    solved_ok = report.status == "converged" and worst_true <= 1e-8
    outcomes.append(
        CheckOutcome(
            "family-solve",
            solved_ok,
            f"status {report.status}, worst true residual {worst_true:.2e}",
        )
    )
    if n <= ORACLE_CAP:
        dense = A.to_dense()
        worst = 0.0
        for k, sig in enumerate(shifts):
            ref = dense_solve(dense + sig * np.eye(n), b)
            worst = max(worst, norm2(solutions[k] - ref) / max(norm2(ref), 1e-300))
        outcomes.append(CheckOutcome("dense-oracle", worst <= 1e-6, f"worst relative error {worst:.2e}"))
    return outcomes
