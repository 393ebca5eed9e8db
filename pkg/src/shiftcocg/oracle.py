"""Independent brute-force references for tests and the check/bench commands.

Dense LU solves, a cyclic-Jacobi eigendecomposition resolvent, and a
per-shift COCG baseline.  These never sit on the hot path and are written
from scratch so the reference route stays auditable and self-contained; the
size cap keeps them cheap.
"""

from __future__ import annotations

import numpy as np

from .cocg import cocg_solve
from .linalg import SparseSymmetricMatrix, as_vector

__all__ = [
    "ORACLE_CAP",
    "JacobiError",
    "SingularMatrixError",
    "dense_solve",
    "eig_resolvent",
    "jacobi_eigh",
    "per_shift_cocg_baseline",
    "resolvent_from_eig",
]

ORACLE_CAP = 512


class SingularMatrixError(RuntimeError):
    """Dense LU hit a pivot below threshold."""


class JacobiError(RuntimeError):
    """Cyclic Jacobi failed to converge within the sweep budget."""


def _check_cap(n: int) -> None:
    if n > ORACLE_CAP:
        raise ValueError(f"oracle size cap exceeded: {n} > {ORACLE_CAP}")


def dense_solve(a, b, pivot_tol: float = 1e-14) -> np.ndarray:
    """Solve a dense square system by LU with partial pivoting."""
    a = np.array(a, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    n = a.shape[0]
    _check_cap(n)
    x = np.array(as_vector(b, n))
    scale = np.abs(a).max() if n else 0.0
    perm = np.arange(n)
    for k in range(n):
        pivot_row = k + int(np.argmax(np.abs(a[k:, k])))
        if np.abs(a[pivot_row, k]) <= pivot_tol * scale:
            raise SingularMatrixError(f"pivot {np.abs(a[pivot_row, k]):.3e} at column {k}")
        if pivot_row != k:
            a[[k, pivot_row]] = a[[pivot_row, k]]
            perm[[k, pivot_row]] = perm[[pivot_row, k]]
        a[k + 1 :, k] /= a[k, k]
        a[k + 1 :, k + 1 :] -= np.outer(a[k + 1 :, k], a[k, k + 1 :])
    x = x[perm]
    for k in range(1, n):  # forward substitution, unit lower triangle
        x[k] -= a[k, :k] @ x[:k]
    for k in range(n - 1, -1, -1):  # back substitution
        x[k] = (x[k] - a[k, k + 1 :] @ x[k + 1 :]) / a[k, k]
    return x


def jacobi_eigh(h, off_tol: float = 1e-12, max_sweeps: int = 100):
    """Eigendecomposition of a real symmetric matrix by cyclic Jacobi.

    Returns (eigenvalues, eigenvectors) with eigenvectors in columns.
    Converged when every off-diagonal magnitude is at most
    ``off_tol * ||H||_F``; raises :class:`JacobiError` past the sweep budget.
    """
    a = np.array(h, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if not np.array_equal(a, a.T):
        raise ValueError("matrix must be exactly symmetric")
    n = a.shape[0]
    _check_cap(n)
    v = np.eye(n)
    if n == 1:
        return a.diagonal().copy(), v
    fro = np.linalg.norm(a)
    if fro == 0.0:
        return np.zeros(n), v
    threshold = off_tol * fro
    for _ in range(max_sweeps):
        off = a - np.diag(a.diagonal())
        if np.abs(off).max() <= threshold:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= threshold * 1e-2:
                    continue
                tau = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = np.sign(tau) if tau != 0 else 1.0
                t = t / (abs(tau) + np.sqrt(1.0 + tau * tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                rot = np.array([[c, s], [-s, c]])
                a[:, [p, q]] = a[:, [p, q]] @ rot
                a[[p, q], :] = rot.T @ a[[p, q], :]
                a[p, q] = a[q, p] = 0.0
                v[:, [p, q]] = v[:, [p, q]] @ rot
    else:
        raise JacobiError(f"no convergence after {max_sweeps} sweeps")
    evals = a.diagonal().copy()
    order = np.argsort(evals)
    return evals[order], v[:, order]


def resolvent_from_eig(evals, evecs, z: complex, i: int, j: int) -> complex:
    """Sum_mu v_mu(i) v_mu(j) / (z - E_mu) from a precomputed decomposition."""
    return complex(np.sum(evecs[i] * evecs[j] / (z - evals)))


def eig_resolvent(h, z: complex, i: int, j: int) -> complex:
    """Resolvent element e_i.T (zI - H)^{-1} e_j via full eigendecomposition.

    An evaluation route independent of any linear solve; prefer
    :func:`jacobi_eigh` + :func:`resolvent_from_eig` when probing many z.
    """
    evals, evecs = jacobi_eigh(h)
    return resolvent_from_eig(evals, evecs, z, i, j)


def per_shift_cocg_baseline(
    A: SparseSymmetricMatrix,
    shifts,
    b,
    eps: float = 1e-12,
    max_iter: int | None = None,
):
    """Run an independent COCG solve for every shift (the costly baseline).

    Returns (solutions, mv_counts, statuses); the summed matvec count is the
    number the family solver's total is compared against.
    """
    shifts = np.atleast_1d(np.asarray(shifts, dtype=np.complex128))
    solutions = np.zeros((shifts.size, A.dim), dtype=np.complex128)
    mv_counts = np.zeros(shifts.size, dtype=np.int64)
    statuses = []
    for k, sigma in enumerate(shifts):
        before = A.mv_count
        result = cocg_solve(A, sigma, b, eps=eps, max_iter=max_iter)
        mv_counts[k] = A.mv_count - before
        solutions[k] = result.x
        statuses.append(result.status)
    return solutions, mv_counts, statuses
