"""Sparse complex symmetric matrices and the unconjugated bilinear form.

Everything downstream (the COCG iteration and its shifted variants) is built
on two primitives defined here: a CSR matvec whose call count is tracked on
the matrix handle, and the bilinear form ``u.T @ v`` *without* conjugation,
which replaces the Hermitian inner product for complex symmetric operators.
"""

from __future__ import annotations

import threading

import numpy as np

__all__ = [
    "DimensionMismatchError",
    "SymmetryError",
    "SparseSymmetricMatrix",
    "as_vector",
    "bilinear_form",
    "norm2",
    "unit_vector",
]


class DimensionMismatchError(ValueError):
    """Operand dimensions do not agree."""


class SymmetryError(ValueError):
    """Matrix failed symmetry validation at construction time."""


class _MatvecCounter:
    """Race-free accumulator for matrix-vector product counts."""

    __slots__ = ("_lock", "_count")

    def __init__(self) -> None:
        self._lock = threading.Lock()
        self._count = 0

    def add(self, k: int = 1) -> None:
        with self._lock:
            self._count += k

    def reset(self) -> None:
        with self._lock:
            self._count = 0

    @property
    def value(self) -> int:
        return self._count


def as_vector(x, dim: int | None = None) -> np.ndarray:
    """Coerce ``x`` to a 1-D complex128 array, optionally checking its length."""
    v = np.asarray(x, dtype=np.complex128)
    if v.ndim != 1:
        raise DimensionMismatchError(f"expected a 1-D vector, got shape {v.shape}")
    if dim is not None and v.shape[0] != dim:
        raise DimensionMismatchError(f"expected length {dim}, got {v.shape[0]}")
    return v


def unit_vector(dim: int, index: int) -> np.ndarray:
    """Return the unit coordinate vector e_index of the given dimension."""
    if not 0 <= index < dim:
        raise IndexError(f"unit vector index {index} out of range for dim {dim}")
    e = np.zeros(dim, dtype=np.complex128)
    e[index] = 1.0
    return e


def bilinear_form(u, v) -> np.complex128:
    """Unconjugated bilinear form sum_k u_k v_k (neither argument conjugated).

    This is *not* the Hermitian inner product: ``bilinear_form(u, u)`` can
    vanish for nonzero complex ``u``, which is exactly the breakdown mode the
    solvers watch for.
    """
    u = np.asarray(u)
    v = np.asarray(v)
    if u.shape != v.shape:
        raise DimensionMismatchError(f"shape mismatch {u.shape} vs {v.shape}")
    return np.dot(u, v)


def norm2(v) -> float:
    """Euclidean norm sqrt(sum |v_k|^2)."""
    return float(np.linalg.norm(v))


class SparseSymmetricMatrix:
    """N-by-N complex symmetric matrix in compressed sparse row storage.

    The full symmetric pattern is stored (both triangles): the matvec stays a
    single gather/reduce pass and the matrices handled here are small enough
    that the doubled storage is irrelevant.  Symmetry is validated at
    construction, never assumed.  Real input is promoted to complex storage so
    one code path serves all solvers.

    The handle owns a matvec counter incremented by every ``matvec`` /
    ``shifted_matvec`` call; solver reports cite its value as "total MVs".
    The matrix itself is immutable after construction and safe to share
    across threads; the counter is lock-protected.
    """

    __slots__ = ("dim", "indptr", "indices", "data", "_counter", "_nonempty_rows", "_reduce_starts")

    def __init__(self, dim, indptr, indices, data, validate: bool = True):
        self.dim = int(dim)
        self.indptr = np.ascontiguousarray(indptr, dtype=np.int64)
        self.indices = np.ascontiguousarray(indices, dtype=np.int64)
        self.data = np.ascontiguousarray(data, dtype=np.complex128)
        self._counter = _MatvecCounter()
        if validate:
            self._validate()
        # reduceat bookkeeping, hoisted out of the matvec hot path: segments
        # are formed over non-empty rows only (their starts are strictly
        # increasing, which is what reduceat's [start_i, start_{i+1}) segment
        # rule needs), then scattered back
        nonempty = self.indptr[:-1] < self.indptr[1:]
        self._reduce_starts = self.indptr[:-1][nonempty]
        self._nonempty_rows = np.flatnonzero(nonempty) if not nonempty.all() else None

    # -- construction -----------------------------------------------------

    @classmethod
    def from_coo(cls, dim, rows, cols, values) -> "SparseSymmetricMatrix":
        """Build from coordinate triplets; duplicates are rejected."""
        rows = np.asarray(rows, dtype=np.int64)
        cols = np.asarray(cols, dtype=np.int64)
        values = np.asarray(values, dtype=np.complex128)
        if not (rows.shape == cols.shape == values.shape):
            raise DimensionMismatchError("rows, cols and values must have equal length")
        if rows.size and (rows.min() < 0 or rows.max() >= dim or cols.min() < 0 or cols.max() >= dim):
            raise IndexError("coordinate index out of range")
        order = np.lexsort((cols, rows))
        rows, cols, values = rows[order], cols[order], values[order]
        if rows.size > 1:
            same = (rows[1:] == rows[:-1]) & (cols[1:] == cols[:-1])
            if same.any():
                k = int(np.flatnonzero(same)[0])
                raise ValueError(f"duplicate entry at ({rows[k]}, {cols[k]})")
        indptr = np.zeros(dim + 1, dtype=np.int64)
        np.add.at(indptr, rows + 1, 1)
        np.cumsum(indptr, out=indptr)
        return cls(dim, indptr, cols, values)

    @classmethod
    def from_dense(cls, array) -> "SparseSymmetricMatrix":
        a = np.asarray(array, dtype=np.complex128)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise DimensionMismatchError(f"expected a square matrix, got shape {a.shape}")
        rows, cols = np.nonzero(a)
        return cls.from_coo(a.shape[0], rows, cols, a[rows, cols])

    @classmethod
    def identity(cls, dim: int) -> "SparseSymmetricMatrix":
        idx = np.arange(dim, dtype=np.int64)
        return cls(dim, np.arange(dim + 1, dtype=np.int64), idx, np.ones(dim, dtype=np.complex128))

    @classmethod
    def diagonal(cls, values) -> "SparseSymmetricMatrix":
        values = np.asarray(values, dtype=np.complex128)
        dim = values.shape[0]
        idx = np.arange(dim, dtype=np.int64)
        return cls(dim, np.arange(dim + 1, dtype=np.int64), idx, values)

    def scaled(self, factor: complex) -> "SparseSymmetricMatrix":
        """Return a new handle for factor * A (fresh matvec counter)."""
        return SparseSymmetricMatrix(
            self.dim, self.indptr.copy(), self.indices.copy(), factor * self.data, validate=False
        )

    # -- validation --------------------------------------------------------

    def _validate(self) -> None:
        n, nnz = self.dim, self.data.shape[0]
        if self.indptr.shape[0] != n + 1 or self.indptr[0] != 0 or self.indptr[-1] != nnz:
            raise ValueError("malformed row pointer array")
        if np.any(np.diff(self.indptr) < 0):
            raise ValueError("row pointers must be monotone")
        if self.indices.shape[0] != nnz:
            raise ValueError("column index / value length mismatch")
        if nnz and (self.indices.min() < 0 or self.indices.max() >= n):
            raise IndexError("column index out of range")
        if not np.all(np.isfinite(self.data.view(np.float64))):
            raise ValueError("matrix values must be finite")
        rows = np.repeat(np.arange(n, dtype=np.int64), np.diff(self.indptr))
        order = np.lexsort((self.indices, rows))
        if not np.array_equal(order, np.arange(nnz)):
            # normalize unsorted columns in place
            self.indices = self.indices[order]
            self.data = self.data[order]
        if rows.size > 1:
            same = (rows[1:] == rows[:-1]) & (self.indices[1:] == self.indices[:-1])
            if same.any():
                raise ValueError("duplicate entries within a row")
        # symmetry: the transpose, sorted row-major, must reproduce the entry list
        t_order = np.lexsort((rows, self.indices))
        if not (
            np.array_equal(self.indices[t_order], rows)
            and np.array_equal(rows[t_order], self.indices)
            and np.array_equal(self.data[t_order], self.data)
        ):
            raise SymmetryError("matrix is not symmetric (pattern or values differ from transpose)")

    # -- properties ---------------------------------------------------------

    @property
    def nnz(self) -> int:
        return int(self.data.shape[0])

    @property
    def mv_count(self) -> int:
        """Number of matrix-vector products performed through this handle."""
        return self._counter.value

    def reset_mv_count(self) -> None:
        self._counter.reset()

    # -- operations ----------------------------------------------------------

    def matvec(self, x) -> np.ndarray:
        """Return A @ x; counts one matrix-vector product."""
        x = as_vector(x, self.dim)
        self._counter.add()
        if self.nnz == 0:
            return np.zeros(self.dim, dtype=np.complex128)
        prod = self.data * x[self.indices]
        sums = np.add.reduceat(prod, self._reduce_starts)
        if self._nonempty_rows is None:
            return sums
        out = np.zeros(self.dim, dtype=np.complex128)
        out[self._nonempty_rows] = sums
        return out

    def shifted_matvec(self, sigma: complex, x) -> np.ndarray:
        """Return (A + sigma*I) @ x without materializing the shifted matrix."""
        x = as_vector(x, self.dim)
        out = self.matvec(x)
        out += sigma * x
        return out

    def to_dense(self) -> np.ndarray:
        a = np.zeros((self.dim, self.dim), dtype=np.complex128)
        rows = np.repeat(np.arange(self.dim), np.diff(self.indptr))
        a[rows, self.indices] = self.data
        return a

    def __repr__(self) -> str:
        return f"SparseSymmetricMatrix(dim={self.dim}, nnz={self.nnz}, mv_count={self.mv_count})"
