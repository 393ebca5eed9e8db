import numpy as np
import pytest

from shiftcocg import SparseSymmetricMatrix


def random_complex_symmetric(
    n: int,
    density: float = 0.1,
    diag_boost: float = 2.5,
    seed: int = 0,
    imag_diag: float = 0.0,
) -> SparseSymmetricMatrix:
    """Random complex symmetric test matrix, diagonally boosted for conditioning.

    Off-diagonal entries are mirrored exactly, so symmetry holds bitwise.
    """
    rng = np.random.default_rng(seed)
    a = np.zeros((n, n), dtype=np.complex128)
    iu, ju = np.triu_indices(n, k=1)
    keep = rng.random(iu.size) < density
    m = int(keep.sum())
    a[iu[keep], ju[keep]] = 0.5 * (rng.standard_normal(m) + 1j * rng.standard_normal(m))
    a = a + a.T
    diag = diag_boost + 0.3 * rng.standard_normal(n)
    if imag_diag:
        diag = diag + 1j * imag_diag * rng.standard_normal(n)
    a[np.arange(n), np.arange(n)] = diag
    return SparseSymmetricMatrix.from_dense(a)


def random_complex_vector(n: int, seed: int = 0, normalize: bool = False) -> np.ndarray:
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    if normalize:
        v /= np.linalg.norm(v)
    return v


@pytest.fixture
def small_matrix():
    return random_complex_symmetric(12, density=0.3, seed=9)
