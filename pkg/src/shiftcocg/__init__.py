"""Shifted COCG with seed switching for complex symmetric shifted systems.

Solves families (A + sigma_k I) x^(k) = b sharing one complex symmetric
matrix and right-hand side at the matvec cost of a single Krylov run, and
applies this to Green's-function matrix elements on an energy grid.
"""

from .cocg import (
    BreakdownError,
    CocgResult,
    CocgState,
    SeedScalarHistory,
    cocg_init,
    cocg_solve,
    cocg_step,
    residual_polynomial,
)
from .family import FamilyOptions, FamilySolveReport, ShiftFamily, solve_family
from .greens import (
    EnergyGrid,
    GreensResult,
    build_shift_family,
    chain_eigenvalues,
    compute_green_column,
    greens_entry,
    make_tight_binding_chain,
)
from .linalg import (
    DimensionMismatchError,
    SparseSymmetricMatrix,
    SymmetryError,
    bilinear_form,
    norm2,
    unit_vector,
)
from .mmio import read_matrix_market, write_matrix_market
from .shifted import (
    PiVanishedError,
    ShiftedSystemState,
    shifted_alpha,
    shifted_beta,
    shifted_residual_norm,
    shifted_system_step,
    update_pi,
)
from .switching import (
    NoUnsolvedError,
    SwitchEvent,
    rebase_history,
    rebase_seed_vectors,
    recompute_shift_tables,
    select_new_seed,
)

__version__ = "0.1.0"

__all__ = [
    "BreakdownError",
    "CocgResult",
    "CocgState",
    "DimensionMismatchError",
    "EnergyGrid",
    "NoUnsolvedError",
    "FamilyOptions",
    "FamilySolveReport",
    "GreensResult",
    "PiVanishedError",
    "SeedScalarHistory",
    "ShiftFamily",
    "ShiftedSystemState",
    "SparseSymmetricMatrix",
    "SwitchEvent",
    "SymmetryError",
    "bilinear_form",
    "build_shift_family",
    "chain_eigenvalues",
    "cocg_init",
    "cocg_solve",
    "cocg_step",
    "compute_green_column",
    "greens_entry",
    "make_tight_binding_chain",
    "norm2",
    "read_matrix_market",
    "rebase_history",
    "rebase_seed_vectors",
    "recompute_shift_tables",
    "residual_polynomial",
    "select_new_seed",
    "shifted_alpha",
    "shifted_beta",
    "shifted_residual_norm",
    "shifted_system_step",
    "solve_family",
    "unit_vector",
    "update_pi",
    "write_matrix_market",
]
