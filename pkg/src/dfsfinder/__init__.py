"""Enumerate and classify decoherence-free subspaces of Markovian master equations."""

__version__ = "0.1.0"

from .config import Tolerances, default_tolerances
from .engine import (
    IGC,
    RESTRICTED,
    AnalysisReport,
    DfsRecord,
    classify,
    common_eigenspaces,
    find_all_dfs,
    instantaneous_df_check,
    maximal_invariant_subspace,
    restricted_dfs_conditions,
)
from .linalg import (
    EigenPair,
    Subspace,
    geometric_eigenspaces,
    hermitian_eigendecompose,
    matrix_exponential,
    nullspace,
    orthonormalize,
)
from .model import (
    DiagonalLindblad,
    GksDissipator,
    MasterEquationModel,
    apply_dissipator,
    decoherence_operator,
    diagonalize_gks,
    evolution_hamiltonian,
    liouvillian_apply,
    non_hermitian_hamiltonian,
    shift_transform,
)
from .oracle import nonhermitian_drift, propagate, purity, purity_rate, verify_dfs_record
from .serialize import dump_model, dump_report, load_model, load_report
