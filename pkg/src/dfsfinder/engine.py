"""Enumeration and classification of decoherence-free subspaces.

The search runs in three stages:

1. Common eigenspaces ``E_J`` of all jump operators are found by sequential
   refinement: eigenspaces of ``J_1``, each intersected with the eigenspaces
   of ``J_2`` restricted to it, and so on.
2. For each eigenvalue tuple ``c`` the evolution Hamiltonian ``H_ev(c)`` is
   formed and the largest ``H_ev``-invariant subspace of ``E_J`` is extracted
   by iterating ``S <- {v in S : H_ev v in S}`` to a fixed point.
3. Every non-empty result is a DFS.  It is *restricted* when the dissipator
   annihilates it and *IGC* (incoherently generated coherences) when the
   dissipator acts on it as a Hamiltonian that ``H_eff`` cancels.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .config import Tolerances, default_tolerances
from .errors import InvalidSubspace, NotNormalized
from .linalg import Subspace, dag, frob, geometric_eigenspaces, nullspace
from .model import (
    DiagonalLindblad,
    MasterEquationModel,
    apply_dissipator,
    evolution_hamiltonian,
)

RESTRICTED = "Restricted"
IGC = "IGC"

TRUNCATION_NOTE = (
    "truncated Fock-space model: the finite-dimensional DFS characterization does not "
    "carry over to the untruncated oscillator, so coherent-state subspaces are not "
    "claimed as DFS records; use the propagator to check purity drift instead"
)


def _tols(tol: Tolerances | None) -> Tolerances:
    return tol if tol is not None else default_tolerances()


def _residual_tol(m: MasterEquationModel, tol: Tolerances) -> float:
    jmax = max((frob(j) for j in m.jumps), default=0.0)
    return tol.residual * (1.0 + jmax)


def _tuple_key(c) -> tuple:
    return tuple(x for z in c for x in (round(z.real, 12), round(z.imag, 12)))


def _noneigen_residual(k: np.ndarray, v: np.ndarray) -> float:
    kv = k @ v
    return float(np.linalg.norm(kv - np.vdot(v, kv) * v))


@dataclass(frozen=True)
class InstantaneousCheck:
    is_df: bool
    c: tuple | None
    g: complex | None
    ld_norm: float


@dataclass(frozen=True)
class InvariantResult:
    subspace: Subspace
    iterations: int
    dims: tuple  # subspace dimension after each iteration


@dataclass(frozen=True)
class Classification:
    classification: str
    g: complex | None
    witness: float
    # non-eigenstate residuals for sum_l rate_l c_l J_l^+ and for sum_l c_l J_l^+
    weighted_witness: float
    unweighted_witness: float


@dataclass(frozen=True)
class DfsRecord:
    """One decoherence-free subspace.

    Attributes:
        eigenvalues: jump-operator eigenvalues ``(c_1, ..., c_M)`` shared by
            every state in the subspace.
        subspace: orthonormal basis of the DFS.
        classification: ``"Restricted"`` or ``"IGC"``.
        gamma_eigenvalue: eigenvalue ``g`` of the decoherence operator,
            only for restricted records.
        h_ev_restricted: evolution Hamiltonian compressed to the basis.
        witness: largest ``|L_D[|psi><psi|]|_F`` over the basis states.
    """

    eigenvalues: tuple
    subspace: Subspace
    classification: str
    gamma_eigenvalue: complex | None
    h_ev_restricted: np.ndarray
    witness: float
    weighted_witness: float = 0.0
    unweighted_witness: float = 0.0

    @property
    def dim(self) -> int:
        return self.subspace.dim


@dataclass
class AnalysisReport:
    model_label: str
    records: list
    tuples_examined: int
    tolerances: Tolerances
    diagnostics: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    @property
    def dims(self) -> list[int]:
        return [r.dim for r in self.records]

    def count(self, classification: str) -> int:
        return sum(r.classification == classification for r in self.records)


def instantaneous_df_check(
    m: MasterEquationModel, psi, tol: Tolerances | None = None
) -> InstantaneousCheck:
    """Test whether a pure state is decoherence-free at one instant.

    The state is DF exactly when it is a common eigenvector of every ``J_l``
    and of the decoherence operator ``Gamma``; equivalently the dissipator
    annihilates ``|psi><psi|``.  ``c`` is reported whenever the jump
    eigen-conditions hold, ``g`` only when the state is DF.
    """
    tol = _tols(tol)
    psi = np.asarray(psi, dtype=complex).ravel()
    if abs(np.linalg.norm(psi) - 1.0) > 1e-8:
        raise NotNormalized(f"|psi| = {np.linalg.norm(psi):.12f}")
    rho = np.outer(psi, psi.conj())
    ld_norm = frob(apply_dissipator(m, rho))
    rtol = _residual_tol(m, tol)

    c = tuple(complex(np.vdot(psi, j @ psi)) for j in m.jumps)
    jump_ok = all(np.linalg.norm(j @ psi - cl * psi) <= rtol for j, cl in zip(m.jumps, c))
    g_val = complex(np.vdot(psi, m.gamma @ psi))
    gamma_ok = np.linalg.norm(m.gamma @ psi - g_val * psi) <= rtol * (1.0 + frob(m.gamma))
    is_df = bool(jump_ok and gamma_ok and ld_norm <= tol.classify_tol(m.dim))
    g = complex(sum(r * abs(cl) ** 2 for r, cl in zip(m.rates, c))) if is_df else None
    return InstantaneousCheck(is_df, c if jump_ok else None, g, ld_norm)


def common_eigenspaces(
    d: DiagonalLindblad,
    tol_cluster: float = 1e-8,
    tol_rank: float = 1e-10,
    dim: int | None = None,
    diagnostics: list | None = None,
) -> list[tuple[tuple, Subspace]]:
    """All simultaneous eigenspaces of the jump operators.

    Eigenvalues of ``J_l`` are clustered at radius ``tol_cluster * (1 + |J_l|_F)``.
    Returns ``(c, E_J)`` pairs sorted lexicographically by the real, then
    imaginary parts of the tuple.  With no jump operators the whole space is
    returned with the empty tuple.
    """
    if not d.jumps:
        if dim is None:
            raise ValueError("dim is required for an empty dissipator")
        return [((), Subspace.full(dim))]
    n = d.jumps[0].shape[0]
    eye = np.eye(n)
    branches: list[tuple[tuple, Subspace | None]] = [((), None)]
    for level, j in enumerate(d.jumps):
        pairs = geometric_eigenspaces(j, tol_cluster * (1.0 + frob(j)), tol_rank)
        if diagnostics is not None:
            diagnostics.append({
                "stage": "jump_spectrum",
                "jump": level,
                "eigenvalues": [p.value for p in pairs],
                "geometric_dims": [p.multiplicity for p in pairs],
            })
        refined = []
        for c_prev, s in branches:
            for p in pairs:
                if s is None:
                    basis = np.array(p.vectors)
                else:
                    shifted = j - p.value * eye
                    ker = nullspace(shifted @ s.basis, tol_rank, scale=max(frob(shifted), frob(j)))
                    basis = s.basis @ ker.basis
                if basis.shape[1]:
                    refined.append((c_prev + (p.value,), Subspace(basis)))
        branches = refined
        if not branches:
            break
    out = [(c, s) for c, s in branches if s is not None]
    out.sort(key=lambda item: [x for z in item[0] for x in (z.real, z.imag)])
    return out


def maximal_invariant_subspace(
    h, start: Subspace, tol_rank: float = 1e-10, scale: float | None = None
) -> InvariantResult:
    """Largest subspace of ``start`` mapped into itself by ``h``.

    Iterates ``S <- {v in S : h v in S}``; dimensions never increase, so the
    loop ends after at most ``dim(start) + 1`` passes.  A leak below
    ``tol_rank * scale`` counts as zero; ``scale`` defaults to ``|h|_F`` and
    should be raised when ``h`` is a near-cancelling sum of larger terms.
    """
    h = np.asarray(h, dtype=complex)
    q = np.array(start.basis)
    if scale is None:
        scale = frob(h)
    dims = []
    iterations = 0
    while True:
        iterations += 1
        if q.shape[1] == 0:
            dims.append(0)
            break
        hq = h @ q
        leak = hq - q @ (dag(q) @ hq)
        ker = nullspace(leak, tol_rank, scale=scale)
        dims.append(ker.dim)
        if ker.dim == q.shape[1]:
            break
        q = q @ ker.basis
    return InvariantResult(Subspace(q), iterations, tuple(dims))


def _h_ev_scale(m: MasterEquationModel, c) -> float:
    # magnitude of the terms that sum to H_ev; sets the noise floor of cancellations
    return frob(m.h_eff) + sum(r * abs(cl) * frob(j) for r, cl, j in zip(m.rates, c, m.jumps))


def _single_pass_dim(m: MasterEquationModel, h_ev: np.ndarray, e_j: Subspace, c, tol_rank: float) -> int:
    # one filtering pass by the kernels of [H_ev, J_l]
    if not m.jumps:
        return e_j.dim
    blocks = [(h_ev @ j - j @ h_ev) @ e_j.basis for j in m.jumps]
    scale = 2.0 * _h_ev_scale(m, c) * max(frob(j) for j in m.jumps)
    return nullspace(np.vstack(blocks), tol_rank, scale=scale).dim


def _check_eigen(m: MasterEquationModel, c, s: Subspace, tol: Tolerances) -> None:
    rtol = _residual_tol(m, tol)
    for cl, j in zip(c, m.jumps):
        res = frob(j @ s.basis - cl * s.basis)
        if res > rtol * max(1.0, np.sqrt(s.dim)):
            raise InvalidSubspace(f"jump eigen-residual {res:.3e} exceeds {rtol:.3e}")


def classify(
    m: MasterEquationModel, c, s: Subspace, tol: Tolerances | None = None
) -> Classification:
    """Restricted/IGC classification of a verified DFS with jump eigenvalues ``c``."""
    tol = _tols(tol)
    if s.dim == 0:
        raise InvalidSubspace("cannot classify an empty subspace")
    _check_eigen(m, c, s, tol)
    c = tuple(complex(x) for x in c)
    norms = [frob(apply_dissipator(m, np.outer(v, v.conj()))) for v in s.vectors()]
    witness = max(norms)

    n = m.dim
    weighted = np.zeros((n, n), dtype=complex)
    unweighted = np.zeros((n, n), dtype=complex)
    for cl, rate, j in zip(c, m.rates, m.jumps):
        weighted += rate * cl * dag(j)
        unweighted += cl * dag(j)
    w_wit = max(_noneigen_residual(weighted, v) for v in s.vectors())
    u_wit = max(_noneigen_residual(unweighted, v) for v in s.vectors())

    ctol = tol.classify_tol(n)
    if witness <= ctol:
        g = complex(sum(rate * abs(cl) ** 2 for rate, cl in zip(m.rates, c)))
        return Classification(RESTRICTED, g, witness, w_wit, u_wit)
    if not any(abs(cl) > _residual_tol(m, tol) for cl in c):
        raise InvalidSubspace("dissipator acts on a subspace whose jump eigenvalues all vanish")
    if w_wit <= ctol:
        raise InvalidSubspace(
            "dissipator acts on the subspace although its states are eigenstates of "
            "sum_l rate_l c_l J_l^+"
        )
    return Classification(IGC, None, witness, w_wit, u_wit)


def restricted_dfs_conditions(
    m: MasterEquationModel, s: Subspace, c, tol: Tolerances | None = None
) -> bool:
    """Commutator test for ``H_eff``-invariance of a common eigenspace.

    True when ``[H_eff, J_l] v`` and ``[H_eff, Gamma] v`` vanish for every basis
    vector.  This says ``H_eff`` maps ``s`` into the common eigenspace of the
    ``J_l`` and ``Gamma``; it coincides with ``H_eff``-invariance of ``s`` when
    ``s`` is that whole eigenspace.  A basis that is not a ``Gamma``
    eigenspace cannot be restricted and gives False.
    """
    tol = _tols(tol)
    if s.dim == 0:
        return True
    _check_eigen(m, c, s, tol)
    rtol = _residual_tol(m, tol)
    gamma = m.gamma
    g = np.vdot(s.basis[:, 0], gamma @ s.basis[:, 0])
    if frob(gamma @ s.basis - g * s.basis) > rtol * (1.0 + frob(gamma)):
        return False
    h = m.h_eff
    scale = (1.0 + frob(h)) * rtol
    for op in list(m.jumps) + [gamma]:
        comm = h @ op - op @ h
        if frob(comm @ s.basis) > scale * (1.0 + frob(op)):
            return False
    return True


def _analyze_tuple(m: MasterEquationModel, c: tuple, e_j: Subspace, tol: Tolerances):
    h_ev = evolution_hamiltonian(m, c) if m.n_jumps else np.array(m.h_eff)
    inv = maximal_invariant_subspace(h_ev, e_j, tol.rank, scale=_h_ev_scale(m, c))
    diag = {
        "stage": "tuple",
        "tuple": c,
        "e_j_dim": e_j.dim,
        "refinement_iterations": inv.iterations,
        "refinement_dims": inv.dims,
        "dfs_dim": inv.subspace.dim,
    }
    record = None
    if inv.subspace.dim:
        single = _single_pass_dim(m, h_ev, e_j, c, tol.rank)
        diag["single_pass_dim"] = single
        diag["single_pass_differs"] = single != inv.subspace.dim
        s = inv.subspace
        cls = classify(m, c, s, tol)
        record = DfsRecord(
            eigenvalues=c,
            subspace=s,
            classification=cls.classification,
            gamma_eigenvalue=cls.g,
            h_ev_restricted=dag(s.basis) @ h_ev @ s.basis,
            witness=cls.witness,
            weighted_witness=cls.weighted_witness,
            unweighted_witness=cls.unweighted_witness,
        )
    return record, diag


def find_all_dfs(
    m: MasterEquationModel, tol: Tolerances | None = None, workers: int = 1
) -> AnalysisReport:
    """Enumerate every decoherence-free subspace of a finite-dimensional model.

    Args:
        m: the model; a GKS dissipator is diagonalized first.
        tol: numerical tolerances (defaults from the active profile).
        workers: eigenvalue tuples are independent and may be analyzed in
            parallel threads; the report order does not depend on this.
    """
    tol = _tols(tol)
    diagnostics: list = []
    spaces = common_eigenspaces(
        m.lindblad, tol.cluster, tol.rank, dim=m.dim, diagnostics=diagnostics
    )

    def run(item):
        return _analyze_tuple(m, item[0], item[1], tol)

    if workers > 1 and len(spaces) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, spaces))
    else:
        results = [run(item) for item in spaces]

    records = []
    seen = set()
    for record, diag in results:
        diagnostics.append(diag)
        if record is not None:
            key = _tuple_key(record.eigenvalues)
            if key in seen:
                raise InvalidSubspace(f"duplicate eigenvalue tuple {record.eigenvalues}")
            seen.add(key)
            records.append(record)

    notes = []
    if getattr(m, "truncated_fock", False):
        notes.append(TRUNCATION_NOTE)
    return AnalysisReport(m.label, records, len(spaces), tol, diagnostics, notes)
