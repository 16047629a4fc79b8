"""Markovian master-equation models and the operators derived from them.

The master equation is

    d(rho)/dt = -i [H_eff, rho] + L_D[rho],

with the dissipator given either over an operator basis ``F_k`` with a
positive semidefinite coefficient matrix ``A`` (GKS form) or as a list of
rates and jump operators (diagonal form),

    L_D[rho] = sum_l rate_l (J_l rho J_l^+ - 1/2 {J_l^+ J_l, rho}).

All operator-valued functions accept a single ``(n, n)`` density matrix or a
stack of shape ``(..., n, n)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence, Union

import numpy as np

from .errors import DimensionMismatch, NotHermitian, NotPsd
from .linalg import dag, frob, require_square

EigTuple = tuple  # tuple[complex, ...], one entry per jump operator


def _readonly(a) -> np.ndarray:
    a = np.array(a, dtype=complex)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class GksDissipator:
    """Dissipator over an explicit operator basis with coefficient matrix ``coeff``."""

    basis: tuple
    coeff: np.ndarray
    tol: float = 1e-10

    def __post_init__(self):
        basis = tuple(_readonly(f) for f in self.basis)
        coeff = _readonly(self.coeff)
        object.__setattr__(self, "basis", basis)
        object.__setattr__(self, "coeff", coeff)
        k = len(basis)
        if coeff.shape != (k, k):
            raise DimensionMismatch(f"coefficient matrix has shape {coeff.shape}, expected ({k}, {k})")
        if k == 0:
            return
        n = basis[0].shape[0]
        for i, f in enumerate(basis):
            if f.shape != (n, n):
                raise DimensionMismatch(f"basis[{i}] has shape {f.shape}, expected ({n}, {n})")
        if k > n * n - 1:
            raise ValueError(f"{k} basis elements exceed n^2 - 1 = {n * n - 1}")
        if np.linalg.matrix_rank(np.array([f.ravel() for f in basis] + [np.eye(n).ravel()])) < k + 1:
            raise ValueError("basis elements (together with the identity) are linearly dependent")
        scale = max(frob(coeff), 1.0)
        if frob(coeff - dag(coeff)) > self.tol * scale:
            raise NotHermitian("GKS coefficient matrix is not Hermitian")
        wmin = np.linalg.eigvalsh(0.5 * (coeff + dag(coeff))).min()
        if wmin < -self.tol * scale:
            raise NotPsd(f"GKS coefficient matrix has eigenvalue {wmin:.3e} < 0")

    @property
    def dim(self) -> int:
        return self.basis[0].shape[0] if self.basis else 0


@dataclass(frozen=True)
class DiagonalLindblad:
    """Dissipator as rates and jump operators; every stored rate is positive."""

    rates: tuple
    jumps: tuple

    def __post_init__(self):
        rates = tuple(float(r) for r in self.rates)
        jumps = tuple(_readonly(j) for j in self.jumps)
        if len(rates) != len(jumps):
            raise ValueError("rates and jumps must have equal length")
        for r in rates:
            if not r > 0:
                raise ValueError(f"rates must be positive, got {r}")
        if jumps:
            n = jumps[0].shape[0]
            for i, j in enumerate(jumps):
                if j.shape != (n, n):
                    raise DimensionMismatch(f"jump[{i}] has shape {j.shape}, expected ({n}, {n})")
        object.__setattr__(self, "rates", rates)
        object.__setattr__(self, "jumps", jumps)

    @classmethod
    def from_terms(cls, terms: Sequence, tol_rate: float = 0.0) -> DiagonalLindblad:
        """Build from ``(rate, J)`` pairs, dropping rates at or below ``tol_rate``."""
        kept = []
        for rate, jump in terms:
            if rate < -tol_rate:
                raise ValueError(f"negative rate {rate}")
            if rate > tol_rate:
                kept.append((rate, jump))
        return cls(tuple(r for r, _ in kept), tuple(j for _, j in kept))

    @property
    def terms(self) -> list[tuple[float, np.ndarray]]:
        return list(zip(self.rates, self.jumps))

    def __len__(self) -> int:
        return len(self.rates)


Dissipator = Union[GksDissipator, DiagonalLindblad]


@dataclass(frozen=True)
class MasterEquationModel:
    """A time-independent Markovian master equation.

    ``h_eff`` already includes any reservoir-induced Hermitian shift.
    """

    h_eff: np.ndarray
    dissipator: Dissipator = field(default_factory=lambda: DiagonalLindblad((), ()))
    label: str = ""
    # finite truncation of an oscillator; DFS results are then demonstrations only
    truncated_fock: bool = False
    tol_hermitian: float = 1e-10
    tol_rate: float = 1e-12

    def __post_init__(self):
        h = _readonly(self.h_eff)
        require_square(h)
        object.__setattr__(self, "h_eff", h)
        if frob(h - dag(h)) > self.tol_hermitian * max(frob(h), 1.0):
            raise NotHermitian("h_eff is not Hermitian")
        d = self.dissipator.dim if isinstance(self.dissipator, GksDissipator) else (
            self.dissipator.jumps[0].shape[0] if self.dissipator.jumps else h.shape[0])
        if d and d != h.shape[0]:
            raise DimensionMismatch(f"dissipator acts on dimension {d}, h_eff on {h.shape[0]}")

    @property
    def dim(self) -> int:
        return self.h_eff.shape[0]

    @cached_property
    def lindblad(self) -> DiagonalLindblad:
        """The diagonal form of the dissipator (diagonalized on first access)."""
        if isinstance(self.dissipator, DiagonalLindblad):
            return self.dissipator
        return diagonalize_gks(self.dissipator, self.tol_rate)

    @property
    def rates(self) -> tuple:
        return self.lindblad.rates

    @property
    def jumps(self) -> tuple:
        return self.lindblad.jumps

    @property
    def n_jumps(self) -> int:
        return len(self.lindblad)

    @cached_property
    def gamma(self) -> np.ndarray:
        return decoherence_operator(self.lindblad, self.dim)

    def with_diagonal_dissipator(self) -> MasterEquationModel:
        return MasterEquationModel(self.h_eff, self.lindblad, self.label, self.truncated_fock)


def diagonalize_gks(g: GksDissipator, tol_rate: float = 1e-12) -> DiagonalLindblad:
    """Convert a GKS dissipator to diagonal form.

    With ``A = U diag(rates) U^+`` the jump operators are
    ``J_m = sum_k U[k, m] F_k``.  Eigenvalues below ``tol_rate * trace(A)`` are
    dropped.  Each eigenvector's phase is fixed so that its first
    largest-magnitude component is real and positive.
    """
    if not g.basis:
        return DiagonalLindblad((), ())
    a = g.coeff
    scale = max(frob(a), 1.0)
    w, u = np.linalg.eigh(0.5 * (a + dag(a)))
    if w.min() < -g.tol * scale:
        raise NotPsd(f"GKS coefficient matrix has eigenvalue {w.min():.3e} < 0")
    cutoff = tol_rate * max(float(np.real(np.trace(a))), 0.0)
    basis = np.array(g.basis)
    rates, jumps = [], []
    for m in np.argsort(-w):
        if w[m] <= cutoff or w[m] <= 0:
            continue
        vec = u[:, m]
        mags = np.abs(vec)
        lead = int(np.argmax(mags >= mags.max() * (1 - 1e-8)))
        vec = vec * (abs(vec[lead]) / vec[lead])
        rates.append(float(w[m]))
        jumps.append(np.tensordot(vec, basis, axes=1))
    return DiagonalLindblad(tuple(rates), tuple(jumps))


def _check_rho(dim: int, rho: np.ndarray) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if rho.shape[-2:] != (dim, dim):
        raise DimensionMismatch(f"rho has shape {rho.shape}, expected (..., {dim}, {dim})")
    return rho


def gks_dissipator_apply(g: GksDissipator, rho: np.ndarray) -> np.ndarray:
    """``L_D[rho]`` evaluated directly from the basis and coefficient matrix."""
    rho = np.asarray(rho, dtype=complex)
    out = np.zeros_like(rho)
    for k, fk in enumerate(g.basis):
        for l, fl in enumerate(g.basis):
            a = g.coeff[k, l]
            if a == 0:
                continue
            fld = dag(fl)
            out += a * (fk @ rho @ fld - 0.5 * (fld @ fk @ rho + rho @ fld @ fk))
    return out


def diagonal_dissipator_apply(d: DiagonalLindblad, rho: np.ndarray) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    out = np.zeros_like(rho)
    for rate, j in d.terms:
        jd = dag(j)
        jdj = jd @ j
        out += rate * (j @ rho @ jd - 0.5 * (jdj @ rho + rho @ jdj))
    return out


def apply_dissipator(m: MasterEquationModel, rho) -> np.ndarray:
    """``L_D[rho]`` for the model's dissipator, in whichever form it was given."""
    rho = _check_rho(m.dim, rho)
    if isinstance(m.dissipator, GksDissipator):
        return gks_dissipator_apply(m.dissipator, rho)
    return diagonal_dissipator_apply(m.dissipator, rho)


def liouvillian_apply(m: MasterEquationModel, rho) -> np.ndarray:
    """Right-hand side of the master equation, ``-i[H_eff, rho] + L_D[rho]``."""
    rho = _check_rho(m.dim, rho)
    h = m.h_eff
    return -1j * (h @ rho - rho @ h) + apply_dissipator(m, rho)


def decoherence_operator(d: DiagonalLindblad, dim: int | None = None) -> np.ndarray:
    """``Gamma = sum_l rate_l J_l^+ J_l``; its eigenvalues are inverse lifetimes."""
    if not d.jumps:
        if dim is None:
            raise ValueError("dim is required for an empty dissipator")
        return np.zeros((dim, dim), dtype=complex)
    g = sum(rate * dag(j) @ j for rate, j in d.terms)
    return 0.5 * (g + dag(g))


def _check_tuple(m: MasterEquationModel, c) -> np.ndarray:
    c = np.asarray(c, dtype=complex).ravel()
    if c.size != m.n_jumps:
        raise DimensionMismatch(f"eigenvalue tuple has length {c.size}, model has {m.n_jumps} jumps")
    return c


def dissipative_hamiltonian(m: MasterEquationModel, c) -> np.ndarray:
    """``(i/2) sum_l rate_l (c_l^* J_l - c_l J_l^+)``, the Hermitian part split off by a shift ``c``."""
    c = _check_tuple(m, c)
    h = np.zeros((m.dim, m.dim), dtype=complex)
    for cl, (rate, j) in zip(c, m.lindblad.terms):
        h += 0.5j * rate * (np.conj(cl) * j - cl * dag(j))
    return 0.5 * (h + dag(h))


def evolution_hamiltonian(m: MasterEquationModel, c) -> np.ndarray:
    """Hamiltonian generating the motion inside the common eigenspace with jump eigenvalues ``c``."""
    h = m.h_eff + dissipative_hamiltonian(m, c)
    return 0.5 * (h + dag(h))


def shift_transform(m: MasterEquationModel, b) -> MasterEquationModel:
    """Move ``b_l`` times the identity out of each jump operator and into the Hamiltonian.

    The returned model generates exactly the same dynamics.
    """
    b = _check_tuple(m, b)
    eye = np.eye(m.dim)
    jumps = tuple(j - bl * eye for bl, j in zip(b, m.jumps))
    h = m.h_eff + dissipative_hamiltonian(m, b)
    return MasterEquationModel(h, DiagonalLindblad(m.rates, jumps), m.label, m.truncated_fock)


def non_hermitian_hamiltonian(m: MasterEquationModel) -> np.ndarray:
    """No-jump generator ``H_eff - i Gamma / 2``."""
    return m.h_eff - 0.5j * m.gamma
