"""Independent numerical checks by direct integration of the master equation.

The propagator integrates ``d(rho)/dt = L[rho]`` with classical fixed-step
RK4 applied to the density matrix itself; no superoperator is built.  Step
counts are doubled until two successive resolutions agree, so results carry
their own convergence evidence.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import NotDensityMatrix, StepCapExceeded
from .linalg import dag, matrix_exponential
from .model import (
    MasterEquationModel,
    apply_dissipator,
    evolution_hamiltonian,
    liouvillian_apply,
    non_hermitian_hamiltonian,
)

CHECKPOINTS = 64
PURITY_TOL = 1e-7
FIDELITY_TOL = 1e-7


@dataclass
class TrajectoryResult:
    times: np.ndarray
    purities: np.ndarray
    fidelity_to_unitary: np.ndarray
    final_state: np.ndarray
    steps: int = 0
    states: np.ndarray | None = None
    traces: np.ndarray | None = None


@dataclass
class VerificationResult:
    passed: bool
    max_purity_drift: float
    min_unitary_fidelity: float
    trials: list = field(default_factory=list)


def purity(rho) -> float:
    """``Tr(rho^2)`` for one density matrix."""
    rho = np.asarray(rho, dtype=complex)
    p = np.einsum("ij,ji->", rho, rho)
    assert abs(p.imag) <= 1e-12 * max(1.0, abs(p.real)), f"purity has imaginary part {p.imag}"
    return float(p.real)


def _batch_purity(rho: np.ndarray) -> np.ndarray:
    return np.real(np.einsum("...ij,...ji->...", rho, rho))


def purity_rate(m: MasterEquationModel, rho) -> float:
    """Instantaneous ``d Tr(rho^2)/dt = 2 Tr(rho L_D[rho])``; the Hamiltonian part drops out."""
    rho = np.asarray(rho, dtype=complex)
    return float(2.0 * np.real(np.einsum("ij,ji->", rho, apply_dissipator(m, rho))))


def default_t_final(m: MasterEquationModel) -> float:
    """Ten of the fastest decoherence times, or 10 time units without dissipation."""
    return 10.0 / max(m.rates) if m.rates else 10.0


def _generator_bound(m: MasterEquationModel) -> float:
    bound = 2.0 * np.linalg.norm(m.h_eff, 2)
    for rate, j in zip(m.rates, m.jumps):
        bound += 2.0 * rate * np.linalg.norm(j, 2) ** 2
    return float(bound)


def check_density_matrix(rho, tol: float = 1e-10) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim < 2 or rho.shape[-1] != rho.shape[-2]:
        raise NotDensityMatrix(f"expected square matrices, got shape {rho.shape}")
    if np.any(np.abs(rho - dag_batch(rho)) > tol * max(1.0, float(np.abs(rho).max()))):
        raise NotDensityMatrix("state is not Hermitian")
    tr = np.real(np.trace(rho, axis1=-2, axis2=-1))
    if np.any(np.abs(tr - 1.0) > tol):
        raise NotDensityMatrix(f"trace deviates from 1 by {np.max(np.abs(tr - 1.0)):.3e}")
    w = np.linalg.eigvalsh(0.5 * (rho + dag_batch(rho)))
    if np.any(w < -tol):
        raise NotDensityMatrix(f"state has negative eigenvalue {w.min():.3e}")
    return rho


def dag_batch(a: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(a, -1, -2))


def rk4_integrate(m: MasterEquationModel, rho0, t_final: float, steps: int, checkpoints: int = CHECKPOINTS):
    """Fixed-step RK4 from ``t = 0`` to ``t_final``.

    ``steps`` is rounded up to a multiple of ``checkpoints``.  Returns the
    checkpoint times and the states there (including ``t = 0``), with the
    state axis first: shape ``(checkpoints + 1, ..., n, n)``.
    """
    rho = np.array(rho0, dtype=complex)
    per = max(1, math.ceil(steps / checkpoints))
    h = t_final / (per * checkpoints)
    out = [rho.copy()]

    def f(x):
        return liouvillian_apply(m, x)

    for _ in range(checkpoints):
        for _ in range(per):
            k1 = f(rho)
            k2 = f(rho + 0.5 * h * k1)
            k3 = f(rho + 0.5 * h * k2)
            k4 = f(rho + h * k3)
            rho = rho + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        out.append(rho.copy())
    times = np.linspace(0.0, t_final, checkpoints + 1)
    return times, np.array(out), per * checkpoints


def converged_integrate(
    m: MasterEquationModel,
    rho0,
    t_final: float,
    steps: int = CHECKPOINTS,
    checkpoints: int = CHECKPOINTS,
    tol: float = 1e-8,
    max_steps: int = 1 << 18,
):
    """RK4 with the step count doubled until successive final states agree within ``tol``."""
    m = m.with_diagonal_dissipator()
    n_steps = max(steps, checkpoints, math.ceil(t_final * _generator_bound(m)))
    n_steps = checkpoints * math.ceil(n_steps / checkpoints)
    times, coarse, used = rk4_integrate(m, rho0, t_final, n_steps, checkpoints)
    while True:
        if 2 * used > max_steps:
            raise StepCapExceeded(f"no convergence to {tol:g} within {max_steps} steps")
        times, fine, used = rk4_integrate(m, rho0, t_final, 2 * used, checkpoints)
        diff = np.max(np.linalg.norm(fine[-1] - coarse[-1], axis=(-2, -1)))
        if diff <= tol:
            return times, fine, used
        coarse = fine


def fidelity_pure(rho: np.ndarray, phi: np.ndarray) -> np.ndarray:
    """``<phi|rho|phi>`` for a (possibly batched) pure reference state."""
    return np.real(np.einsum("...i,...ij,...j->...", phi.conj(), rho, phi))


def fidelity(rho: np.ndarray, sigma: np.ndarray) -> float:
    """Uhlmann fidelity ``(Tr sqrt(sqrt(sigma) rho sqrt(sigma)))^2``."""
    w, v = np.linalg.eigh(0.5 * (sigma + dag(sigma)))
    s = (v * np.sqrt(np.clip(w, 0, None))) @ dag(v)
    inner = np.linalg.eigvalsh(s @ rho @ s)
    return float(np.sum(np.sqrt(np.clip(inner, 0, None))) ** 2)


def propagate(
    m: MasterEquationModel,
    rho0,
    t_final: float | None = None,
    steps: int = CHECKPOINTS,
    reference_hamiltonian=None,
    checkpoints: int = CHECKPOINTS,
    keep_states: bool = False,
    max_steps: int = 1 << 18,
) -> TrajectoryResult:
    """Integrate the master equation from ``rho0`` and track purity.

    ``fidelity_to_unitary`` compares ``rho(t)`` with
    ``exp(-iHt) rho0 exp(iHt)`` where ``H`` is ``reference_hamiltonian``
    (``H_eff`` when omitted).  Pure references use the overlap
    ``<phi(t)|rho(t)|phi(t)>``, mixed ones the Uhlmann fidelity.
    """
    rho0 = check_density_matrix(rho0)
    if t_final is None:
        t_final = default_t_final(m)
    times, states, used = converged_integrate(m, rho0, t_final, steps, checkpoints, max_steps=max_steps)
    traces = np.real(np.trace(states, axis1=-2, axis2=-1))
    if np.max(np.abs(traces - 1.0)) > 1e-8:
        raise NotDensityMatrix(f"trace drifted by {np.max(np.abs(traces - 1.0)):.3e}")
    purities = _batch_purity(states)
    h_ref = m.h_eff if reference_hamiltonian is None else np.asarray(reference_hamiltonian, dtype=complex)
    step_u = matrix_exponential(-1j * h_ref * (times[1] - times[0])) if len(times) > 1 else np.eye(m.dim)
    w, v = np.linalg.eigh(rho0)
    pure = w[-1] >= 1.0 - 1e-12
    fids = []
    u = np.eye(m.dim, dtype=complex)
    for k, rho in enumerate(states):
        if k:
            u = step_u @ u
        if pure:
            fids.append(float(fidelity_pure(rho, u @ v[:, -1])))
        else:
            fids.append(fidelity(rho, u @ rho0 @ dag(u)))
    return TrajectoryResult(
        times=times,
        purities=purities,
        fidelity_to_unitary=np.array(fids),
        final_state=states[-1],
        steps=used,
        states=states if keep_states else None,
        traces=traces,
    )


def haar_states(basis: np.ndarray, trials: int, seed: int) -> np.ndarray:
    """Haar-random unit vectors in the span of ``basis`` columns, shape ``(trials, n)``."""
    rng = np.random.default_rng(seed)
    k = basis.shape[1]
    coeff = rng.standard_normal((trials, k)) + 1j * rng.standard_normal((trials, k))
    coeff /= np.linalg.norm(coeff, axis=1, keepdims=True)
    return coeff @ basis.T


def verify_dfs_record(
    m: MasterEquationModel,
    rec,
    trials: int = 20,
    t_final: float | None = None,
    seed: int = 0,
    steps: int = CHECKPOINTS,
    checkpoints: int = CHECKPOINTS,
) -> VerificationResult:
    """Propagate random pure states drawn inside a DFS record.

    A record passes when every trial keeps purity within ``1e-7`` of one and
    overlaps the ``H_ev``-rotated initial state to within ``1e-7`` at every
    checkpoint.
    """
    if trials < 1:
        raise ValueError("trials must be positive")
    if t_final is None:
        t_final = default_t_final(m)
    psis = haar_states(np.asarray(rec.subspace.basis), trials, seed)
    rho0 = np.einsum("ti,tj->tij", psis, psis.conj())
    times, states, _ = converged_integrate(m, rho0, t_final, steps, checkpoints)
    h_ev = evolution_hamiltonian(m, rec.eigenvalues) if m.n_jumps else np.array(m.h_eff)
    step_u = matrix_exponential(-1j * h_ev * (times[1] - times[0]))

    phis = psis.copy()
    drift = np.zeros(trials)
    fid = np.ones(trials)
    for k in range(len(times)):
        if k:
            phis = phis @ step_u.T
        drift = np.maximum(drift, np.abs(1.0 - _batch_purity(states[k])))
        fid = np.minimum(fid, fidelity_pure(states[k], phis))
    per_trial = [
        {"trial": t, "max_purity_drift": float(drift[t]), "min_unitary_fidelity": float(fid[t])}
        for t in range(trials)
    ]
    max_drift = float(drift.max())
    min_fid = float(fid.min())
    passed = max_drift <= PURITY_TOL and min_fid >= 1.0 - FIDELITY_TOL
    return VerificationResult(passed, max_drift, min_fid, per_trial)


def nonhermitian_drift(m: MasterEquationModel, psi0, t_final: float, steps: int = CHECKPOINTS):
    """No-jump evolution ``exp(-i t H_nh) psi0`` (left unnormalized) at ``steps + 1`` times."""
    psi = np.asarray(psi0, dtype=complex).ravel()
    if abs(np.linalg.norm(psi) - 1.0) > 1e-8:
        raise ValueError("psi0 must be normalized")
    step = matrix_exponential(-1j * non_hermitian_hamiltonian(m) * (t_final / steps))
    out = [(0.0, psi.copy())]
    for k in range(1, steps + 1):
        psi = step @ psi
        out.append((t_final * k / steps, psi.copy()))
    return out


def liouvillian_superoperator(m: MasterEquationModel) -> np.ndarray:
    """Dense ``n^2 x n^2`` generator acting on row-major ``vec(rho)``.

    Only meant for small cross-checks; the propagator never builds it.
    """
    n = m.dim
    eye = np.eye(n)
    k = non_hermitian_hamiltonian(m)
    sup = -1j * (np.kron(k, eye) - np.kron(eye, k.conj()))
    for rate, j in zip(m.rates, m.jumps):
        sup += rate * np.kron(j, j.conj())
    return sup


def exact_batch_evolution(m: MasterEquationModel, rhos, t_final: float, checkpoints: int = CHECKPOINTS):
    """States at ``checkpoints + 1`` times by exponentiating the dense generator.

    Suited to many small states at once (brute-force scans); ``rhos`` has shape
    ``(B, n, n)`` and the result ``(checkpoints + 1, B, n, n)``.
    """
    rhos = np.asarray(rhos, dtype=complex)
    n = m.dim
    step = matrix_exponential(liouvillian_superoperator(m) * (t_final / checkpoints))
    vec = rhos.reshape(rhos.shape[0], n * n)
    out = [rhos]
    for _ in range(checkpoints):
        vec = vec @ step.T
        out.append(vec.reshape(-1, n, n))
    return np.array(out)


def brute_force_scan(
    m: MasterEquationModel,
    records,
    samples: int = 10_000,
    seed: int = 0,
    t_final: float | None = None,
    purity_tol: float = 1e-6,
    residual_tol: float = 1e-6,
) -> dict:
    """Sample random pure states and look for purity keepers outside the reported DFS.

    Returns counts, the offending states (purity kept but projection
    residual onto every record above ``residual_tol``) and their distances
    to the nearest record.
    """
    if t_final is None:
        t_final = default_t_final(m)
    psis = haar_states(np.eye(m.dim, dtype=complex), samples, seed)
    rhos = np.einsum("ti,tj->tij", psis, psis.conj())
    states = exact_batch_evolution(m, rhos, t_final)
    drift = np.max(np.abs(1.0 - _batch_purity(states)), axis=0)
    kept = drift <= purity_tol
    residual = np.ones(samples)
    for rec in records:
        b = np.asarray(rec.subspace.basis)
        proj = psis @ b.conj() @ b.T
        residual = np.minimum(residual, np.linalg.norm(psis - proj, axis=1))
    outside = kept & (residual > residual_tol)
    return {
        "samples": samples,
        "purity_kept": int(kept.sum()),
        "counterexamples": int(outside.sum()),
        "counterexample_states": psis[outside],
        "counterexample_residuals": residual[outside],
        "min_drift": float(drift.min()),
    }
