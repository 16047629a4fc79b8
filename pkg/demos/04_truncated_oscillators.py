"""Coherent states that keep their purity in truncated oscillators.

Neither model is finite-dimensional, so the subspace protocol makes no claim
about them and the analyzer says so.  Propagation in a truncated Fock space
still shows the purity being kept to rounding error.
"""

from __future__ import annotations

import numpy as np

from dfsfinder import find_all_dfs, propagate
from dfsfinder.gallery import (
    annihilation,
    coherent_state,
    damped_oscillator_truncated,
    two_photon_absorber_truncated,
)
from dfsfinder.model import MasterEquationModel
from dfsfinder.oracle import converged_integrate

alpha, gamma = 1.0, 1.0

# Damped cavity with a resonant drive, viewed in the rotating frame.
m = damped_oscillator_truncated(n_max=24, gamma=gamma, alpha=alpha)
print(find_all_dfs(m).notes[0])
psi = coherent_state(24, alpha)
traj = propagate(m, np.outer(psi, psi.conj()), t_final=5 / gamma, keep_states=True)
photons = np.real(np.einsum("ij,tji->t", np.diag(np.arange(25)), traj.states))
print(f"driven damped oscillator: max purity drift {np.max(np.abs(1 - traj.purities)):.1e}, "
      f"photon number {photons.min():.12f} .. {photons.max():.12f}")

# Two-photon loss with a parametric pump: |alpha>, |-alpha> and their cat stay pure.
m2 = two_photon_absorber_truncated(n_max=30, gamma=gamma, alpha=alpha)
plus, minus = coherent_state(30, alpha), coherent_state(30, -alpha)
cat = (plus + minus) / np.linalg.norm(plus + minus)
rhos = np.array([np.outer(v, v.conj()) for v in (plus, minus, cat)])
_, states, steps = converged_integrate(m2, rhos, 5 / gamma)
pur = np.real(np.einsum("tbij,tbji->tb", states, states))
for name, col in zip(("|+a>", "|-a>", "cat"), pur.T):
    print(f"two-photon absorber {name}: max purity drift {np.max(np.abs(1 - col)):.1e} ({steps} RK4 steps)")

# The opposite pump sign does not protect the coherent state.
a2 = annihilation(30) @ annihilation(30)
wrong = MasterEquationModel(-m2.h_eff, m2.dissipator)
_, states, _ = converged_integrate(wrong, rhos[0], 5 / gamma)
pur = np.real(np.einsum("tij,tji->t", states, states))
print(f"with the pump sign reversed: purity falls to {pur.min():.3f}")
