"""A stationary pure state that the dissipator does not leave alone.

Jump operator sigma_plus + sigma_z at rate 2 with H = sigma_y.  The excited
state |1> is an eigenvector of the jump, yet L_D acting on it is -sigma_x:
the dissipator generates coherence.  The Hamiltonian cancels it exactly, so
the state stays pure and stationary.  This is the IGC class.
"""

from __future__ import annotations

import numpy as np

from dfsfinder import (
    apply_dissipator,
    evolution_hamiltonian,
    find_all_dfs,
    instantaneous_df_check,
    nonhermitian_drift,
    propagate,
    shift_transform,
)
from dfsfinder.gallery import igc_two_level

np.set_printoptions(precision=4, suppress=True)

m = igc_two_level()
excited = np.array([0, 1], dtype=complex)
rho = np.outer(excited, excited)

print("L_D[|1><1|] =")
print(apply_dissipator(m, rho))
chk = instantaneous_df_check(m, excited)
print(f"instantaneously decoherence-free? {chk.is_df}  (jump eigenvalue {chk.c})")

report = find_all_dfs(m)
rec = report.records[0]
print(f"\nprotocol: {len(report.records)} DFS, dim {rec.dim}, class {rec.classification}, "
      f"witness |L_D| = {rec.witness:.4f}")
print("H_ev restricted to the DFS:", rec.h_ev_restricted.ravel())
print("H_ev on the full space:")
print(evolution_hamiltonian(m, rec.eigenvalues))

traj = propagate(m, rho, t_final=10.0)
print(f"\npropagated to t=10: purity range [{traj.purities.min():.12f}, {traj.purities.max():.12f}]")

# Moving the eigenvalue out of the jump turns the same dynamics into a
# jump that annihilates |1> plus a modified Hamiltonian.
shifted = shift_transform(m, rec.eigenvalues)
print("\nafter the shift the jump annihilates |1>:", shifted.jumps[0] @ excited)

# Between jumps the state still loses norm at the rate <Gamma>.
drift = nonhermitian_drift(m, excited, t_final=1.0, steps=4)
for t, v in drift:
    print(f"  t={t:.2f}  no-jump norm^2 = {np.vdot(v, v).real:.4f}")
