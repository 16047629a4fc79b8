"""A dark state that only the diagonalized dissipator reveals.

Three levels, no Hamiltonian, and a GKS coefficient matrix that couples the
two transitions |1> -> |0> and |2> -> |0>.  Neither transition alone leaves
anything protected, but after diagonalization there is a single collective
jump operator and the antisymmetric combination of |1> and |2> is dark.
"""

from __future__ import annotations

import numpy as np

from dfsfinder import find_all_dfs, instantaneous_df_check, verify_dfs_record
from dfsfinder.gallery import three_level_counterexample

np.set_printoptions(precision=4, suppress=True)

m = three_level_counterexample()
print("GKS coefficient matrix (upper block):")
print(m.dissipator.coeff[:3, :3].real)

# The coefficient matrix has rank one, so one jump operator survives.
print(f"\nrates after diagonalization: {m.rates}")
print("jump operator:")
print(m.jumps[0])

psi = np.array([0, 1, -1]) / np.sqrt(2)
chk = instantaneous_df_check(m, psi)
print(f"\n(|1> - |2>)/sqrt2: decoherence-free now? {chk.is_df}, |L_D| = {chk.ld_norm:.1e}")

# The protocol finds the whole protected subspace, not just this one state.
report = find_all_dfs(m)
for rec in report.records:
    print(f"\nDFS of dimension {rec.dim} ({rec.classification}), jump eigenvalue {rec.eigenvalues}")
    print("orthonormal basis (columns):")
    print(rec.subspace.basis)
    res = verify_dfs_record(m, rec, trials=20, seed=0)
    print(f"20 random states inside it: passed={res.passed}, worst purity drift {res.max_purity_drift:.1e}")
