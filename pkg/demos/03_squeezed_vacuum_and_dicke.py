"""Squeezed-vacuum reservoirs: one atom, then N atoms in the Dicke limit.

The single-atom jump cosh(r) sigma_minus + sinh(r) sigma_plus has the two
eigenvalues +-sqrt(sinh r cosh r).  A drive along sigma_y tuned to one of
them makes that eigenvector an IGC state.  With N atoms and a collective
jump, the eigenvalue sectors are degenerate and the tuned drive protects a
whole subspace of dimension C(N, n_plus).
"""

from __future__ import annotations

import math
import time

from dfsfinder import find_all_dfs
from dfsfinder.gallery import dicke_squeezed, squeezed_vacuum_two_level

for r in (0.3, 0.5, 1.0):
    sc = math.sqrt(math.sinh(r) * math.cosh(r))
    for branch in (1, -1, 0):
        recs = find_all_dfs(squeezed_vacuum_two_level(r=r, branch=branch)).records
        found = ", ".join(f"{x.classification} at c={x.eigenvalues[0].real:+.4f}" for x in recs) or "none"
        print(f"r={r} (sqrt(sc)={sc:.4f}) branch={branch:+d}: {found}")

print()
for N in (2, 3, 4):
    for n_plus in range(N + 1):
        recs = find_all_dfs(dicke_squeezed(N=N, n_plus=n_plus)).records
        desc = "; ".join(f"dim {x.dim} {x.classification} c={x.eigenvalues[0].real:+.3f}" for x in recs)
        print(f"N={N} n_plus={n_plus} (C={math.comb(N, n_plus)}): {desc}")

t0 = time.perf_counter()
recs = find_all_dfs(dicke_squeezed(N=8, n_plus=5)).records
print(f"\nN=8, n_plus=5 (dimension 256): {[(x.dim, x.classification) for x in recs]} "
      f"in {time.perf_counter() - t0:.1f}s")
