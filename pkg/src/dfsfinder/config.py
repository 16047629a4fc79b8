"""Numerical tolerance settings.

All tolerances are relative unless the name says otherwise.  A named
profile can be selected with the ``DFSFINDER_TOLERANCE_PROFILE`` environment
variable (``default``, ``strict`` or ``loose``); individual fields can be
overridden with :func:`dataclasses.replace` or ``Tolerances.from_mapping``.
"""

from __future__ import annotations

import os
from dataclasses import asdict, dataclass, fields, replace

ENV_PROFILE = "DFSFINDER_TOLERANCE_PROFILE"


@dataclass(frozen=True)
class Tolerances:
    # eigenvalue clustering radius, times (1 + |J|_F)
    cluster: float = 1e-8
    # singular-value cutoff for kernels and ranks
    rank: float = 1e-10
    # GKS eigenvalues below rate * trace(A) are dropped
    rate: float = 1e-12
    # Hermiticity / PSD checks on model input
    hermitian: float = 1e-10
    # eigen-residual for membership checks, times (1 + max_l |J_l|_F)
    residual: float = 1e-8
    # |L_D[|psi><psi|]|_F cutoff for the Restricted class, times dim
    classify: float = 1e-9

    def classify_tol(self, dim: int) -> float:
        return self.classify * dim

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_mapping(cls, values: dict | None, base: Tolerances | None = None) -> Tolerances:
        base = base or cls()
        if not values:
            return base
        known = {f.name for f in fields(cls)}
        unknown = set(values) - known
        if unknown:
            raise KeyError(f"unknown tolerance field(s): {sorted(unknown)}")
        return replace(base, **{k: float(v) for k, v in values.items()})


PROFILES = {
    "default": Tolerances(),
    "strict": Tolerances(cluster=1e-10, rank=1e-12, residual=1e-10, classify=1e-11),
    "loose": Tolerances(cluster=1e-6, rank=1e-8, residual=1e-6, classify=1e-7),
}


def default_tolerances() -> Tolerances:
    name = os.environ.get(ENV_PROFILE, "default")
    try:
        return PROFILES[name]
    except KeyError:
        raise KeyError(f"{ENV_PROFILE}={name!r} is not one of {sorted(PROFILES)}") from None
