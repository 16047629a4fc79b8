"""Dense complex linear algebra shared by the rest of the package.

Matrices are plain ``numpy.ndarray`` objects of dtype ``complex128``; column
vectors are 1-D arrays.  Subspaces are stored as an ``(n, K)`` array whose
columns form an orthonormal basis.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import NotHermitian, NotSquare

TOL_RANK = 1e-10
TOL_CLUSTER_REL = 1e-8


def as_matrix(m) -> np.ndarray:
    a = np.array(m, dtype=complex)
    if a.ndim != 2:
        raise ValueError(f"expected a 2-D array, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    return a


def require_square(m: np.ndarray) -> None:
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise NotSquare(f"expected a square matrix, got shape {m.shape}")


def dag(m: np.ndarray) -> np.ndarray:
    return m.conj().T


def frob(m: np.ndarray) -> float:
    return float(np.linalg.norm(m))


def is_hermitian(m: np.ndarray, tol: float = 1e-10) -> bool:
    return frob(m - dag(m)) <= tol * max(frob(m), 1.0)


def commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b - b @ a


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class Subspace:
    """Orthonormal basis of a linear subspace of ``C^n``.

    Attributes:
        basis: ``(ambient_dim, K)`` array with orthonormal columns.
    """

    basis: np.ndarray

    def __post_init__(self):
        b = np.asarray(self.basis, dtype=complex)
        if b.ndim != 2:
            raise ValueError("basis must be a 2-D (ambient_dim, K) array")
        object.__setattr__(self, "basis", _frozen(b))

    @classmethod
    def empty(cls, ambient_dim: int) -> Subspace:
        return cls(np.zeros((ambient_dim, 0), dtype=complex))

    @classmethod
    def full(cls, ambient_dim: int) -> Subspace:
        return cls(np.eye(ambient_dim, dtype=complex))

    @property
    def ambient_dim(self) -> int:
        return self.basis.shape[0]

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    def __len__(self) -> int:
        return self.dim

    def vectors(self) -> list[np.ndarray]:
        return [self.basis[:, k].copy() for k in range(self.dim)]

    def projector(self) -> np.ndarray:
        return self.basis @ dag(self.basis)

    def gram_error(self) -> float:
        return frob(dag(self.basis) @ self.basis - np.eye(self.dim))

    def projection_residual(self, v: np.ndarray) -> float:
        """Norm of the component of ``v`` orthogonal to the subspace, relative to ``|v|``."""
        v = np.asarray(v, dtype=complex)
        nv = np.linalg.norm(v)
        if nv == 0:
            return 0.0
        return float(np.linalg.norm(v - self.basis @ (dag(self.basis) @ v)) / nv)

    def principal_angles(self, other: Subspace) -> np.ndarray:
        if self.dim == 0 or other.dim == 0:
            return np.zeros(0)
        return scipy.linalg.subspace_angles(self.basis, other.basis)

    def same_span(self, other: Subspace, tol: float = 1e-10) -> bool:
        if self.dim != other.dim:
            return False
        return bool(np.all(self.principal_angles(other) <= tol))


@dataclass(frozen=True)
class EigenPair:
    """An eigenvalue with an orthonormal basis of its geometric eigenspace (as columns)."""

    value: complex
    vectors: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "vectors", _frozen(self.vectors))

    @property
    def multiplicity(self) -> int:
        return self.vectors.shape[1]


def nullspace(m, tol_rank: float = TOL_RANK, scale: float | None = None) -> Subspace:
    """Orthonormal basis of the numerical kernel of ``m``.

    A direction ``v`` is kept when ``|m v| <= tol_rank * scale * |v|``; ``scale``
    defaults to the Frobenius norm of ``m``.  Pass an explicit ``scale`` when
    ``m`` is a restriction of a larger operator whose norm sets the noise
    level.
    """
    m = np.asarray(m, dtype=complex)
    n = m.shape[1]
    if m.shape[0] == 0:
        return Subspace.full(n)
    if scale is None:
        scale = frob(m)
    thr = tol_rank * scale
    _, s, vh = np.linalg.svd(m, full_matrices=True)
    s_full = np.zeros(n)
    s_full[: s.size] = s
    keep = s_full <= thr
    return Subspace(dag(vh)[:, keep])


def orthonormalize(vectors, tol_rank: float = TOL_RANK, ambient_dim: int | None = None) -> Subspace:
    """Rank-revealing orthonormalization of a set of column vectors.

    ``vectors`` may be a list of 1-D arrays or an ``(n, k)`` array.  Directions
    whose singular value falls below ``tol_rank`` times the largest one are
    dropped.
    """
    if isinstance(vectors, np.ndarray) and vectors.ndim == 2:
        a = vectors.astype(complex)
    else:
        vectors = list(vectors)
        if not vectors:
            if ambient_dim is None:
                raise ValueError("ambient_dim is required for an empty vector list")
            return Subspace.empty(ambient_dim)
        a = np.column_stack([np.asarray(v, dtype=complex) for v in vectors])
    if a.shape[1] == 0:
        return Subspace.empty(a.shape[0])
    u, s, _ = np.linalg.svd(a, full_matrices=False)
    if s.size == 0 or s[0] == 0:
        return Subspace.empty(a.shape[0])
    rank = int(np.sum(s > tol_rank * s[0]))
    return Subspace(u[:, :rank])


def matrix_exponential(m) -> np.ndarray:
    m = np.asarray(m, dtype=complex)
    require_square(m)
    return scipy.linalg.expm(m)


def hermitian_eigendecompose(m, tol: float = 1e-10) -> list[EigenPair]:
    """Eigen-decomposition of a Hermitian matrix, grouping degenerate eigenvalues.

    Returns pairs sorted by decreasing eigenvalue.  Eigenvalues closer than
    ``tol * (1 + |m|_F)`` are treated as one degenerate level.
    """
    m = np.asarray(m, dtype=complex)
    require_square(m)
    norm = frob(m)
    if frob(m - dag(m)) > tol * max(norm, 1.0):
        raise NotHermitian(f"|m - m^dagger|_F = {frob(m - dag(m)):.3e} exceeds tolerance")
    w, v = np.linalg.eigh(0.5 * (m + dag(m)))
    order = np.argsort(-w)
    w, v = w[order], v[:, order]
    gap = tol * (1.0 + norm)
    pairs: list[EigenPair] = []
    start = 0
    for k in range(1, len(w) + 1):
        if k == len(w) or w[start] - w[k] > gap:
            pairs.append(EigenPair(complex(np.mean(w[start:k])), v[:, start:k]))
            start = k
    return pairs


def _snap(c: complex, tol: float) -> complex:
    re, im = c.real, c.imag
    if abs(re) <= tol:
        re = 0.0
    if abs(im) <= tol:
        im = 0.0
    return complex(re, im)


def geometric_eigenspaces(
    m, tol_cluster: float | None = None, tol_rank: float = TOL_RANK
) -> list[EigenPair]:
    """Eigenvalues of a general (possibly non-normal or defective) matrix with
    their geometric eigenspaces.

    Computed eigenvalues are first clustered at radius ``tol_cluster``.  A
    cluster is accepted when ``m - cI`` has a numerical kernel at the cluster
    mean ``c``; clusters without one (the scattered eigenvalues of a
    perturbed Jordan block) are merged with their nearest unresolved
    neighbours until a kernel appears.  Only kernel vectors are returned, so a
    defective eigenvalue yields fewer vectors than its algebraic
    multiplicity.

    Returns pairs sorted by (real, imag) of the eigenvalue.
    """
    m = np.asarray(m, dtype=complex)
    require_square(m)
    n = m.shape[0]
    norm = frob(m)
    if tol_cluster is None:
        tol_cluster = TOL_CLUSTER_REL * (1.0 + norm)
    if n == 0:
        return []
    if norm == 0.0:
        return [EigenPair(0j, np.eye(n, dtype=complex))]

    eye = np.eye(n)
    w = np.linalg.eigvals(m)

    def kernel_at(c: complex) -> Subspace:
        shifted = m - c * eye
        return nullspace(shifted, tol_rank, scale=max(frob(shifted), norm))

    # tight clustering
    groups = _single_linkage(w, tol_cluster)
    resolved: dict[int, tuple[complex, Subspace]] = {}
    pending: list[list[int]] = []
    for g in groups:
        c = _snap(complex(np.mean(w[g])), tol_cluster)
        ker = kernel_at(c)
        if ker.dim:
            resolved[len(resolved)] = (c, ker)
        else:
            pending.append(g)

    # merge unresolved clusters nearest-first until each finds a kernel
    while pending:
        if len(pending) == 1:
            g = pending.pop()
            c = complex(np.mean(w[g]))
            _, s, vh = np.linalg.svd(m - c * eye)
            if s[-1] <= 10 * tol_cluster * max(norm, 1.0):
                resolved[len(resolved)] = (_snap(c, tol_cluster), Subspace(dag(vh)[:, -1:]))
            break
        means = np.array([np.mean(w[g]) for g in pending])
        d = np.abs(means[:, None] - means[None, :])
        np.fill_diagonal(d, np.inf)
        i, j = np.unravel_index(np.argmin(d), d.shape)
        merged = pending[i] + pending[j]
        pending = [g for k, g in enumerate(pending) if k not in (i, j)]
        c = _snap(complex(np.mean(w[merged])), tol_cluster)
        ker = kernel_at(c)
        if ker.dim:
            resolved[len(resolved)] = (c, ker)
        else:
            pending.append(merged)

    # two clusters may land on the same numerical eigenvalue; merge their spans
    out: list[tuple[complex, Subspace]] = []
    for c, ker in resolved.values():
        for idx, (c2, ker2) in enumerate(out):
            if abs(c - c2) <= tol_cluster:
                out[idx] = (c2, orthonormalize(np.hstack([ker2.basis, ker.basis]), tol_rank))
                break
        else:
            out.append((c, ker))
    out.sort(key=lambda p: (p[0].real, p[0].imag))
    return [EigenPair(c, ker.basis) for c, ker in out]


def _single_linkage(w: np.ndarray, radius: float) -> list[list[int]]:
    n = len(w)
    parent = list(range(n))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    d = np.abs(w[:, None] - w[None, :])
    for a, b in zip(*np.nonzero(np.triu(d <= radius, k=1))):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb
    groups: dict[int, list[int]] = {}
    for k in range(n):
        groups.setdefault(find(k), []).append(k)
    return list(groups.values())
