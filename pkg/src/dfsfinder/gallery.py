"""Constructors for the reference models and random test models.

Conventions (fixed here for the whole package):

* Two-level basis order is ``(|0>, |1>)`` with ``|1>`` the excited state.
* ``sigma_minus = |0><1|``, ``sigma_plus = |1><0|``,
  ``sigma_z = |1><1| - |0><0|``, ``sigma_x = sigma_minus + sigma_plus`` and
  ``sigma_y = i (sigma_minus - sigma_plus)``.  With this choice the state
  ``|1>`` of :func:`igc_two_level` is stationary; the test suite checks it.
* Multi-atom operators use ``numpy.kron`` with atom 1 as the leftmost
  factor, so ``|b_1 b_2 ... b_N>`` has index ``int("b_1 b_2 ... b_N", 2)``.
* Truncated oscillators use the Fock basis ``|0>, ..., |n_max>`` with
  ``a|n> = sqrt(n)|n-1>``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import TooLarge, TruncationTooSmall
from .model import DiagonalLindblad, GksDissipator, MasterEquationModel

SIGMA_MINUS = np.array([[0, 1], [0, 0]], dtype=complex)
SIGMA_PLUS = SIGMA_MINUS.T.copy()
SIGMA_Z = np.diag([-1.0, 1.0]).astype(complex)
SIGMA_X = SIGMA_MINUS + SIGMA_PLUS
SIGMA_Y = 1j * (SIGMA_MINUS - SIGMA_PLUS)
for _m in (SIGMA_MINUS, SIGMA_PLUS, SIGMA_Z, SIGMA_X, SIGMA_Y):
    _m.setflags(write=False)


def ket(n: int, *indices: int) -> np.ndarray:
    """Basis vector ``|i_1 ... i_k>`` of dimension ``n``; several indices are summed."""
    v = np.zeros(n, dtype=complex)
    for i in indices:
        v[i] += 1.0
    return v


def unit(n: int, i: int, j: int) -> np.ndarray:
    """Matrix unit ``|i><j|``."""
    e = np.zeros((n, n), dtype=complex)
    e[i, j] = 1.0
    return e


def matrix_unit_basis(n: int) -> list[np.ndarray]:
    """Traceless operator basis: the off-diagonal units ``|i><j|`` in row-major
    order followed by ``n - 1`` normalized diagonal generalized Gell-Mann matrices."""
    basis = [unit(n, i, j) for i in range(n) for j in range(n) if i != j]
    return basis + _diagonal_gell_mann(n)


def _diagonal_gell_mann(n: int) -> list[np.ndarray]:
    out = []
    for k in range(1, n):
        d = np.zeros(n)
        d[:k] = 1.0
        d[k] = -k
        out.append(np.diag(d / math.sqrt(k * (k + 1))).astype(complex))
    return out


def gell_mann_basis(n: int) -> list[np.ndarray]:
    """Generalized Gell-Mann matrices (symmetric, antisymmetric, diagonal), normalized
    to ``Tr(F_k^+ F_l) = delta_kl``."""
    out = []
    for i in range(n):
        for j in range(i + 1, n):
            out.append((unit(n, i, j) + unit(n, j, i)) / math.sqrt(2))
            out.append((-1j * unit(n, i, j) + 1j * unit(n, j, i)) / math.sqrt(2))
    return out + _diagonal_gell_mann(n)


def embed(op: np.ndarray, site: int, n_sites: int) -> np.ndarray:
    """``I x ... x op x ... x I`` with ``op`` on ``site`` (0-based, leftmost first)."""
    d = op.shape[0]
    left = np.eye(d ** site)
    right = np.eye(d ** (n_sites - site - 1))
    return np.kron(np.kron(left, op), right)


def annihilation(n_max: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, n_max + 1)), k=1).astype(complex)


def coherent_state(n_max: int, alpha: complex) -> np.ndarray:
    """Coherent state truncated to ``n_max + 1`` Fock levels and renormalized."""
    n = np.arange(n_max + 1)
    logfact = np.array([math.lgamma(k + 1) for k in n])
    amp = np.exp(-0.5 * abs(alpha) ** 2 - 0.5 * logfact) * (alpha ** n if alpha != 0 else (n == 0))
    amp = amp.astype(complex)
    return amp / np.linalg.norm(amp)


def _squeeze_params(r: float) -> tuple[float, float]:
    return math.sinh(r), math.cosh(r)


# --- reference models ---------------------------------------------------------


def three_level_counterexample() -> MasterEquationModel:
    """Three levels, no Hamiltonian, GKS coefficients equal to one on the
    ``|0><1|``, ``|0><2|`` block and zero elsewhere."""
    basis = matrix_unit_basis(3)  # starts with |0><1|, |0><2|
    a = np.zeros((8, 8), dtype=complex)
    a[:2, :2] = 1.0
    return MasterEquationModel(
        np.zeros((3, 3)), GksDissipator(tuple(basis), a), label="three_level_counterexample"
    )


def two_level_nonsemisimple() -> MasterEquationModel:
    j1 = unit(2, 1, 1)
    j2 = unit(2, 0, 0) + unit(2, 0, 1)
    return MasterEquationModel(
        np.zeros((2, 2)), DiagonalLindblad((1.0, 1.0), (j1, j2)), label="two_level_nonsemisimple"
    )


def igc_two_level() -> MasterEquationModel:
    """Jump ``sigma_plus + sigma_z`` at rate 2 with ``H = sigma_y``; ``|1>`` is stationary."""
    return MasterEquationModel(
        SIGMA_Y, DiagonalLindblad((2.0,), (SIGMA_PLUS + SIGMA_Z,)), label="igc_two_level"
    )


def squeezed_vacuum_two_level(r: float = 0.5, gamma0: float = 1.0, branch: int = 1) -> MasterEquationModel:
    """Two-level atom in a squeezed vacuum, jump ``cosh(r) sigma_minus + sinh(r) sigma_plus``.

    ``branch = +1`` (``-1``) adds the drive that stabilizes the eigenstate with
    jump eigenvalue ``+sqrt(sc)`` (``-sqrt(sc)``); ``branch = 0`` leaves the
    atom undriven.
    """
    if branch not in (-1, 0, 1):
        raise ValueError("branch must be -1, 0 or +1")
    s, c = _squeeze_params(r)
    jump = c * SIGMA_MINUS + s * SIGMA_PLUS
    h = branch * 0.5 * gamma0 * math.sqrt(s * c) * (s - c) * SIGMA_Y
    return MasterEquationModel(
        h, DiagonalLindblad((gamma0,), (jump,)), label=f"squeezed_vacuum_two_level(r={r},branch={branch})"
    )


def squeezed_eigenvectors(r: float) -> dict[int, np.ndarray]:
    """Normalized eigenvectors of the squeezed-vacuum jump, keyed by the sign of the eigenvalue.

    In this package's convention they are ``+-sqrt(c)|0> + sqrt(s)|1>``.
    """
    s, c = _squeeze_params(r)
    out = {}
    for sign in (1, -1):
        v = np.array([sign * math.sqrt(c), math.sqrt(s)], dtype=complex)
        out[sign] = v / np.linalg.norm(v)
    return out


DICKE_MAX_ATOMS = 8


def dicke_squeezed(N: int = 3, r: float = 0.5, gamma: float = 1.0, n_plus: int = 2) -> MasterEquationModel:
    """``N`` atoms with one collective squeezed-vacuum jump operator.

    The drive ``(gamma/2)(n_+ - n_-) sqrt(sc)(s - c) S_y`` with
    ``S_y = sum_n sigma_y^(n)`` stabilizes the sector with ``n_plus``
    single-atom ``+sqrt(sc)`` factors (jump eigenvalue
    ``(2 n_plus - N) sqrt(sc)``).
    """
    if N < 1:
        raise ValueError("N must be positive")
    if N > DICKE_MAX_ATOMS:
        raise TooLarge(f"N = {N} exceeds the cap of {DICKE_MAX_ATOMS} atoms")
    if not 0 <= n_plus <= N:
        raise ValueError("n_plus must lie in [0, N]")
    s, c = _squeeze_params(r)
    single = c * SIGMA_MINUS + s * SIGMA_PLUS
    jump = sum(embed(single, k, N) for k in range(N))
    s_y = sum(embed(SIGMA_Y, k, N) for k in range(N))
    n_minus = N - n_plus
    h = 0.5 * gamma * (n_plus - n_minus) * math.sqrt(s * c) * (s - c) * s_y
    return MasterEquationModel(
        h, DiagonalLindblad((gamma,), (jump,)), label=f"dicke_squeezed(N={N},r={r},n_plus={n_plus})"
    )


def dicke_paper_states(r: float) -> list[np.ndarray]:
    """Three spanning states for the ``N = 3``, eigenvalue ``+sqrt(sc)`` sector,
    written as product states of the single-atom eigenvectors."""
    ev = squeezed_eigenvectors(r)
    plus, minus = ev[1], ev[-1]
    out = []
    for pos in range(3):
        factors = [plus, plus, plus]
        factors[pos] = minus
        out.append(np.kron(np.kron(factors[0], factors[1]), factors[2]))
    return out


def _check_truncation(n_max: int, alpha: complex) -> None:
    need = 4 * abs(alpha) ** 2 + 10
    if n_max < need:
        raise TruncationTooSmall(f"n_max = {n_max} < 4|alpha|^2 + 10 = {need:g}")


def damped_oscillator_truncated(
    n_max: int = 24, omega0: float = 1.0, gamma: float = 1.0, alpha: complex = 1.0, driven: bool = True
) -> MasterEquationModel:
    """Damped cavity mode truncated to ``n_max + 1`` Fock levels.

    Undriven: ``H = omega0 a^+ a``.  Driven: the lab-frame drive
    ``g(t) = (i/2) gamma alpha exp(-i omega0 t)`` becomes time-independent in
    the frame rotating at ``omega0``, where ``omega0 a^+ a`` cancels and
    ``H = g a^+ + g^* a`` with ``g = (i/2) gamma alpha``.  The coherent state
    ``|alpha>`` is then stationary up to truncation error.
    """
    _check_truncation(n_max, alpha)
    a = annihilation(n_max)
    ad = a.conj().T
    if driven:
        g = 0.5j * gamma * alpha
        h = g * ad + np.conj(g) * a
    else:
        h = omega0 * ad @ a
    return MasterEquationModel(
        h,
        DiagonalLindblad((gamma,), (a,)),
        label=f"damped_oscillator_truncated(n_max={n_max},alpha={alpha},driven={driven})",
        truncated_fock=True,
    )


def two_photon_absorber_truncated(n_max: int = 30, gamma: float = 1.0, alpha: complex = 1.0) -> MasterEquationModel:
    """Two-photon loss ``a^2`` at rate ``gamma`` with the parametric pump
    ``(i gamma/2)(alpha^2 a^+2 - alpha^*2 a^2)`` that holds ``|+-alpha>`` fixed."""
    _check_truncation(n_max, alpha)
    a = annihilation(n_max)
    a2 = a @ a
    a2d = a2.conj().T
    h = 0.5j * gamma * (alpha ** 2 * a2d - np.conj(alpha) ** 2 * a2)
    return MasterEquationModel(
        h,
        DiagonalLindblad((gamma,), (a2,)),
        label=f"two_photon_absorber_truncated(n_max={n_max},alpha={alpha})",
        truncated_fock=True,
    )


RANDOM_KINDS = ("generic", "normal-jumps", "decay-like", "dephasing")


def _random_hermitian(rng, n):
    x = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return 0.5 * (x + x.conj().T)


def _random_unitary(rng, n):
    x = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    q, r = np.linalg.qr(x)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_model(
    dim: int = 3, M: int = 1, kind: str = "generic", seed: int = 0, hamiltonian: str = "random"
) -> MasterEquationModel:
    """Seeded random model.

    Args:
        kind: jump structure.  ``normal-jumps`` are unitary conjugations of
            diagonal matrices, ``decay-like`` are strictly upper triangular,
            ``dephasing`` are diagonal.
        hamiltonian: ``random`` (Hermitian Gaussian), ``zero``, or
            ``diagonal`` (random real diagonal).
    """
    if dim > 16:
        raise TooLarge("random models are limited to dim <= 16")
    if kind not in RANDOM_KINDS:
        raise ValueError(f"kind must be one of {RANDOM_KINDS}")
    rng = np.random.default_rng(seed)
    jumps = []
    for _ in range(M):
        if kind == "generic":
            j = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
        elif kind == "normal-jumps":
            u = _random_unitary(rng, dim)
            d = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
            j = (u * d) @ u.conj().T
        elif kind == "decay-like":
            j = np.triu(rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim)), k=1)
        else:
            j = np.diag(rng.standard_normal(dim) + 1j * rng.standard_normal(dim))
        jumps.append(j / max(np.linalg.norm(j), 1e-300) * math.sqrt(dim))
    rates = tuple(float(x) for x in rng.uniform(0.5, 2.0, size=M))
    if hamiltonian == "random":
        h = _random_hermitian(rng, dim)
    elif hamiltonian == "zero":
        h = np.zeros((dim, dim))
    elif hamiltonian == "diagonal":
        h = np.diag(rng.standard_normal(dim))
    else:
        raise ValueError("hamiltonian must be 'random', 'zero' or 'diagonal'")
    return MasterEquationModel(
        h, DiagonalLindblad(rates, tuple(jumps)), label=f"random_model(dim={dim},M={M},kind={kind},seed={seed})"
    )


# --- registry -----------------------------------------------------------------


@dataclass(frozen=True)
class GalleryEntry:
    """A named builder with default parameters and, optionally, the expected
    analysis outcome (``dfs_count``, ``dims``, ``classifications``)."""

    name: str
    builder: Callable[..., MasterEquationModel]
    params: dict = field(default_factory=dict)
    expected: dict | None = None
    paper_model: bool = True

    def build(self, **overrides) -> MasterEquationModel:
        params = dict(self.params)
        unknown = set(overrides) - set(params)
        if unknown:
            raise KeyError(f"{self.name} has no parameter(s) {sorted(unknown)}")
        params.update(overrides)
        return self.builder(**params)


GALLERY: dict[str, GalleryEntry] = {
    e.name: e
    for e in [
        GalleryEntry(
            "three_level_counterexample",
            three_level_counterexample,
            {},
            {"dfs_count": 1, "dims": [2], "classifications": ["Restricted"]},
        ),
        GalleryEntry(
            "two_level_nonsemisimple",
            two_level_nonsemisimple,
            {},
            {"dfs_count": 0, "dims": [], "classifications": []},
        ),
        GalleryEntry(
            "igc_two_level",
            igc_two_level,
            {},
            {"dfs_count": 1, "dims": [1], "classifications": ["IGC"]},
        ),
        GalleryEntry(
            "squeezed_vacuum_two_level",
            squeezed_vacuum_two_level,
            {"r": 0.5, "gamma0": 1.0, "branch": 1},
            {"dfs_count": 1, "dims": [1], "classifications": ["IGC"]},
        ),
        GalleryEntry(
            "dicke_squeezed",
            dicke_squeezed,
            {"N": 3, "r": 0.5, "gamma": 1.0, "n_plus": 2},
            {"dfs_count": 1, "dims": [3], "classifications": ["IGC"]},
        ),
        GalleryEntry(
            "damped_oscillator_truncated",
            damped_oscillator_truncated,
            {"n_max": 24, "omega0": 1.0, "gamma": 1.0, "alpha": 1.0, "driven": True},
        ),
        GalleryEntry(
            "two_photon_absorber_truncated",
            two_photon_absorber_truncated,
            {"n_max": 30, "gamma": 1.0, "alpha": 1.0},
        ),
        GalleryEntry(
            "random_model",
            random_model,
            {"dim": 3, "M": 1, "kind": "generic", "seed": 0, "hamiltonian": "random"},
            paper_model=False,
        ),
    ]
}


def build(name: str, **params) -> MasterEquationModel:
    try:
        entry = GALLERY[name]
    except KeyError:
        raise KeyError(f"unknown gallery model {name!r}; known: {sorted(GALLERY)}") from None
    return entry.build(**params)
