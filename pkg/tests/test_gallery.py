from __future__ import annotations

import math
from math import comb

import numpy as np
import pytest

from dfsfinder import gallery
from dfsfinder.engine import IGC, RESTRICTED, find_all_dfs
from dfsfinder.errors import TooLarge, TruncationTooSmall
from dfsfinder.gallery import (
    GALLERY,
    SIGMA_MINUS,
    SIGMA_PLUS,
    SIGMA_X,
    SIGMA_Y,
    SIGMA_Z,
    annihilation,
    coherent_state,
    gell_mann_basis,
    matrix_unit_basis,
)
from dfsfinder.linalg import Subspace
from dfsfinder.model import apply_dissipator, liouvillian_apply
from dfsfinder.oracle import propagate, verify_dfs_record

from conftest import projector

E2 = np.eye(2)
PAPER_MODELS = [n for n, e in GALLERY.items() if e.paper_model]


class TestConventions:
    def test_pauli_algebra(self):
        assert np.allclose(SIGMA_PLUS @ SIGMA_MINUS + SIGMA_MINUS @ SIGMA_PLUS, np.eye(2))
        assert np.allclose(SIGMA_X @ SIGMA_Y, 1j * SIGMA_Z)
        assert np.allclose(SIGMA_MINUS @ E2[1], E2[0])

    def test_pinned_sign_makes_igc_state_stationary(self):
        # the sign of sigma_y is chosen so that |1> is a fixed point; check it dynamically
        m = gallery.igc_two_level()
        rho0 = projector(E2[1])
        assert np.linalg.norm(liouvillian_apply(m, rho0)) <= 1e-14
        res = propagate(m, rho0, t_final=5.0, keep_states=True)
        assert np.max(np.linalg.norm(res.states - rho0, axis=(1, 2))) <= 1e-8
        assert np.allclose(apply_dissipator(m, rho0), -SIGMA_X)

    def test_opposite_sign_is_not_stationary(self):
        from dfsfinder.model import MasterEquationModel

        m = gallery.igc_two_level()
        flipped = MasterEquationModel(-SIGMA_Y, m.dissipator)
        assert np.linalg.norm(liouvillian_apply(flipped, projector(E2[1]))) > 1

    def test_fock_commutator(self):
        a = annihilation(10)
        comm = a @ a.conj().T - a.conj().T @ a
        assert np.allclose(comm[:-1, :-1], np.eye(10))

    @pytest.mark.parametrize("n", [2, 3, 4])
    @pytest.mark.parametrize("builder", [matrix_unit_basis, gell_mann_basis])
    def test_operator_bases(self, n, builder):
        basis = builder(n)
        assert len(basis) == n * n - 1
        stacked = np.array([f.ravel() for f in basis] + [np.eye(n).ravel()])
        assert np.linalg.matrix_rank(stacked) == n * n

    def test_matrix_unit_basis_starts_with_three_level_generators(self):
        b = matrix_unit_basis(3)
        assert np.allclose(b[0], np.outer(np.eye(3)[0], np.eye(3)[1]))
        assert np.allclose(b[1], np.outer(np.eye(3)[0], np.eye(3)[2]))


class TestExpectedBlocks:
    @pytest.mark.parametrize("name", [n for n, e in GALLERY.items() if e.expected])
    def test_analysis_matches_expectation(self, name):
        entry = GALLERY[name]
        m = entry.build()
        rep = find_all_dfs(m)
        exp = entry.expected
        assert len(rep.records) == exp["dfs_count"]
        assert rep.dims == exp["dims"]
        assert [r.classification for r in rep.records] == exp["classifications"]
        for rec in rep.records:
            assert verify_dfs_record(m, rec, trials=3, seed=1).passed

    def test_all_paper_models_present(self):
        assert len(PAPER_MODELS) == 7

    def test_unknown(self):
        with pytest.raises(KeyError):
            gallery.build("nosuch")
        with pytest.raises(KeyError):
            gallery.build("igc_two_level", r=1.0)


class TestThreeLevel:
    def test_diagonal_form(self):
        m = gallery.three_level_counterexample()
        assert m.n_jumps == 1 and m.rates[0] == pytest.approx(2.0)


class TestSqueezed:
    @pytest.mark.parametrize("r", [0.3, 0.5, 1.0])
    def test_eigenpairs(self, r):
        s, c = math.sinh(r), math.cosh(r)
        j = gallery.squeezed_vacuum_two_level(r=r).jumps[0]
        ev = np.sort(np.linalg.eigvals(j).real)
        assert ev == pytest.approx([-math.sqrt(s * c), math.sqrt(s * c)], abs=1e-10)
        for sign, v in gallery.squeezed_eigenvectors(r).items():
            assert np.linalg.norm(j @ v - sign * math.sqrt(s * c) * v) <= 1e-12
            assert np.linalg.norm(v) == pytest.approx(1.0)

    def test_level_swap_relation(self):
        # the same vectors with the level labels exchanged: +-sqrt(s)|0> + sqrt(c)|1> up to sign
        r = 0.5
        s, c = math.sinh(r), math.cosh(r)
        v = gallery.squeezed_eigenvectors(r)[1]
        swapped = np.array([math.sqrt(s), math.sqrt(c)]) / math.sqrt(s + c)
        assert np.allclose(v[::-1], swapped)

    def test_undriven_has_no_dfs(self):
        assert find_all_dfs(gallery.squeezed_vacuum_two_level(branch=0)).records == []

    def test_other_branch(self):
        r = 0.5
        rep = find_all_dfs(gallery.squeezed_vacuum_two_level(r=r, branch=-1))
        assert len(rep.records) == 1 and rep.records[0].classification == IGC
        assert rep.records[0].eigenvalues[0].real == pytest.approx(-math.sqrt(math.sinh(r) * math.cosh(r)))

    def test_pure_decay_limit(self):
        m = gallery.squeezed_vacuum_two_level(r=0.0)
        assert np.allclose(m.jumps[0], SIGMA_MINUS)
        rep = find_all_dfs(m)
        assert rep.count(IGC) == 0
        assert [r.classification for r in rep.records] == [RESTRICTED]


class TestDicke:
    def test_three_atoms(self):
        r = 0.5
        rep = find_all_dfs(gallery.dicke_squeezed(N=3, r=r, n_plus=2))
        assert len(rep.records) == 1
        rec = rep.records[0]
        assert rec.dim == comb(3, 2) and rec.classification == IGC
        assert rec.eigenvalues[0].real == pytest.approx(math.sqrt(math.sinh(r) * math.cosh(r)), abs=1e-10)

    def test_span_of_product_states(self):
        r = 0.5
        rec = find_all_dfs(gallery.dicke_squeezed(N=3, r=r, n_plus=2)).records[0]
        ref = Subspace(np.linalg.qr(np.column_stack(gallery.dicke_paper_states(r)))[0])
        assert np.max(rec.subspace.principal_angles(ref)) <= 1e-6

    def test_printed_second_state_after_level_swap(self):
        # the second displayed state (stray parentheses dropped) with every bit flipped
        r = 0.5
        s, c = math.sinh(r), math.cosh(r)
        psi = np.zeros(8, dtype=complex)
        for bits, amp in (("111", -c * math.sqrt(c)), ("100", s * math.sqrt(c)),
                          ("011", -c * math.sqrt(s)), ("000", s * math.sqrt(s))):
            flipped = "".join("1" if b == "0" else "0" for b in bits)
            psi[int(flipped, 2)] += amp
        psi /= np.linalg.norm(psi)
        rec = find_all_dfs(gallery.dicke_squeezed(N=3, r=r, n_plus=2)).records[0]
        assert rec.subspace.projection_residual(psi) <= 1e-6

    def test_two_atoms_balanced_sector_not_igc(self):
        rep = find_all_dfs(gallery.dicke_squeezed(N=2, n_plus=1))
        zero = [rec for rec in rep.records if abs(rec.eigenvalues[0]) < 1e-9]
        assert zero and all(rec.classification == RESTRICTED for rec in zero)
        assert rep.count(IGC) == 0

    def test_limits(self):
        with pytest.raises(TooLarge):
            gallery.dicke_squeezed(N=9)
        with pytest.raises(ValueError):
            gallery.dicke_squeezed(N=3, n_plus=4)


class TestTruncatedOscillators:
    def test_vacuum_restricted_when_undriven(self):
        rep = find_all_dfs(gallery.damped_oscillator_truncated(n_max=12, alpha=0, driven=False))
        assert len(rep.records) == 1
        rec = rep.records[0]
        assert rec.classification == RESTRICTED and abs(rec.eigenvalues[0]) < 1e-12
        assert rec.subspace.projection_residual(np.eye(13)[0].astype(complex)) <= 1e-12

    def test_truncation_guard(self):
        with pytest.raises(TruncationTooSmall):
            gallery.damped_oscillator_truncated(n_max=10, alpha=1.0)
        with pytest.raises(TruncationTooSmall):
            gallery.two_photon_absorber_truncated(n_max=12, alpha=1.0)

    def test_driven_coherent_state_short_run(self):
        m = gallery.damped_oscillator_truncated(n_max=16, alpha=1.0)
        psi = coherent_state(16, 1.0)
        res = propagate(m, np.outer(psi, psi.conj()), t_final=1.0, keep_states=True)
        assert np.max(np.abs(1 - res.purities)) <= 1e-10
        n_op = np.diag(np.arange(17))
        photons = np.real(np.einsum("ij,tji->t", n_op, res.states))
        assert np.allclose(photons, photons[0], atol=1e-10)

    def test_two_photon_vacuum_and_one_photon(self):
        rep = find_all_dfs(gallery.two_photon_absorber_truncated(n_max=12, alpha=0))
        assert len(rep.records) == 1
        rec = rep.records[0]
        assert rec.classification == RESTRICTED and rec.dim == 2
        assert rec.subspace.same_span(Subspace(np.eye(13)[:, :2].astype(complex)), 1e-10)

    @pytest.mark.parametrize("sign", [1, -1])
    def test_coherent_eigenrelation(self, sign):
        n_max, alpha = 30, 1.0
        a2 = annihilation(n_max) @ annihilation(n_max)
        psi = coherent_state(n_max, sign * alpha)
        assert np.vdot(psi, a2 @ psi) == pytest.approx(alpha**2, abs=1e-10)

    def test_reports_carry_truncation_note(self):
        rep = find_all_dfs(gallery.two_photon_absorber_truncated(n_max=14, alpha=1.0))
        assert rep.notes and rep.records == []


class TestRandomModel:
    def test_deterministic(self):
        a = gallery.random_model(4, 2, seed=3)
        b = gallery.random_model(4, 2, seed=3)
        assert np.array_equal(a.h_eff, b.h_eff)
        assert all(np.array_equal(x, y) for x, y in zip(a.jumps, b.jumps))
        assert a.rates == b.rates

    @pytest.mark.parametrize("seed", range(5))
    def test_kinds(self, seed):
        n = 4
        for j in gallery.random_model(n, 2, kind="dephasing", seed=seed).jumps:
            assert np.allclose(j, np.diag(np.diag(j)))
        for j in gallery.random_model(n, 2, kind="normal-jumps", seed=seed).jumps:
            assert np.allclose(j @ j.conj().T, j.conj().T @ j)
        for j in gallery.random_model(n, 2, kind="decay-like", seed=seed).jumps:
            assert np.allclose(np.tril(j), 0)

    def test_limits(self):
        with pytest.raises(TooLarge):
            gallery.random_model(17)
        with pytest.raises(ValueError):
            gallery.random_model(3, kind="nope")
