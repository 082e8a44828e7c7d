import numpy as np
import pytest

from cslab.finite_gap import core_block_matrices, make_resonant, synthesize_coeffs
from cslab.hardy import HardyCoeffs
from cslab.lax import build_lax_matrix, conserved_quantity, propagator
from cslab.timestepper import evolve


def hardy(values) -> HardyCoeffs:
    return HardyCoeffs(np.asarray(values, dtype=complex))


@pytest.fixture(scope="module")
def resonant_datum():
    return make_resonant(0.0, 0, 0.5)


@pytest.fixture(scope="module")
def resonant_lax(resonant_datum):
    u0 = synthesize_coeffs(resonant_datum, 256)
    return u0, build_lax_matrix(u0)


class TestBuild:
    def test_free_case_is_diagonal(self):
        lax = build_lax_matrix(hardy(np.zeros(9)))
        assert np.array_equal(lax.entries, np.diag(np.arange(9.0)))

    def test_hermitian_exactly(self):
        rng = np.random.default_rng(7)
        u = hardy(rng.normal(size=40) + 1j * rng.normal(size=40))
        lax = build_lax_matrix(u)
        assert np.array_equal(lax.entries, lax.entries.conj().T)

    def test_kernel_pair_relations(self, resonant_datum, resonant_lax):
        # L e0 = conj(p) e1 and L e1 = alpha e0 + beta e1 on the invariant pair
        _, lax = resonant_lax
        block = core_block_matrices(resonant_datum)
        pb = np.conj(resonant_datum.p)
        n = np.arange(257.0)
        e0 = pb**n
        e1 = n * pb ** (n - 1)
        e1[0] = 0.0
        assert np.linalg.norm(lax.entries @ e0 - pb * e1) < 1e-8
        assert np.linalg.norm(lax.entries @ e1 - (block.alpha * e0 + block.beta * e1)) < 1e-8

    def test_gauge_invariance(self, resonant_datum):
        u0 = synthesize_coeffs(resonant_datum, 64)
        rotated = hardy(np.exp(1.3j) * u0.coeffs)
        a = build_lax_matrix(u0).entries
        b = build_lax_matrix(rotated).entries
        assert np.max(np.abs(a - b)) < 1e-13 * max(1.0, np.max(np.abs(a)))


class TestPropagator:
    def test_time_zero_is_identity(self, resonant_lax):
        _, lax = resonant_lax
        u = propagator(lax, 0.0).matrix
        assert np.max(np.abs(u - np.eye(257))) < 1e-12

    def test_free_case_diagonal_phases(self):
        lax = build_lax_matrix(hardy(np.zeros(6)))
        u = propagator(lax, 0.37).matrix
        expected = np.diag(np.exp(-2j * 0.37 * np.arange(6.0)))
        assert np.max(np.abs(u - expected)) < 1e-13

    def test_unitary(self, resonant_lax):
        _, lax = resonant_lax
        u = propagator(lax, 1.7).matrix
        assert np.max(np.abs(u.conj().T @ u - np.eye(257))) < 1e-12

    def test_group_law(self, resonant_lax):
        _, lax = resonant_lax
        u_s = propagator(lax, 0.3).matrix
        u_t = propagator(lax, 0.9).matrix
        u_st = propagator(lax, 1.2).matrix
        assert np.max(np.abs(u_s @ u_t - u_st)) < 1e-10


class TestConservedQuantity:
    def test_mass_of_resonant_datum(self, resonant_lax):
        u0, lax = resonant_lax
        assert conserved_quantity(u0, 0, lax) == pytest.approx(1.4, abs=1e-8)

    def test_plane_wave_momentum_vanishes(self):
        # <Dz, z> - |Pi(conj(z) z)|^2 = 1 - 1
        z = hardy(np.r_[0.0, 1.0, np.zeros(30)])
        assert abs(conserved_quantity(z, 1)) < 1e-10

    def test_zero_potential(self):
        zero = hardy(np.zeros(16))
        for k in range(4):
            assert conserved_quantity(zero, k) == 0.0

    def test_negative_order_rejected(self, resonant_lax):
        u0, lax = resonant_lax
        with pytest.raises(ValueError):
            conserved_quantity(u0, -1, lax)

    def test_conserved_along_oracle_trajectory(self, resonant_datum):
        # first three quantities frozen along the direct integration
        from cslab.closed_form import blowup_time

        u0 = synthesize_coeffs(resonant_datum, 128)
        traj = evolve(u0, blowup_time(0.5) / 2.0, 1e-4, output_every=1000)
        drift = np.abs(traj.conserved - traj.conserved[0]).max(axis=0)
        assert np.all(drift <= 1e-6)
