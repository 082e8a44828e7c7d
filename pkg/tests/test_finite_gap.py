import numpy as np
import pytest

from cslab.finite_gap import (
    ConstraintError,
    constraint_residual,
    core_block_matrices,
    make_finite_gap,
    make_resonant,
    synthesize_coeffs,
)
from cslab.hardy import eval_disk
from cslab.lax import build_lax_matrix


class TestMakeFiniteGap:
    def test_valid_amplitudes(self):
        # 2/3 * 1 + 1 / (1 - 1/4) = 2/3 + 4/3 = 2
        d = make_finite_gap(0.0, 0, 0.5, 2.0 / 3.0, 1.0)
        assert d.r == 0.25
        assert d.rho == 0.5

    def test_constraint_violation(self):
        with pytest.raises(ConstraintError):
            make_finite_gap(0.0, 0, 0.5, 1.0, 1.0)  # residual 1/3

    def test_pole_outside_disk(self):
        with pytest.raises(ValueError):
            make_finite_gap(0.0, 0, 1.2, 1.0, 1.0)

    def test_pole_at_origin(self):
        with pytest.raises(ValueError):
            make_finite_gap(0.0, 0, 0.0, 1.0, 1.0)

    def test_negative_shift(self):
        with pytest.raises(ValueError):
            make_finite_gap(0.0, -1, 0.5, 2.0 / 3.0, 1.0)


class TestMakeResonant:
    def test_amplitudes_at_half(self):
        d = make_resonant(0.0, 0, 0.5)
        assert d.a == pytest.approx(0.7745966692414834, abs=1e-12)
        assert d.c == pytest.approx(-1.5491933384829668, abs=1e-12)

    def test_resonance_identity_exact(self):
        for theta in (0.0, 1.3, 4.9):
            d = make_resonant(theta, 1, 0.4 + 0.3j)
            assert 2.0 * d.a + d.c == 0.0

    def test_constraint_residual_tiny(self):
        rng = np.random.default_rng(5)
        for _ in range(20):
            p = rng.uniform(0.1, 0.9) * np.exp(1j * rng.uniform(0, 2 * np.pi))
            d = make_resonant(rng.uniform(0, 2 * np.pi), 0, p)
            assert constraint_residual(d.p, d.a, d.c) <= 1e-15

    def test_phase_absorbed_into_amplitude(self):
        d = make_resonant(1.3, 0, 0.5)
        assert d.theta == 0.0
        assert np.angle(d.a) == pytest.approx(1.3, abs=1e-12)


class TestSynthesize:
    def test_mean_value(self):
        d = make_resonant(0.0, 0, 0.5)
        u0 = synthesize_coeffs(d, 256)
        assert u0.coeffs[0] == pytest.approx(0.3872983346207417, abs=1e-12)

    def test_mass(self):
        d = make_resonant(0.0, 0, 0.5)
        u0 = synthesize_coeffs(d, 256)
        assert np.sum(np.abs(u0.coeffs) ** 2) == pytest.approx(1.4, abs=1e-10)

    def test_shift_prefactor_zeroes_low_modes(self):
        d = make_resonant(0.3, 3, 0.5)
        u0 = synthesize_coeffs(d, 64)
        assert np.all(u0.coeffs[:3] == 0.0)

    def test_matches_pointwise_rational_form(self):
        d = make_finite_gap(0.7, 1, 0.3 - 0.4j, 2.0 / 3.0, 1.0)
        u0 = synthesize_coeffs(d, 256)
        rng = np.random.default_rng(2)
        for _ in range(8):
            z = rng.uniform(0, 0.8) * np.exp(1j * rng.uniform(0, 2 * np.pi))
            blaschke = (z - d.p) / (1.0 - np.conj(d.p) * z)
            direct = (
                np.exp(1j * d.theta)
                * z**d.m
                * blaschke
                * (d.a + d.c / (1.0 - np.conj(d.p) * z))
            )
            assert abs(eval_disk(u0, z) - direct) < 1e-12


class TestCoreBlock:
    def test_resonant_values(self):
        block = core_block_matrices(make_resonant(0.0, 0, 0.5))
        assert block.alpha == pytest.approx(2.0 / 3.0, abs=1e-14)
        assert block.beta == pytest.approx(2.0 / 3.0, abs=1e-14)
        assert block.kappa == pytest.approx(1.0 / 3.0, abs=1e-14)

    def test_nonresonant_values(self):
        block = core_block_matrices(make_finite_gap(0.0, 0, 0.5, 2.0 / 3.0, 1.0))
        assert block.alpha == pytest.approx(20.0 / 9.0, abs=1e-13)
        assert block.beta == pytest.approx(-5.0 / 3.0, abs=1e-13)
        assert block.kappa == pytest.approx(10.0 / 9.0, abs=1e-13)

    def test_shift_block_exact(self):
        block = core_block_matrices(make_resonant(0.0, 0, 0.5))
        assert np.array_equal(block.Sstar_block, np.array([[0.5, 1.0], [0.0, 0.5]]))
        assert np.linalg.det(block.Sstar_block) == pytest.approx(0.25, abs=1e-15)
        assert np.trace(block.Sstar_block) == pytest.approx(1.0, abs=1e-15)

    def test_block_independent_of_phase_and_shift(self):
        p = 0.3 + 0.4j
        base = core_block_matrices(make_resonant(0.0, 0, p))
        other = core_block_matrices(make_resonant(2.1, 3, p))
        assert np.max(np.abs(base.L_block - other.L_block)) < 1e-14

    def test_block_eigenvalues_real_distinct(self):
        rng = np.random.default_rng(11)
        for _ in range(20):
            rho = rng.uniform(0.1, 0.85)
            p = rho * np.exp(1j * rng.uniform(0, 2 * np.pi))
            ratio = rng.uniform(-1.0 / (1 - rho**2) + 0.05, 2.0)
            c = np.sqrt(2.0 / (ratio + 1.0 / (1 - rho**2))) * np.exp(1j * rng.uniform(0, 2 * np.pi))
            d = make_finite_gap(0.0, 0, p, ratio * c, c)
            w = np.linalg.eigvals(core_block_matrices(d).L_block)
            assert np.max(np.abs(w.imag)) < 1e-10
            assert abs(w[0] - w[1]) > 1e-8

    def test_consistent_with_truncated_operator_nonresonant(self):
        # independent check of the 2x2 formulas against the dense matrix
        d = make_finite_gap(0.0, 0, 0.5, 2.0 / 3.0, 1.0)
        block = core_block_matrices(d)
        lax = build_lax_matrix(synthesize_coeffs(d, 256))
        pb = np.conj(d.p)
        n = np.arange(257.0)
        e0 = pb**n
        e1 = n * pb ** (n - 1)
        e1[0] = 0.0
        assert np.linalg.norm(lax.entries @ e0 - pb * e1) < 1e-8
        assert np.linalg.norm(lax.entries @ e1 - (block.alpha * e0 + block.beta * e1)) < 1e-8

    def test_consistent_at_higher_modulus(self):
        rho = 0.8
        d = make_resonant(0.0, 0, rho * np.exp(0.7j))
        block = core_block_matrices(d)
        lax = build_lax_matrix(synthesize_coeffs(d, 256))
        pb = np.conj(d.p)
        n = np.arange(257.0)
        e0 = pb**n
        e1 = n * pb ** (n - 1)
        e1[0] = 0.0
        assert np.linalg.norm(lax.entries @ e0 - pb * e1) < 1e-8
        assert np.linalg.norm(lax.entries @ e1 - (block.alpha * e0 + block.beta * e1)) < 1e-8
