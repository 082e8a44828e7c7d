"""Spectral dichotomy engine for the rational data family.

Everything here reduces to the invariant 2x2 block: its eigen-pair decides
whether the shifted propagator ever acquires a unimodular eigenvalue (finite
lifespan) or keeps a uniform spectral gap (global existence).  Public
operations take physical time; the two functions suffixed ``_tau`` take Lax
time, which runs twice as fast.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .finite_gap import FiniteGapData, core_block_matrices
from .hardy import HardyCoeffs
from .lax import LaxMatrix, propagator

__all__ = [
    "RESONANCE_TOL",
    "Classification",
    "SpectralData",
    "classify",
    "block_eigen",
    "x_of_tau",
    "min_abs_x",
    "unimodular_times_tau",
    "sigma_block",
    "sigma_spectral_radius",
    "measure_resonance_time",
    "measure_spectral_radius_bound",
    "stability_iterate_decay",
]

RESONANCE_TOL = 1e-12


class Classification(enum.Enum):
    RESONANT = "resonant"
    NONRESONANT = "nonresonant"


def classify(data: FiniteGapData) -> Classification:
    """Resonant iff 2a + c vanishes (phase-invariant, tolerance 1e-12)."""
    if abs(2.0 * data.a + data.c) <= RESONANCE_TOL:
        return Classification.RESONANT
    return Classification.NONRESONANT


@dataclass(frozen=True)
class SpectralData:
    """Eigen-data of the 2x2 block and the induced scalar-recursion weights."""

    lambda_plus: float
    lambda_minus: float
    kappa: float
    beta: float
    b_plus: float
    b_minus: float
    classification: Classification
    delta: float


def block_eigen(data: FiniteGapData) -> SpectralData:
    """Real distinct eigenvalues of the block and the weights of x(tau).

    The eigenvalues solve lambda^2 - beta*lambda - kappa = 0; the weights are
    b+ = (kappa - lambda-)/(lambda+ - lambda-) and b- = 1 - b+.
    """
    block = core_block_matrices(data)
    beta, kappa = block.beta, block.kappa
    disc = beta * beta + 4.0 * kappa
    if disc <= 0.0:
        raise ArithmeticError(f"discriminant {disc:.3e} is not positive")
    sq = math.sqrt(disc)
    # stable root first, companion via the product -kappa
    if beta >= 0.0:
        lam_a = 0.5 * (beta + sq)
        lam_b = -kappa / lam_a if lam_a != 0.0 else 0.5 * (beta - sq)
    else:
        lam_a = 0.5 * (beta - sq)
        lam_b = -kappa / lam_a if lam_a != 0.0 else 0.5 * (beta + sq)
    lam_plus, lam_minus = max(lam_a, lam_b), min(lam_a, lam_b)
    b_plus = (kappa - lam_minus) / (lam_plus - lam_minus)
    b_minus = (lam_plus - kappa) / (lam_plus - lam_minus)
    return SpectralData(
        lambda_plus=lam_plus,
        lambda_minus=lam_minus,
        kappa=kappa,
        beta=beta,
        b_plus=b_plus,
        b_minus=b_minus,
        classification=classify(data),
        delta=abs(abs(b_plus) - abs(b_minus)),
    )


def x_of_tau(spec: SpectralData, tau):
    """Scalar obstruction x(tau) = b+ e^{-i lam+ tau} + b- e^{-i lam- tau}.

    tau is Lax time (physical time is tau/2).  x(0) = 1; its zeros mark the
    Lax times at which the contraction has a unimodular eigenvalue.
    """
    tau = np.asarray(tau, dtype=np.float64)
    value = spec.b_plus * np.exp(-1j * spec.lambda_plus * tau) + spec.b_minus * np.exp(
        -1j * spec.lambda_minus * tau
    )
    return complex(value) if value.ndim == 0 else value


def min_abs_x(spec: SpectralData, grid_size: int = 4096) -> float:
    """Minimum of |x| over one full period, refined from the best grid point."""
    period = 2.0 * math.pi / (spec.lambda_plus - spec.lambda_minus)
    taus = np.linspace(0.0, period, grid_size)
    vals = np.abs(x_of_tau(spec, taus))
    i = int(np.argmin(vals))
    step = taus[1] - taus[0]
    lo, hi = taus[i] - step, taus[i] + step
    res = minimize_scalar(
        lambda t: abs(x_of_tau(spec, float(t))) ** 2, bounds=(lo, hi), method="bounded",
        options={"xatol": 1e-14},
    )
    return float(min(math.sqrt(max(res.fun, 0.0)), vals[i]))


def unimodular_times_tau(data: FiniteGapData, ell: int) -> float:
    """Lax time t_ell = (2 ell + 1) pi (1 - r) / (2 rho) of the ell-th resonance.

    Only resonant data admit these times; physical time is half the value.
    """
    if classify(data) is not Classification.RESONANT:
        raise ValueError("datum is not resonant: no unimodular eigenvalue at any time")
    return (2 * ell + 1) * math.pi * (1.0 - data.r) / (2.0 * data.rho)


class _SigmaSystem:
    """Precomputed pieces of the 3x3 compression, reusable across a time grid."""

    def __init__(self, data: FiniteGapData):
        block = core_block_matrices(data)
        w, v = np.linalg.eig(block.L_block)
        self.eigenvalues = w
        self.v = v
        self.v_inv = np.linalg.inv(v)
        self.sstar = block.Sstar_block
        one_minus_r = 1.0 - data.r
        # adjoint shift of the squared Blaschke factor, expanded on the kernel pair
        self.coupling = np.array(
            [-2.0 * data.p * one_minus_r, one_minus_r**2], dtype=np.complex128
        )

    def matrices(self, t_phys) -> np.ndarray:
        """Stacked 3x3 matrices of the shifted propagator at the given times."""
        ts = np.atleast_1d(np.asarray(t_phys, dtype=np.float64))
        phases = np.exp(-2j * np.outer(ts, self.eigenvalues))
        exps = np.einsum("ij,tj,jk->tik", self.v, phases, self.v_inv)
        out = np.zeros((ts.size, 3, 3), dtype=np.complex128)
        scalar = np.exp(-1j * ts)[:, None, None]
        out[:, :2, :2] = scalar * (exps @ self.sstar)
        out[:, :2, 2] = scalar[:, :, 0] * (exps @ self.coupling)
        return out


def sigma_block(data: FiniteGapData, t_phys: float) -> np.ndarray:
    """3x3 matrix of the shifted propagator on the 3-d invariant space.

    Basis: the two kernels spanning the invariant pair, then the squared
    Blaschke factor.  The third row vanishes because the adjoint shift maps
    the enlarged space into the pair.
    """
    return _SigmaSystem(data).matrices(float(t_phys))[0]


def _spectral_radii(system: _SigmaSystem, ts) -> np.ndarray:
    return np.max(np.abs(np.linalg.eigvals(system.matrices(ts))), axis=-1)


def sigma_spectral_radius(data: FiniteGapData, t_phys) -> float | np.ndarray:
    """Spectral radius of the 3x3 compression at one or many physical times."""
    system = _SigmaSystem(data)
    radii = _spectral_radii(system, t_phys)
    return float(radii[0]) if np.isscalar(t_phys) else radii


def measure_spectral_radius_bound(data: FiniteGapData, t_grid) -> float:
    """Largest spectral radius over a time grid (the measured contraction bound)."""
    system = _SigmaSystem(data)
    return float(np.max(_spectral_radii(system, np.asarray(t_grid, dtype=np.float64))))


def measure_resonance_time(
    data: FiniteGapData,
    t_max: float,
    coarse: int = 4096,
    touch_tol: float = 1e-8,
) -> float | None:
    """Smallest physical time at which the spectral radius reaches one.

    The gap 1 - radius^2 vanishes quadratically at a touch, so after a coarse
    scan the minimum is polished by nested parabola fits; returns None when
    the radius stays away from one on [0, t_max].
    """
    system = _SigmaSystem(data)
    ts = np.linspace(0.0, t_max, coarse)
    gaps = 1.0 - _spectral_radii(system, ts) ** 2

    below = np.flatnonzero(gaps < 2e-4)
    if below.size == 0:
        return None
    i = int(below[0])
    while i + 1 < ts.size and gaps[i + 1] < gaps[i]:
        i += 1
    t0 = float(ts[i])

    step = float(ts[1] - ts[0])
    for h in (step, 1e-3, 3e-5, 1e-6):
        offsets = np.linspace(-3.0 * h, 3.0 * h, 7)
        vals = 1.0 - _spectral_radii(system, t0 + offsets) ** 2
        quad, lin, _ = np.polyfit(offsets, vals, 2)
        if quad <= 0.0:
            break
        shift = -lin / (2.0 * quad)
        t0 += float(np.clip(shift, -3.0 * h, 3.0 * h))

    final_gap = float(1.0 - _spectral_radii(system, t0)[0] ** 2)
    if final_gap > 2.0 * touch_tol:
        return None
    return t0


def stability_iterate_decay(
    u0: HardyCoeffs, lax: LaxMatrix, t_phys: float, n_max: int
) -> np.ndarray:
    """Norms of the iterates of the shifted propagator applied to the datum.

    Returns s_n = |(e^{-it} e^{-2itL} S^*)^n u0| for n = 0..n_max; the
    sequence is non-increasing because the map is a contraction.  Decay to
    zero certifies stability at this time; a positive limit measures trapped
    mass.
    """
    u_mat = propagator(lax, t_phys).matrix
    phase = np.exp(-1j * t_phys)
    v = u0.coeffs.copy()
    norms = np.empty(n_max + 1, dtype=np.float64)
    norms[0] = np.linalg.norm(v)
    for n in range(1, n_max + 1):
        v = phase * (u_mat @ np.append(v[1:], 0.0))
        norms[n] = np.linalg.norm(v)
    return norms
