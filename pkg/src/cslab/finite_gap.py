"""Rational initial-data family and its invariant two-dimensional block.

A datum is determined by a phase, an integer mode shift m, a pole parameter p
inside the punctured disk, and two complex amplitudes (a, c) tied by one real
constraint.  For every valid datum the compressed Lax operator leaves a
two-dimensional space invariant; the exact 2x2 matrices on that space drive
all spectral analysis downstream.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .hardy import HardyCoeffs

__all__ = [
    "CONSTRAINT_TOL",
    "ConstraintError",
    "FiniteGapData",
    "CoreBlock",
    "make_finite_gap",
    "make_resonant",
    "synthesize_coeffs",
    "core_block_matrices",
]

CONSTRAINT_TOL = 1e-12


class ConstraintError(ValueError):
    """Amplitude pair violates the defining constraint of the family."""


@dataclass(frozen=True)
class FiniteGapData:
    """Validated parameter tuple; r = |p|^2 and rho = |p| are cached."""

    theta: float
    m: int
    p: complex
    a: complex
    c: complex
    r: float
    rho: float

    @property
    def effective_a(self) -> complex:
        """Amplitude with the overall phase absorbed."""
        return cmath.exp(1j * self.theta) * self.a

    @property
    def effective_c(self) -> complex:
        return cmath.exp(1j * self.theta) * self.c


def constraint_residual(p: complex, a: complex, c: complex) -> float:
    r = abs(p) ** 2
    return abs(a * c.conjugate() + abs(c) ** 2 / (1.0 - r) - 2.0)


def make_finite_gap(theta: float, m: int, p: complex, a: complex, c: complex) -> FiniteGapData:
    """Validate and cache a datum of the rational family.

    Raises ValueError when p leaves the punctured open disk or m < 0, and
    ConstraintError when the amplitude constraint residual exceeds 1e-12.
    """
    p = complex(p)
    rho = abs(p)
    if not 0.0 < rho < 1.0:
        raise ValueError(f"pole parameter must satisfy 0 < |p| < 1, got |p| = {rho}")
    if m < 0 or int(m) != m:
        raise ValueError(f"mode shift must be a nonnegative integer, got {m}")
    residual = constraint_residual(p, complex(a), complex(c))
    if residual > CONSTRAINT_TOL:
        raise ConstraintError(f"amplitude constraint residual {residual:.3e} exceeds {CONSTRAINT_TOL}")
    return FiniteGapData(
        theta=float(theta), m=int(m), p=p, a=complex(a), c=complex(c), r=rho * rho, rho=rho
    )


def make_resonant(theta: float, m: int, p: complex) -> FiniteGapData:
    """Datum on the resonant branch 2a + c = 0, with the phase absorbed into a."""
    p = complex(p)
    rho = abs(p)
    if not 0.0 < rho < 1.0:
        raise ValueError(f"pole parameter must satisfy 0 < |p| < 1, got |p| = {rho}")
    r = rho * rho
    a = cmath.exp(1j * theta) * math.sqrt((1.0 - r) / (1.0 + r))
    return make_finite_gap(0.0, m, p, a, -2.0 * a)


def synthesize_coeffs(data: FiniteGapData, n: int) -> HardyCoeffs:
    """Taylor coefficients of the datum on modes 0..n.

    The two geometric kernels at p expand as p̄^k and k p̄^(k-1); the datum is
    a finite combination of them, shifted up by m.
    """
    ea, ec = data.effective_a, data.effective_c
    pb = data.p.conjugate()
    r = data.r
    core = np.zeros(n + 1, dtype=np.complex128)
    core[0] = -data.p * (ea + ec)
    k = np.arange(1, n + 1, dtype=np.float64)
    core[1:] = pb ** (k - 1) * (ea * (1.0 - r) + ec * (k * (1.0 - r) - r))
    out = np.zeros(n + 1, dtype=np.complex128)
    out[data.m:] = core[: n + 1 - data.m]
    return HardyCoeffs(out)


@dataclass(frozen=True)
class CoreBlock:
    """2x2 matrices of the Lax operator and the adjoint shift on the invariant pair."""

    L_block: np.ndarray
    Sstar_block: np.ndarray
    alpha: complex
    beta: float
    kappa: float


def core_block_matrices(data: FiniteGapData) -> CoreBlock:
    """Exact block matrices in the (geometric kernel, derivative kernel) basis.

    The block depends only on (p, a, c); the overall phase drops out.  beta
    and kappa are real for every valid datum because a/c is real under the
    constraint.
    """
    p, a, c, r = data.p, data.a, data.c, data.r
    pb = p.conjugate()
    denom = c * (1.0 - r)
    alpha = 2.0 * p * (a + c) / denom
    beta = (2.0 * r * (a + c) - 2.0 * a - c * (1.0 - r)) / denom
    kappa = alpha * pb
    scale = max(1.0, abs(beta), abs(kappa))
    if abs(beta.imag) > 1e-12 * scale or abs(kappa.imag) > 1e-12 * scale:
        raise ArithmeticError(
            f"block coefficients are not real: Im(beta)={beta.imag:.3e}, Im(kappa)={kappa.imag:.3e}"
        )
    l_block = np.array([[0.0, alpha], [pb, beta.real]], dtype=np.complex128)
    sstar_block = np.array([[pb, 1.0], [0.0, pb]], dtype=np.complex128)
    return CoreBlock(
        L_block=l_block,
        Sstar_block=sstar_block,
        alpha=complex(alpha),
        beta=float(beta.real),
        kappa=float(kappa.real),
    )
