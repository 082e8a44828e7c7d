"""Truncated Hardy-space arithmetic on the unit circle.

A function on the torus with no negative Fourier modes is represented by its
first N+1 Taylor coefficients; a general torus function by modes -N..N.  Every
value is immutable after construction and every operation is pure, so objects
can be shared between concurrent workers without coordination.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

__all__ = [
    "HardyCoeffs",
    "LaurentCoeffs",
    "project_szego",
    "embed",
    "conjugate",
    "inner_product",
    "hs_norm",
    "shift",
    "toeplitz_matrix",
    "eval_disk",
]


def _as_coeff_array(values) -> np.ndarray:
    arr = np.array(values, dtype=np.complex128)
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError(f"coefficients must form a non-empty 1-d array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("coefficients contain NaN or Inf")
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class HardyCoeffs:
    """Fourier coefficients of a Hardy function, modes n = 0..N."""

    coeffs: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _as_coeff_array(self.coeffs))

    @property
    def truncation(self) -> int:
        return self.coeffs.size - 1


@dataclass(frozen=True)
class LaurentCoeffs:
    """Fourier coefficients of a general torus function, modes n = -N..N."""

    coeffs: np.ndarray

    def __post_init__(self):
        arr = _as_coeff_array(self.coeffs)
        if arr.size % 2 == 0:
            raise ValueError("Laurent coefficient array must have odd length 2N+1")
        object.__setattr__(self, "coeffs", arr)

    @property
    def truncation(self) -> int:
        return (self.coeffs.size - 1) // 2

    def mode(self, n: int) -> complex:
        if abs(n) > self.truncation:
            raise IndexError(f"mode {n} outside truncation {self.truncation}")
        return complex(self.coeffs[n + self.truncation])


def project_szego(f: LaurentCoeffs) -> HardyCoeffs:
    """Orthogonal projection onto the Hardy space: discard negative modes."""
    return HardyCoeffs(f.coeffs[f.truncation:])


def embed(f: HardyCoeffs) -> LaurentCoeffs:
    """Embed a Hardy function into the full Laurent representation."""
    n = f.truncation
    out = np.zeros(2 * n + 1, dtype=np.complex128)
    out[n:] = f.coeffs
    return LaurentCoeffs(out)


def conjugate(f: LaurentCoeffs) -> LaurentCoeffs:
    """Coefficients of the complex conjugate: mode n maps to conj(mode -n)."""
    return LaurentCoeffs(np.conj(f.coeffs[::-1]))


def inner_product(f: HardyCoeffs, g: HardyCoeffs) -> complex:
    """Parseval pairing sum_n f[n] * conj(g[n]).

    Both arguments must share the same truncation.  Computed in split real
    arithmetic so that the pairing of f with itself is exactly real and
    exactly the Parseval sum of |f[n]|^2.
    """
    if f.truncation != g.truncation:
        raise ValueError(
            f"truncation mismatch: {f.truncation} vs {g.truncation}"
        )
    fr, fi = f.coeffs.real, f.coeffs.imag
    gr, gi = g.coeffs.real, g.coeffs.imag
    return complex(np.sum(fr * gr + fi * gi), np.sum(fi * gr - fr * gi))


def hs_norm(f: HardyCoeffs, s: float) -> float:
    """Sobolev norm sqrt(sum_n (1+n^2)^s |f[n]|^2); s = 0 is the L^2 norm."""
    if s < 0:
        raise ValueError(f"Sobolev index must be >= 0, got {s}")
    n = np.arange(f.coeffs.size, dtype=np.float64)
    weights = (1.0 + n * n) ** s
    return float(np.sqrt(np.sum(weights * np.abs(f.coeffs) ** 2)))


def shift(f: HardyCoeffs, direction: Literal["forward", "adjoint"]) -> HardyCoeffs:
    """Forward shift (multiply by z, top mode dropped) or its adjoint.

    The adjoint shift maps f to (f - f(0))/z, i.e. coefficients move down one
    slot and the top slot becomes zero.
    """
    out = np.zeros_like(f.coeffs)
    if direction == "adjoint":
        out[:-1] = f.coeffs[1:]
    elif direction == "forward":
        out[1:] = f.coeffs[:-1]
    else:
        raise ValueError(f"direction must be 'forward' or 'adjoint', got {direction!r}")
    return HardyCoeffs(out)


def toeplitz_matrix(symbol: LaurentCoeffs, n: int) -> np.ndarray:
    """Dense (n+1)x(n+1) matrix of the compressed multiplication operator.

    Entry (j, k) is the symbol's mode j-k, so the matrix is constant along
    diagonals.  The symbol truncation must be at least n.
    """
    if symbol.truncation < n:
        raise ValueError(
            f"symbol truncation {symbol.truncation} smaller than requested size {n}"
        )
    j = np.arange(n + 1)
    idx = j[:, None] - j[None, :] + symbol.truncation
    return symbol.coeffs[idx]


def eval_disk(f: HardyCoeffs, z: complex) -> complex:
    """Evaluate sum_n f[n] z^n for |z| <= 1 by Horner recursion."""
    if abs(z) > 1.0:
        raise ValueError(f"evaluation point lies outside the closed disk: |z| = {abs(z)}")
    return complex(np.polynomial.polynomial.polyval(z, f.coeffs))
