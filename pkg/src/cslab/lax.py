"""Truncated Lax operator, its unitary propagator, and the conserved quantities.

The operator acts on modes 0..N as D - T_u T_u^*, where D multiplies mode n
by n and T_u is the lower-triangular multiplication matrix of u.  The product
is symmetrized entrywise so the stored matrix is Hermitian bit-for-bit.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .hardy import HardyCoeffs

__all__ = ["LaxMatrix", "Propagator", "build_lax_matrix", "propagator", "conserved_quantity"]


@dataclass
class LaxMatrix:
    """Hermitian matrix of the Lax operator compressed to modes 0..N."""

    entries: np.ndarray
    _eig: tuple | None = field(default=None, repr=False, compare=False)

    @property
    def truncation(self) -> int:
        return self.entries.shape[0] - 1

    def eigensystem(self) -> tuple[np.ndarray, np.ndarray]:
        """Cached Hermitian eigendecomposition (eigenvalues, eigenvectors)."""
        if self._eig is None:
            w, v = np.linalg.eigh(self.entries)
            self._eig = (w, v)
        return self._eig


@dataclass(frozen=True)
class Propagator:
    """Unitary matrix exp(-2 i t L) at a fixed physical time t."""

    matrix: np.ndarray
    t: float


def build_lax_matrix(u: HardyCoeffs) -> LaxMatrix:
    """Assemble diag(0..N) - T_u T_u^dagger for the given potential."""
    a = u.coeffs
    n = a.size
    t_u = scipy.linalg.toeplitz(a, np.concatenate(([a[0]], np.zeros(n - 1))))
    prod = t_u @ t_u.conj().T
    prod = 0.5 * (prod + prod.conj().T)  # exact Hermiticity independent of BLAS order
    entries = -prod
    entries[np.diag_indices(n)] += np.arange(n, dtype=np.float64)
    return LaxMatrix(entries)


def propagator(lax: LaxMatrix, t: float) -> Propagator:
    """exp(-2 i t L) via the cached Hermitian eigendecomposition of L."""
    w, v = lax.eigensystem()
    if not np.all(np.isfinite(w)):
        raise ArithmeticError("eigendecomposition failed; matrix is not Hermitian")
    u = (v * np.exp(-2j * t * w)) @ v.conj().T
    return Propagator(u, float(t))


def conserved_quantity(u: HardyCoeffs, k: int, lax: LaxMatrix | None = None) -> float:
    """Real pairing <u, L^k u> of the potential with its own Lax powers.

    k = 0 is the squared L^2 mass, k = 1 the gauged momentum, k = 2 the
    energy.  Computed by repeated matrix-vector products split evenly around
    the pairing so the imaginary residual stays at rounding level.
    """
    if k < 0:
        raise ValueError(f"order must be >= 0, got {k}")
    if lax is None:
        lax = build_lax_matrix(u)
    left = u.coeffs
    for _ in range(k // 2):
        left = lax.entries @ left
    right = left if k % 2 == 0 else lax.entries @ left
    value = complex(np.sum(left * np.conj(right)))
    if abs(value.imag) > 1e-10:
        raise ArithmeticError(f"conserved quantity has imaginary residual {value.imag:.3e}")
    return value.real
