"""Generic solution engine from the resolvent-mean formula.

For any smooth Hardy datum the solution value at (t, z) is the mean of
(Id - z Sigma_t)^{-1} applied to the datum, where Sigma_t is the unitarily
shifted adjoint shift built from the datum's own Lax propagator.  Works for
arbitrary data, independent of the rational closed form.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg
from scipy.linalg import lapack

from .hardy import HardyCoeffs
from .lax import LaxMatrix, build_lax_matrix, propagator

__all__ = ["CONDITION_LIMIT", "IllConditionedError", "ResolventState", "resolvent_state", "evaluate", "reconstruct_coeffs"]

CONDITION_LIMIT = 1e12


class IllConditionedError(RuntimeError):
    """Linear solve too close to singular; carries the condition estimate."""

    def __init__(self, condition: float):
        super().__init__(f"resolvent solve ill-conditioned (estimate {condition:.3e}); "
                         "the evaluation point sits at or past a singularity")
        self.condition = condition


@dataclass(frozen=True)
class ResolventState:
    """Frozen per-time data: the contraction matrix e^{-it} e^{-2itL} S^*."""

    u0: HardyCoeffs
    lax: LaxMatrix
    t: float
    sigma_matrix: np.ndarray


def resolvent_state(u0: HardyCoeffs, t: float, lax: LaxMatrix | None = None) -> ResolventState:
    """Build the contraction at time t, reusing a prebuilt Lax matrix if given."""
    if lax is None:
        lax = build_lax_matrix(u0)
    if lax.truncation != u0.truncation:
        raise ValueError(
            f"truncation mismatch: datum {u0.truncation}, operator {lax.truncation}"
        )
    u_mat = propagator(lax, t).matrix
    n = u0.coeffs.size
    sigma = np.zeros((n, n), dtype=np.complex128)
    sigma[:, 1:] = np.exp(-1j * t) * u_mat[:, :-1]  # unitary composed after the adjoint shift
    return ResolventState(u0=u0, lax=lax, t=float(t), sigma_matrix=sigma)


def evaluate(state: ResolventState, z: complex) -> complex:
    """Solution value at z: first entry of (Id - z Sigma)^{-1} applied to the datum.

    Points strictly inside the disk are always safe; on the boundary the
    solve is attempted and rejected with IllConditionedError past a condition
    estimate of 1e12, which flags proximity to a blow-up singularity.
    """
    if abs(z) > 1.0:
        raise ValueError(f"evaluation point lies outside the closed disk: |z| = {abs(z)}")
    a = np.eye(state.sigma_matrix.shape[0], dtype=np.complex128) - z * state.sigma_matrix
    anorm = np.linalg.norm(a, 1)
    lu, piv, info = lapack.zgetrf(a)
    if info != 0:
        raise IllConditionedError(float("inf"))
    rcond, _ = lapack.zgecon(lu, anorm)
    if rcond == 0.0 or 1.0 / rcond >= CONDITION_LIMIT:
        raise IllConditionedError(1.0 / rcond if rcond > 0.0 else float("inf"))
    w, _ = lapack.zgetrs(lu, piv, state.u0.coeffs)
    return complex(w[0])


def reconstruct_coeffs(state: ResolventState, m: int) -> HardyCoeffs:
    """Solution coefficients 0..m from the Neumann expansion of the resolvent.

    Coefficient n is the first entry of the n-th contraction iterate of the
    datum; no linear solves are involved and the dropped remainder is bounded
    by the norm of the next iterate.
    """
    if m > state.u0.truncation:
        raise ValueError(f"requested {m + 1} coefficients exceeds truncation {state.u0.truncation}")
    out = np.empty(m + 1, dtype=np.complex128)
    v = state.u0.coeffs
    out[0] = v[0]
    for n in range(1, m + 1):
        v = state.sigma_matrix @ v
        out[n] = v[0]
    return HardyCoeffs(out)
