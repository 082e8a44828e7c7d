"""Numerical laboratory for a derivative NLS on the torus Hardy space.

Three independent solution engines (exact rational dynamics, the resolvent
formula, a direct time-stepper) plus the spectral analysis that separates
finite-time blow-up from global existence on a rational family of data.
"""

from .closed_form import (
    LimitProfile,
    PoleState,
    blowup_time,
    closed_form_value,
    galilean_shift,
    galilean_shift_coeffs,
    hs_norm_closed,
    hs_rate_constant,
    limit_profile,
    pole_asymptotics,
    pole_rate_constant,
    pole_state,
    solution_coeffs,
)
from .finite_gap import (
    ConstraintError,
    CoreBlock,
    FiniteGapData,
    core_block_matrices,
    make_finite_gap,
    make_resonant,
    synthesize_coeffs,
)
from .hardy import (
    HardyCoeffs,
    LaurentCoeffs,
    conjugate,
    embed,
    eval_disk,
    hs_norm,
    inner_product,
    project_szego,
    shift,
    toeplitz_matrix,
)
from .lax import LaxMatrix, Propagator, build_lax_matrix, conserved_quantity, propagator
from .resolvent import (
    IllConditionedError,
    ResolventState,
    evaluate,
    reconstruct_coeffs,
    resolvent_state,
)
from .resonance import (
    Classification,
    SpectralData,
    block_eigen,
    classify,
    measure_resonance_time,
    measure_spectral_radius_bound,
    min_abs_x,
    sigma_block,
    sigma_spectral_radius,
    stability_iterate_decay,
    unimodular_times_tau,
    x_of_tau,
)
from .timestepper import BlowupSuspectedError, Trajectory, evolve, nonlinearity, step

__version__ = "0.1.0"

from .verification import (  # noqa: E402  (needs __version__)
    CheckRecord,
    VerificationReport,
    run_all,
    sample_datum,
)
