"""bdecay: decay parameter and mean extinction time of birth-death chains.

Tri-diagonal birth-death chains (generators or stochastic matrices) carry a
characteristic-coefficient structure that yields the second-largest
eigenvalue -- the decay parameter -- through Lagrange series, analytic
bounds, and index-selected Sturm bisection at arbitrary precision.  The
package specializes the machinery to SIS epidemics on the complete graph,
where the decay parameter governs extinction and the mean extinction time
has several independent closed forms.
"""

from .chain import (
    GENERATOR,
    STOCHASTIC,
    RateLadder,
    SteadyState,
    SymTridiag,
    build_eps_sis_ladder,
    restrict_transient,
    steady_state,
    symmetrize,
)
from .charpoly import (
    CharCoeffs,
    CoeffTable,
    NewtonSums,
    c1_explicit,
    c2_explicit,
    char_coeffs,
    coefficient_table,
    diag_band_coeffs,
    newton_sums,
    rho_eval,
)
from .decay import (
    DecayReport,
    PrecisionCtx,
    decay_report,
    exact_zeta,
    lagrange_zeta,
    newton_bound,
    required_precision,
)
from .errors import (
    BdecayError,
    DegenerateCoefficientsError,
    DivergentIntegralError,
    DomainError,
    InconsistentCoefficientsError,
    InsufficientCoefficientsError,
    InvalidParameterError,
    IrreducibleChainError,
    PrecisionExhaustedError,
    QuadratureFailureError,
    ReducibleChainError,
    UnsupportedStructureError,
)
from .oracle import (
    AbsorptionSample,
    GillespieResult,
    TransientFit,
    dense_spectrum,
    gillespie_simulate,
    hitting_time_solve,
    survival_log_slope,
    transient_decay_fit,
)
from .sis import (
    EpsSisParams,
    LifetimeReport,
    RegimeEstimate,
    TaylorCoeffs,
    char_coeff0,
    char_coeff1,
    char_coeff2_limit,
    decay_regime,
    exp_integral,
    lifetime_asymptotic,
    lifetime_direct,
    lifetime_double_sum,
    lifetime_expint,
    lifetime_taylor,
    mean_absorption_time,
    taylor_coeffs,
    weighted_expint_integral,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
