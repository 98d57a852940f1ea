"""Numerical laboratory for a harmonic oscillator coupled to a finite harmonic bath.

The package provides exact normal-mode propagators, the bath fluctuation
integrals, fluctuation-dissipation inequality checks, Gaussian moment
evolution and the coefficients of the equivalent time-local master equation.
"""
from .errors import *  # noqa: F401,F403
from .fluctuation import (
    ENERGY_FUNCTIONS,
    THERMAL,
    EnergyFunction,
    FluctuationSample,
    ModeIntegrals,
    dissipation_from_bath,
    energy_function,
    fd15_lhs,
    fd16_closed_form,
    fd16_x_derivative_check,
    fd17_residual,
    fe_vector,
    fluctuation_rates,
    fluctuation_sample,
    im_sum_identity,
    mode_integrals,
    ref2_comparison_residual,
    xy_quantities,
)
from .master import (
    LadderCoefficients,
    MasterModel,
    WState,
    appendix2_bracket,
    appendix2_construct,
    constant_master_model,
    ladder_coefficients,
    lindblad39_residual,
    master_moments,
    reversible_moments,
    solve_w,
    ullersma_master_model,
    uncertainty43_residual,
    w_from_ullersma,
)
from .model import (
    DrudeBathRecipe,
    OscillatorBathModel,
    discretize_drude,
    model_from_dict,
    model_hash,
    model_to_dict,
    validate_model,
)
from .moments import (
    GaussianMomentState,
    appendix1_check,
    delta_quantities,
    evolve_moments,
    preset_state,
    reference_moments,
    rs_residual,
)
from .propagator import (
    PropagatorSample,
    SpectralDecomposition,
    decompose,
    min_dissipation_scan,
    ode_oracle,
    propagator_at,
    sum_rule_residual,
)

__version__ = "0.1.0"
