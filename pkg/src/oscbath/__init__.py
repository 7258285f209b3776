"""Exact quantum dynamics of a harmonic oscillator linearly coupled to a harmonic bath."""

from .correlators import CorrelatorRequest, Endpoint, n_point_fd, one_point, two_point
from .equilibrium import (
    ThermalReport,
    equilibrium_moments,
    equilibrium_rho,
    eta,
    gibbs_state,
    partition_function,
    thermal_report,
)
from .errors import (
    CausticError,
    ConfigError,
    ModelError,
    NumericalError,
    OscBathError,
    UnstableModel,
)
from .gaussian import GaussianForm, GaussianState, evolve_state, gaussian_integral, thermal_bath_state
from .matfun import MatFun, blocks_at, f_inverse, finv_fdot, imaginary_time_blocks, matfun_at
from .model import (
    Model,
    Spectrum,
    build_B,
    char_g,
    green,
    noise_coefficients,
    noise_correlation,
    spectrum,
    susceptibility,
    susceptibility_laplace,
    validate_model,
)
from .propagator import (
    ForceProfile,
    drive_displacements,
    evaluate_K,
    evaluate_K_forced,
    forced_form,
    propagator_form,
    zeta,
)
from .reduced import (
    ReducedGaussian,
    ReducedKernel,
    evolve_reduced_gaussian,
    evolve_rho_via_kernel,
    kernel_J_coeffs,
    reduce_to_main,
    rho_red_grid,
)

__version__ = "0.1.0"
