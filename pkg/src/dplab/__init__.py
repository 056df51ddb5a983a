"""dplab: a numerical laboratory for parabolic double-phase equations.

Solves d/dt u - div(|Du|^{p-2}Du + a(z)|Du|^{q-2}Du) = f(z, Du) on 1D
space-time cylinders and verifies, at desk scale, the constructive objects
around it: comparison pairs, Steklov/mollification/inf-convolution
transforms, doubling functionals, time-regularity barriers, and energy
estimates.
"""

from ._kernels import backend_name
from .coefficient import Coefficient, builtin, check_almost_increasing, spatial_lipschitz_estimate
from .flux import (
    PointState,
    bound_g,
    flux_A,
    flux_regularized,
    hamiltonian_H,
    multiphase_flux,
    operator_F,
    rhs_growth_bound,
)
from .grid import Grid, GridField
from .params import (
    ExponentParams,
    MultiPhaseParams,
    gamma_exponent,
    gamma_multiphase,
    lipschitz_profile_beta,
    time_exponent_target,
)
from .regularity import (
    BarrierSpec,
    ModulusReport,
    PhiProfile,
    barrier_make,
    barrier_residual,
    barrier_theta_search,
    doubling_psi,
    modulus_estimate,
    phi_d1,
    phi_d2,
    phi_eval,
    psi_max_scan,
    psi_threshold_search,
)
from .solver import BoundaryData, Problem, SolverError, TestFunction, make_sub_super_pair, residual_weak, solve, step_implicit
from .transforms import (
    InfConvParams,
    InfConvResult,
    counterexample_divergence,
    delta_eps,
    inf_convolution,
    mollify_modular_sweep,
    mollify_space,
    steklov_left,
    steklov_right,
    steklov_wh_convergence,
)
from .verify import CheckReport, HypothesisViolation, caccioppoli_check, class_S_check, comparison_check, lr_modular

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
