"""Comparison geometry toolkit: warping functions, Riccati comparison, mean curvature
estimates, stochastic completeness checks, rotational CMC profiles and Laplacian
inequality verification."""

from .errors import DomainError, FocalRadiusError, IntegrationError, PreconditionError
from .profiles import CurvatureProfile
from .reports import ComparisonReport, PredicateReport
from .warping import (BarrierFunction, ClosedFormWarping, Truncation, WarpingFunction,
                      build_barrier, inf_log_derivative, log_derivative, solve_jacobi,
                      sturm_compare, wedge_barrier)
from .riccati import (CurvatureOperatorPath, RiccatiState, integrate_riccati,
                      verify_hessian_comparison)
from .estimates import EstimateReport, Scenario, compute_bound
from .stochastic import (CriterionVerdict, ExplosionStats, check_criterion,
                         simulate_radial_diffusion)
from .cmc import CmcParams, ProfileCurve, build_cmc_sphere, integrate_profile
from .inequality import (AmbientChart, ImmersionPatch, VerificationReport,
                         discrete_laplace_beltrami, verify_reverse_inequality,
                         verify_tube_inequality)
from .svg import emit_svg

__version__ = "0.1.0"

__all__ = [
    "AmbientChart", "BarrierFunction", "ClosedFormWarping", "CmcParams", "ComparisonReport",
    "CriterionVerdict", "CurvatureOperatorPath", "CurvatureProfile", "DomainError",
    "EstimateReport", "ExplosionStats", "FocalRadiusError", "ImmersionPatch",
    "IntegrationError", "PreconditionError", "PredicateReport", "ProfileCurve",
    "RiccatiState", "Scenario", "Truncation", "VerificationReport", "WarpingFunction",
    "build_barrier", "build_cmc_sphere", "check_criterion", "compute_bound",
    "discrete_laplace_beltrami", "emit_svg", "inf_log_derivative", "integrate_profile",
    "integrate_riccati", "log_derivative", "simulate_radial_diffusion", "solve_jacobi",
    "sturm_compare", "verify_hessian_comparison", "verify_reverse_inequality",
    "verify_tube_inequality", "wedge_barrier",
]
