"""Riemann zeta, Dirichlet L-functions and the reflection-equation toolkit."""
from .errors import (
    BracketError,
    ContourTooClose,
    DomainError,
    NonConvergence,
    NotPrimitive,
    PoleError,
    RoundingDefect,
    StepTooCoarse,
    ZeroCountMismatch,
    ZetaLabError,
)
from .special_core import EvalConfig, EvalResult, eta, g_factor, gamma, log_gamma, zeta, zeta_em
from .functional_eq import StripRect, abs_gap, factor_gap, fe_residual, locus_scan
from .zero_finder import ZeroRecord, count_zeros, find_zeros, find_zeros_winding, hardy_z, xi
from .sigma_solver import certify_monotone, solve_eq5, solve_eq9
from .dirichlet_l import character, characters, completed_l, find_l_zeros, l_function

__version__ = "0.1.0"
