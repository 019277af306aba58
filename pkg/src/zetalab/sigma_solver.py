"""Bisection for zeta(s) = zeta(1-s) and g(s) = g(1-s) on the real segment (0, 1).

Both equations reduce to finding the sign change of an antisymmetric
difference h(x) = f(x) - f(1-x); only monotonicity and a bracketing sign
change are assumed, so the solver is plain bisection.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, List

from .errors import BracketError, DomainError, NonConvergence
from .special_core import (
    DEFAULT_CONFIG,
    gamma,
    gamma_deriv_sigma,
    g_deriv_sigma,
    g_factor,
    pi_pow,
    pi_pow_deriv_sigma,
    zeta,
    zeta_deriv_sigma,
)

SIGMA_CLAMP = 1e-6
MAX_BISECTIONS = 200
FD_STEP = 1e-6
TARGETS = ("zeta", "g", "pi_pow", "gamma_half")


@dataclass(frozen=True)
class SigmaSolveReport:
    equation: str
    root: float
    residual: float
    bracket_lo: float
    bracket_hi: float
    iterations: int


@dataclass(frozen=True)
class DerivativeCheck:
    sigma: float
    analytic: float
    finite_diff: float
    rel_err: float


@dataclass
class MonotoneCertificate:
    target: str
    checks: List[DerivativeCheck] = field(default_factory=list)

    @property
    def all_negative(self) -> bool:
        return all(c.analytic < 0.0 for c in self.checks)

    @property
    def max_rel_err(self) -> float:
        return max((c.rel_err for c in self.checks), default=0.0)


def zeta_real(x: float) -> float:
    return zeta(complex(x), DEFAULT_CONFIG).value.real


def g_real(x: float) -> float:
    return g_factor(complex(x)).value.real


def eq5_difference(x: float) -> float:
    """h(x) = zeta(x) - zeta(1 - x)."""
    return zeta_real(x) - zeta_real(1.0 - x)


def eq9_difference(x: float) -> float:
    """k(x) = g(x) - g(1 - x)."""
    return g_real(x) - g_real(1.0 - x)


def _clamp(x: float) -> float:
    return min(max(x, SIGMA_CLAMP), 1.0 - SIGMA_CLAMP)


def bisect_monotone(fn: Callable[[float], float], equation: str, lo: float, hi: float,
                    tol: float) -> SigmaSolveReport:
    if not (0.0 <= lo < hi <= 1.0):
        raise DomainError(f"need 0 <= lo < hi <= 1, got ({lo}, {hi})")
    if not tol > 0.0:
        raise DomainError("tol must be positive")
    lo, hi = _clamp(lo), _clamp(hi)
    f_lo, f_hi = fn(lo), fn(hi)
    if not f_lo * f_hi < 0.0:
        raise BracketError(
            f"no sign change on [{lo}, {hi}]: f(lo)={f_lo:.6g}, f(hi)={f_hi:.6g}"
        )
    a, b = lo, hi
    for it in range(1, MAX_BISECTIONS + 1):
        mid = 0.5 * (a + b)
        f_mid = fn(mid)
        if f_mid == 0.0:
            return SigmaSolveReport(equation, mid, 0.0, lo, hi, it)
        if (f_mid > 0.0) == (f_lo > 0.0):
            a, f_lo = mid, f_mid
        else:
            b = mid
        if b - a < tol:
            root = 0.5 * (a + b)
            return SigmaSolveReport(equation, root, fn(root), lo, hi, it)
    raise NonConvergence(f"bisection did not reach width {tol:g} in {MAX_BISECTIONS} steps")


def solve_eq5(lo: float = 0.1, hi: float = 0.9, tol: float = 1e-12) -> SigmaSolveReport:
    """Root of zeta(x) - zeta(1 - x) on [lo, hi]."""
    return bisect_monotone(eq5_difference, "eq5", lo, hi, tol)


def solve_eq9(lo: float = 0.1, hi: float = 0.9, tol: float = 1e-12) -> SigmaSolveReport:
    """Root of g(x) - g(1 - x) on [lo, hi]."""
    return bisect_monotone(eq9_difference, "eq9", lo, hi, tol)


def _gamma_half(x: float) -> float:
    return gamma(complex(0.5 * x)).value.real


_ANALYTIC = {
    "zeta": (zeta_deriv_sigma, zeta_real),
    "g": (g_deriv_sigma, g_real),
    "pi_pow": (pi_pow_deriv_sigma, pi_pow),
    "gamma_half": (gamma_deriv_sigma, _gamma_half),
}


def derivative_check(target: str, sigma: float, step: float = FD_STEP) -> DerivativeCheck:
    """Analytic derivative against a central finite difference at one point."""
    try:
        deriv, fn = _ANALYTIC[target]
    except KeyError:
        raise DomainError(f"unknown target {target!r}; choose one of {TARGETS}") from None
    analytic = deriv(sigma)
    fd = (fn(sigma + step) - fn(sigma - step)) / (2.0 * step)
    rel = abs(analytic - fd) / max(abs(analytic), 1e-30)
    return DerivativeCheck(sigma, analytic, fd, rel)


def interior_grid(n: int) -> List[float]:
    return [i / (n + 1) for i in range(1, n + 1)]


def certify_monotone(target: str, n_samples: int = 100) -> MonotoneCertificate:
    """Derivative sign and accuracy on a uniform interior grid of (0, 1)."""
    if n_samples < 2:
        raise DomainError("n_samples must be >= 2")
    if target not in _ANALYTIC:
        raise DomainError(f"unknown target {target!r}; choose one of {TARGETS}")
    cert = MonotoneCertificate(target)
    for x in interior_grid(n_samples):
        cert.checks.append(derivative_check(target, x))
    return cert
