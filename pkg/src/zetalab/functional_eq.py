"""Reflection-equation residuals, modulus gap fields and strip scans."""
from __future__ import annotations

import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterator, List, Tuple

import numpy as np

from .errors import DomainError, PoleError, ZetaLabError
from .special_core import (
    DEFAULT_CONFIG,
    EvalConfig,
    EvalResult,
    as_point,
    g_factor,
    rgamma,
    zeta,
    zeta_em,
)

FIELDS = ("abs_gap", "factor_gap")


@dataclass(frozen=True)
class StripRect:
    """Axis-aligned rectangle [sigma_min, sigma_max] x [t_min, t_max].

    Closed sigma edges 0 and 1 are admitted so that callers can probe the
    boundary; evaluation at the poles themselves fails per cell.
    """

    sigma_min: float
    sigma_max: float
    t_min: float
    t_max: float

    def __post_init__(self):
        vals = (self.sigma_min, self.sigma_max, self.t_min, self.t_max)
        if not all(math.isfinite(v) for v in vals):
            raise DomainError("rectangle bounds must be finite")
        if not (0.0 <= self.sigma_min < self.sigma_max <= 1.0):
            raise DomainError(
                f"need 0 <= sigma_min < sigma_max <= 1, got ({self.sigma_min}, {self.sigma_max})"
            )
        if not self.t_min < self.t_max:
            raise DomainError(f"need t_min < t_max, got ({self.t_min}, {self.t_max})")


@dataclass
class GridScan:
    rect: StripRect
    n_sigma: int
    n_t: int
    values: np.ndarray  # shape (n_t, n_sigma); row = t index
    failed_cells: int = 0
    errors: np.ndarray = field(default=None, repr=False)
    sigmas: np.ndarray = field(default=None, repr=False)
    ts: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        if self.values.shape != (self.n_t, self.n_sigma):
            raise ValueError("values must have shape (n_t, n_sigma)")
        if self.errors is None:
            self.errors = np.zeros_like(self.values)
        if self.sigmas is None:
            self.sigmas = np.linspace(self.rect.sigma_min, self.rect.sigma_max, self.n_sigma)
        if self.ts is None:
            self.ts = np.linspace(self.rect.t_min, self.rect.t_max, self.n_t)

    def sign_changes(self) -> List[List[Tuple[float, float]]]:
        """Per row, every sigma-interval across which the field changes sign."""
        return [row_sign_changes(self.sigmas, row, err) for row, err in zip(self.values, self.errors)]


def zeta_anywhere(s: complex, cfg: EvalConfig = DEFAULT_CONFIG) -> EvalResult:
    """zeta through the eta route when Re s > 0, Euler-Maclaurin otherwise."""
    if s.real > 0.0:
        return zeta(s, cfg)
    return zeta_em(s, cfg)


def _check_fe_point(s: complex) -> None:
    for z in (s, 1.0 - s):
        if z == 1:
            raise PoleError("pole at s=1")
        half = 0.5 * z
        if half.imag == 0.0 and half.real <= 0.0 and half.real == math.floor(half.real):
            raise PoleError(f"Gamma pole in the completion factor at s={s}")


def fe_sides(s, cfg: EvalConfig = DEFAULT_CONFIG) -> Tuple[complex, complex]:
    """Both sides of pi**(-s/2) Gamma(s/2) zeta(s) = (same at 1 - s)."""
    s = as_point(s)
    _check_fe_point(s)
    left = g_factor(s).value * zeta_anywhere(s, cfg).value
    right = g_factor(1.0 - s).value * zeta_anywhere(1.0 - s, cfg).value
    return left, right


def relative_residual(left: complex, right: complex) -> float:
    return abs(left - right) / max(abs(left), abs(right), 1e-300)


def fe_residual(s, cfg: EvalConfig = DEFAULT_CONFIG) -> float:
    """Relative mismatch of the two sides of the reflection equation."""
    return relative_residual(*fe_sides(s, cfg))


def zeta_reflected(s, cfg: EvalConfig = DEFAULT_CONFIG) -> complex:
    """zeta(s) obtained from zeta(1 - s) through the reflection equation.

    Uses 1/Gamma so the trivial zeros at s = -2, -4, ... come out exactly.
    """
    s = as_point(s)
    w = 1.0 - s
    if w == 1:
        raise PoleError("pole of zeta(1-s) at s=0")
    rhs = g_factor(w).value * zeta_anywhere(w, cfg).value
    # 1/g(s) = pi**(s/2) / Gamma(s/2)
    inv_g = math.pi ** (0.5 * s) * rgamma(0.5 * s)
    return rhs * inv_g


def abs_gap_with_bound(s, cfg: EvalConfig = DEFAULT_CONFIG) -> Tuple[float, float]:
    s = as_point(s)
    if s == 0 or s == 1:
        raise PoleError(f"zeta(s) or zeta(1-s) has a pole at s={s}")
    if not 0.0 < s.real < 1.0:
        raise DomainError(f"abs_gap is defined on the open strip, got Re(s)={s.real}")
    a = zeta(s, cfg)
    b = zeta(1.0 - s, cfg)
    return abs(a.value) - abs(b.value), a.abs_err_bound + b.abs_err_bound


def abs_gap(s, cfg: EvalConfig = DEFAULT_CONFIG) -> float:
    """|zeta(s)| - |zeta(1 - s)|, sign retained."""
    return abs_gap_with_bound(s, cfg)[0]


def factor_gap_with_bound(s) -> Tuple[float, float]:
    s = as_point(s)
    a = g_factor(s)
    b = g_factor(1.0 - s)
    return abs(a.value) - abs(b.value), a.abs_err_bound + b.abs_err_bound


def factor_gap(s) -> float:
    """|pi**(-s/2) Gamma(s/2)| - |pi**(-(1-s)/2) Gamma((1-s)/2)|."""
    return factor_gap_with_bound(s)[0]


def _field_fn(name: str):
    if name == "abs_gap":
        return abs_gap_with_bound
    if name == "factor_gap":
        return factor_gap_with_bound
    raise DomainError(f"unknown field {name!r}; choose one of {FIELDS}")


def row_sign_changes(sigmas, row, err=None) -> List[Tuple[float, float]]:
    """Sign-change brackets along one row.

    Cells that failed (NaN) or whose magnitude does not exceed their error
    bound carry no sign and are skipped, so a bracket can span them.
    """
    out = []
    prev_i = None
    for i, v in enumerate(row):
        if not np.isfinite(v) or abs(v) <= (0.0 if err is None else err[i]):
            continue
        if prev_i is not None and (row[prev_i] > 0) != (v > 0):
            out.append((float(sigmas[prev_i]), float(sigmas[i])))
        prev_i = i
    return out


def _scan_row(args) -> Tuple[np.ndarray, np.ndarray, int]:
    field_name, t, sigmas = args
    fn = _field_fn(field_name)
    row = np.empty(len(sigmas))
    err = np.zeros(len(sigmas))
    failed = 0
    for j, sg in enumerate(sigmas):
        try:
            row[j], err[j] = fn(complex(sg, t))
        except ZetaLabError:
            row[j] = np.nan
            failed += 1
    return row, err, failed


def _grid(rect: StripRect, n_sigma: int, n_t: int):
    if n_sigma < 2 or n_t < 2:
        raise DomainError("grid dimensions must be >= 2")
    return (
        np.linspace(rect.sigma_min, rect.sigma_max, n_sigma),
        np.linspace(rect.t_min, rect.t_max, n_t),
    )


def iter_scan_rows(
    rect: StripRect, n_sigma: int, n_t: int, field_name: str = "abs_gap", workers: int = 1
) -> Iterator[Tuple[float, np.ndarray, int]]:
    """Yield ``(t, values, error_bounds, failed_cells)`` one t-row at a time, in t order."""
    _field_fn(field_name)
    sigmas, ts = _grid(rect, n_sigma, n_t)
    jobs = ((field_name, float(t), sigmas) for t in ts)
    if workers <= 1:
        for t, res in zip(ts, map(_scan_row, jobs)):
            yield (float(t),) + res
        return
    with ProcessPoolExecutor(max_workers=workers) as pool:
        # map preserves order, so the result is independent of worker count
        for t, res in zip(ts, pool.map(_scan_row, jobs, chunksize=8)):
            yield (float(t),) + res


def locus_scan(
    rect: StripRect, n_sigma: int, n_t: int, field_name: str = "abs_gap", workers: int = 1
) -> GridScan:
    """Evaluate a gap field on a grid over ``rect``; failed cells become NaN."""
    sigmas, ts = _grid(rect, n_sigma, n_t)
    values = np.empty((n_t, n_sigma))
    errors = np.empty((n_t, n_sigma))
    failed = 0
    for i, (_, row, err, nfail) in enumerate(iter_scan_rows(rect, n_sigma, n_t, field_name, workers)):
        values[i] = row
        errors[i] = err
        failed += nfail
    if failed:
        warnings.warn(f"{failed} grid cells failed to evaluate and were set to NaN", RuntimeWarning)
    return GridScan(rect, n_sigma, n_t, values, failed, errors, sigmas, ts)
