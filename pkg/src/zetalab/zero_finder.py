"""Nontrivial zeros: contour counting, critical-line sign scans, 2-D refinement."""
from __future__ import annotations

import cmath
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable, List, Optional, Tuple

import numpy as np

from .errors import ContourTooClose, DomainError, NonConvergence, RoundingDefect, StepTooCoarse, ZeroCountMismatch
from .functional_eq import StripRect
from .special_core import (
    CONSTANTS,
    DEFAULT_CONFIG,
    EPS,
    EvalConfig,
    EvalResult,
    as_point,
    log_gamma,
    zeta,
    zeta_times_s_minus_one,
)

CONTOUR_MIN_MODULUS = 1e-12
ROUNDING_DEFECT_MAX = 0.25
COVER_SIGMA = (0.01, 0.99)


@dataclass(frozen=True)
class ZeroRecord:
    t: float
    sigma: float
    abs_zeta: float
    refine_iters: int


# ---------------------------------------------------------------------------
# completed zeta

def _envelope(s: complex) -> complex:
    """pi**(-s/2) Gamma(1 + s/2), i.e. (s/2) g(s); never zero."""
    return cmath.exp(-0.5 * s * CONSTANTS.ln_pi + log_gamma(1.0 + 0.5 * s).value)


def xi(s, cfg: EvalConfig = DEFAULT_CONFIG) -> EvalResult:
    """Entire completion (1/2) s (s-1) pi**(-s/2) Gamma(s/2) zeta(s).

    Written as pi**(-s/2) Gamma(1 + s/2) * (s - 1) zeta(s) so neither s = 0
    nor s = 1 needs special handling.
    """
    s = as_point(s)
    env = _envelope(s)
    z1 = zeta_times_s_minus_one(s, cfg)
    value = env * z1.value
    bound = abs(env) * (z1.abs_err_bound + 4e-14 * (1.0 + abs(s)) * abs(z1.value))
    return EvalResult(value, bound, z1.terms_used)


def _xi_and_modulus(s: complex) -> Tuple[complex, float]:
    """xi(s) and |zeta(s)|, the factor of xi that can vanish in the strip."""
    env = _envelope(s)
    z1 = zeta_times_s_minus_one(s).value
    return env * z1, abs(z1) / abs(s - 1.0)


# ---------------------------------------------------------------------------
# argument principle

def contour_winding(
    f: Callable[[complex], Tuple[complex, float]],
    rect: StripRect,
    base_step: float = 0.25,
    min_modulus: float = CONTOUR_MIN_MODULUS,
) -> Tuple[float, float]:
    """Total phase change of ``f`` around ``rect`` (counter-clockwise) over 2*pi.

    ``f(s)`` returns ``(value, modulus)`` where ``modulus`` is a scale-free
    measure of closeness to a zero. Segments are bisected until both halves
    turn by less than pi/2.
    Returns ``(winding, min_modulus_seen)``.
    """
    corners = [
        complex(rect.sigma_min, rect.t_min),
        complex(rect.sigma_max, rect.t_min),
        complex(rect.sigma_max, rect.t_max),
        complex(rect.sigma_min, rect.t_max),
    ]
    cache = {}
    min_seen = [math.inf]

    def ev(p: complex) -> complex:
        v = cache.get(p)
        if v is None:
            v, mod = f(p)
            if mod < min_seen[0]:
                min_seen[0] = mod
            if mod < min_modulus or v == 0:
                raise ContourTooClose(f"|f| = {mod:.3g} on the contour at s={p}")
            cache[p] = v
        return v

    def phase(p: complex, q: complex, depth: int = 0) -> float:
        fp, fq = ev(p), ev(q)
        m = 0.5 * (p + q)
        fm = ev(m)
        d1 = cmath.phase(fm / fp)
        d2 = cmath.phase(fq / fm)
        if abs(d1) < 0.5 * math.pi and abs(d2) < 0.5 * math.pi:
            return d1 + d2
        if depth > 40 or abs(q - p) < 1e-12:
            raise ContourTooClose(f"phase tracking failed near s={m}")
        return phase(p, m, depth + 1) + phase(m, q, depth + 1)

    total = 0.0
    for k in range(4):
        a, b = corners[k], corners[(k + 1) % 4]
        n = max(4, int(math.ceil(abs(b - a) / base_step)))
        pts = [a + (b - a) * (i / n) for i in range(n)] + [b]
        for p, q in zip(pts[:-1], pts[1:]):
            total += phase(p, q)
    return total / (2.0 * math.pi), min_seen[0]


def rounded_winding(w: float) -> int:
    k = int(round(w))
    if abs(w - k) >= ROUNDING_DEFECT_MAX:
        raise RoundingDefect(f"winding {w:.4f} is not within {ROUNDING_DEFECT_MAX} of an integer")
    return k


def count_zeros(rect: StripRect) -> int:
    """Number of zeros of xi inside ``rect`` by the argument principle."""
    w, _ = contour_winding(_xi_and_modulus, rect)
    return rounded_winding(w)


# ---------------------------------------------------------------------------
# critical line

def hardy_rotation(t: float) -> float:
    """theta(t) = Im log Gamma(1/4 + it/2) - (t/2) ln(pi)."""
    t = float(t)
    if t < 0.0:
        raise DomainError("hardy_rotation requires t >= 0")
    return log_gamma(complex(0.25, 0.5 * t)).value.imag - 0.5 * t * CONSTANTS.ln_pi


def hardy_z_complex(t: float, cfg: EvalConfig = DEFAULT_CONFIG) -> complex:
    """exp(i theta(t)) zeta(1/2 + it); real up to rounding."""
    return cmath.exp(1j * hardy_rotation(t)) * zeta(complex(0.5, t), cfg).value


def hardy_z(t: float, cfg: EvalConfig = DEFAULT_CONFIG) -> float:
    return hardy_z_complex(t, cfg).real


def scan_grid(t_min: float, t_max: float, step: float) -> np.ndarray:
    n = int(math.floor((t_max - t_min) / step + 1e-9))
    ts = t_min + step * np.arange(n + 1)
    if ts[-1] < t_max:
        ts = np.append(ts, t_max)
    return ts


def _eval_chunk(args):
    fn, ts = args
    return [fn(float(t)) for t in ts]


def evaluate_on_grid(fn: Callable[[float], float], ts: np.ndarray, workers: int = 1) -> np.ndarray:
    """fn over ts, optionally split into fixed contiguous chunks across processes."""
    if workers <= 1 or len(ts) < 64:
        return np.array([fn(float(t)) for t in ts])
    chunks = np.array_split(ts, workers * 4)
    with ProcessPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(_eval_chunk, [(fn, c) for c in chunks]))
    return np.array([v for part in parts for v in part])


def sign_change_brackets(ts: np.ndarray, vals: np.ndarray) -> List[Tuple[float, float]]:
    out = []
    for i in range(len(ts) - 1):
        if vals[i] == 0.0:
            out.append((float(ts[i]), float(ts[i])))
        elif vals[i] * vals[i + 1] < 0.0:
            out.append((float(ts[i]), float(ts[i + 1])))
    if len(vals) and vals[-1] == 0.0:
        out.append((float(ts[-1]), float(ts[-1])))
    return out


def bisect_sign_change(fn: Callable[[float], float], lo: float, hi: float,
                       value_tol: float = 1e-10, max_iter: int = 200) -> float:
    """Shrink a sign-change bracket until |fn(mid)| < value_tol (or it is exhausted)."""
    flo = fn(lo)
    if flo == 0.0:
        return lo
    mid = 0.5 * (lo + hi)
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        fm = fn(mid)
        if abs(fm) < value_tol or hi - lo < 4.0 * EPS * max(1.0, abs(mid)):
            return mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return mid


def refine_zero_2d(
    f: Callable[[complex], complex],
    t0: float,
    sigma0: float = 0.51,
    max_iter: int = 50,
    grad_tol: float = 1e-12,
    fd_step: float = 1e-7,
) -> Tuple[complex, int]:
    """Damped Newton on (sigma, t) for F = (Re f, Im f), finite-difference Jacobian.

    ``f`` is rescaled by its local slope at the start so that the gradient
    tolerance is scale-free. Returns the refined point and iteration count.
    """
    x = np.array([sigma0, t0], dtype=float)
    f0 = f(complex(x[0], x[1]))
    if f0 == 0:
        return complex(x[0], x[1]), 0
    # local slope as the scale, so |grad| ~ |F| ~ distance to the zero
    scale = max(abs(f(complex(x[0] + 0.01, x[1])) - f0) / 0.01, 1e-300)

    def F(v):
        w = f(complex(v[0], v[1])) / scale
        return np.array([w.real, w.imag])

    fx = F(x)
    for it in range(1, max_iter + 1):
        jac = np.empty((2, 2))
        for k in range(2):
            e = np.zeros(2)
            e[k] = fd_step
            jac[:, k] = (F(x + e) - F(x - e)) / (2.0 * fd_step)
        grad = jac.T @ fx
        if np.linalg.norm(grad) < grad_tol:
            return complex(x[0], x[1]), it - 1
        try:
            step = np.linalg.solve(jac, -fx)
        except np.linalg.LinAlgError as exc:
            raise NonConvergence("singular Jacobian in 2-D refinement") from exc
        lam = 1.0
        f2 = fx @ fx
        while lam > 1e-6:
            xn = x + lam * step
            fn = F(xn)
            if fn @ fn < f2 or fn @ fn == 0.0:
                break
            lam *= 0.5
        else:
            # no decrease possible: at the rounding floor
            return complex(x[0], x[1]), it
        x, fx = xn, fn
        if np.linalg.norm(lam * step) < 1e-15 * max(1.0, abs(x[1])):
            return complex(x[0], x[1]), it
    grad = np.linalg.norm(jac.T @ fx)
    if grad < 1e-8:
        return complex(x[0], x[1]), max_iter
    raise NonConvergence(f"2-D refinement did not converge from t={t0}")


def _xi_value(s: complex) -> complex:
    return xi(s).value


def _make_record(t_line: float) -> ZeroRecord:
    p, iters = refine_zero_2d(_xi_value, t_line)
    return ZeroRecord(t=p.imag, sigma=p.real, abs_zeta=abs(zeta(p).value), refine_iters=iters)


def cover_rect(t_min: float, t_max: float) -> StripRect:
    return StripRect(COVER_SIGMA[0], COVER_SIGMA[1], t_min, t_max)


def find_zeros(t_min: float, t_max: float, step: float = 0.05, workers: int = 1,
               check_count: bool = True) -> List[ZeroRecord]:
    """Zeros of zeta with t_min < t < t_max via sign changes of Hardy's Z.

    Each bracket is bisected until |Z| < 1e-10, then refined in two dimensions
    on xi from (0.51, t). The total is cross-checked against the contour count
    of the covering rectangle.
    """
    if not (0.0 <= t_min < t_max):
        raise DomainError("need 0 <= t_min < t_max")
    if not step > 0.0:
        raise DomainError("step must be positive")
    ts = scan_grid(t_min, t_max, step)
    vals = evaluate_on_grid(hardy_z, ts, workers)
    records = []
    for lo, hi in sign_change_brackets(ts, vals):
        t_line = lo if lo == hi else bisect_sign_change(hardy_z, lo, hi)
        records.append(_make_record(t_line))
    records.sort(key=lambda r: r.t)
    if check_count:
        expected = count_zeros(cover_rect(t_min, t_max))
        if expected > len(records):
            raise StepTooCoarse(
                f"contour count {expected} exceeds {len(records)} sign changes in [{t_min}, {t_max}]"
            )
        if expected < len(records):
            raise ZeroCountMismatch(f"contour count {expected} but {len(records)} sign changes")
    return records


def find_zeros_winding(t_min: float, t_max: float, max_height: float = 0.5,
                       count_fn: Optional[Callable[[StripRect], int]] = None,
                       refine_fn: Optional[Callable[[float], ZeroRecord]] = None) -> List[ZeroRecord]:
    """Locate zeros by recursive subdivision of the counting rectangle.

    Independent of the Z-sign scan: a sub-rectangle holding exactly one zero
    and at most ``max_height`` tall seeds the 2-D refinement at its centre.
    """
    count_fn = count_fn or count_zeros
    refine_fn = refine_fn or _make_record
    out: List[ZeroRecord] = []

    def split_point(a: float, b: float) -> float:
        return 0.5 * (a + b)

    def visit(a: float, b: float, n: int) -> None:
        if n == 0:
            return
        if n == 1 and b - a <= max_height:
            rec = refine_fn(0.5 * (a + b))
            if not a <= rec.t <= b:
                raise NonConvergence(f"refinement left its rectangle [{a}, {b}]")
            out.append(rec)
            return
        m = split_point(a, b)
        for nudge in (0.0, 1e-3, -1e-3, 7e-3, -7e-3):
            try:
                lower = count_fn(cover_rect(a, m + nudge * (b - a)))
                m = m + nudge * (b - a)
                break
            except ContourTooClose:
                continue
        else:
            raise ContourTooClose(f"could not place a split between {a} and {b}")
        visit(a, m, lower)
        visit(m, b, n - lower)

    visit(t_min, t_max, count_fn(cover_rect(t_min, t_max)))
    out.sort(key=lambda r: r.t)
    return out
