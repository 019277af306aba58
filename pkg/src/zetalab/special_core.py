"""Zeta, eta, gamma and the pi-gamma completion factor in binary64.

Two independent routes to zeta are provided:

* ``zeta`` divides the alternating (eta) series by ``1 - 2**(1-s)``; the
  alternating tail is accelerated by a binomial-weighted average of partial
  sums (the Euler transform written in its stable averaging form).
* ``zeta_em`` uses Euler-Maclaurin summation of the Dirichlet series and is
  the cross-check oracle, as well as the fallback near the zeros of the eta
  denominator and left of the strip.

Every evaluator returns an :class:`EvalResult` whose ``abs_err_bound`` is the
truncation bound plus a rounding allowance.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, NamedTuple, Tuple

import numpy as np

from .errors import DomainError, NonConvergence, PoleError

EPS = 2.0 ** -52
PRECISION_FLOOR = 2.0 ** -48


@dataclass(frozen=True)
class MathConstants:
    euler_gamma: float = 0.57721566490153286061
    ln_2: float = math.log(2.0)
    ln_pi: float = math.log(math.pi)


CONSTANTS = MathConstants()
_LN2 = CONSTANTS.ln_2
_LNPI = CONSTANTS.ln_pi
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)


@dataclass(frozen=True)
class EvalConfig:
    """Accuracy/budget knobs for the series evaluators.

    ``target_abs_err`` applies to the truncation part of the error; the
    rounding allowance is added on top and reported in ``abs_err_bound``.
    """

    target_abs_err: float = 1e-13
    max_terms: int = 20000
    accel_order: int = 32

    def __post_init__(self):
        if not self.target_abs_err >= PRECISION_FLOOR:
            raise DomainError(f"target_abs_err must be >= 2**-48, got {self.target_abs_err!r}")
        if self.accel_order < 2:
            raise DomainError("accel_order must be at least 2")
        if self.max_terms < self.accel_order:
            raise DomainError("max_terms must be >= accel_order")


@dataclass(frozen=True)
class EvalResult:
    value: complex
    abs_err_bound: float
    terms_used: int


DEFAULT_CONFIG = EvalConfig()


def as_point(s) -> complex:
    """Coerce ``s`` to a finite complex number."""
    try:
        z = complex(s)
    except (TypeError, ValueError) as exc:
        raise DomainError(f"not a complex number: {s!r}") from exc
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise DomainError(f"non-finite argument {s!r}")
    return z


def _is_nonpositive_integer(z: complex) -> bool:
    return z.imag == 0.0 and z.real <= 0.0 and z.real == math.floor(z.real)


# ---------------------------------------------------------------------------
# Alternating-series acceleration

N_DIRECT_START = 16


@lru_cache(maxsize=None)
def _binomial_weights(depth: int) -> np.ndarray:
    """Rows d, d-1, d-2 of the normalised binomial weights, padded to d+1."""
    rows = np.zeros((3, depth + 1))
    for r, d in enumerate((depth, depth - 1, depth - 2)):
        for i in range(d + 1):
            rows[r, i] = math.comb(d, i) / 2.0 ** d
    return rows


def accelerate_alternating(
    make_terms: Callable[[int], Tuple[np.ndarray, np.ndarray]],
    cfg: EvalConfig,
) -> Tuple[complex, float, int]:
    """Sum an alternating series by binomial averaging of partial sums.

    ``make_terms(count)`` returns the signed terms ``a_1..a_count`` and a
    per-term rounding-error estimate. Partial sums S_N..S_{N+d} are combined
    with weights C(d, i)/2**d; the error estimate is 8x the larger of the last
    two level-to-level corrections. N starts at 16 and doubles until the
    estimate meets ``cfg.target_abs_err``.
    """
    depth = cfg.accel_order
    weights = _binomial_weights(depth)
    n_direct = N_DIRECT_START
    best = None
    while n_direct + depth <= cfg.max_terms:
        count = n_direct + depth
        terms, rounding = make_terms(count)
        partial = np.cumsum(terms)[n_direct - 1:]
        v_d, v_d1, v_d2 = weights @ partial
        trunc = 8.0 * max(abs(v_d - v_d1), abs(v_d1 - v_d2))
        round_err = 4.0 * EPS * float(np.sum(rounding))
        best = (complex(v_d), float(trunc + round_err), count)
        if trunc <= cfg.target_abs_err:
            return best
        n_direct *= 2
    raise NonConvergence(
        f"alternating series did not reach {cfg.target_abs_err:g} within {cfg.max_terms} terms"
        + ("" if best is None else f" (last estimate {best[1]:.3g})")
    )


def _alternating_powers(s: complex, with_log: bool = False):
    """Term factory for sum (-1)**(n-1) n**-s, optionally times ln n."""
    sabs = abs(s)

    def make(count: int):
        n = np.arange(1, count + 1, dtype=float)
        logn = np.log(n)
        if s.imag == 0.0:
            vals = np.exp(-s.real * logn)
        else:
            vals = np.exp(-s * logn)
        mag = np.exp(-s.real * logn)
        rel = 2.0 + sabs * logn
        if with_log:
            vals = vals * logn
            mag = mag * logn
        vals[1::2] *= -1.0
        return vals, mag * rel

    return make


def eta(s, cfg: EvalConfig = DEFAULT_CONFIG) -> EvalResult:
    """Alternating zeta sum_{n>=1} (-1)**(n-1) n**-s for Re s > 0."""
    s = as_point(s)
    if s.real <= 0.0:
        raise DomainError(f"eta series requires Re(s) > 0, got {s}")
    value, bound, used = accelerate_alternating(_alternating_powers(s), cfg)
    return EvalResult(value, bound, used)


def _two_pow_one_minus(s: complex) -> complex:
    return cmath.exp((1.0 - s) * _LN2)


def zeta(s, cfg: EvalConfig = DEFAULT_CONFIG) -> EvalResult:
    """Riemann zeta for Re s > 0 via eta(s) / (1 - 2**(1-s)).

    Delegates to :func:`zeta_em` where the denominator drops below 0.1.
    """
    s = as_point(s)
    if s == 1:
        raise PoleError("pole at s=1")
    if s.real <= 0.0:
        raise DomainError(f"zeta via eta requires Re(s) > 0, got {s}")
    denom = 1.0 - _two_pow_one_minus(s)
    if abs(denom) < 0.1:
        return zeta_em(s, cfg)
    r = eta(s, cfg)
    value = r.value / denom
    bound = r.abs_err_bound / abs(denom) + 4.0 * EPS * abs(value) * (2.0 + abs(s))
    return EvalResult(value, bound, r.terms_used)


# ---------------------------------------------------------------------------
# Euler-Maclaurin

EM_MAX_ORDER = 60
EM_MIN_SIGMA = -20.0


@lru_cache(maxsize=None)
def bernoulli_ratios(count: int = EM_MAX_ORDER + 1) -> Tuple[float, ...]:
    """B_{2k} / (2k)! for k = 1..count, computed exactly then rounded."""
    m_max = 2 * count
    b = [Fraction(1)]
    for m in range(1, m_max + 1):
        acc = sum((math.comb(m + 1, j) * b[j] for j in range(m)), Fraction(0))
        b.append(-acc / (m + 1))
    return tuple(float(b[2 * k] / math.factorial(2 * k)) for k in range(1, count + 1))


class EMParts(NamedTuple):
    regular: complex
    x_pow: complex  # (N + a)**(1 - s)
    log_x: float  # ln(N + a)
    bound: float  # covers ``regular`` only
    terms: int


def hurwitz_em_parts(s: complex, a: float, cfg: EvalConfig) -> EMParts:
    """Euler-Maclaurin pieces of the Hurwitz zeta function.

    zeta(s, a) = regular + x_pow / (s - 1); the singular piece is returned
    separately so callers can cancel or rescale it.
    """
    sigma = s.real
    if sigma <= EM_MIN_SIGMA:
        raise DomainError(f"Euler-Maclaurin route supports Re(s) > {EM_MIN_SIGMA:g}, got {s}")
    ratios = bernoulli_ratios()
    sabs = abs(s)
    n_direct = max(10, int(math.ceil(0.5 * sabs)), int(math.ceil(-sigma)) + 2)
    while n_direct <= cfg.max_terms:
        n = np.arange(n_direct, dtype=float) + a
        logn = np.log(n)
        if s.imag == 0.0:
            direct = complex(np.sum(np.exp(-sigma * logn)))
        else:
            direct = complex(np.sum(np.exp(-s * logn)))
        mags = np.exp(-sigma * logn)
        round_err = 4.0 * EPS * float(np.sum(mags * (2.0 + sabs * logn)))

        x = n_direct + a
        logx = math.log(x)
        x_neg_s = cmath.exp(-s * logx)
        regular = direct + 0.5 * x_neg_s
        rising = s
        power = x_neg_s / x
        inv_x2 = 1.0 / (x * x)
        tail_sum = 0j
        prev_mag = math.inf
        for k in range(1, EM_MAX_ORDER):
            term = ratios[k - 1] * rising * power
            tail_sum += term
            next_rising = rising * (s + 2 * k - 1) * (s + 2 * k)
            next_term = ratios[k] * next_rising * power * inv_x2
            denom = sigma + 2 * k + 1
            if denom > 0:
                rem = abs(next_term) * abs(s + 2 * k + 1) / denom
                if rem <= cfg.target_abs_err:
                    bound = rem + round_err + 4.0 * EPS * abs(tail_sum)
                    return EMParts(regular + tail_sum, x_neg_s * x, logx, float(bound), n_direct + k)
            mag = abs(next_term)
            if mag > prev_mag and denom > 0:
                break
            prev_mag = mag
            rising = next_rising
            power = power * inv_x2
        n_direct *= 2
    raise NonConvergence(f"Euler-Maclaurin did not converge within {cfg.max_terms} terms at s={s}")


def zeta_em(s, cfg: EvalConfig = DEFAULT_CONFIG) -> EvalResult:
    """Riemann zeta by Euler-Maclaurin summation, valid for Re s > -20."""
    s = as_point(s)
    if s == 1:
        raise PoleError("pole at s=1")
    regular, x_pow, _, bound, used = hurwitz_em_parts(s, 1.0, cfg)
    sing = x_pow / (s - 1.0)
    value = regular + sing
    bound += 4.0 * EPS * abs(sing) * (2.0 + abs(s))
    return EvalResult(value, bound, used)


def zeta_times_s_minus_one(s, cfg: EvalConfig = DEFAULT_CONFIG) -> EvalResult:
    """(s - 1) * zeta(s), finite at s = 1 where it equals 1."""
    s = as_point(s)
    if abs(s - 1.0) >= 0.1:
        if s.real > 0.0:
            r = zeta(s, cfg)
        else:
            r = zeta_em(s, cfg)
        f = s - 1.0
        return EvalResult(r.value * f, r.abs_err_bound * abs(f), r.terms_used)
    regular, x_pow, _, bound, used = hurwitz_em_parts(s, 1.0, cfg)
    value = (s - 1.0) * regular + x_pow
    return EvalResult(value, bound * abs(s - 1.0) + 4.0 * EPS * abs(x_pow), used)


# ---------------------------------------------------------------------------
# Gamma

# Lanczos approximation, g = 7, nine coefficients.
_LANCZOS_G = 7.0
_LANCZOS_P = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)


def _lanczos_log_gamma(z: complex) -> complex:
    # requires Re z >= 0.5
    z = z - 1.0
    acc = _LANCZOS_P[0]
    for k in range(1, len(_LANCZOS_P)):
        acc += _LANCZOS_P[k] / (z + k)
    t = z + _LANCZOS_G + 0.5
    return _HALF_LOG_2PI + (z + 0.5) * cmath.log(t) - t + cmath.log(acc)


def _gamma_rel_err(z: complex) -> float:
    # Lanczos truncation ~1e-15, plus phase rounding growing like |z| log|z|.
    r = abs(z)
    return 2e-14 + 8.0 * EPS * (1.0 + r) * math.log(2.0 + r)


def _log_gamma_value(z: complex) -> complex:
    if z.real >= 0.5:
        return _lanczos_log_gamma(z)
    # shift right; the recurrence preserves the principal branch off (-inf, 0]
    m = int(math.ceil(0.5 - z.real))
    acc = 0j
    for k in range(m):
        acc += cmath.log(z + k)
    return _lanczos_log_gamma(z + m) - acc


def log_gamma(s) -> EvalResult:
    """Principal branch of log Gamma(s)."""
    z = as_point(s)
    if _is_nonpositive_integer(z):
        raise PoleError(f"Gamma has a pole at s={z.real:g}")
    value = _log_gamma_value(z)
    shift = 0 if z.real >= 0.5 else int(math.ceil(0.5 - z.real))
    bound = _gamma_rel_err(z) + 4.0 * EPS * (abs(value) + shift)
    return EvalResult(value, bound, len(_LANCZOS_P) + shift)


def _small_positive_integer(z: complex) -> bool:
    return z.imag == 0.0 and 1.0 <= z.real <= 171.0 and z.real == math.floor(z.real)


def _gamma_value(z: complex) -> complex:
    if _small_positive_integer(z):
        return complex(math.factorial(int(z.real) - 1))
    if z.real >= 0.5 or abs(z.imag) > 100.0:
        return cmath.exp(_log_gamma_value(z))
    return math.pi / (cmath.sin(math.pi * z) * cmath.exp(_lanczos_log_gamma(1.0 - z)))


def gamma(s) -> EvalResult:
    """Gamma(s); reflection formula left of Re s = 1/2."""
    z = as_point(s)
    if _is_nonpositive_integer(z):
        raise PoleError(f"Gamma has a pole at s={z.real:g}")
    value = _gamma_value(z)
    if _small_positive_integer(z):
        return EvalResult(value, EPS * abs(value), 0)
    rel = _gamma_rel_err(z)
    if z.real < 0.5:
        # sin(pi z) near its zeros loses relative accuracy
        near = abs(z.real - round(z.real)) + abs(z.imag)
        rel += 4.0 * EPS * (1.0 + abs(z)) / max(near, EPS)
    return EvalResult(value, rel * abs(value), len(_LANCZOS_P))


def rgamma(s) -> complex:
    """1/Gamma(s), entire; exactly zero at the nonpositive integers."""
    z = as_point(s)
    if _is_nonpositive_integer(z):
        return 0j
    if z.real >= 0.5 or abs(z.imag) > 100.0:
        return cmath.exp(-_log_gamma_value(z))
    return cmath.sin(math.pi * z) * cmath.exp(_lanczos_log_gamma(1.0 - z)) / math.pi


# ---------------------------------------------------------------------------
# Completion factor g(s) = pi**(-s/2) Gamma(s/2) and real-axis derivatives

def g_factor(s) -> EvalResult:
    """pi**(-s/2) * Gamma(s/2)."""
    s = as_point(s)
    half = 0.5 * s
    if _is_nonpositive_integer(half):
        raise PoleError(f"g has a pole at s={s.real:g}")
    lg = _log_gamma_value(half)
    value = cmath.exp(-half * _LNPI + lg)
    rel = _gamma_rel_err(half) + 4.0 * EPS * (abs(half) * _LNPI + abs(lg))
    if half.real < 0.5:
        rel += 4.0 * EPS * math.ceil(0.5 - half.real)
    return EvalResult(value, rel * abs(value), len(_LANCZOS_P))


def pi_pow(sigma: float) -> float:
    """pi**(-sigma/2)."""
    return math.exp(-0.5 * sigma * _LNPI)


def pi_pow_deriv_sigma(sigma: float) -> float:
    """d/dsigma of pi**(-sigma/2) = -(1/2) ln(pi) pi**(-sigma/2)."""
    return -0.5 * _LNPI * pi_pow(sigma)


DIGAMMA_DIRECT_TERMS = 200


def digamma_bracket(x: float) -> Tuple[float, float]:
    """Return (1/x + gamma + sum_{n>=1} (1/(n+x) - 1/n), tail bound).

    The sum is taken directly to n = 200 and the remainder is replaced by its
    Euler-Maclaurin expansion through the third derivative.
    """
    n_dir = DIGAMMA_DIRECT_TERMS
    n = np.arange(1, n_dir + 1, dtype=float)
    head = float(np.sum(x / (n * (n + x))))
    u, ux = float(n_dir), n_dir + x
    f0 = 1.0 / ux - 1.0 / u
    f1 = -1.0 / ux ** 2 + 1.0 / u ** 2
    f3 = -6.0 / ux ** 4 + 6.0 / u ** 4
    f5 = -120.0 / ux ** 6 + 120.0 / u ** 6
    # sum_{n>N} f(n) = int_N^inf f - f(N)/2 - f'(N)/12 + f'''(N)/720 - ...
    tail = -math.log1p(x / u) - 0.5 * f0 - f1 / 12.0 + f3 / 720.0
    tail_bound = abs(f5) / 30240.0 + 8.0 * EPS * abs(tail)
    bracket = 1.0 / x + CONSTANTS.euler_gamma - head + tail
    err = tail_bound + 4.0 * EPS * (1.0 / x + head + 1.0) * math.sqrt(n_dir)
    return bracket, err


def gamma_deriv_sigma(sigma: float) -> float:
    """d Gamma(sigma/2) / d sigma from the digamma series, 0 < sigma <= 2."""
    sigma = float(sigma)
    if not (0.0 < sigma <= 2.0):
        raise DomainError(f"gamma_deriv_sigma requires 0 < sigma <= 2, got {sigma}")
    x = 0.5 * sigma
    bracket, _ = digamma_bracket(x)
    return -0.5 * _gamma_value(complex(x)).real * bracket


def g_deriv_sigma(sigma: float) -> float:
    """d g(sigma) / d sigma by the product rule, 0 < sigma < 1."""
    sigma = float(sigma)
    if not (0.0 < sigma < 1.0):
        raise DomainError(f"g_deriv_sigma requires 0 < sigma < 1, got {sigma}")
    g = g_factor(sigma).value.real
    return -0.5 * _LNPI * g + pi_pow(sigma) * gamma_deriv_sigma(sigma)


def zeta_deriv_sigma(sigma: float, cfg: EvalConfig = DEFAULT_CONFIG) -> float:
    """zeta'(sigma) on (0, 1) from the differentiated eta quotient.

    zeta' = -2**(1-sigma) ln2 / (1 - 2**(1-sigma))**2 * eta(sigma)
            - 1 / (1 - 2**(1-sigma)) * sum (-1)**(n-1) ln(n) n**-sigma
    """
    sigma = float(sigma)
    if not (0.0 < sigma < 1.0):
        raise DomainError(f"zeta_deriv_sigma requires 0 < sigma < 1, got {sigma}")
    s = complex(sigma)
    eta_val, _, _ = accelerate_alternating(_alternating_powers(s), cfg)
    eta_log, _, _ = accelerate_alternating(_alternating_powers(s, with_log=True), cfg)
    p = math.exp((1.0 - sigma) * _LN2)
    d = 1.0 - p
    return -p * _LN2 / (d * d) * eta_val.real - eta_log.real / d
