"""Dirichlet characters, Hurwitz zeta and Dirichlet L-functions.

Characters are stored as integer exponent tables: chi(a) = exp(2 pi i E(a) / e)
with e the exponent of (Z/qZ)*. Products, conjugates and orthogonality sums
are done on exponents; complex values are produced only on demand.
"""
from __future__ import annotations

import cmath
import itertools
import math
from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, List, Optional, Tuple

import numpy as np

from .errors import DomainError, NotPrimitive, PoleError, StepTooCoarse, ZeroCountMismatch
from .functional_eq import StripRect, relative_residual
from .special_core import (
    DEFAULT_CONFIG,
    EPS,
    EvalConfig,
    EvalResult,
    as_point,
    hurwitz_em_parts,
    log_gamma,
)
from .zero_finder import (
    COVER_SIGMA,
    bisect_sign_change,
    contour_winding,
    evaluate_on_grid,
    refine_zero_2d,
    rounded_winding,
    scan_grid,
    sign_change_brackets,
)

MAX_MODULUS = 100
MAX_SCAN_MODULUS = 10


# ---------------------------------------------------------------------------
# group structure

def _factorize(n: int) -> List[Tuple[int, int]]:
    out = []
    p = 2
    while p * p <= n:
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out.append((p, e))
        p += 1
    if n > 1:
        out.append((n, 1))
    return out


def euler_phi(n: int) -> int:
    result = n
    for p, _ in _factorize(n):
        result -= result // p
    return result


def _primitive_root(pe: int, p: int) -> int:
    phi = pe - pe // p
    prime_factors = [f for f, _ in _factorize(phi)]
    for g in range(2, pe):
        if math.gcd(g, pe) == 1 and all(pow(g, phi // f, pe) != 1 for f in prime_factors):
            return g
    raise ArithmeticError(f"no primitive root mod {pe}")


def _crt_lift(residue: int, mod: int, q: int) -> int:
    """Unit congruent to ``residue`` mod ``mod`` and to 1 mod q/mod."""
    other = q // mod
    if other == 1:
        return residue % q
    # x = residue (mod mod), x = 1 (mod other)
    inv = pow(mod, -1, other)
    x = residue + mod * (((1 - residue) * inv) % other)
    return x % q


@lru_cache(maxsize=None)
def unit_group(q: int):
    """Generators, their orders and the discrete-log table of (Z/qZ)*.

    Returns ``(gens, orders, logs)`` where ``logs[a]`` is the exponent vector
    of the unit ``a`` with respect to ``gens``.
    """
    gens: List[int] = []
    orders: List[int] = []
    for p, e in _factorize(q):
        pe = p ** e
        if p == 2:
            if e >= 2:
                gens.append(_crt_lift(pe - 1, pe, q))
                orders.append(2)
            if e >= 3:
                gens.append(_crt_lift(5, pe, q))
                orders.append(2 ** (e - 2))
        else:
            gens.append(_crt_lift(_primitive_root(pe, p), pe, q))
            orders.append(pe - pe // p)
    logs: Dict[int, Tuple[int, ...]] = {}
    for exps in itertools.product(*(range(m) for m in orders)):
        a = 1
        for g, k in zip(gens, exps):
            a = a * pow(g, k, q) % q
        logs[a % q if q > 1 else 0] = exps
    if q == 1:
        logs = {0: ()}
    return tuple(gens), tuple(orders), logs


@dataclass(frozen=True)
class DirichletCharacter:
    """A character mod q as exponents: chi(a) = exp(2 pi i exps[a] / order_base).

    ``exps[a]`` is None when gcd(a, q) > 1.
    """

    modulus: int
    index: int
    gen_exponents: Tuple[int, ...]
    order_base: int
    exps: Tuple[Optional[int], ...]

    @property
    def parity(self) -> str:
        e = self.exps[(self.modulus - 1) % self.modulus]
        return "even" if e == 0 else "odd"

    @property
    def kappa(self) -> int:
        return 0 if self.parity == "even" else 1

    @property
    def is_principal(self) -> bool:
        return all(e in (None, 0) for e in self.exps)

    @property
    def conductor(self) -> int:
        q = self.modulus
        for d in sorted(d for d in range(1, q + 1) if q % d == 0):
            if all(self.exps[a] == 0 for a in range(q)
                   if self.exps[a] is not None and (a - 1) % d == 0):
                return d
        return q

    @property
    def primitive(self) -> bool:
        return self.conductor == self.modulus

    def value(self, a: int) -> complex:
        e = self.exps[a % self.modulus]
        if e is None:
            return 0j
        return _root_of_unity(e, self.order_base)

    @property
    def values(self) -> Tuple[complex, ...]:
        return tuple(self.value(a) for a in range(self.modulus))

    def conjugate(self) -> "DirichletCharacter":
        n = self.order_base
        exps = tuple(None if e is None else (-e) % n for e in self.exps)
        gexp = tuple((-k) for k in self.gen_exponents)
        return DirichletCharacter(self.modulus, -1, gexp, n, exps)


def _root_of_unity(k: int, n: int) -> complex:
    k %= n
    # exact values at the quarter turns
    if 4 * k % n == 0:
        return (1 + 0j, 1j, -1 + 0j, -1j)[4 * k // n]
    return cmath.exp(2j * math.pi * k / n)


def characters(q: int) -> List[DirichletCharacter]:
    """All phi(q) characters mod q; index 0 is the principal character."""
    if not isinstance(q, (int, np.integer)) or not 1 <= q <= MAX_MODULUS:
        raise DomainError(f"modulus must be an integer in [1, {MAX_MODULUS}], got {q!r}")
    q = int(q)
    gens, orders, logs = unit_group(q)
    base = math.lcm(*orders) if orders else 1
    out = []
    for idx, js in enumerate(itertools.product(*(range(m) for m in orders))):
        exps: List[Optional[int]] = [None] * q
        for a, ks in logs.items():
            exps[a] = sum(j * k * (base // m) for j, k, m in zip(js, ks, orders)) % base
        out.append(DirichletCharacter(q, idx, tuple(js), base, tuple(exps)))
    return out


def character(q: int, index: int) -> DirichletCharacter:
    chars = characters(q)
    if not 0 <= index < len(chars):
        raise DomainError(f"character index must be in [0, {len(chars) - 1}] for q={q}")
    return chars[index]


def orthogonality_exact(chi: DirichletCharacter, psi: DirichletCharacter) -> int:
    """sum_a chi(a) conj(psi(a)) computed on exponents.

    The exponent difference d(a) is a homomorphism into Z/e; the sum is phi(q)
    when d is trivial and zero when d takes every value of a nontrivial
    subgroup equally often, which is checked here rather than assumed.
    """
    if chi.modulus != psi.modulus:
        raise DomainError("characters must share a modulus")
    n = chi.order_base
    diffs = [(a - b) % n for a, b in zip(chi.exps, psi.exps) if a is not None]
    counts = Counter(diffs)
    if set(counts) == {0}:
        return len(diffs)
    m = len(counts)
    step = n // m
    if n % m or set(counts) != {k * step for k in range(m)} or len(set(counts.values())) != 1:
        raise ArithmeticError("exponent differences do not form a uniform subgroup")
    return 0


def gauss_sum(chi: DirichletCharacter) -> complex:
    q = chi.modulus
    return sum(chi.value(a) * cmath.exp(2j * math.pi * a / q) for a in range(1, q + 1))


def root_number(chi: DirichletCharacter) -> complex:
    """epsilon(chi) = tau(chi) / (i**kappa sqrt(q)); unimodular for primitive chi."""
    return gauss_sum(chi) / ((1j ** chi.kappa) * math.sqrt(chi.modulus))


# ---------------------------------------------------------------------------
# Hurwitz zeta and L(s, chi)

def hurwitz_zeta(s, a: float, cfg: EvalConfig = DEFAULT_CONFIG) -> EvalResult:
    """zeta(s, a) = sum_{n>=0} (n + a)**-s by Euler-Maclaurin, 0 < a <= 1."""
    s = as_point(s)
    a = float(a)
    if not 0.0 < a <= 1.0:
        raise DomainError(f"Hurwitz parameter must lie in (0, 1], got {a}")
    if s == 1:
        raise PoleError("pole at s=1")
    regular, x_pow, _, bound, used = hurwitz_em_parts(s, a, cfg)
    sing = x_pow / (s - 1.0)
    return EvalResult(regular + sing, bound + 4.0 * EPS * abs(sing) * (2.0 + abs(s)), used)


def _expm1_over(w: complex, log_x: float) -> complex:
    """(x**-w - 1) / w with x = exp(log_x); finite at w = 0."""
    z = -w * log_x
    if abs(z) < 1e-4:
        return -log_x * (1.0 + z / 2.0 + z * z / 6.0 + z ** 3 / 24.0)
    return (cmath.exp(z) - 1.0) / w


def l_function(s, chi: DirichletCharacter, cfg: EvalConfig = DEFAULT_CONFIG) -> EvalResult:
    """L(s, chi) = q**-s sum_a chi(a) zeta(s, a/q).

    For nonprincipal chi the 1/(s-1) pieces cancel and are combined before
    division, so s = 1 is evaluated as a limit.
    """
    s = as_point(s)
    q = chi.modulus
    if chi.is_principal and s == 1:
        raise PoleError("pole at s=1 for the principal character")
    w = s - 1.0
    regular_sum = 0j
    sing_sum = 0j
    bound = 0.0
    used = 0
    for a in range(1, q + 1):
        c = chi.value(a)
        if c == 0:
            continue
        parts = hurwitz_em_parts(s, a / q, cfg)
        regular_sum += c * parts.regular
        if chi.is_principal:
            sing_sum += c * parts.x_pow / w
        else:
            # x**(1-s) = x**-w and sum chi(a) = 0, so each piece may drop its constant
            sing_sum += c * _expm1_over(w, parts.log_x)
        bound += parts.bound
        used += parts.terms
    scale = cmath.exp(-s * math.log(q))
    value = scale * (regular_sum + sing_sum)
    bound = abs(scale) * (bound + 8.0 * EPS * (abs(regular_sum) + abs(sing_sum)) * (2.0 + abs(s)))
    return EvalResult(value, bound, used)


# ---------------------------------------------------------------------------
# completed L-function and its reflection equation

@dataclass(frozen=True)
class LZeroRecord:
    t: float
    sigma: float
    abs_L: float
    refine_iters: int
    modulus: int
    index: int


def _log_completion(s: complex, chi: DirichletCharacter) -> complex:
    """log of (q/pi)**((s+kappa)/2) Gamma((s+kappa)/2)."""
    w = 0.5 * (s + chi.kappa)
    return w * math.log(chi.modulus / math.pi) + log_gamma(w).value


def completed_l(s, chi: DirichletCharacter, cfg: EvalConfig = DEFAULT_CONFIG) -> complex:
    """Lambda(s, chi) = (q/pi)**((s+kappa)/2) Gamma((s+kappa)/2) L(s, chi)."""
    s = as_point(s)
    return cmath.exp(_log_completion(s, chi)) * l_function(s, chi, cfg).value


def _require_primitive(chi: DirichletCharacter) -> None:
    if not chi.primitive:
        raise NotPrimitive(
            f"character {chi.index} mod {chi.modulus} has conductor {chi.conductor}; "
            "the reflection equation needs a primitive character"
        )


def l_fe_sides(s, chi: DirichletCharacter, cfg: EvalConfig = DEFAULT_CONFIG) -> Tuple[complex, complex]:
    """Lambda(s, chi) and epsilon(chi) Lambda(1 - s, conj chi)."""
    _require_primitive(chi)
    s = as_point(s)
    for z in (s, 1.0 - s):
        w = 0.5 * (z + chi.kappa)
        if w.imag == 0.0 and w.real <= 0.0 and w.real == math.floor(w.real):
            raise PoleError(f"Gamma pole in the completion at s={s}")
        if chi.is_principal and z == 1:
            raise PoleError("pole at s=1")
    left = completed_l(s, chi, cfg)
    right = root_number(chi) * completed_l(1.0 - s, chi.conjugate(), cfg)
    return left, right


def l_fe_residual(s, chi: DirichletCharacter, cfg: EvalConfig = DEFAULT_CONFIG) -> float:
    """Relative mismatch of Lambda(s, chi) = epsilon Lambda(1 - s, conj chi)."""
    return relative_residual(*l_fe_sides(s, chi, cfg))


# ---------------------------------------------------------------------------
# zeros on the critical line

def l_rotation(t: float, chi: DirichletCharacter) -> float:
    """Phase making exp(i theta) L(1/2 + it, chi) real for primitive chi."""
    eps_phase = cmath.phase(root_number(chi))
    w = complex(0.5 + chi.kappa, t) * 0.5
    return 0.5 * t * math.log(chi.modulus / math.pi) + log_gamma(w).value.imag - 0.5 * eps_phase


def l_hardy_z_complex(t: float, chi: DirichletCharacter) -> complex:
    return cmath.exp(1j * l_rotation(t, chi)) * l_function(complex(0.5, t), chi).value


class _RotatedL:
    # picklable callable for process pools
    def __init__(self, chi: DirichletCharacter):
        self.chi = chi

    def __call__(self, t: float) -> float:
        return l_hardy_z_complex(t, self.chi).real


class _CompletedForCount:
    def __init__(self, chi: DirichletCharacter):
        self.chi = chi

    def __call__(self, s: complex) -> Tuple[complex, float]:
        lv = l_function(s, self.chi).value
        lam = cmath.exp(_log_completion(s, self.chi)) * lv
        if self.chi.is_principal:
            lam *= 0.5 * s * (s - 1.0)
        return lam, abs(lv)


def count_l_zeros(chi: DirichletCharacter, rect: StripRect) -> int:
    """Zeros of Lambda(s, chi) inside ``rect`` by the argument principle."""
    _require_primitive(chi)
    w, _ = contour_winding(_CompletedForCount(chi), rect)
    return rounded_winding(w)


def find_l_zeros(chi: DirichletCharacter, t_min: float, t_max: float, step: float = 0.02,
                 workers: int = 1, check_count: bool = True) -> List[LZeroRecord]:
    """Zeros of L(s, chi) with t_min < t < t_max, cross-checked by contour count."""
    _require_primitive(chi)
    if chi.modulus > MAX_SCAN_MODULUS:
        raise DomainError(f"zero scans are limited to q <= {MAX_SCAN_MODULUS}")
    if not (0.0 <= t_min < t_max):
        raise DomainError("need 0 <= t_min < t_max")
    if not step > 0.0:
        raise DomainError("step must be positive")
    zfun = _RotatedL(chi)
    completed = _CompletedForCount(chi)
    ts = scan_grid(t_min, t_max, step)
    vals = evaluate_on_grid(zfun, ts, workers)
    records = []
    for lo, hi in sign_change_brackets(ts, vals):
        t_line = lo if lo == hi else bisect_sign_change(zfun, lo, hi)
        p, iters = refine_zero_2d(lambda s: completed(s)[0], t_line)
        records.append(LZeroRecord(p.imag, p.real, abs(l_function(p, chi).value), iters,
                                   chi.modulus, chi.index))
    records.sort(key=lambda r: r.t)
    if check_count:
        expected = count_l_zeros(chi, StripRect(COVER_SIGMA[0], COVER_SIGMA[1], t_min, t_max))
        if expected > len(records):
            raise StepTooCoarse(
                f"contour count {expected} exceeds {len(records)} sign changes in [{t_min}, {t_max}]"
            )
        if expected < len(records):
            raise ZeroCountMismatch(f"contour count {expected} but {len(records)} sign changes")
    return records
