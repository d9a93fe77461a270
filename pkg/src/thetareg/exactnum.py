"""Exact and error-tracked arithmetic for quadratic exponential phases.

Everything downstream evaluates sums whose terms are e(n^2 t/2 + n x),
e(z) = exp(2 pi i z), so the only thing that matters about a phase is its
value mod 1, to a small fraction of a cycle. Two regimes:

* rational t = p/q: n^2 p/(2q) + n h/q_x is an exact rational; reduce the
  numerator mod the common denominator in integer arithmetic and divide
  once at the end. No rounding at all before the final binary64 quotient.

* irrational t: double precision alone is useless once n^2 t has a large
  integer part (the fractional bits are the ones that got rounded away).
  t is therefore carried as a fixed-point integer ``mantissa * 2^-scale_bits``
  with an explicit error budget in units in the last place, and phases are
  produced together with a rigorous bound. The vectorised path splits the
  product n^2 * (t/2) into an exact double-double (Veltkamp/Dekker two
  product), subtracts the nearest integer from the exact high part, and
  only then lets rounding happen, so the result is good to ~2^-51 even
  though n^2 * t may be ~2^40.

Precision is refused, never degraded: if n^2 * ulp(t) is not comfortably
below 1, the phase functions raise instead of returning garbage. The
refusal threshold (in bits) can be overridden through the environment
variable THETA_PRECISION_GUARD.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import DomainError, InsufficientPrecisionError, PrecisionExhaustedError

__all__ = [
    "FixedReal",
    "DEFAULT_GUARD_BITS",
    "guard_bits",
    "rational_phase",
    "rational_phase_array",
    "fixed_of_time",
    "irrational_phase",
    "quadratic_phase_array",
    "linear_phase_array",
]

DEFAULT_GUARD_BITS = 30

# 2^27 + 1, the Veltkamp splitter for binary64.
_SPLIT = 134217729.0


def guard_bits() -> int:
    """Headroom (in bits) that n^2 * ulp must leave below a full cycle.

    Read from THETA_PRECISION_GUARD at every call so tests and callers can
    adjust it without re-importing.
    """
    raw = os.environ.get("THETA_PRECISION_GUARD", "").strip()
    if not raw:
        return DEFAULT_GUARD_BITS
    try:
        value = int(raw)
    except ValueError as exc:
        raise DomainError(
            f"THETA_PRECISION_GUARD must be an integer, got {raw!r}") from exc
    if value < 4:
        raise DomainError("THETA_PRECISION_GUARD below 4 bits is meaningless")
    return value


@dataclass(frozen=True)
class FixedReal:
    """A real number as mantissa * 2^-scale_bits with |error| <= err_ulp ulp."""

    mantissa: int
    scale_bits: int
    err_ulp: int = 0

    def __post_init__(self) -> None:
        if self.scale_bits <= 0:
            raise DomainError("scale_bits must be positive")
        if self.err_ulp < 0:
            raise DomainError("err_ulp must be non-negative")

    def as_fraction(self) -> Fraction:
        return Fraction(self.mantissa, 1 << self.scale_bits)

    def as_float(self) -> float:
        return float(self.as_fraction())

    def error_bound(self) -> Fraction:
        """Exact bound on |represented - true| as a Fraction."""
        return Fraction(self.err_ulp, 1 << self.scale_bits)


def _frac_mod1(x: Fraction) -> Fraction:
    return x - (x.numerator // x.denominator)


def rational_phase(n: int, p: int, q: int, h: int = 0, q_x: int = 1) -> Fraction:
    """Exact (n^2 p/(2q) + n h/q_x) mod 1 as a Fraction in [0, 1).

    The map n -> phase is periodic with period dividing 2*q*q_x; tests and
    the residue-class probe exploit that. No floating point is involved.
    """
    if q <= 0 or q_x <= 0:
        raise DomainError("denominators must be positive")
    if math.gcd(p, q) != 1:
        raise DomainError(f"{p}/{q} is not in lowest terms")
    total = Fraction(n * n * p, 2 * q) + Fraction(n * h, q_x)
    return _frac_mod1(total)


def rational_phase_array(
    n: np.ndarray, p: int, q: int, h: int = 0, q_x: int = 1
) -> np.ndarray:
    """Vectorised ``rational_phase`` as float64 in [0, 1).

    The modular reduction happens in int64 (exact); only the final division
    by the common denominator rounds, so each value is correct to 1/2 ulp.
    Falls back to per-element big-integer arithmetic when the common
    denominator is too large for int64 products.
    """
    if q <= 0 or q_x <= 0:
        raise DomainError("denominators must be positive")
    if math.gcd(p, q) != 1:
        raise DomainError(f"{p}/{q} is not in lowest terms")
    L = 2 * q * q_x
    if L > (1 << 31) - 1:
        vals = [float(rational_phase(int(k), p, q, h, q_x)) for k in np.ravel(n)]
        return np.array(vals, dtype=np.float64).reshape(np.shape(n))
    nn = np.asarray(n, dtype=np.int64) % L
    quad = (nn * nn) % L
    quad = (quad * ((p * q_x) % L)) % L
    lin = (nn * ((2 * q * h) % L)) % L
    return ((quad + lin) % L).astype(np.float64) / float(L)


def fixed_of_time(spec, bits: int) -> FixedReal:
    """Fixed-point approximation of a time parameter, total error < 1 ulp.

    ``spec`` is anything with the small time-parameter protocol:
    ``exact_value()`` returning a Fraction or None, ``resolution()``
    returning the coarseness of a digit-limited literal (or None), and for
    irrational values ``convergent_pairs()`` yielding successive
    (p_k, q_k). A rational value is rounded (error <= 1/2 ulp, err_ulp = 0
    when the rounding is exact); an irrational one is replaced by the
    first convergent p_k/q_k with q_k q_{k+1} >= 2^(bits+2), whose distance
    to t is below 1/4 ulp, for a total budget under 1 ulp.

    Raises PrecisionExhaustedError when a digit-limited literal is coarser
    than the requested scale, or when the quotient source dries up.
    """
    if bits <= 0:
        raise DomainError("bits must be positive")
    res = spec.resolution()
    if res is not None and res > Fraction(1, 1 << bits):
        raise PrecisionExhaustedError(
            f"literal resolution {res} is coarser than 2^-{bits}; "
            "supply more digits or request fewer bits")
    exact = spec.exact_value()
    if exact is not None:
        scaled = exact * (1 << bits)
        mant = round(scaled)
        return FixedReal(mant, bits, 0 if mant == scaled else 1)
    target = 1 << (bits + 2)
    prev: tuple[int, int] | None = None
    for pk, qk in spec.convergent_pairs():
        if prev is not None and prev[1] * qk >= target:
            scaled = Fraction(prev[0] * (1 << bits), prev[1])
            return FixedReal(round(scaled), bits, 1)
        prev = (pk, qk)
    raise PrecisionExhaustedError(
        f"convergent stream ended before reaching {bits} bits")


def _check_guard(n_max: int, t: FixedReal, guard: int | None) -> None:
    g = guard_bits() if guard is None else int(guard)
    if n_max == 0:
        return
    # need n^2 * 2^-scale_bits <= 2^-g, i.e. n^2 <= 2^(scale_bits - g)
    if t.scale_bits <= g or n_max * n_max > (1 << (t.scale_bits - g)):
        raise InsufficientPrecisionError(
            f"scale_bits = {t.scale_bits} leaves less than {g} guard bits "
            f"at |n| = {n_max}; re-derive the time with more bits")


def irrational_phase(n: int, t: FixedReal, guard: int | None = None) -> tuple[float, float]:
    """((n^2 t / 2) mod 1, certified absolute error bound).

    Exact integer arithmetic on the mantissa; the only contributions to the
    bound are the input's err_ulp budget and one final binary64 rounding.
    """
    _check_guard(abs(n), t, guard)
    modulus = 1 << (t.scale_bits + 1)
    rem = (n * n * t.mantissa) % modulus
    value = float(rem) / float(modulus)
    err = n * n * t.err_ulp / float(modulus) + 2.0 ** -52
    return value, err


def _two_prod(a: np.ndarray, b: float) -> tuple[np.ndarray, np.ndarray]:
    """Exact elementwise product a*b = p + e (Dekker), away from overflow."""
    p = a * b
    big = _SPLIT * a
    ah = big - (big - a)
    al = a - ah
    bigb = _SPLIT * b
    bh = bigb - (bigb - b)
    bl = b - bh
    e = ((ah * bh - p) + ah * bl + al * bh) + al * bl
    return p, e


def half_phase_splits(t: FixedReal) -> tuple[float, float, Fraction]:
    """t/2 as a double-double (hi, lo) plus the exact leftover.

    hi + lo + leftover == t/2 exactly; |leftover| <= 2^-105 roughly.
    """
    theta = Fraction(t.mantissa, 1 << (t.scale_bits + 1))
    hi = float(theta)
    rem = theta - Fraction(hi)
    lo = float(rem)
    return hi, lo, rem - Fraction(lo)


def quadratic_phase_array(
    n: np.ndarray, t: FixedReal, guard: int | None = None
) -> tuple[np.ndarray, float]:
    """((n^2 t / 2) mod 1 elementwise, one error bound for the whole array).

    Requires |n| < 2^26 so n^2 is exact in binary64 (the block budget tops
    out at 2^21). The integer part of n^2 * (t/2) is removed from the exact
    high product before any rounding can touch the fractional bits.
    """
    nn = np.asarray(n)
    n_max = int(np.max(np.abs(nn))) if nn.size else 0
    _check_guard(n_max, t, guard)
    if n_max >= (1 << 26):
        raise DomainError("|n| >= 2^26 would make n^2 inexact in binary64")
    hi, lo, leftover = half_phase_splits(t)
    u = nn.astype(np.float64)
    u *= u
    p, e = _two_prod(u, hi)
    r = p - np.round(p)
    tot = r + (e + u * lo)
    frac = tot - np.floor(tot)
    frac = np.where(frac >= 1.0, 0.0, frac)  # subtraction may round up to 1.0
    model = n_max * n_max * (
        t.err_ulp / float(1 << (t.scale_bits + 1)) + abs(float(leftover)))
    return frac, model + 2.0 ** -51


def linear_phase_array(n: np.ndarray, x: float) -> np.ndarray:
    """(n x) mod 1 elementwise, accurate to ~2^-52 via an exact two-product."""
    a = np.asarray(n, dtype=np.float64)
    p, e = _two_prod(a, float(x))
    r = p - np.round(p)
    tot = r + e
    frac = tot - np.floor(tot)
    return np.where(frac >= 1.0, 0.0, frac)
