"""Precision policy and error-tracked scalars.

Everything in the package is computed with :mod:`mpmath` binary floats at an
explicitly chosen precision.  Error bounds are carried by hand as absolute
bounds in :class:`ErrorBoundedValue`; there is no interval library underneath.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from decimal import Decimal, InvalidOperation
from fractions import Fraction

import mpmath
from mpmath import mp, mpf

DEFAULT_GUARD_BITS = 64
DEFAULT_PRECISION_CAP = 1_000_000
PRECISION_CAP_ENV = "DEFEXP_PRECISION_CAP"

LOG2_10 = math.log2(10)


class DefExpError(Exception):
    """Base class for errors raised by this package."""


class ConfigurationError(DefExpError):
    """A precision request or configuration value is unusable."""


class DomainError(DefExpError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


def precision_cap() -> int:
    raw = os.environ.get(PRECISION_CAP_ENV)
    if raw is None:
        return DEFAULT_PRECISION_CAP
    try:
        cap = int(raw)
    except ValueError:
        raise ConfigurationError(f"{PRECISION_CAP_ENV}={raw!r} is not an integer") from None
    if cap < 8:
        raise ConfigurationError(f"{PRECISION_CAP_ENV} must be at least 8, got {cap}")
    return cap


def _parse_rational(text: str | Fraction | int) -> Fraction:
    if isinstance(text, Fraction):
        return text
    if isinstance(text, int):
        return Fraction(text)
    text = str(text).strip()
    try:
        if "/" in text:
            return Fraction(text)
        return Fraction(Decimal(text))
    except (InvalidOperation, ValueError, ZeroDivisionError):
        raise DomainError(f"not a decimal literal: {text!r}") from None


def _fraction_to_decimal(value: Fraction) -> str:
    """Exact decimal string for ``value`` if it terminates, else ``p/q``."""
    den = value.denominator
    twos = fives = 0
    while den % 2 == 0:
        den //= 2
        twos += 1
    while den % 5 == 0:
        den //= 5
        fives += 1
    if den != 1:
        return f"{value.numerator}/{value.denominator}"
    k = max(twos, fives)
    scaled = value.numerator * 10**k // value.denominator
    return format(Decimal(scaled).scaleb(-k), "f")


def to_mpf(value, prec: int) -> mpf:
    """Convert ``value`` (mpf, int, Fraction or decimal string) at ``prec`` bits."""
    if isinstance(value, mpf):
        return value
    with mp.workprec(prec):
        if isinstance(value, Fraction):
            return mpf(value.numerator) / value.denominator
        if isinstance(value, int):
            return mpf(value)
        if isinstance(value, float):
            return mpf(value)
        return mpf(str(value).strip())


@dataclass(frozen=True)
class Params:
    """The deformation parameter ``q`` in (0, 1), held exactly.

    ``q`` is parsed once from its decimal string into an exact rational; binary
    approximations of ``q`` and ``alpha = 1/q`` are produced on demand at the
    precision a computation runs at, each correctly rounded from that rational.
    """

    q_decimal: str
    q: Fraction

    @classmethod
    def from_q(cls, q_decimal: str | Fraction) -> "Params":
        q = _parse_rational(q_decimal)
        if not 0 < q < 1:
            raise DomainError(f"q must lie in (0, 1), got {q_decimal}")
        return cls(_fraction_to_decimal(q), q)

    @classmethod
    def from_alpha(cls, alpha_decimal: str | Fraction) -> "Params":
        alpha = _parse_rational(alpha_decimal)
        if not alpha > 1:
            raise DomainError(f"alpha must exceed 1, got {alpha_decimal}")
        return cls.from_q(1 / alpha)

    @property
    def alpha(self) -> Fraction:
        return 1 / self.q

    def q_mpf(self, prec: int) -> mpf:
        return to_mpf(self.q, prec)

    def alpha_mpf(self, prec: int) -> mpf:
        return to_mpf(self.alpha, prec)

    @property
    def log2_alpha(self) -> float:
        a = self.alpha
        return math.log2(a.numerator) - math.log2(a.denominator)

    def scale(self, x: mpf, power: int = 1) -> mpf:
        """Exact product ``x * alpha**power`` (negative ``power`` scales by q)."""
        a = self.alpha if power >= 0 else self.q
        num, den = a.numerator ** abs(power), a.denominator ** abs(power)
        y = mpmath.fmul(x, num, exact=True)
        if den == 1:
            return y
        # division is not exact in binary; round with generous extra bits
        with mp.workprec(max(mp.prec, _bits(x)) + den.bit_length() + 64):
            return y / den

    def fingerprint(self) -> str:
        return self.q_decimal


def _bits(x: mpf) -> int:
    man, _ = x.man_exp
    return max(int(man).bit_length(), 1)


@dataclass(frozen=True)
class PrecisionContext:
    """Precision request: absolute error target plus working and guard bits."""

    target_abs_exp: int
    working_bits: int
    guard_bits: int = DEFAULT_GUARD_BITS
    cap: int = DEFAULT_PRECISION_CAP

    def __post_init__(self):
        if self.working_bits < 1 or self.guard_bits < 0:
            raise ConfigurationError("working_bits must be positive and guard_bits non-negative")
        if self.working_bits < -self.target_abs_exp + self.guard_bits:
            raise ConfigurationError(
                f"working_bits {self.working_bits} cannot reach 2^{self.target_abs_exp} "
                f"with {self.guard_bits} guard bits"
            )
        if self.working_bits > self.cap:
            raise ConfigurationError(
                f"working precision {self.working_bits} bits exceeds cap {self.cap}"
            )

    @property
    def tol(self) -> mpf:
        """The absolute error target ``2**target_abs_exp`` as an mpf."""
        return mpmath.ldexp(mpf(1), self.target_abs_exp)

    def bits_for(self, peak_exponent: int) -> int:
        """Working bits for a sum whose largest term is about ``2**peak_exponent``.

        Raises :class:`ConfigurationError` when the request is above the cap.
        """
        bits = max(self.working_bits, peak_exponent - self.target_abs_exp + self.guard_bits)
        if bits > self.cap:
            raise ConfigurationError(
                f"evaluation needs {bits} working bits, above the cap of {self.cap} "
                f"(set {PRECISION_CAP_ENV} to raise it)"
            )
        return bits

    def bits_for_tol(self, tol) -> int:
        """Working bits to resolve an absolute tolerance ``tol``."""
        tol = mpf(tol)
        if tol <= 0:
            raise ConfigurationError("tolerance must be positive")
        need = self.guard_bits + max(0, math.ceil(-float(mpmath.log(tol, 2))))
        bits = max(self.working_bits, need)
        if bits > self.cap:
            raise ConfigurationError(f"tolerance {mpmath.nstr(tol, 5)} needs {bits} bits, above the cap {self.cap}")
        return bits

    def extended(self, extra_bits: int) -> "PrecisionContext":
        """Same target with ``extra_bits`` more working and target bits."""
        return PrecisionContext(
            self.target_abs_exp - extra_bits,
            self.working_bits + extra_bits,
            self.guard_bits,
            self.cap,
        )


def make_context(decimal_digits: int, guard_bits: int = DEFAULT_GUARD_BITS) -> PrecisionContext:
    """Context for ``decimal_digits`` digits of absolute accuracy.

    >>> make_context(30, 64).working_bits
    164
    """
    if decimal_digits < 1:
        raise ConfigurationError(f"decimal_digits must be >= 1, got {decimal_digits}")
    if guard_bits < 0:
        raise ConfigurationError(f"guard_bits must be >= 0, got {guard_bits}")
    target = math.ceil(decimal_digits * LOG2_10)
    cap = precision_cap()
    working = target + guard_bits
    if working > cap:
        raise ConfigurationError(f"{decimal_digits} digits needs {working} bits, above the cap {cap}")
    return PrecisionContext(-target, working, guard_bits, cap)


@dataclass(frozen=True)
class ErrorBoundedValue:
    """A high-precision real and an absolute error bound on it.

    The exact quantity lies in ``[value - abs_err, value + abs_err]``.
    Arithmetic operators propagate the bound and add the rounding error of the
    operation at the precision in effect when they run.
    """

    value: mpf
    abs_err: mpf

    def __post_init__(self):
        if self.abs_err < 0 or not mpmath.isfinite(self.abs_err):
            raise ValueError(f"abs_err must be finite and non-negative, got {self.abs_err}")

    @classmethod
    def exact(cls, value) -> "ErrorBoundedValue":
        return cls(mpf(value), mpf(0))

    # Endpoints and comparisons are exact, so they do not depend on mp.prec.
    @property
    def lo(self) -> mpf:
        return mpmath.fsub(self.value, self.abs_err, exact=True)

    @property
    def hi(self) -> mpf:
        return mpmath.fadd(self.value, self.abs_err, exact=True)

    def contains(self, x) -> bool:
        x = x if isinstance(x, mpf) else mpf(x)
        return abs(mpmath.fsub(x, self.value, exact=True)) <= self.abs_err

    def overlaps(self, other: "ErrorBoundedValue") -> bool:
        gap = abs(mpmath.fsub(self.value, other.value, exact=True))
        return gap <= mpmath.fadd(self.abs_err, other.abs_err, exact=True)

    def is_significant(self, factor: int = 4) -> bool:
        """True when ``|value|`` exceeds ``factor`` times the error bound."""
        return abs(self.value) > factor * self.abs_err

    def sign(self) -> int:
        """Sign of the exact quantity, or 0 when the enclosure straddles zero."""
        if self.value > self.abs_err:
            return 1
        if self.value < -self.abs_err:
            return -1
        return 0

    def __neg__(self):
        return ErrorBoundedValue(-self.value, self.abs_err)

    def __abs__(self):
        return ErrorBoundedValue(abs(self.value), self.abs_err)

    def _coerce(self, other) -> "ErrorBoundedValue":
        if isinstance(other, ErrorBoundedValue):
            return other
        return ErrorBoundedValue.exact(other)

    def __add__(self, other):
        other = self._coerce(other)
        v = self.value + other.value
        return ErrorBoundedValue(v, self.abs_err + other.abs_err + _ulp(v))

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        v = self.value * other.value
        err = (
            abs(self.value) * other.abs_err
            + abs(other.value) * self.abs_err
            + self.abs_err * other.abs_err
            + _ulp(v)
        )
        return ErrorBoundedValue(v, err)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        den_lo = abs(other.value) - other.abs_err
        if den_lo <= 0:
            raise ZeroDivisionError("divisor enclosure contains zero")
        v = self.value / other.value
        err = (self.abs_err + abs(v) * other.abs_err) / den_lo + _ulp(v)
        return ErrorBoundedValue(v, err)

    def __rtruediv__(self, other):
        return self._coerce(other) / self

    def __repr__(self):
        return f"ErrorBoundedValue({mpmath.nstr(self.value, 20)} ± {mpmath.nstr(self.abs_err, 3)})"


def _ulp(v: mpf) -> mpf:
    """Bound on the rounding error of a result ``v`` at the current precision."""
    if not v:
        return mpf(0)
    return abs(v) * mpmath.ldexp(mpf(1), 1 - mp.prec)


def unit_roundoff(prec: int) -> mpf:
    return mpmath.ldexp(mpf(1), -prec)


def max_term_exponent(x_mag, params: Params) -> int:
    """Integer upper estimate of log2 of the largest term ``|x|^n q^(n(n-1)/2) / n!``.

    The log-terms are concave in ``n``, so scanning until three consecutive
    decreases finds the peak.  The result is rounded up past the floating
    point error of the scan, so it never under-approximates.
    """
    x_mag = mpf(x_mag)
    if x_mag < 0:
        raise DomainError("x_mag must be non-negative")
    if x_mag == 0:
        return 0
    lx = float(mpmath.log(x_mag, 2))
    la = params.log2_alpha
    best, best_scale = 0.0, 0.0
    prev = 0.0
    drops = 0
    n = 0
    while drops < 3:
        n += 1
        lf = math.lgamma(n + 1) / math.log(2)
        val = n * lx - lf - n * (n - 1) / 2 * la
        if val > best:
            best = val
            best_scale = abs(n * lx) + lf + n * (n - 1) / 2 * la
        drops = drops + 1 if val < prev else 0
        prev = val
    slack = best_scale * 1e-12
    return int(math.ceil(best + slack))


def log2_abs(x) -> float:
    """log2|x| as a float; -inf for zero."""
    x = mpf(x)
    if not x:
        return float("-inf")
    return float(mpmath.log(abs(x), 2))
