"""Error-controlled evaluation of the deformed exponential

    f(x) = sum_{n>=0} x**n / n! * q**(n(n-1)/2)

and the alternating-term diagnostics used to study it near ``-(k + lam/k) alpha**(k-1)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath
from mpmath import mp, mpf

from .arith import (
    DomainError,
    ErrorBoundedValue,
    Params,
    PrecisionContext,
    max_term_exponent,
    to_mpf,
    unit_roundoff,
)


@dataclass(frozen=True)
class SeriesValue:
    result: ErrorBoundedValue
    terms_used: int
    peak_exponent: int
    cancellation_bits: int
    working_bits: int

    @property
    def value(self) -> mpf:
        return self.result.value

    @property
    def abs_err(self) -> mpf:
        return self.result.abs_err


def working_bits_for(x, params: Params, ctx: PrecisionContext) -> int:
    """Precision used by :func:`eval_f` at ``x``: enough to absorb the cancellation."""
    return ctx.bits_for(max_term_exponent(abs(mpf(x)), params))


def eval_f(x, params: Params, ctx: PrecisionContext) -> SeriesValue:
    """Evaluate f(x) with a rigorous absolute error bound.

    The argument is taken as exact.  Terms follow the recurrence
    ``t[n+1] = t[n] * x * q**n / (n+1)``; summation stops at the first ``N``
    where the term ratio ``|x| q**N / (N+1)`` is below 1/2 and ``|t[N]|`` is
    below a quarter of the target, and the tail is bounded by ``2 |t[N+1]|``.

    The rounding part of the bound charges every term a relative error of
    ``2 (n**2 + 3n) u``, which covers the rounded ``q`` (the ``q**(n(n-1)/2)``
    factor amplifies it ``n(n-1)/2``-fold), the repeated products, and a
    relative perturbation of ``x`` up to ``u``.
    """
    x = to_mpf(x, ctx.working_bits)
    bits = working_bits_for(x, params, ctx)
    with mp.workprec(bits):
        q = params.q_mpf(bits)
        u = unit_roundoff(bits)
        stop_term = mpmath.ldexp(mpf(1), ctx.target_abs_exp - 2)
        ax = abs(x)
        half = mpf(0.5)

        s = mpf(1)
        t = mpf(1)
        qn = mpf(1)  # q**n
        weighted = mpf(0)  # sum of (n^2 + 3n) |t_n|
        partials = mpf(0)  # sum of |S_n| over inexact additions
        peak = mpf(1)
        n = 0
        while True:
            ratio = ax * qn / (n + 1)
            if ratio < half and abs(t) < stop_term:
                tail = 2 * abs(t) * ratio
                break
            t = t * x * qn / (n + 1)
            qn *= q
            n += 1
            if not t:
                tail = mpf(0)
                n -= 1
                break
            s += t
            at = abs(t)
            if at > peak:
                peak = at
            weighted += (n * n + 3 * n) * at
            partials += abs(s)
        abs_err = 2 * u * weighted + u * partials + tail
        # the error sums themselves were rounded; inflate slightly
        abs_err *= 1 + mpmath.ldexp(mpf(1), -40)
    peak_exp = int(math.ceil(float(mpmath.log(peak, 2)) - 1e-12)) if peak != 1 else 0
    result = ErrorBoundedValue(s, abs_err)
    return SeriesValue(
        result,
        terms_used=n + 1,
        peak_exponent=peak_exp,
        cancellation_bits=_cancellation_bits(result, peak_exp, ctx),
        working_bits=bits,
    )


def _cancellation_bits(result: ErrorBoundedValue, peak_exp: int, ctx: PrecisionContext) -> int:
    # values below the error bound or the requested target count as zero
    floor = max(result.abs_err, ctx.tol)
    if abs(result.value) <= floor:
        return 0
    lost = peak_exp - int(math.floor(float(mpmath.log(abs(result.value), 2))))
    return max(lost, 0)


def scaled_argument(x, params: Params, ctx: PrecisionContext) -> mpf:
    """``q * x`` rounded at the working precision :func:`eval_f` uses for ``x``."""
    x = to_mpf(x, ctx.working_bits)
    bits = working_bits_for(x, params, ctx)
    with mp.workprec(bits):
        return x * params.q_mpf(bits)


def eval_f_prime(x, params: Params, ctx: PrecisionContext) -> SeriesValue:
    """f'(x), computed as f(q x) by the functional equation ``f'(x) = f(qx)``.

    The rounding of ``q x`` is a relative perturbation of at most ``u``, which
    the bound of :func:`eval_f` already allows for.
    """
    return eval_f(scaled_argument(x, params, ctx), params, ctx)


def truncated_coefficients(order: int, q) -> list:
    """Exact coefficients ``q**(n(n-1)/2) / n!`` for ``n < order``.

    ``q`` should be a :class:`fractions.Fraction` for an exact result.
    """
    coeffs = []
    c = q * 0 + 1
    for n in range(order):
        coeffs.append(c)
        c = c * q**n / (n + 1)
    return coeffs


@dataclass(frozen=True)
class TermTable:
    """Term magnitudes of the alternating series for f(-(k + lam/k) alpha**(k-1)).

    ``u[n]`` is the magnitude of the n-th term; ``v[j] = u[2k-j-1] - u[j]``.
    """

    k: int
    lam: mpf
    u: list
    v: list

    def increasing_threshold(self) -> int:
        """Smallest ``N`` with ``v[j] < v[j+1]`` for every ``0 <= j <= k - N``.

        Returns ``k + 1`` when the chain already fails at ``j = 0``.
        """
        j = 0
        while j + 1 < self.k and self.v[j] < self.v[j + 1]:
            j += 1
        # chain holds for 0..j-1
        return self.k - (j - 1)


def term_table(k: int, lam, params: Params, ctx: PrecisionContext, extra: int = 2) -> TermTable:
    """Tabulate ``u_n = c**n / n! * alpha**(n(2k-n-1)/2)`` with ``c = k + lam/k``.

    Computed through logarithms, so the alpha**O(k**2) spread never overflows
    intermediate values; ``n`` runs over ``0 .. 2k + extra``.
    """
    if k < 1:
        raise DomainError(f"k must be >= 1, got {k}")
    bits = ctx.working_bits + 2 * k.bit_length() + 16
    with mp.workprec(bits):
        lam = to_mpf(lam, bits)
        if lam < 0:
            raise DomainError("lambda must be non-negative")
        c = k + lam / k
        log_c = mpmath.log(c)
        log_alpha = mpmath.log(params.alpha_mpf(bits))
        u = []
        for n in range(2 * k + extra + 1):
            log_u = n * log_c - mpmath.loggamma(n + 1) + mpf(n * (2 * k - n - 1)) / 2 * log_alpha
            u.append(mpmath.exp(log_u))
        v = [u[2 * k - j - 1] - u[j] for j in range(k)]
    return TermTable(k, lam, u, v)
