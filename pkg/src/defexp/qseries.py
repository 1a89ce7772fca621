"""Number-theoretic constants attached to the zeros of the deformed exponential.

* ``sigma(k)``: sum of the divisors of ``k``
* ``g(q) = sum sigma(k) q**k``, and its Lambert form ``sum k / (alpha**k - 1)``
* ``h(alpha) = sum (2j-1) (-1)**(j-1) alpha**(-j(j-1)/2)`` and its triple
  product ``prod (1 - alpha**-k)**3``
* ``H(alpha) = sum j(j-1)(2j-1)/6 (-1)**j alpha**(-j(j-1)/2)``
* Euler products ``prod (1 +- alpha**-k)``

Every routine returns an :class:`ErrorBoundedValue` whose bound covers
truncation, rounding and the rounding of ``q`` itself.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import mpmath
from mpmath import mp, mpf

from .arith import (
    DomainError,
    ErrorBoundedValue,
    Params,
    PrecisionContext,
    unit_roundoff,
)

Q_CAP = Fraction(99, 100)


def sigma(k: int) -> int:
    """Sum of the positive divisors of ``k`` by trial division up to sqrt(k)."""
    if k < 1:
        raise DomainError(f"sigma is defined for k >= 1, got {k}")
    total = 0
    d = 1
    while d * d <= k:
        if k % d == 0:
            total += d
            if d * d != k:
                total += k // d
        d += 1
    return total


@lru_cache(maxsize=8)
def _sigma_table(upto: int) -> tuple:
    """sigma(1..upto) by adding each d to its multiples."""
    table = [0] * (upto + 1)
    for d in range(1, upto + 1):
        for m in range(d, upto + 1, d):
            table[m] += d
    return tuple(table[1:])


def g_coefficients(K: int) -> list[int]:
    """Coefficients of ``q**1 .. q**K`` in g(q)."""
    return list(_sigma_table(K))


def k2_tail(K: int, q) -> mpf:
    """Closed form of ``sum_{k>K} k**2 q**k``."""
    q = mpf(q)
    poly = (K + 1) ** 2 - (2 * K * K + 2 * K - 1) * q + K * K * q * q
    return q ** (K + 1) * poly / (1 - q) ** 3


def _resolve(tol, ctx: PrecisionContext) -> tuple[mpf, int]:
    tol = ctx.tol if tol is None else mpf(tol)
    return tol, ctx.bits_for_tol(tol)


def g_series(params: Params, tol=None, ctx: PrecisionContext = None, q_cap: Fraction = Q_CAP) -> ErrorBoundedValue:
    """g(q) = sum_{k>=1} sigma(k) q**k, truncated once the k**2 tail is below tol/2."""
    if params.q > q_cap:
        raise DomainError(
            f"g(q) refused for q = {params.q_decimal} > {float(q_cap)}: "
            "the series diverges as q -> 1 and the truncation order explodes"
        )
    tol, bits = _resolve(tol, ctx)
    with mp.workprec(bits):
        q = params.q_mpf(bits)
        u = unit_roundoff(bits)
        half_tol = tol / 2
        s = mpf(0)
        qk = mpf(1)
        weighted = mpf(0)
        partials = mpf(0)
        K = 0
        chunk = 64
        size = 256
        while True:
            if K + chunk > size:
                size *= 4
            sig = _sigma_table(size)
            for k in range(K + 1, K + chunk + 1):
                qk *= q
                term = sig[k - 1] * qk
                s += term
                weighted += (2 * k + 1) * term
                partials += s
            K += chunk
            if k2_tail(K, q) < half_tol:
                break
        # every omitted term is positive: centre the enclosure on the tail interval
        tail = k2_tail(K, q) / 2
        err = 2 * u * weighted + u * partials + tail
        s += tail
    return ErrorBoundedValue(s, err)


def g_lambert(params: Params, tol=None, ctx: PrecisionContext = None) -> ErrorBoundedValue:
    """sum_{k>=1} k / (alpha**k - 1) with a geometric tail bound."""
    tol, bits = _resolve(tol, ctx)
    with mp.workprec(bits):
        alpha = params.alpha_mpf(bits)
        u = unit_roundoff(bits)
        stop = tol * (1 - 1 / alpha) / 4
        s = mpf(0)
        ak = mpf(1)
        rounding = mpf(0)
        k = 0
        while True:
            k += 1
            ak *= alpha
            den = ak - 1
            term = k / den
            s += term
            # alpha**k carries (2k) u relative error; the subtraction amplifies it
            rounding += term * ((2 * k + 1) * u * ak / den + 2 * u) + u * s
            r = mpf(k + 1) / (k * alpha)
            if term < stop and r < 1:
                tail = term * r / (1 - r)
                if tail < tol / 2:
                    break
        tail /= 2
        s += tail
    return ErrorBoundedValue(s, 2 * rounding + tail)


def _theta_sum(params: Params, weight, first_j: int, tol, ctx) -> ErrorBoundedValue:
    """sum_j weight(j) alpha**(-j(j-1)/2) for j >= 1 (weight carries the sign).

    Stops after the term ``j`` once the following term ratio is below 1/2 and
    twice the next term is below tol/2; the term ratios decrease from there
    on, so the tail is at most twice the next term.
    """
    tol, bits = _resolve(tol, ctx)
    with mp.workprec(bits):
        q = params.q_mpf(bits)
        u = unit_roundoff(bits)
        s = mpf(0)
        a = mpf(1)  # alpha**(-j(j-1)/2)
        qj = mpf(1)  # alpha**(-j) = q**j
        rounding = mpf(0)
        j = 1
        while True:
            term = weight(j) * a
            s += term
            rounding += abs(term) * (j * j + 2 * j + 2) * u + abs(s) * u
            qj *= q
            a_next = a * qj
            nxt = abs(weight(j + 1) * a_next)
            if j >= first_j and abs(term) > 0:
                ratio = nxt / abs(term)
                if ratio < 0.5 and 2 * nxt < tol / 2:
                    tail = 2 * nxt
                    break
            a = a_next
            j += 1
    return ErrorBoundedValue(s, 2 * rounding + tail)


def _h_weight(j: int) -> int:
    return (2 * j - 1) * (1 if j % 2 else -1)


def _H_weight(j: int) -> int:
    w = j * (j - 1) * (2 * j - 1) // 6
    return w if j % 2 == 0 else -w


def h_series(params: Params, tol=None, ctx: PrecisionContext = None) -> ErrorBoundedValue:
    return _theta_sum(params, _h_weight, 1, tol, ctx)


def H_series(params: Params, tol=None, ctx: PrecisionContext = None) -> ErrorBoundedValue:
    return _theta_sum(params, _H_weight, 2, tol, ctx)


def _power_product(params: Params, sign: int, power: int, tol, ctx) -> ErrorBoundedValue:
    """prod_{k>=1} (1 + sign * alpha**-k)**power.

    The tail factor lies between exp(-D) and exp(D) with
    ``D = power * sum_{k>K} a_k / (1 - a_k)``, ``a_k = alpha**-k``, bounded by
    a geometric series; we stop when ``P_K (exp(D) - 1) < tol/2``.
    """
    tol, bits = _resolve(tol, ctx)
    with mp.workprec(bits):
        q = params.q_mpf(bits)
        u = unit_roundoff(bits)
        p = mpf(1)
        a = mpf(1)
        rel = mpf(0)
        k = 0
        while True:
            k += 1
            a *= q
            factor = 1 + sign * a
            p *= factor**power
            rel += power * (2 * k * u * a / factor + 2 * u)
            a_next = a * q
            D = power * a_next / ((1 - q) * (1 - a_next))
            if D < 1 and p * 2 * D < tol / 2:
                break
        trunc = p * 2 * D  # exp(D) - 1 <= 2D for D < 1
        rounding = p * rel * (1 + rel)
    return ErrorBoundedValue(p, 2 * rounding + trunc)


def h_product(params: Params, tol=None, ctx: PrecisionContext = None) -> ErrorBoundedValue:
    """prod (1 - alpha**-k)**3, which the triple product identity equates with h."""
    return _power_product(params, -1, 3, tol, ctx)


def euler_product(params: Params, sign: str, tol=None, ctx: PrecisionContext = None) -> ErrorBoundedValue:
    """phi(alpha) = prod (1 - alpha**-k) for sign '-', Phi(alpha) = prod (1 + alpha**-k) for '+'."""
    if sign not in ("+", "-"):
        raise DomainError(f"sign must be '+' or '-', got {sign!r}")
    return _power_product(params, 1 if sign == "+" else -1, 1, tol, ctx)


def lambda0(params: Params, ctx: PrecisionContext, tol=None) -> ErrorBoundedValue:
    """1 + H(alpha)/h(alpha), the width parameter of the zero-bracketing interval."""
    tol, bits = _resolve(tol, ctx)
    h = h_series(params, tol / 8, ctx)
    H = H_series(params, tol / 8, ctx)
    with mp.workprec(bits):
        return 1 + H / h


@dataclass(frozen=True)
class PartialRatioRow:
    m: int
    h_m: ErrorBoundedValue
    H_m: ErrorBoundedValue
    ratio: ErrorBoundedValue | None


@dataclass(frozen=True)
class PartialRatios:
    rows: list
    threshold: int | None  # smallest N with the chain valid for N < m <= m_last
    m_last: int  # largest m whose chain involves only computed rows

    def ratio(self, m: int) -> ErrorBoundedValue | None:
        return self.rows[m - 1].ratio

    def chain_holds(self, m: int) -> bool:
        """H_{2m-1}/h_{2m-1} < H_{2m+1}/h_{2m+1} < H_{2m}/h_{2m} < H_{2m-2}/h_{2m-2},
        each gap larger than four times the combined error bounds."""
        if m < 2 or 2 * m + 1 > len(self.rows):
            raise ValueError(f"chain at m={m} needs rows up to {2 * m + 1}")
        seq = [self.ratio(2 * m - 1), self.ratio(2 * m + 1), self.ratio(2 * m), self.ratio(2 * m - 2)]
        if any(r is None for r in seq):
            return False
        return all(
            b.value - a.value > 4 * (a.abs_err + b.abs_err) for a, b in zip(seq, seq[1:])
        )


def partial_ratios(params: Params, m_max: int, ctx: PrecisionContext) -> PartialRatios:
    """Partial sums h_m, H_m for m = 1..m_max and the interleaving threshold.

    Consecutive ratios differ by about alpha**(-m**2/2), so the precision is
    raised to resolve the smallest gap in the chain at ``m_max``.
    """
    if m_max < 2:
        raise DomainError(f"m_max must be >= 2, got {m_max}")
    gap_bits = math.ceil((m_max + 1) * m_max / 2 * params.log2_alpha) + 3 * m_max.bit_length()
    bits = max(ctx.working_bits, gap_bits + 2 * ctx.guard_bits)
    rows = []
    with mp.workprec(bits):
        q = params.q_mpf(bits)
        u = unit_roundoff(bits)
        h = mpf(0)
        H = mpf(0)
        h_err = mpf(0)
        H_err = mpf(0)
        a = mpf(1)
        qj = mpf(1)
        for j in range(1, m_max + 1):
            th, tH = _h_weight(j) * a, _H_weight(j) * a
            h += th
            H += tH
            rel = (j * j + 2 * j + 2) * u
            h_err += 2 * (abs(th) * rel + abs(h) * u)
            H_err += 2 * (abs(tH) * rel + abs(H) * u)
            hv, Hv = ErrorBoundedValue(h, h_err), ErrorBoundedValue(H, H_err)
            ratio = Hv / hv if hv.sign() > 0 else None
            rows.append(PartialRatioRow(j, hv, Hv, ratio))
            qj *= q
            a *= qj
    m_last = (m_max - 1) // 2
    result = PartialRatios(rows, None, m_last)
    threshold = None
    if m_last >= 2:
        m = m_last
        while m >= 2 and result.chain_holds(m):
            m -= 1
        if m < m_last:
            threshold = m
    return PartialRatios(rows, threshold, m_last)
