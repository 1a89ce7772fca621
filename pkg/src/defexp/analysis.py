"""Checks of the asymptotic laws and identities against computed zeros.

Rows are plain dataclasses; nothing here decides pass/fail thresholds except
where a check is an exact statement (signs, enclosures).  Trend checks with
frozen baselines live in :mod:`defexp.suites`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath
from mpmath import mp, mpf

from .arith import (
    ConfigurationError,
    DefExpError,
    ErrorBoundedValue,
    Params,
    PrecisionContext,
    to_mpf,
    unit_roundoff,
)
from .qseries import H_series, g_series, h_series
from .series import eval_f, eval_f_prime


class InsufficientZerosError(DefExpError):
    """Too few zeros to reach a requested tolerance."""

    def __init__(self, message: str, required_n: int):
        super().__init__(message)
        self.required_n = required_n


@dataclass(frozen=True)
class AsymptoticRow:
    n: int
    x_n: mpf
    theta_n: mpf
    s_n: mpf
    ratio_defect: mpf | None
    discrepancy: mpf  # |s_n - g(q)|


def ratio_table(zeros, params: Params) -> list:
    """``n**2 (x_{n+1}/(alpha x_n) - 1 - 1/n)`` for n = 1 .. len(zeros) - 1."""
    if len(zeros) < 2:
        return []
    prec = max(192, mp.prec)
    out = []
    with mp.workprec(prec):
        alpha = params.alpha_mpf(prec)
        for a, b in zip(zeros, zeros[1:]):
            n = a.n
            r = b.x.value / (alpha * a.x.value)
            out.append(n * n * (r - 1 - mpf(1) / n))
    return out


def asymptotic_table(zeros, params: Params, ctx: PrecisionContext) -> list[AsymptoticRow]:
    """theta_n = -x_n/alpha**(n-1) - n and s_n = n theta_n, compared with g(q)."""
    if len(zeros) < 3:
        raise ValueError("asymptotic_table needs at least 3 zeros")
    g_ref = g_series(params, None, ctx).value
    defects = ratio_table(zeros, params)
    rows = []
    prec = max(192, ctx.working_bits)
    with mp.workprec(prec):
        alpha = params.alpha_mpf(prec)
        for i, z in enumerate(zeros):
            n = z.n
            theta = -z.x.value / alpha ** (n - 1) - n
            s = n * theta
            rows.append(
                AsymptoticRow(
                    n=n,
                    x_n=z.x.value,
                    theta_n=theta,
                    s_n=s,
                    ratio_defect=defects[i] if i < len(defects) else None,
                    discrepancy=abs(s - g_ref),
                )
            )
    return rows


@dataclass(frozen=True)
class AmplitudeRow:
    n: int
    A_n: ErrorBoundedValue | None
    C_n: mpf | None
    sign: int  # sign of f(alpha x_n), 0 if undecided
    skipped: bool = False

    @property
    def sign_ok(self) -> bool:
        expected = 1 if self.n % 2 == 0 else -1
        return not self.skipped and self.sign == expected


def amplitude_table(zeros, params: Params, ctx: PrecisionContext) -> list[AmplitudeRow]:
    """A_n = |f(x_n/q)| and C_n = A_n n**1.5 e**-n q**(n(n+1)/2).

    The error on A_n includes the effect of the uncertainty in x_n, bounded
    to first order by ``|f'(alpha x)| alpha |dx|`` (doubled).
    """
    rows = []
    for z in zeros:
        n = z.n
        try:
            y = params.scale(z.x.value, 1)
            fv = eval_f(y, params, ctx).result
            dfv = eval_f_prime(y, params, ctx).result
        except ConfigurationError:
            rows.append(AmplitudeRow(n, None, None, 0, skipped=True))
            continue
        prec = max(192, ctx.working_bits)
        with mp.workprec(prec):
            shift = 2 * (abs(dfv.value) + dfv.abs_err) * float(params.alpha) * z.x.abs_err
            f_enc = ErrorBoundedValue(fv.value, fv.abs_err + shift)
            sign = f_enc.sign() if f_enc.is_significant(4) else 0
            A = abs(f_enc)
            scale = mpf(n) ** mpf(1.5) * mpmath.exp(-n) * params.q_mpf(prec) ** (n * (n + 1) // 2)
            C = A.value * scale
        rows.append(AmplitudeRow(n, A, C, sign))
    return rows


def amplitude_band(rows, n_lo: int, n_hi: int) -> tuple[mpf, mpf, mpf]:
    """(min C_n, max C_n, max/min) over n_lo <= n <= n_hi, skipped rows excluded."""
    vals = [r.C_n for r in rows if n_lo <= r.n <= n_hi and not r.skipped]
    if not vals:
        raise ValueError(f"no amplitude rows in [{n_lo}, {n_hi}]")
    lo, hi = min(vals), max(vals)
    return lo, hi, hi / lo


@dataclass(frozen=True)
class SignLemmaResult:
    n: int
    lam: mpf
    xi: mpf
    sign_observed: int
    sign_predicted: int
    conclusive: bool

    @property
    def agree(self) -> bool:
        return self.conclusive and self.sign_observed == self.sign_predicted


def sign_lemma_check(n: int, lam, params: Params, ctx: PrecisionContext) -> SignLemmaResult:
    """Compare the sign of f(xi_n) with (-1)**n sign(lam h - H), xi_n = -(n + lam/n) alpha**(n-1)."""
    prec = max(192, ctx.working_bits)
    h = h_series(params, None, ctx)
    H = H_series(params, None, ctx)
    with mp.workprec(prec):
        lam = to_mpf(lam, prec)
        d = lam * h - H
        xi = -(n + lam / n) * params.alpha_mpf(prec + 64) ** (n - 1)
    parity = 1 if n % 2 == 0 else -1
    if not d.is_significant(4):
        return SignLemmaResult(n, lam, xi, 0, 0, conclusive=False)
    predicted = parity * d.sign()
    fv = eval_f(xi, params, ctx).result
    observed = fv.sign() if fv.is_significant(4) else 0
    return SignLemmaResult(n, lam, xi, observed, predicted, conclusive=observed != 0)


def _tail_reciprocal_bound(zeros, params: Params) -> mpf:
    """Upper bound on sum_{n>N} 1/|x_n| from |x_n| > alpha**(n-N) |x_N|."""
    last = zeros[-1].x
    return 1 / ((abs(last.value) - last.abs_err) * (mpf(params.alpha.numerator) / params.alpha.denominator - 1))


def required_zeros(params: Params, tail_tol: float, x_mag: float = 1.0) -> int:
    """Smallest N with x_mag / (N alpha**(N-1) (alpha-1)) below tail_tol (asymptotic |x_N|)."""
    la = math.log(float(params.alpha))
    am1 = float(params.alpha) - 1
    N = 1
    while math.log(x_mag) - (math.log(N) + (N - 1) * la + math.log(am1)) >= math.log(tail_tol):
        N += 1
    return N


def product_eval(x, zeros, params: Params, ctx: PrecisionContext, tol=None) -> ErrorBoundedValue:
    """f(x) from the zeros: prod_{n<=N} (1 - x/x_n) times an enclosure of the tail.

    With ``r_n = x/x_n`` the omitted factors multiply to a number between
    exp(-L) and exp(L), ``L = sum_{n>N} |r_n| / (1 - |r_n|)``, and
    ``sum_{n>N} 1/|x_n| <= 1/(|x_N| (alpha - 1))`` because |x_{n+1}| > alpha |x_n|.
    """
    if not zeros:
        raise InsufficientZerosError("no zeros supplied", required_zeros(params, float(tol or 1e-10)))
    prec = max(192, ctx.working_bits)
    with mp.workprec(prec):
        x = to_mpf(x, prec)
        if not x:
            return ErrorBoundedValue(mpf(1), mpf(0))
        u = unit_roundoff(prec)
        tail_sum = abs(x) * _tail_reciprocal_bound(zeros, params)
        if tail_sum >= mpf(0.5):
            raise InsufficientZerosError(
                f"|x| = {mpmath.nstr(abs(x), 5)} is not small against the last zero",
                required_zeros(params, 0.5, float(abs(x)) + 1),
            )
        L = tail_sum / (1 - tail_sum)
        if tol is not None and L > mpf(tol):
            need = required_zeros(params, float(tol), float(abs(x)) + 1e-300)
            raise InsufficientZerosError(
                f"tail bound {mpmath.nstr(L, 3)} exceeds tol {tol}; need about {need} zeros", need
            )
        p = mpf(1)
        rel = mpf(0)
        for z in zeros:
            r = x / z.x.value
            factor = 1 - r
            p *= factor
            # relative error of the factor from the zero's uncertainty and rounding
            dz = abs(r) * z.x.abs_err / (abs(z.x.value) - z.x.abs_err)
            if factor:
                rel += (dz + 3 * u * abs(r)) / abs(factor) + u
        round_err = abs(p) * rel * (1 + rel) * 2
        tail_err = abs(p) * (mpmath.expm1(L))
    return ErrorBoundedValue(p, round_err + tail_err)


@dataclass(frozen=True)
class SymmetricSumResult:
    order: int
    lhs: ErrorBoundedValue
    rhs: mpf
    conclusive: bool
    required_n: int | None = None

    @property
    def agree(self) -> bool:
        return self.conclusive and self.lhs.contains(self.rhs)

    @property
    def verdict(self) -> str:
        if not self.conclusive:
            return "inconclusive"
        return "pass" if self.agree else "fail"


def symmetric_sum_check(
    zeros, order: int, params: Params, width_tol: float = 1e-12, min_zeros: int = 40
) -> SymmetricSumResult:
    """Elementary symmetric sums of 1/x_n against the Taylor coefficients of f.

    order 1: sum 1/x_n = -1.  order 2: sum_{i<j} 1/(x_i x_j) = q/2.
    With ``T = sum_{n>N} 1/x_n`` in ``[-tau, 0]``, the order-2 sum lies in
    ``[e2_N, e2_N + |S_N| tau + tau**2/2]``.
    """
    if order not in (1, 2):
        raise ValueError("order must be 1 or 2")
    prec = 256
    with mp.workprec(prec):
        u = unit_roundoff(prec)
        rhs = mpf(-1) if order == 1 else params.q_mpf(prec) / 2
        if not zeros:
            return SymmetricSumResult(order, ErrorBoundedValue(mpf(0), mpf(1)), rhs, False,
                                      required_zeros(params, width_tol))
        S = mpf(0)
        S2 = mpf(0)
        S_err = mpf(0)
        S2_err = mpf(0)
        for z in zeros:
            v = z.x.value
            rel = z.x.abs_err / (abs(v) - z.x.abs_err) + 2 * u
            r = 1 / v
            S += r
            S2 += r * r
            S_err += abs(r) * rel + abs(S) * u
            S2_err += r * r * (2 * rel + 2 * u) + S2 * u
        tau = _tail_reciprocal_bound(zeros, params)
        if order == 1:
            # S + T with T in [-tau, 0]
            lhs = ErrorBoundedValue(S - tau / 2, S_err + tau / 2)
        else:
            e2 = (S * S - S2) / 2
            e2_err = (2 * abs(S) * S_err + S_err**2 + S2_err) / 2 + abs(e2) * 2 * u
            width = abs(S) * tau + S_err * tau + tau * tau / 2
            lhs = ErrorBoundedValue(e2 + width / 2, e2_err + width / 2)
    conclusive = len(zeros) >= min_zeros and 2 * lhs.abs_err <= width_tol
    required = None if conclusive else max(min_zeros, required_zeros(params, width_tol / 2))
    return SymmetricSumResult(order, lhs, rhs, conclusive, required)
