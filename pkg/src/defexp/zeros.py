"""Real zeros x_1 > x_2 > ... of the deformed exponential.

Each zero is bracketed, narrowed by bisection, polished by Newton steps with
f'(x) = f(qx), and finally certified by a sign change across
``x -+ |x| 2**-tol_bits``, which is the error bound stored on the record.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import NamedTuple

import mpmath
from mpmath import mp, mpf

from .arith import (
    DefExpError,
    ErrorBoundedValue,
    Params,
    PrecisionContext,
    max_term_exponent,
)
from .qseries import lambda0
from .series import eval_f, eval_f_prime

FORMAT_VERSION = 1
DEFAULT_TOL_BITS = 128
MAX_NEWTON_ITERS = 200
SCAN_STEPS = 64


class EnumerationError(DefExpError):
    """No sign change could be located for a zero."""


class RefinementError(DefExpError):
    """Newton refinement failed to converge inside its bracket."""


class IntegrityError(DefExpError):
    """Computed zeros violate the interlacing x_{n+1} < alpha x_n < x_n < 0."""


class CacheError(DefExpError):
    """A zero cache file is malformed or belongs to other parameters."""


@dataclass(frozen=True)
class ZeroRecord:
    n: int
    x: ErrorBoundedValue
    bracket_lo: mpf
    bracket_hi: mpf
    residual: ErrorBoundedValue
    working_bits_used: int
    newton_iters: int
    bracket_source: str = "scan"


class Bracket(NamedTuple):
    lo: mpf
    hi: mpf
    source: str


def _signed(x, params, ctx) -> tuple[int, ErrorBoundedValue]:
    r = eval_f(x, params, ctx).result
    return (r.sign() if r.is_significant(4) else 0), r


@lru_cache(maxsize=32)
def _lambda0_approx(params: Params) -> mpf:
    return lambda0(params, PrecisionContext(-64, 128)).value


def theorem_interval(n: int, params: Params, prec: int) -> tuple[mpf, mpf, mpf]:
    """``(-(n + lam0/n) alpha**(n-1), -n alpha**(n-1))`` and ``lam0``."""
    lam = _lambda0_approx(params)
    with mp.workprec(prec):
        base = params.alpha_mpf(prec) ** (n - 1)
        return -(n + lam / n) * base, -n * base, lam


def bracket_zero(n: int, params: Params, ctx: PrecisionContext, prev: ZeroRecord | None = None) -> Bracket:
    """Sign-change bracket for the n-th zero.

    For n >= 2 the asymptotic interval around ``-n alpha**(n-1)``, widened by
    ``1 +- 2 lam0/n**2``, is tried first.  When it does not show the expected
    signs, or cannot be shown to sit between ``alpha**2 x_{n-1}`` and
    ``alpha x_{n-1}``, the fallback scans outward from the critical point
    ``alpha x_{n-1}`` (from -1 when n = 1) in steps of ``alpha**(1/8)``;
    the first sign change there is x_n.
    """
    if n < 1:
        raise ValueError(f"zero index must be >= 1, got {n}")
    if prev is not None and prev.n != n - 1:
        raise ValueError(f"prev must be the record of zero {n - 1}, got {prev.n}")
    sign_hi = 1 if n % 2 else -1  # f has sign (-1)**(n-1) on (x_n, x_{n-1})
    prec = ctx.working_bits + 64
    trace = []

    if n >= 2:
        lo, hi, lam = theorem_interval(n, params, prec)
        with mp.workprec(prec):
            widen = 2 * lam / n**2
            lo, hi = lo * (1 + widen), hi * (1 - widen)
            fits = widen < 1
            if fits and prev is not None:
                a_prev = params.scale(prev.x.value, 1)
                fits = params.scale(a_prev, 1) < lo and hi <= a_prev
        if fits:
            s_lo, _ = _signed(lo, params, ctx)
            s_hi, _ = _signed(hi, params, ctx)
            if s_hi == sign_hi and s_lo == -sign_hi:
                return Bracket(lo, hi, "theorem")
            trace.append(f"theorem interval signs ({s_lo}, {s_hi})")
        else:
            trace.append("theorem interval outside (alpha^2 x_{n-1}, alpha x_{n-1}]")

    if n == 1:
        start = mpf(-1)
    elif prev is None:
        raise EnumerationError(f"zero {n}: theorem interval failed and no previous zero to scan from; {trace}")
    else:
        with mp.workprec(prec):
            start = params.scale(prev.x.value, 1)
    s_start, _ = _signed(start, params, ctx)
    if s_start != sign_hi:
        raise EnumerationError(f"zero {n}: scan start {mpmath.nstr(start, 10)} has sign {s_start}")
    with mp.workprec(prec):
        step = mpmath.root(params.alpha_mpf(prec), 8)
        hi = start
        for i in range(SCAN_STEPS):
            lo = hi * step
            s_lo, _ = _signed(lo, params, ctx)
            trace.append((mpmath.nstr(lo, 8), s_lo))
            if s_lo == -sign_hi:
                return Bracket(lo, hi, "scan")
            if s_lo == sign_hi:
                hi = lo
    raise EnumerationError(f"zero {n}: no sign change in {SCAN_STEPS} scan steps; trace {trace}")


def refine_zero(
    bracket,
    n: int,
    params: Params,
    ctx: PrecisionContext,
    tol_bits: int = DEFAULT_TOL_BITS,
) -> ZeroRecord:
    """Bisect to relative width 2**-20, then Newton to relative step 2**-tol_bits.

    Newton iterates that leave the current bracket are replaced by a
    bisection step; the bracket shrinks whenever f(x) has a decided sign.
    """
    lo, hi = bracket[0], bracket[1]
    source = bracket[2] if len(bracket) > 2 else "scan"
    if ctx.target_abs_exp > -(tol_bits + 32):
        ctx = ctx.extended(-(tol_bits + 32) - ctx.target_abs_exp)
    xbits = max(ctx.working_bits, tol_bits + ctx.guard_bits)
    bits_used = 0

    def f(x):
        nonlocal bits_used
        sv = eval_f(x, params, ctx)
        bits_used = max(bits_used, sv.working_bits)
        r = sv.result
        return (r.sign() if r.is_significant(4) else 0), r

    s_lo, _ = f(lo)
    s_hi, _ = f(hi)
    if s_lo == 0 or s_hi == 0 or s_lo == s_hi:
        raise RefinementError(f"zero {n}: [{mpmath.nstr(lo, 10)}, {mpmath.nstr(hi, 10)}] is not a sign-change bracket")

    with mp.workprec(xbits):
        rel20 = mpmath.ldexp(mpf(1), -20)
        x = (lo + hi) / 2
        while hi - lo > abs(x) * rel20:
            s, _ = f(x)
            if s == 0:
                break
            if s == s_lo:
                lo = x
            else:
                hi = x
            x = (lo + hi) / 2

        eps = mpmath.ldexp(mpf(1), -tol_bits)
        iters = 0
        trace = []
        while True:
            iters += 1
            if iters > MAX_NEWTON_ITERS:
                raise RefinementError(
                    f"zero {n}: Newton did not converge in {MAX_NEWTON_ITERS} steps; "
                    f"bracket [{mpmath.nstr(lo, 20)}, {mpmath.nstr(hi, 20)}]; last steps {trace[-5:]}"
                )
            s, fx = f(x)
            if s == s_lo:
                lo = x
            elif s == -s_lo:
                hi = x
            dfx = eval_f_prime(x, params, ctx).result
            if dfx.value:
                step = fx.value / dfx.value
                x_new = x - step
            else:
                step, x_new = None, hi
            trace.append(mpmath.nstr(step, 5) if step is not None else "-")
            if not lo < x_new < hi:
                x_new = (lo + hi) / 2
                step = None
            if step is not None and abs(step) < abs(x) * eps:
                x = x_new
                break
            x = x_new

        # certify: the root lies within |x| 2**-tol_bits of x
        delta = abs(x) * eps
        for _ in range(8):
            a, b = x - delta, x + delta
            sa, _ = f(a)
            sb, _ = f(b)
            if sa == s_lo and sb == s_hi:
                break
            delta *= 256
        else:
            raise RefinementError(f"zero {n}: no certified sign change around {mpmath.nstr(x, 30)}")

    _, fx = f(x)
    return ZeroRecord(
        n=n,
        x=ErrorBoundedValue(x, delta),
        bracket_lo=a,
        bracket_hi=b,
        residual=ErrorBoundedValue(abs(fx.value), fx.abs_err),
        working_bits_used=bits_used,
        newton_iters=iters,
        bracket_source=source,
    )


def check_interlacing(records, params: Params) -> None:
    """Raise :class:`IntegrityError` unless x_{n+1} < alpha x_n < x_n < 0 holds exactly.

    Comparisons multiply through by the numerator and denominator of alpha,
    so no rounding enters.
    """
    num, den = params.alpha.numerator, params.alpha.denominator
    for i, rec in enumerate(records):
        if rec.n != i + 1:
            raise IntegrityError(f"records are not contiguous: position {i} holds zero {rec.n}")
        if not rec.x.value < 0:
            raise IntegrityError(f"zero {rec.n} is not negative")
        if not rec.bracket_lo < rec.x.value < rec.bracket_hi < 0:
            raise IntegrityError(f"zero {rec.n} lies outside its bracket")
    for a, b in zip(records, records[1:]):
        ax = mpmath.fmul(a.x.value, num, exact=True)
        bx = mpmath.fmul(b.x.value, den, exact=True)
        if not bx < ax:
            raise IntegrityError(f"x_{b.n} < alpha x_{a.n} fails")


def enumerate_zeros(
    n_max: int,
    params: Params,
    ctx: PrecisionContext,
    tol_bits: int = DEFAULT_TOL_BITS,
    known=None,
) -> list[ZeroRecord]:
    """Zeros 1..n_max in order, reusing any leading ``known`` records."""
    if n_max < 1:
        raise ValueError(f"n_max must be >= 1, got {n_max}")
    records = list(known or [])[:n_max]
    check_interlacing(records, params)
    while len(records) < n_max:
        n = len(records) + 1
        prev = records[-1] if records else None
        br = bracket_zero(n, params, ctx, prev)
        records.append(refine_zero(br, n, params, ctx, tol_bits))
    check_interlacing(records, params)
    return records


def residual_scale_ok(rec: ZeroRecord, params: Params, tol_bits: int) -> bool:
    """|f(x_n)| <= 2**(max_term_exponent(|x_n|) - tol_bits)."""
    limit = mpmath.ldexp(mpf(1), max_term_exponent(abs(rec.x.value), params) - tol_bits)
    return rec.residual.value <= limit


# ---------------------------------------------------------------- cache ----


def to_hex(x: mpf) -> str:
    """Exact text form ``[-]0x<mantissa>p<exponent>``."""
    if not isinstance(x, mpf):
        x = mpf(x)
    # man_exp drops the sign, so read it from the raw tuple
    neg, man, exp, _ = x._mpf_
    if not man:
        return "0x0p0"
    return f"{'-' if neg else ''}0x{int(man):x}p{int(exp)}"


def from_hex(text: str) -> mpf:
    try:
        body = text.strip()
        neg = body.startswith("-")
        body = body.lstrip("-")
        if not body.startswith("0x"):
            raise ValueError
        man_s, exp_s = body[2:].split("p")
        man, exp = int(man_s, 16), int(exp_s)
    except ValueError:
        raise CacheError(f"malformed hex number {text!r}") from None
    with mp.workprec(max(man.bit_length(), 53)):
        return mpmath.ldexp(mpf(-man if neg else man), exp)


@dataclass
class ZeroCache:
    q_decimal: str
    working_bits: int
    tol_bits: int = DEFAULT_TOL_BITS
    records: list = field(default_factory=list)
    format_version: int = FORMAT_VERSION

    def matches(self, params: Params, ctx: PrecisionContext | None = None) -> bool:
        if self.q_decimal != params.fingerprint():
            return False
        return ctx is None or ctx.working_bits == self.working_bits


def _record_to_json(rec: ZeroRecord) -> dict:
    return {
        "n": rec.n,
        "x_hex": to_hex(rec.x.value),
        "x_dec": mpmath.nstr(rec.x.value, 40),
        "err_hex": to_hex(rec.x.abs_err),
        "lo_hex": to_hex(rec.bracket_lo),
        "hi_hex": to_hex(rec.bracket_hi),
        "residual_dec": mpmath.nstr(rec.residual.value, 10),
        "residual_hex": to_hex(rec.residual.value),
        "residual_err_hex": to_hex(rec.residual.abs_err),
        "newton_iters": rec.newton_iters,
        "working_bits_used": rec.working_bits_used,
        "bracket_source": rec.bracket_source,
    }


def _record_from_json(d: dict) -> ZeroRecord:
    return ZeroRecord(
        n=int(d["n"]),
        x=ErrorBoundedValue(from_hex(d["x_hex"]), from_hex(d["err_hex"])),
        bracket_lo=from_hex(d["lo_hex"]),
        bracket_hi=from_hex(d["hi_hex"]),
        residual=ErrorBoundedValue(from_hex(d["residual_hex"]), from_hex(d["residual_err_hex"])),
        working_bits_used=int(d["working_bits_used"]),
        newton_iters=int(d["newton_iters"]),
        bracket_source=str(d["bracket_source"]),
    )


def save_cache(cache: ZeroCache, path) -> None:
    doc = {
        "format_version": cache.format_version,
        "q_decimal": cache.q_decimal,
        "working_bits": cache.working_bits,
        "tol_bits": cache.tol_bits,
        "records": [_record_to_json(r) for r in cache.records],
    }
    Path(path).write_text(json.dumps(doc, indent=1) + "\n")


def load_cache(path, params: Params, ctx: PrecisionContext | None = None) -> ZeroCache:
    """Read a cache file; reject it unless q (and the working bits, if ``ctx`` is given) match."""
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise CacheError(f"{path}: not valid JSON ({exc})") from None
    if not isinstance(doc, dict):
        raise CacheError(f"{path}: top level must be an object")
    if "format_version" not in doc:
        raise CacheError(f"{path}: missing format_version")
    if doc["format_version"] != FORMAT_VERSION:
        raise CacheError(f"{path}: unsupported format_version {doc['format_version']}")
    try:
        cache = ZeroCache(
            q_decimal=str(doc["q_decimal"]),
            working_bits=int(doc["working_bits"]),
            tol_bits=int(doc.get("tol_bits", DEFAULT_TOL_BITS)),
            records=[_record_from_json(r) for r in doc["records"]],
            format_version=doc["format_version"],
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise CacheError(f"{path}: malformed cache ({exc!r})") from None
    if cache.q_decimal != params.fingerprint():
        raise CacheError(f"{path}: cache is for q = {cache.q_decimal}, not q = {params.fingerprint()}")
    if ctx is not None and cache.working_bits != ctx.working_bits:
        raise CacheError(
            f"{path}: cache computed at {cache.working_bits} working bits, requested {ctx.working_bits}"
        )
    for i, rec in enumerate(cache.records):
        if rec.n != i + 1:
            raise CacheError(f"{path}: records not indexed 1..n contiguously")
    try:
        check_interlacing(cache.records, params)
    except IntegrityError as exc:
        raise CacheError(f"{path}: {exc}") from None
    return cache
