"""Verification suites: each runs one family of checks and fills a report."""

from __future__ import annotations

import random
import time
from pathlib import Path

from mpmath import mp, mpf

from . import baselines
from .analysis import (
    amplitude_band,
    amplitude_table,
    asymptotic_table,
    product_eval,
    ratio_table,
    sign_lemma_check,
    symmetric_sum_check,
)
from .arith import DomainError, Params, PrecisionContext
from .qseries import (
    H_series,
    euler_product,
    g_lambert,
    g_series,
    h_product,
    h_series,
    lambda0,
    partial_ratios,
)
from .report import VerificationReport, fmt
from .series import eval_f
from .zeros import (
    DEFAULT_TOL_BITS,
    IntegrityError,
    ZeroCache,
    check_interlacing,
    enumerate_zeros,
    load_cache,
    save_cache,
)

SUITES = (
    "jacobi",
    "lambert",
    "interleaving",
    "asymptotic",
    "ratio",
    "amplitude",
    "sign-lemma",
    "product",
    "symmetric",
)

SYMMETRIC_ZEROS = 60
INTERLEAVING_M = 20
AMPLITUDE_RANGE = (5, 25)
SIGN_LEMMA_RANGE = (15, 25)


class ZeroSource:
    """Enumerates zeros on demand, reusing earlier results and an optional cache file."""

    def __init__(self, params: Params, ctx: PrecisionContext, cache_path=None, tol_bits=DEFAULT_TOL_BITS):
        self.params = params
        self.ctx = ctx
        self.tol_bits = tol_bits
        self.cache_path = Path(cache_path) if cache_path else None
        self.records = []
        self.reused = 0
        if self.cache_path and self.cache_path.exists():
            cache = load_cache(self.cache_path, params, ctx)
            self.records = cache.records
            self.reused = len(self.records)

    def get(self, n_max: int) -> list:
        if len(self.records) < n_max:
            self.records = enumerate_zeros(n_max, self.params, self.ctx, self.tol_bits, known=self.records)
            if self.cache_path:
                cache = ZeroCache(self.params.fingerprint(), self.ctx.working_bits, self.tol_bits, self.records)
                save_cache(cache, self.cache_path)
        return self.records[:n_max]


def _verdict(ok: bool) -> str:
    return "pass" if ok else "fail"


def suite_jacobi(params, ctx, tol, digits, zeros=None, n_max=None) -> VerificationReport:
    rep = VerificationReport("jacobi", params.fingerprint())
    hs = h_series(params, tol, ctx)
    hp = h_product(params, tol, ctx)
    bound = hs.abs_err + hp.abs_err
    rep.add("h_series = h_product", _verdict(hs.overlaps(hp)),
            value=fmt(hs, digits), reference=fmt(hp, digits), bound=fmt(bound, 3))
    phi = euler_product(params, "-", tol, ctx)
    with mp.workprec(ctx.bits_for_tol(tol) + 16):
        cube = phi * phi * phi
    rep.add("phi^3 = h", _verdict(cube.overlaps(hs)), value=fmt(cube, digits), reference=fmt(hs, digits),
            bound=fmt(cube.abs_err + hs.abs_err, 3))
    H = H_series(params, tol, ctx)
    rep.add("h > 0", _verdict(hs.sign() > 0), value=fmt(hs, digits))
    rep.add("H > 0", _verdict(H.sign() > 0), value=fmt(H, digits))
    return rep


def suite_lambert(params, ctx, tol, digits, zeros=None, n_max=None) -> VerificationReport:
    rep = VerificationReport("lambert", params.fingerprint())
    gl = g_lambert(params, tol, ctx)
    try:
        gs = g_series(params, tol, ctx)
    except DomainError as exc:
        rep.add("g_series = g_lambert", "skipped", value=str(exc))
        gs = None
    else:
        bound = gs.abs_err + gl.abs_err
        rep.add("g_series = g_lambert", _verdict(gs.overlaps(gl)),
                value=fmt(gs, digits), reference=fmt(gl, digits), bound=fmt(bound, 3))
    h = h_series(params, tol / 4, ctx)
    H = H_series(params, tol / 4, ctx)
    with mp.workprec(ctx.bits_for_tol(tol) + 16):
        hg = h * gl
        lam = lambda0(params, ctx, tol)
        lam_ref = 1 + gl
    rep.add("H = h * g_lambert", _verdict(H.overlaps(hg)), value=fmt(H, digits), reference=fmt(hg, digits),
            bound=fmt(H.abs_err + hg.abs_err, 3))
    rep.add("lambda0 = 1 + g", _verdict(lam.overlaps(lam_ref)), value=fmt(lam, digits),
            reference=fmt(lam_ref, digits), bound=fmt(lam.abs_err + lam_ref.abs_err, 3))
    rep.add("lambda0 > 1", _verdict(lam.lo > 1), value=fmt(lam, digits))
    return rep


def suite_interleaving(params, ctx, tol, digits, zeros=None, n_max=None) -> VerificationReport:
    rep = VerificationReport("interleaving", params.fingerprint())
    m_top = INTERLEAVING_M
    pr = partial_ratios(params, 2 * m_top + 1, ctx)
    if pr.threshold is None:
        rep.add("chain threshold", "fail", value="chain fails at m = 20")
        return rep
    rep.add("chain threshold", "pass", value=str(pr.threshold))
    for m in range(pr.threshold + 1, m_top + 1):
        rep.add("H/h partial-ratio chain", _verdict(pr.chain_holds(m)), n=m,
                value=fmt(pr.ratio(2 * m + 1), digits))
    h = h_series(params, tol, ctx)
    H = H_series(params, tol, ctx)
    with mp.workprec(ctx.bits_for_tol(tol) + 16):
        limit = H / h
        gap = max(abs(pr.ratio(2 * m_top).value - limit.value), abs(pr.ratio(2 * m_top + 1).value - limit.value))
    rep.add("ratios converge to H/h", _verdict(gap < mpf("1e-20")), n=2 * m_top + 1,
            value=fmt(gap, 3), reference=fmt(limit, digits), bound="1e-20")
    return rep


def suite_asymptotic(params, ctx, tol, digits, zeros, n_max) -> VerificationReport:
    rep = VerificationReport("asymptotic", params.fingerprint())
    zs = zeros.get(n_max)
    rows = asymptotic_table(zs, params, ctx)
    g = g_series(params, None, ctx).value
    try:
        check_interlacing(zs, params)
        verdict = "pass"
    except IntegrityError:
        verdict = "fail"
    rep.add("interlacing x_{n+1} < alpha x_n < x_n < 0", verdict, n=n_max)
    d8 = rows[7].discrepancy if len(rows) >= 8 else None
    for r in rows:
        if d8 is not None and r.n > 8:
            verdict = _verdict(r.discrepancy < d8)
            bound = fmt(d8, 6)
        else:
            verdict, bound = "pass", ""
        rep.add("s_n = n theta_n vs g(q)", verdict, n=r.n, value=fmt(r.s_n, 12), reference=fmt(g, 12), bound=bound)
    last = rows[-1]
    if d8 is not None and last.n > 8:
        rep.add("|s_N - g| < |s_8 - g|", _verdict(last.discrepancy < d8), n=last.n,
                value=fmt(last.discrepancy, 6), bound=fmt(d8, 6))
    if last.n >= 30:
        d30 = rows[29].discrepancy
        rep.add("|s_30 - g| / g < 0.15", _verdict(d30 / g < mpf("0.15")), n=30, value=fmt(d30 / g, 6), bound="0.15")
        base = baselines.S30_DISCREPANCY.get(params.fingerprint())
        if base is not None:
            base = mpf(base)
            ok = abs(d30 - base) <= baselines.BASELINE_RTOL * base
            rep.add("|s_30 - g| regression baseline", _verdict(ok), n=30, value=fmt(d30, 10),
                    reference=fmt(base, 10), bound=f"{baselines.BASELINE_RTOL:.0%}")
    return rep


def suite_ratio(params, ctx, tol, digits, zeros, n_max) -> VerificationReport:
    rep = VerificationReport("ratio", params.fingerprint())
    zs = zeros.get(n_max)
    defects = ratio_table(zs, params)
    num, den = params.alpha.numerator, params.alpha.denominator
    for a, b, d in zip(zs, zs[1:], defects):
        ok = b.x.value * den < a.x.value * num
        rep.add("x_{n+1} < alpha x_n", _verdict(ok), n=a.n, value=fmt(d, 8))
    for n in (5, 10):
        if 2 * n <= len(defects):
            ok = abs(defects[2 * n - 1]) < abs(defects[n - 1])
            rep.add("|defect_2n| < |defect_n|", _verdict(ok), n=n,
                    value=fmt(defects[2 * n - 1], 8), reference=fmt(defects[n - 1], 8))
    if len(defects) >= 28:
        ok = abs(defects[27]) < abs(defects[7])
        rep.add("|defect_28| < |defect_8|", _verdict(ok), n=28, value=fmt(defects[27], 8),
                reference=fmt(defects[7], 8))
    return rep


def suite_amplitude(params, ctx, tol, digits, zeros, n_max) -> VerificationReport:
    rep = VerificationReport("amplitude", params.fingerprint())
    top = min(n_max, AMPLITUDE_RANGE[1])
    rows = amplitude_table(zeros.get(top), params, ctx)
    for r in rows:
        if r.skipped:
            rep.add("(-1)^n f(x_n/q) > 0", "skipped", n=r.n, value="precision cap")
            continue
        rep.add("(-1)^n f(x_n/q) > 0", _verdict(r.sign_ok), n=r.n, value=fmt(r.A_n, 10), bound=fmt(r.C_n, 8))
    lo_n, hi_n = AMPLITUDE_RANGE
    if top >= hi_n:
        lo, hi, spread = amplitude_band(rows, lo_n, hi_n)
        rep.add("C_n band max/min < 20", _verdict(spread < 20), n=f"{lo_n}-{hi_n}", value=fmt(spread, 6),
                reference=f"[{fmt(lo, 6)}, {fmt(hi, 6)}]", bound="20")
        base = baselines.AMPLITUDE_C.get(params.fingerprint())
        if base is not None:
            for r in rows:
                if lo_n <= r.n <= hi_n and r.n in base and not r.skipped:
                    ref = mpf(base[r.n])
                    ok = abs(r.C_n - ref) <= baselines.BASELINE_RTOL * ref
                    rep.add("C_n regression baseline", _verdict(ok), n=r.n, value=fmt(r.C_n, 10),
                            reference=fmt(ref, 10), bound=f"{baselines.BASELINE_RTOL:.0%}")
    return rep


def sign_lemma_threshold(params, ctx, lams, n_hi: int) -> int | None:
    """Smallest n0 such that the sign lemma agrees for every n0 <= n <= n_hi and every lambda."""
    n0 = None
    for n in range(n_hi, 0, -1):
        if all(sign_lemma_check(n, lam, params, ctx).agree for lam in lams):
            n0 = n
        else:
            break
    return n0


def suite_sign_lemma(params, ctx, tol, digits, zeros=None, n_max=None) -> VerificationReport:
    rep = VerificationReport("sign-lemma", params.fingerprint())
    lam0 = lambda0(params, ctx).value
    lams = (lam0 / 2, 2 * lam0)
    lo_n, hi_n = SIGN_LEMMA_RANGE
    for lam, label in zip(lams, ("lambda0/2", "2 lambda0")):
        for n in range(lo_n, hi_n + 1):
            res = sign_lemma_check(n, lam, params, ctx)
            verdict = "inconclusive" if not res.conclusive else _verdict(res.agree)
            rep.add(f"sign lemma, lambda = {label}", verdict, n=n, value=str(res.sign_observed),
                    reference=str(res.sign_predicted))
    n0 = sign_lemma_threshold(params, ctx, lams, hi_n)
    rep.add("empirical sign-lemma threshold", "pass" if n0 is not None else "inconclusive",
            value="" if n0 is None else str(n0))
    return rep


def suite_product(params, ctx, tol, digits, zeros, n_max) -> VerificationReport:
    rep = VerificationReport("product", params.fingerprint())
    zs = zeros.get(max(n_max, 8))
    rng = random.Random(20240607)
    x8 = zs[7].x.value
    with mp.workprec(ctx.working_bits):
        points = [x8 * mpf(rng.uniform(0.0, 1.0)) for _ in range(10)]
    for i, x in enumerate(points, 1):
        pe = product_eval(x, zs, params, ctx)
        se = eval_f(x, params, ctx).result
        rep.add("product = series", _verdict(pe.overlaps(se)), n=i, value=fmt(pe, digits),
                reference=fmt(se, digits), bound=fmt(pe.abs_err + se.abs_err, 3))
    return rep


def suite_symmetric(params, ctx, tol, digits, zeros, n_max) -> VerificationReport:
    rep = VerificationReport("symmetric", params.fingerprint())
    zs = zeros.get(max(n_max, SYMMETRIC_ZEROS))
    for order, label in ((1, "sum 1/x_n = -1"), (2, "e2(1/x_n) = q/2")):
        res = symmetric_sum_check(zs, order, params)
        rep.add(label, res.verdict, n=len(zs), value=fmt(res.lhs, 25), reference=fmt(res.rhs, 25),
                bound=fmt(res.lhs.abs_err, 3))
    return rep


_RUNNERS = {
    "jacobi": suite_jacobi,
    "lambert": suite_lambert,
    "interleaving": suite_interleaving,
    "asymptotic": suite_asymptotic,
    "ratio": suite_ratio,
    "amplitude": suite_amplitude,
    "sign-lemma": suite_sign_lemma,
    "product": suite_product,
    "symmetric": suite_symmetric,
}


def run_suite(name: str, params: Params, ctx: PrecisionContext, *, n_max: int = 30, digits: int = 50,
              tol=None, zeros: ZeroSource | None = None) -> VerificationReport:
    """Run one suite (or ``"all"``) and return its report with wall time filled in."""
    names = SUITES if name == "all" else (name,)
    for s in names:
        if s not in _RUNNERS:
            raise ValueError(f"unknown suite {s!r}")
    tol = ctx.tol if tol is None else mpf(tol)
    zeros = zeros or ZeroSource(params, ctx)
    report = VerificationReport(name, params.fingerprint())
    for s in names:
        t0 = time.perf_counter()
        part = _RUNNERS[s](params, ctx, tol, digits, zeros, n_max)
        part.wall_time = time.perf_counter() - t0
        report.extend(part)
    return report
