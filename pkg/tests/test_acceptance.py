"""Acceptance criteria, one test each, at their stated tolerances.

Each test carries a ``criterion`` marker; the terminal summary prints one
PASS/FAIL line per criterion (see conftest.py).
"""

import random
import subprocess
import sys
import time

import pytest
from mpmath import mp, mpf

from defexp import baselines
from defexp.analysis import (
    amplitude_band,
    amplitude_table,
    asymptotic_table,
    product_eval,
    ratio_table,
    sign_lemma_check,
    symmetric_sum_check,
)
from defexp.arith import Params, make_context
from defexp.qseries import H_series, g_lambert, g_series, h_product, h_series, lambda0, partial_ratios
from defexp.series import eval_f
from defexp.zeros import check_interlacing, enumerate_zeros, residual_scale_ok

ALPHAS = ["1.25", "2", "4", "10"]
QS = ["0.3", "0.5", "0.7"]
TOL40 = mpf(10) ** -40


@pytest.fixture(scope="module")
def ctx40():
    return make_context(40)


@pytest.mark.criterion(1, "Jacobi triple product, 40 digits, alpha in {1.25, 2, 4, 10}, < 1 s")
def test_jacobi_triple_product(ctx40, record_property):
    t0 = time.perf_counter()
    ok = []
    for a in ALPHAS:
        p = Params.from_alpha(a)
        ok.append(h_series(p, TOL40, ctx40).overlaps(h_product(p, TOL40, ctx40)))
    elapsed = time.perf_counter() - t0
    record_property("detail", f"agree {sum(ok)}/{len(ok)}, {elapsed:.3f} s")
    assert all(ok)
    assert elapsed < 1.0


@pytest.mark.criterion(2, "Lambert identity g_series(q) = g_lambert(1/q), q in {0.25, 0.5, 0.75}")
def test_lambert_identity(ctx40, record_property):
    ok = {}
    for q in ["0.25", "0.5", "0.75"]:
        p = Params.from_q(q)
        ok[q] = g_series(p, TOL40, ctx40).overlaps(g_lambert(Params.from_alpha(str(p.alpha)), TOL40, ctx40))
    record_property("detail", ", ".join(f"q={q}: {v}" for q, v in ok.items()))
    assert all(ok.values())


@pytest.mark.criterion(3, "H = h * g_lambert, alpha in {1.25, 2, 4, 10}")
def test_H_equals_h_times_g(ctx40, record_property):
    ok = []
    for a in ALPHAS:
        p = Params.from_alpha(a)
        with mp.workprec(300):
            hg = h_series(p, TOL40, ctx40) * g_lambert(p, TOL40, ctx40)
        ok.append(H_series(p, TOL40, ctx40).overlaps(hg))
    record_property("detail", f"agree {sum(ok)}/{len(ok)}")
    assert all(ok)


@pytest.mark.criterion(4, "30 zeros per q: exact interlacing, residual <= 2^-100 of peak scale, < 2 min")
def test_zero_enumeration(ctx50, record_property):
    notes = []
    for q in QS:
        p = Params.from_q(q)
        t0 = time.perf_counter()
        zs = enumerate_zeros(30, p, ctx50)
        elapsed = time.perf_counter() - t0
        check_interlacing(zs, p)
        residual_ok = all(residual_scale_ok(z, p, 100) for z in zs)
        notes.append(f"q={q}: {elapsed:.1f} s, residuals {'ok' if residual_ok else 'BAD'}")
        assert len(zs) == 30
        assert residual_ok
        assert elapsed < 120
    record_property("detail", "; ".join(notes))


@pytest.mark.criterion(5, "|s_30 - g| < |s_8 - g| and |s_30 - g|/g < 0.15 for q in {0.3, 0.5, 0.7}; baseline +-10%")
def test_theorem_convergence(ctx50, zero_lists, record_property):
    failures, notes = [], []
    for q in QS:
        p = Params.from_q(q)
        rows = asymptotic_table(zero_lists(q), p, ctx50)
        g = g_series(p, None, ctx50).value
        d8, d30 = rows[7].discrepancy, rows[29].discrepancy
        rel = d30 / g
        base = mpf(baselines.S30_DISCREPANCY[q])
        notes.append(f"q={q}: d30/g={float(rel):.4f}")
        if not d30 < d8:
            failures.append(f"q={q}: d30 >= d8")
        if not rel < mpf("0.15"):
            failures.append(f"q={q}: d30/g = {float(rel):.4f} >= 0.15")
        if not abs(d30 - base) <= baselines.BASELINE_RTOL * base:
            failures.append(f"q={q}: d30 = {float(d30):.6g} off baseline {float(base):.6g}")
    record_property("detail", "; ".join(notes))
    assert not failures, failures


@pytest.mark.criterion(6, "ratio defect n^2 (x_{n+1}/(alpha x_n) - 1 - 1/n) shrinks in magnitude, n = 8..28")
def test_ratio_law_trend(zero_lists, record_property):
    notes = []
    for q in QS:
        d = ratio_table(zero_lists(q), Params.from_q(q))
        mags = [abs(v) for v in d[7:28]]
        notes.append(f"q={q}: {float(d[7]):.4f} -> {float(d[27]):.4f}")
        assert mags[-1] < mags[0]
        assert all(b < a for a, b in zip(mags, mags[1:]))
    record_property("detail", "; ".join(notes))


@pytest.mark.criterion(7, "(-1)^n f(x_n/q) > 0 for n <= 25, each beyond 4x its error bound")
def test_extrema_alternate(ctx50, zero_lists, record_property):
    for q in QS:
        rows = amplitude_table(zero_lists(q, 25), Params.from_q(q), ctx50)
        assert len(rows) == 25
        assert all(r.sign_ok and r.A_n.is_significant(4) for r in rows), q
    record_property("detail", "q in {0.3, 0.5, 0.7}, n = 1..25")


@pytest.mark.criterion(8, "C_n band max/min < 20 over n in [5, 25], q = 0.5; baseline +-10%")
def test_amplitude_band(ctx50, zero_lists, half, record_property):
    rows = amplitude_table(zero_lists("0.5", 25), half, ctx50)
    lo, hi, spread = amplitude_band(rows, 5, 25)
    record_property("detail", f"max/min = {float(spread):.4f}")
    assert spread < 20
    base = baselines.AMPLITUDE_C["0.5"]
    for r in rows[4:25]:
        ref = mpf(base[r.n])
        assert abs(r.C_n - ref) <= baselines.BASELINE_RTOL * ref, r.n


@pytest.mark.criterion(9, "product over zeros = series at 10 random points in (x_8, 0), q = 0.5")
def test_product_factorization(ctx50, zero_lists, half, record_property):
    zs = zero_lists("0.5", 30)
    rng = random.Random(20240607)
    x8 = zs[7].x.value
    agree = 0
    for _ in range(10):
        with mp.workprec(ctx50.working_bits):
            x = x8 * mpf(rng.uniform(0.0, 1.0))
        agree += product_eval(x, zs, half, ctx50).overlaps(eval_f(x, half, ctx50).result)
    record_property("detail", f"agree {agree}/10")
    assert agree == 10


@pytest.mark.criterion(10, "symmetric sums over 60 zeros enclose -1 and q/2, q = 0.5")
def test_symmetric_sums(zero_lists, half, record_property):
    zs = zero_lists("0.5", 60)
    s1 = symmetric_sum_check(zs, 1, half)
    s2 = symmetric_sum_check(zs, 2, half)
    record_property("detail", f"widths {float(2 * s1.lhs.abs_err):.2e}, {float(2 * s2.lhs.abs_err):.2e}")
    assert s1.verdict == "pass" and s1.lhs.contains(-1)
    assert s2.verdict == "pass" and s2.lhs.contains(mpf("0.25"))


@pytest.mark.criterion(11, "sign lemma agrees for n in [15, 25], lambda in {lambda0/2, 2 lambda0}, q = 0.5")
def test_sign_lemma(ctx50, half, record_property):
    lam0 = lambda0(half, ctx50).value
    with mp.workprec(300):
        ratio = H_series(half, None, ctx50).value / h_series(half, None, ctx50).value
        lams = (lam0 / 2, 2 * lam0)
        assert lams[0] < ratio < lams[1]
    results = [sign_lemma_check(n, lam, half, ctx50) for lam in lams for n in range(15, 26)]
    agree = sum(r.agree for r in results)
    record_property("detail", f"agree {agree}/{len(results)}")
    assert agree == len(results)


@pytest.mark.criterion(12, "partial-ratio chain holds from the reported threshold to m = 20, alpha = 2")
def test_partial_ratio_chain(ctx50, record_property):
    pr = partial_ratios(Params.from_alpha("2"), 41, ctx50)
    record_property("detail", f"threshold N = {pr.threshold}, chain checked for N < m <= 20")
    assert pr.threshold is not None and pr.m_last == 20
    assert all(pr.chain_holds(m) for m in range(pr.threshold + 1, 21))


@pytest.mark.criterion(13, "`verify all --q 0.5` exits 0 in under 5 minutes")
def test_verify_all_end_to_end(record_property):
    t0 = time.perf_counter()
    res = subprocess.run(
        [sys.executable, "-m", "defexp", "verify", "all", "--q", "0.5", "--format", "csv"],
        capture_output=True, text=True, timeout=600,
    )
    elapsed = time.perf_counter() - t0
    record_property("detail", f"exit {res.returncode}, {elapsed:.1f} s")
    assert res.returncode == 0, res.stderr[-2000:]
    assert elapsed < 300
