"""
Product form, symmetric sums and the size of the extrema
========================================================

f has order zero, so f(x) = prod (1 - x/x_n).  Matching Taylor
coefficients gives sum 1/x_n = -1 and sum_{i<j} 1/(x_i x_j) = q/2.
Between zeros f has extrema at x_n/q whose size grows like
q^(-n(n+1)/2) e^n n^(-3/2).
"""

from mpmath import mpf, nstr

from defexp import Params, enumerate_zeros, eval_f, make_context, product_eval
from defexp.analysis import amplitude_band, amplitude_table, symmetric_sum_check

params = Params.from_q("0.5")
ctx = make_context(50)
zeros = enumerate_zeros(60, params, ctx)

###############################################################################
# The truncated product, with a rigorous bound on the omitted factors.

for x in ["-1", "-37.5", "-400"]:
    pe = product_eval(mpf(x), zeros, params, ctx)
    se = eval_f(mpf(x), params, ctx)
    print(f"x = {x:>6}: product {nstr(pe.value, 18):<24} +- {nstr(pe.abs_err, 2):<8} series {nstr(se.value, 18)}")

###############################################################################
# Symmetric sums of the reciprocals, tails included.

for order in (1, 2):
    res = symmetric_sum_check(zeros, order, params)
    print(f"order {order}: [{nstr(res.lhs.lo, 22)}, {nstr(res.lhs.hi, 22)}] vs {nstr(res.rhs, 5)} -> {res.verdict}")

###############################################################################
# The normalised amplitudes C_n stay in a narrow band.

rows = amplitude_table(zeros[:25], params, ctx)
for r in rows[::4]:
    print(f"n={r.n:<3} f(x_n/q) sign {r.sign:+d}   C_n = {nstr(r.C_n, 8)}")
lo, hi, spread = amplitude_band(rows, 5, 25)
print(f"C_n over n = 5..25 lies in [{nstr(lo, 6)}, {nstr(hi, 6)}], ratio {nstr(spread, 4)}")
