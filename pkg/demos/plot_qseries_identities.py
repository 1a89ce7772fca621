"""
The q-series behind the asymptotics
===================================

The constant g(q) enters through two theta-like sums,

    h(alpha) = sum (2j-1) (-1)^(j-1) alpha^(-j(j-1)/2),
    H(alpha) = sum j(j-1)(2j-1)/6 (-1)^j alpha^(-j(j-1)/2),

with h equal to prod (1 - alpha^-k)^3 (Jacobi) and H/h equal to
sum k/(alpha^k - 1) = g(1/alpha) (Lambert).
"""

from mpmath import mp, mpf, nstr

from defexp import H_series, Params, g_lambert, g_series, h_product, h_series, make_context, partial_ratios

ctx = make_context(40)
tol = mpf(10) ** -40

for a in ["1.25", "2", "4", "10"]:
    p = Params.from_alpha(a)
    hs, hp = h_series(p, tol, ctx), h_product(p, tol, ctx)
    gs, gl = g_series(p, tol, ctx), g_lambert(p, tol, ctx)
    with mp.workprec(300):
        ratio = H_series(p, tol, ctx) / hs
    print(f"alpha = {a:>4}:  h = {nstr(hs.value, 20):<24} product agrees: {hs.overlaps(hp)}")
    print(f"{'':13}g = {nstr(gs.value, 20):<24} Lambert agrees: {gs.overlaps(gl)}   H/h = {nstr(ratio.value, 20)}")

###############################################################################
# Partial sums: the odd- and even-indexed ratios H_m/h_m close in on H/h
# from opposite sides once m is past a small threshold.

pr = partial_ratios(Params.from_alpha("2"), 21, ctx)
print("\nthreshold:", pr.threshold)
for row in pr.rows[:9]:
    r = "undefined (h_m <= 0)" if row.ratio is None else nstr(row.ratio.value, 15)
    print(f"  m={row.m:<2} H_m/h_m = {r}")
