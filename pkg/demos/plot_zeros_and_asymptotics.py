"""
Zeros of f and their asymptotics
================================

For 0 < q < 1 the zeros of f are real, negative and simple.  With
alpha = 1/q they behave like x_n = -(n + theta_n) alpha^(n-1), where
n theta_n tends to g(q) = sum sigma(k) q^k.
"""

from mpmath import nstr

from defexp import Params, enumerate_zeros, g_series, make_context
from defexp.analysis import asymptotic_table, ratio_table

ctx = make_context(50)

###############################################################################
# Enumerate the first 30 zeros.  Early zeros are found by scanning outward
# from the previous critical point; later ones come straight from the
# asymptotic bracket.

params = Params.from_q("0.5")
zeros = enumerate_zeros(30, params, ctx)
for z in zeros[:5] + zeros[-3:]:
    print(f"x_{z.n:<2} = {nstr(z.x.value, 30):>40}  ({z.bracket_source}, {z.newton_iters} Newton steps)")
first_theorem = next(z.n for z in zeros if z.bracket_source == "theorem")
print("asymptotic bracket first used at n =", first_theorem)

###############################################################################
# s_n = n theta_n creeps toward g(q).  Convergence is slow: the gap
# shrinks roughly like 1/n.

for q in ["0.3", "0.5", "0.7"]:
    p = Params.from_q(q)
    rows = asymptotic_table(enumerate_zeros(30, p, ctx), p, ctx)
    g = g_series(p, None, ctx).value
    print(f"\nq = {q}: g(q) = {nstr(g, 12)}")
    for r in rows[4::5]:
        print(f"  n={r.n:<3} s_n = {nstr(r.s_n, 10):<14} |s_n - g|/g = {nstr(r.discrepancy / g, 4)}")

###############################################################################
# Consecutive zeros satisfy x_{n+1}/x_n = alpha (1 + 1/n) + o(1/n^2); the
# scaled defect below drifts toward zero.

defects = ratio_table(zeros, params)
print("\nn^2 (x_{n+1}/(alpha x_n) - 1 - 1/n):")
print("  ", ", ".join(f"{n + 1}: {nstr(d, 4)}" for n, d in enumerate(defects) if (n + 1) % 5 == 0))
