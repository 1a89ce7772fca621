"""
Evaluating f on the negative axis
=================================

f(x) = sum x^n/n! q^(n(n-1)/2) is entire, but on the negative axis the
series alternates and its terms first grow enormously before they decay.
The evaluator raises its working precision to the size of the largest
term, so the absolute error stays at the requested level.
"""

from mpmath import mpf, nstr

from defexp import Params, eval_f, eval_f_prime, make_context, max_term_exponent

params = Params.from_q("0.5")
ctx = make_context(30)

###############################################################################
# Near the origin nothing dramatic happens.

for x in ["0", "-1", "-2", "3"]:
    sv = eval_f(mpf(x), params, ctx)
    print(f"f({x:>3}) = {nstr(sv.value, 25):>30}   +- {nstr(sv.abs_err, 3)}")

###############################################################################
# Further out the peak term is 2^hundreds, and nearly all of it cancels.
# ``cancellation_bits`` records how many bits were lost to that cancellation,
# and ``working_bits`` how many were carried to absorb it.

print(f"\n{'x':>12} {'peak bits':>10} {'cancelled':>10} {'working':>8}  f(x)")
for k in range(0, 41, 8):
    x = -mpf(2) ** k
    sv = eval_f(x, params, ctx)
    print(f"{nstr(x, 6):>12} {sv.peak_exponent:>10} {sv.cancellation_bits:>10} "
          f"{sv.working_bits:>8}  {nstr(sv.value, 12)}")

###############################################################################
# The precision rule is driven by this cheap estimate of the peak term.

print("\nmax_term_exponent(20 * 2^19) =", max_term_exponent(20 * 2**19, params))

###############################################################################
# f solves y'(x) = y(qx), so the derivative costs one more evaluation.

d = eval_f_prime(mpf(-1), params, ctx)
print("f'(-1) = f(-0.5) =", nstr(d.value, 25))
