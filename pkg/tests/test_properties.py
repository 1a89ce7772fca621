"""Randomised checks of the invariants that hold for every input."""

import math
from fractions import Fraction

import mpmath
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st
from mpmath import mp, mpf

import oracles
from defexp.arith import ErrorBoundedValue, Params, make_context, max_term_exponent
from defexp.qseries import g_lambert, g_series, h_product, h_series, sigma
from defexp.series import eval_f, truncated_coefficients
from defexp.zeros import from_hex, to_hex

CTX = make_context(30)
FAST = settings(max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow])

q_strings = st.integers(min_value=5, max_value=95).map(lambda k: f"0.{k:02d}".rstrip("0"))
rationals = st.fractions(min_value=-1000, max_value=1000, max_denominator=10**6)


def as_mpf(fr: Fraction, prec: int = 400) -> mpf:
    with mp.workprec(prec):
        return mpf(fr.numerator) / fr.denominator


@settings(max_examples=25, deadline=None)
@given(a=rationals, b=rationals, ea=st.integers(1, 60), eb=st.integers(1, 60),
       op=st.sampled_from(["+", "-", "*", "/"]))
def test_enclosure_arithmetic(a, b, ea, eb, op):
    """An operation on two enclosures contains the exact result of every pair of enclosed points."""
    if op == "/" and abs(b) < Fraction(1, 10**3):
        return
    with mp.workprec(70):
        A = ErrorBoundedValue(mpf(a.numerator) / a.denominator, mpmath.ldexp(1, -ea))
        B = ErrorBoundedValue(mpf(b.numerator) / b.denominator, mpmath.ldexp(1, -eb))
        if op == "/" and not abs(B.value) > B.abs_err:
            return
        R = {"+": A.__add__, "-": A.__sub__, "*": A.__mul__, "/": A.__truediv__}[op](B)
    with mp.workprec(600):
        for sa in (-1, 0, 1):
            for sb in (-1, 0, 1):
                x = A.value + sa * A.abs_err
                y = B.value + sb * B.abs_err
                exact = {"+": lambda: x + y, "-": lambda: x - y, "*": lambda: x * y, "/": lambda: x / y}[op]()
                assert R.contains(exact)


@FAST
@given(q=q_strings, x=st.decimals(min_value=-300, max_value=40, places=3, allow_nan=False))
def test_eval_encloses_direct_sum(q, x):
    with mp.workprec(300):
        xv = mpf(str(x))
    sv = eval_f(xv, Params.from_q(q), CTX)
    assert sv.result.contains(oracles.f_direct(str(x), q, prec=900))
    assert sv.abs_err <= CTX.tol
    assert sv.terms_used >= 1 and sv.cancellation_bits >= 0


@FAST
@given(q=q_strings, e=st.integers(-20, 60), m=st.floats(1, 2))
def test_max_term_over_approximates(q, e, m):
    x_mag = mpf(m) * mpf(2) ** e
    assert max_term_exponent(x_mag, Params.from_q(q)) >= oracles.max_log2_term(x_mag, q, 600)


@FAST
@given(q=st.fractions(min_value=Fraction(1, 100), max_value=Fraction(99, 100), max_denominator=1000),
       order=st.integers(2, 30))
def test_derivative_identity_exact(q, order):
    c = truncated_coefficients(order + 1, q)
    assert all((n + 1) * c[n + 1] == c[n] * q**n for n in range(order))


@settings(max_examples=200, deadline=None)
@given(a=st.integers(1, 10**5), b=st.integers(1, 10**5))
def test_sigma_multiplicative(a, b):
    if math.gcd(a, b) == 1:
        assert sigma(a * b) == sigma(a) * sigma(b)
    assert sigma(a) >= a + (1 if a > 1 else 0)


@FAST
@given(q=q_strings)
def test_identities_for_random_q(q):
    p = Params.from_q(q)
    tol = mpf(10) ** -30
    assert g_series(p, tol, CTX).overlaps(g_lambert(p, tol, CTX))
    assert h_series(p, tol, CTX).overlaps(h_product(p, tol, CTX))


@settings(max_examples=100, deadline=None)
@given(man=st.integers(-(2**300), 2**300), exp=st.integers(-5000, 5000))
def test_hex_round_trip(man, exp):
    with mp.workprec(320):
        x = mpmath.ldexp(mpf(man), exp)
    assert from_hex(to_hex(x)) == x


@FAST
@given(q=q_strings)
def test_params_fingerprint_round_trip(q):
    p = Params.from_q(q)
    assert Params.from_q(p.fingerprint()) == p
    assert p.q * p.alpha == 1
