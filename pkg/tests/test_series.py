from fractions import Fraction

import mpmath
import pytest
from mpmath import mp, mpf

import oracles
from defexp.arith import ConfigurationError, DomainError, Params, make_context, max_term_exponent
from defexp.qseries import lambda0
from defexp.series import eval_f, eval_f_prime, scaled_argument, term_table, truncated_coefficients


@pytest.fixture(scope="module")
def ctx():
    return make_context(40)


class TestEvalF:
    @pytest.mark.parametrize("q", ["0.1", "0.5", "0.9"])
    def test_origin_is_exact(self, q, ctx):
        sv = eval_f(mpf(0), Params.from_q(q), ctx)
        assert sv.value == 1 and sv.abs_err == 0
        assert sv.terms_used == 1

    def test_minus_one(self, half, ctx):
        sv = eval_f(mpf(-1), half, ctx)
        assert sv.value > 0
        assert sv.result.contains(oracles.f_direct(-1, "0.5"))
        assert sv.abs_err < ctx.tol

    def test_minus_two_is_negative(self, half, ctx):
        sv = eval_f(mpf(-2), half, ctx)
        assert sv.result.sign() == -1
        assert sv.result.contains(oracles.f_direct(-2, "0.5"))

    @pytest.mark.parametrize("q", ["0.3", "0.7"])
    @pytest.mark.parametrize("x", ["-0.75", "-37.5", "-4000.25", "12.5"])
    def test_matches_direct_sum(self, q, x, ctx):
        sv = eval_f(mpf(x), Params.from_q(q), ctx)
        assert sv.result.contains(oracles.f_direct(x, q))
        assert sv.abs_err <= ctx.tol

    def test_positive_argument_has_no_cancellation(self, half, ctx):
        sv = eval_f(mpf(30), half, ctx)
        assert sv.cancellation_bits == 0
        assert sv.value > 1

    def test_cancellation_is_bounded_by_peak(self, half, ctx):
        for x in ["-1.5", "-100", "-1e6", "-3e9"]:
            sv = eval_f(mpf(x), half, ctx)
            assert 0 <= sv.cancellation_bits
            assert sv.cancellation_bits <= max_term_exponent(abs(mpf(x)), half) - ctx.target_abs_exp

    def test_precision_rises_with_peak_term(self, half, ctx):
        near = eval_f(mpf(-1), half, ctx)
        far = eval_f(mpf(-(2**40)), half, ctx)
        assert far.working_bits > near.working_bits
        assert far.peak_exponent > 600
        assert far.peak_exponent <= max_term_exponent(mpf(2**40), half)

    def test_cap_raises_configuration_error(self, half, monkeypatch):
        monkeypatch.setenv("DEFEXP_PRECISION_CAP", "600")
        ctx = make_context(40)
        with pytest.raises(ConfigurationError):
            eval_f(mpf(-(2**60)), half, ctx)

    def test_self_consistent_at_extra_precision(self, ctx):
        for q, x in [("0.5", "-13.56"), ("0.3", "-250.5"), ("0.7", "-9.25")]:
            p = Params.from_q(q)
            a = eval_f(mpf(x), p, ctx).result
            b = eval_f(mpf(x), p, ctx.extended(64)).result
            assert a.contains(b.value)
            assert b.abs_err < a.abs_err

    def test_alternating_partial_sums_bracket(self, ctx):
        p = Params.from_q("0.5")
        x = mpf(-35)
        sv = eval_f(x, p, ctx)
        with mp.workprec(600):
            terms = [x**n * mpf(0.5) ** (n * (n - 1) // 2) / mpmath.factorial(n) for n in range(60)]
            partial = list(mpmath.fsum(terms[: n + 1]) for n in range(60))
            start = next(n for n in range(1, 59) if all(abs(terms[m + 1]) < abs(terms[m]) for m in range(n, 59)))
            for n in range(start, 58):
                lo, hi = sorted((partial[n], partial[n + 1]))
                assert lo <= sv.result.hi and sv.result.lo <= hi


class TestDerivative:
    def test_at_origin(self, half, ctx):
        assert eval_f_prime(mpf(0), half, ctx).value == 1

    def test_is_f_of_scaled_argument_bit_for_bit(self, ctx):
        p = Params.from_q("0.3")
        x = mpf(-17.125)
        a = eval_f_prime(x, p, ctx)
        b = eval_f(scaled_argument(x, p, ctx), p, ctx)
        assert a.value == b.value and a.abs_err == b.abs_err

    def test_central_difference(self, half):
        ctx = make_context(45)
        h = mpmath.ldexp(1, -40)
        with mp.workprec(260):
            x = mpf(-1)
            fp = eval_f(x + h, half, ctx).value
            fm = eval_f(x - h, half, ctx).value
            fd = (fp - fm) / (2 * h)
        assert abs(fd - eval_f_prime(mpf(-1), half, ctx).value) < mpmath.ldexp(1, -70)

    @pytest.mark.parametrize("order", [1, 5, 20, 40])
    @pytest.mark.parametrize("q", [Fraction(1, 2), Fraction(3, 10), Fraction(7, 9)])
    def test_termwise_derivative_identity(self, order, q):
        c = truncated_coefficients(order + 1, q)
        for n in range(order):
            assert (n + 1) * c[n + 1] == c[n] * q**n

    def test_coefficients_against_direct_rational_sum(self):
        q, x = Fraction(1, 2), Fraction(-3, 2)
        c = truncated_coefficients(25, q)
        assert sum(cn * x**n for n, cn in enumerate(c)) == oracles.f_direct_rational(x, q, 25)


class TestTermTable:
    def test_k1_lambda0(self, half, ctx):
        t = term_table(1, 0, half, ctx)
        assert t.u[0] == 1 and t.u[1] == 1
        assert t.v == [0]

    def test_k1_positive_lambda(self, half, ctx):
        t = term_table(1, "0.25", half, ctx)
        assert abs(t.v[0] - mpf("0.25")) < ctx.tol

    def test_matches_formula(self, ctx):
        p = Params.from_q("0.3")
        k, lam = 7, mpf(1)
        t = term_table(k, lam, p, ctx)
        with mp.workprec(300):
            c = k + lam / k
            alpha = mpf(10) / 3
            for n, un in enumerate(t.u):
                direct = c**n / mpmath.factorial(n) * alpha ** (mpf(n * (2 * k - n - 1)) / 2)
                assert abs(un / direct - 1) < mpf(10) ** -35
        assert len(t.u) == 2 * k + 3 and len(t.v) == k
        assert all(u > 0 for u in t.u)

    def test_k5_all_positive(self, half, ctx):
        t = term_table(5, 1, half, ctx)
        assert all(v > 0 for v in t.v)

    def test_k40_increasing_threshold(self, half, ctx):
        t = term_table(40, 1, half, ctx)
        n = t.increasing_threshold()
        assert 1 <= n <= 10
        assert all(t.v[j] < t.v[j + 1] for j in range(0, 40 - n + 1))

    def test_positivity_grid(self, ctx):
        for q in ["0.3", "0.5", "0.7"]:
            p = Params.from_q(q)
            lams = ["0.5", "1", lambda0(p, ctx).value]
            for lam in lams:
                for k in range(1, 61):
                    t = term_table(k, lam, p, ctx)
                    assert all(v > 0 for v in t.v), (q, lam, k)

    def test_domain(self, half, ctx):
        with pytest.raises(DomainError):
            term_table(0, 1, half, ctx)
        with pytest.raises(DomainError):
            term_table(3, -1, half, ctx)
