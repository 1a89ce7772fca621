"""High-precision tools for the deformed exponential f(x) = sum x^n/n! q^(n(n-1)/2)."""

from .analysis import (
    amplitude_band,
    amplitude_table,
    asymptotic_table,
    product_eval,
    ratio_table,
    sign_lemma_check,
    symmetric_sum_check,
)
from .arith import ErrorBoundedValue, Params, PrecisionContext, make_context, max_term_exponent
from .qseries import (
    H_series,
    euler_product,
    g_lambert,
    g_series,
    h_product,
    h_series,
    lambda0,
    partial_ratios,
    sigma,
)
from .series import eval_f, eval_f_prime, term_table
from .zeros import bracket_zero, enumerate_zeros, load_cache, refine_zero, save_cache

__version__ = "0.1.0"
