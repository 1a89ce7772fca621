"""Regression baselines frozen from the first verified run (50 digits, tol_bits 128).

Later runs must reproduce these within 10%.
"""

# |s_30 - g(q)| with s_n = n theta_n
S30_DISCREPANCY = {
    "0.3": 0.0489756170447,
    "0.5": 0.276928717344,
    "0.7": 2.06391972225,
}

# C_n = A_n n^(3/2) e^(-n) q^(n(n+1)/2), n = 5..25 at q = 0.5
AMPLITUDE_C = {
    "0.5": {
        5: 0.0283075705599745,
        6: 0.0255838375641287,
        7: 0.0235018436828233,
        8: 0.0218708930822418,
        9: 0.0205649861480776,
        10: 0.0194992260950816,
        11: 0.0186149940753048,
        12: 0.0178708155630595,
        13: 0.0172366700769035,
        14: 0.0166903725137918,
        15: 0.0162152184498013,
        16: 0.0157984166139703,
        17: 0.0154300225918749,
        18: 0.0151021987595954,
        19: 0.0148086910293762,
        20: 0.0145444525341049,
        21: 0.0143053687223195,
        22: 0.0140880536295818,
        23: 0.0138896968891184,
        24: 0.01370794743691,
        25: 0.0135408241098512,
    },
}

# theorem-interval bracket for x_20 at q = 0.5 (lo, hi)
BRACKET_20 = ("-10782040.14565993644204449", "-10289464.79605300653664556")

BASELINE_RTOL = 0.10
