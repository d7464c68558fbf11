"""
Centralized constants for simulation, bounds and output.
"""

# Noise is expressed in units where N0 = 1, so n ~ N(0, 1/2) and E_c = E_c/N0.
NOISE_PSD = 1.0

# Antipodal map: bit 0 -> +1, bit 1 -> -1
SYMBOL_FOR_BIT = (1.0, -1.0)

RNG_ALGORITHM_ID = "numpy-Philox4x64-10/SeedSequence"

# Quadrature defaults (adaptive Simpson)
QUAD_ABS_TOL = 1e-12
QUAD_REL_TOL = 1e-10
QUAD_MAX_DEPTH = 50

# I0 power series is evaluated in double precision; above this |x| the result overflows
BESSEL_I0_MAX_ARG = 700.0

# Largest H for which the exhaustive codeword table is built
MAX_EXHAUSTIVE_H = 16

# Two-sided 95% normal quantile for Wilson intervals
WILSON_Z = 1.959963984540054

FADING_MODES = ("iid", "block")

ESTIMATE_SUFFIXES = ("", "_ci_low", "_ci_high", "_k", "_n")

SWEEP_COLUMNS = [
    "ebno_db", "gamma", "sigma2", "u",
    "pb_mc", "px_mc", "pb_all_mc",
    "pb_bound", "px_bound", "pe_bound",
    "trials", "seed", "rng_algorithm_id",
]

BOUND_COLUMNS = [
    "ebno_db", "gamma", "sigma2", "u", "ec_over_n0",
    "d_tilde", "pe_bound", "pb_bound", "px_bound", "tail_k_max", "tail_term", "tail_diverged",
]

EXPONENT_COLUMNS = [
    "ebno_db", "gamma", "sigma2", "u", "ec_over_n0",
    "h_tilde_u", "h_tilde_minus_u", "ebno_slope",
    "gamma_exponent_pb", "gamma_exponent_px",
]

COEFFICIENT_COLUMNS = ["k", "a_k", "c_k"]

# Trials per scheduling batch; early stopping is checked only between batches
TRIAL_BATCH = 1000

VERSION = "0.1.0"
