"""
Viterbi ARQ over Rician fading: convolutional codes, the Yamamoto-Itoh flagged
Viterbi decoder, union bounds and a reproducible Monte-Carlo harness.
"""

from viterbi_arq.constants import VERSION

__version__ = VERSION

__all__ = [
    "CodeSpec",
    "build_trellis",
    "encode",
    "free_distance",
    "compute_transfer_coefficients",
    "ChannelParams",
    "RandomStream",
    "transmit",
    "YIConfig",
    "decode",
    "BoundParams",
    "union_bounds",
    "ExperimentConfig",
    "run_sweep",
    "write_csv",
]

from viterbi_arq.convcode import (
    CodeSpec,
    build_trellis,
    compute_transfer_coefficients,
    encode,
    free_distance,
)
from viterbi_arq.channel import ChannelParams, RandomStream, transmit
from viterbi_arq.decoder import YIConfig, decode
from viterbi_arq.bounds import BoundParams, union_bounds
from viterbi_arq.harness import ExperimentConfig, run_sweep
from viterbi_arq.export import write_csv
