"""
Interleaved Rician flat-fading channel with coherent detection and perfect CSI.

Received samples are y = sqrt(E_c) * alpha * x + n with n ~ N(0, N0/2), in units
where N0 = params.n0 (1.0 by default). Fading is either i.i.d. per coded symbol
(ideal interleaving) or constant over blocks of n_c symbols on each of n_c
subchannels, read column by column into branch order.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from viterbi_arq.constants import FADING_MODES, NOISE_PSD, RNG_ALGORITHM_ID
from viterbi_arq.errors import ConfigError, ObservationError


def db_to_linear(db: float) -> float:
    return float(10.0 ** (db / 10.0))


def linear_to_db(ratio: float) -> float:
    if ratio <= 0:
        raise ValueError(f"Cannot express nonpositive ratio {ratio} in dB")
    return 10.0 * math.log10(ratio)


def _check_energy_args(H: int, rate: float) -> None:
    if H < 1:
        raise ValueError(f"Block length H must be >= 1, got {H}")
    if not 0.0 < rate <= 1.0:
        raise ValueError(f"Code rate must lie in (0, 1], got {rate}")


def ebno_to_ecno(eb_over_n0: float, H: int, m: int, rate: float) -> float:
    """E_c/N0 = (E_b/N0) * R_c * H / (H + m)."""
    _check_energy_args(H, rate)
    return eb_over_n0 * rate * H / (H + m)


def ecno_to_ebno(ec_over_n0: float, H: int, m: int, rate: float) -> float:
    """E_b/N0 = (E_c/N0) * (H + m) / (H * R_c)."""
    _check_energy_args(H, rate)
    return ec_over_n0 * (H + m) / (H * rate)


@dataclass(frozen=True, slots=True)
class ChannelParams:
    ec_over_n0: float
    s: float
    sigma: float
    n0: float = NOISE_PSD

    def __post_init__(self) -> None:
        if not self.ec_over_n0 > 0:
            raise ConfigError(f"E_c/N0 must be positive, got {self.ec_over_n0}")
        if not self.sigma > 0:
            raise ConfigError(f"Rician scale sigma must be positive, got {self.sigma}")
        if self.s < 0:
            raise ConfigError(f"Noncentrality s must be >= 0, got {self.s}")
        if not self.n0 > 0:
            raise ConfigError(f"Noise PSD must be positive, got {self.n0}")

    @classmethod
    def from_gamma(cls, ec_over_n0: float, gamma: float, sigma2: float) -> "ChannelParams":
        """Build from the Rician factor and sigma^2; s = sigma * sqrt(2 gamma)."""
        if gamma < 0:
            raise ConfigError(f"Rician factor must be >= 0, got {gamma}")
        if not sigma2 > 0:
            raise ConfigError(f"sigma^2 must be positive, got {sigma2}")
        sigma = math.sqrt(sigma2)
        return cls(ec_over_n0, sigma * math.sqrt(2.0 * gamma), sigma)

    @property
    def gamma(self) -> float:
        return self.s * self.s / (2.0 * self.sigma * self.sigma)

    @property
    def sigma2(self) -> float:
        return self.sigma * self.sigma

    @property
    def symbol_energy(self) -> float:
        return self.ec_over_n0 * self.n0

    @property
    def mean_square_envelope(self) -> float:
        """E[alpha^2] = s^2 + 2 sigma^2."""
        return self.s * self.s + 2.0 * self.sigma2

    def normalized(self) -> "ChannelParams":
        """
        Equivalent model with sigma^2 = 1/2: envelopes scaled by 1/(sigma sqrt 2) and
        E_c scaled by 2 sigma^2, which leaves sqrt(E_c) * alpha and gamma unchanged.
        """
        scale = self.sigma * math.sqrt(2.0)
        return ChannelParams(
            self.ec_over_n0 * scale * scale, self.s / scale, 1.0 / math.sqrt(2.0), self.n0
        )


@dataclass(frozen=True)
class FadedObservation:
    """Received samples and the envelopes that produced them, in transmit order."""

    y: np.ndarray
    alpha: np.ndarray

    def __post_init__(self) -> None:
        if self.y.ndim != 1 or self.alpha.ndim != 1:
            raise ObservationError("Observation arrays must be one-dimensional")
        if self.y.shape != self.alpha.shape:
            raise ObservationError(
                f"{self.y.size} samples but {self.alpha.size} envelopes"
            )
        if np.any(self.alpha < 0):
            raise ObservationError("Fading envelopes must be nonnegative")

    def __len__(self) -> int:
        return int(self.y.size)


@dataclass
class RandomStream:
    """
    Reproducible random substream: numpy Philox keyed by SeedSequence([seed, stream_id]).
    Not shareable between threads; derive one per worker or per trial with spawn().
    """

    seed: int
    stream_id: int = 0
    generator: np.random.Generator = field(init=False, repr=False, compare=False)

    algorithm_id = RNG_ALGORITHM_ID

    def __post_init__(self) -> None:
        if self.seed < 0 or self.stream_id < 0:
            raise ConfigError(f"Seed and stream id must be >= 0, got {self.seed}, {self.stream_id}")
        key = np.random.SeedSequence([self.seed, self.stream_id])
        self.generator = np.random.Generator(np.random.Philox(key))

    def spawn(self, stream_id: int) -> "RandomStream":
        """Independent substream sharing this stream's seed."""
        return RandomStream(self.seed, stream_id)

    @classmethod
    def for_cell(cls, seed: int, cell_index: int) -> "RandomStream":
        """Stream whose seed is derived from (seed, cell_index); trials then spawn from it."""
        cell_seed = np.random.SeedSequence([seed, cell_index]).generate_state(1, np.uint64)[0]
        return cls(int(cell_seed), 0)

    def standard_normal(self, shape: int | tuple[int, ...]) -> np.ndarray:
        return self.generator.standard_normal(shape)

    def bits(self, count: int) -> np.ndarray:
        return self.generator.integers(0, 2, size=count, dtype=np.uint8)


def sample_rician(
    params: ChannelParams, rng: RandomStream, size: int | None = None
) -> np.ndarray | float:
    """alpha = sqrt((s + sigma Z1)^2 + (sigma Z2)^2); line-of-sight phase fixed to 0."""
    shape = (2,) if size is None else (2, size)
    z = rng.standard_normal(shape)
    alpha = np.hypot(params.s + params.sigma * z[0], params.sigma * z[1])
    return float(alpha) if size is None else alpha


def interleave_block_fading(betas: np.ndarray, num_branches: int) -> np.ndarray:
    """
    Map block envelopes to symbol order. betas[i, b] is subchannel i during coherence
    block b (n_c samples per block); symbol i of branch j sees betas[i, j // n_c].
    """
    n_c, num_blocks = betas.shape
    if num_blocks * n_c < num_branches:
        raise ValueError(
            f"{num_blocks} coherence blocks of {n_c} cover fewer than {num_branches} branches"
        )
    block_of_branch = np.arange(num_branches) // n_c
    return np.ascontiguousarray(betas[:, block_of_branch].T).ravel()


def transmit(
    x: np.ndarray,
    params: ChannelParams,
    mode: str,
    rng: RandomStream,
    *,
    n_c: int = 1,
    noiseless: bool = False,
    fading: np.ndarray | None = None,
) -> FadedObservation:
    """
    Pass antipodal symbols through the fading channel.

    mode is "iid" (one envelope per symbol) or "block" (n_c subchannels, each constant
    over n_c branches). `fading` replaces the sampled envelopes and `noiseless` forces
    n = 0; both exist for tests.
    """
    symbols = np.asarray(x, dtype=float).ravel()
    if symbols.size == 0:
        raise ObservationError("Cannot transmit an empty symbol sequence")
    if mode not in FADING_MODES:
        raise ConfigError(f"Unknown fading mode {mode!r}; expected one of {FADING_MODES}")
    N = symbols.size

    if fading is not None:
        alpha = np.asarray(fading, dtype=float).ravel()
        if alpha.size != N:
            raise ObservationError(f"{alpha.size} envelopes supplied for {N} symbols")
    elif mode == "iid":
        alpha = np.asarray(sample_rician(params, rng, N))
    else:
        if N % n_c:
            raise ObservationError(f"{N} symbols is not a whole number of {n_c}-symbol branches")
        num_branches = N // n_c
        num_blocks = -(-num_branches // n_c)
        betas = np.asarray(sample_rician(params, rng, n_c * num_blocks)).reshape(n_c, num_blocks)
        alpha = interleave_block_fading(betas, num_branches)

    if noiseless:
        noise = np.zeros(N)
    else:
        noise = math.sqrt(params.n0 / 2.0) * rng.standard_normal(N)
    y = math.sqrt(params.symbol_energy) * alpha * symbols + noise
    return FadedObservation(y, alpha)
