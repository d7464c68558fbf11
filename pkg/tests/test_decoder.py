import math

import numpy as np
import pytest

from viterbi_arq.bounds import BoundParams, pairwise_error, retransmission_band
from viterbi_arq.channel import ChannelParams, FadedObservation, RandomStream, transmit
from viterbi_arq.convcode import CodeSpec, Trellis, build_trellis, codeword_table, encode
from viterbi_arq.decoder import (
    SurvivorState,
    YIConfig,
    branch_metric,
    decode,
    divergence_weight,
    path_metric,
)
from viterbi_arq.errors import ConfigError, ObservationError


def _frame(trellis: Trellis, params: ChannelParams, H: int, seed: int):
    rng = RandomStream(seed)
    info = rng.bits(H)
    obs = transmit(encode(trellis, info), params, "iid", rng, n_c=trellis.n_c)
    return info, obs


def brute_force_critical_flag(trellis: Trellis, obs: FadedObservation, d_f: int) -> float:
    """
    Smallest flag that relabels the ML path, found by enumerating every codeword:
    at each level, compare the ML prefix with the best prefix entering its state
    through the other predecessor.
    """
    n_c, m = trellis.n_c, trellis.m
    T = len(obs) // n_c
    info, words = codeword_table(trellis, T - m)
    inputs = np.hstack([info, np.zeros((len(info), m), dtype=np.uint8)])
    states = np.zeros((len(info), T + 1), dtype=np.int64)
    for j in range(T):
        states[:, j + 1] = trellis.next_state[states[:, j], inputs[:, j]]
    gains = obs.alpha * obs.y
    best = int(np.argmax(words @ gains))
    crit = math.inf
    for t in range(1, T + 1):
        cut = t * n_c
        prefix_metric = words[:, :cut] @ gains[:cut]
        rivals = (states[:, t] == states[best, t]) & (states[:, t - 1] != states[best, t - 1])
        if not rivals.any():
            continue
        idx = np.flatnonzero(rivals)
        j = int(idx[np.argmax(prefix_metric[idx])])
        gap = prefix_metric[best] - prefix_metric[j]
        weight = divergence_weight(words[best, :cut], words[j, :cut], obs.alpha[:cut])
        crit = min(crit, d_f * gap / (math.sqrt(0.5) * weight))
    return crit


class TestMetrics:
    def test_branch_metric(self):
        assert branch_metric(np.ones(2), np.array([1, 1]), np.array([2.0, -1.0])) == 1.0
        assert branch_metric(np.ones(2), np.array([-1, -1]), np.array([2.0, -1.0])) == -1.0
        assert branch_metric(np.zeros(2), np.array([1, -1]), np.array([5.0, 3.0])) == 0.0
        with pytest.raises(ObservationError):
            branch_metric(np.ones(2), np.ones(3), np.ones(2))

    def test_divergence_weight(self):
        x = np.array([1, 1, 1, 1])
        assert divergence_weight(x, x, np.full(4, 0.7)) == 0.0
        assert divergence_weight(x, np.array([1, 1, -1, -1]), np.ones(4)) == 4.0
        assert divergence_weight(
            x, np.array([-1, 1, 1, 1]), np.array([0.5, 9.0, 9.0, 9.0])
        ) == pytest.approx(0.5)
        with pytest.raises(ObservationError):
            divergence_weight(x, x[:3], np.ones(4))

    def test_path_metric_matches_decoder(self, trellis57):
        params = ChannelParams.from_gamma(1.0, 2.0, 0.5)
        _, obs = _frame(trellis57, params, 30, seed=1)
        out = decode(trellis57, obs, params, YIConfig(0.0, 5))
        assert path_metric(trellis57, obs, out.bits) == pytest.approx(out.metric, rel=1e-12)


class TestConfig:
    def test_rejects_negative_flag(self):
        with pytest.raises(ConfigError):
            YIConfig(-0.1, 5)
        with pytest.raises(ConfigError):
            YIConfig(0.0, 0)

    def test_survivor_state_labels(self):
        state = SurvivorState.start(4, 3)
        assert state.labels(0.0) == ["C", "-", "-", "-"]
        assert state.traceback().size == 0


class TestDecode:
    def test_noiseless_frame_is_recovered_and_flagged_at_ceiling(self, trellis57):
        params = ChannelParams.from_gamma(1.0, 3.0, 0.5)
        rng = RandomStream(2)
        info = rng.bits(20)
        obs = transmit(encode(trellis57, info), params, "iid", rng, n_c=2, noiseless=True)
        out = decode(trellis57, obs, params, YIConfig(7.0, 5))
        assert np.array_equal(out.bits, info)
        assert out.accepted
        # every merge gap is sqrt(Ec) times its divergence weight
        assert out.critical_flag == pytest.approx(5 * math.sqrt(2.0), rel=1e-9)
        assert not out.accepts(7.1)

    def test_zero_flag_always_accepts(self, trellis57):
        params = ChannelParams.from_gamma(0.5, 0.0, 0.5)
        for seed in range(100):
            _, obs = _frame(trellis57, params, 20, seed)
            assert decode(trellis57, obs, params, YIConfig(0.0, 5)).accepted

    def test_bits_do_not_depend_on_flag(self, trellis57):
        params = ChannelParams.from_gamma(0.8, 1.0, 0.5)
        for seed in range(30):
            _, obs = _frame(trellis57, params, 25, seed)
            outs = [decode(trellis57, obs, params, YIConfig(u, 5)) for u in (0.0, 1.0, 3.0, 6.0)]
            for out in outs[1:]:
                assert np.array_equal(out.bits, outs[0].bits)
                assert out.critical_flag == outs[0].critical_flag
            verdicts = [o.accepted for o in outs]
            assert verdicts == sorted(verdicts, reverse=True)

    def test_accept_verdict_matches_critical_flag(self, trellis57):
        params = ChannelParams.from_gamma(0.8, 1.0, 0.5)
        _, obs = _frame(trellis57, params, 25, seed=3)
        crit = decode(trellis57, obs, params, YIConfig(0.0, 5)).critical_flag
        assert decode(trellis57, obs, params, YIConfig(0.999 * crit, 5)).accepted
        assert not decode(trellis57, obs, params, YIConfig(1.001 * crit, 5)).accepted

    def test_matches_maximum_likelihood(self, trellis57):
        params = ChannelParams.from_gamma(0.6, 1.0, 0.5)
        info_table, words = codeword_table(trellis57, 6)
        for seed in range(200):
            _, obs = _frame(trellis57, params, 6, seed)
            ml = info_table[int(np.argmax(words @ (obs.alpha * obs.y)))]
            out = decode(trellis57, obs, params, YIConfig(0.0, 5))
            assert np.array_equal(out.bits, ml)

    @pytest.mark.parametrize("octal, d_f", [("5,7", 5), ("23,35", 7)])
    def test_critical_flag_matches_exhaustive_search(self, octal, d_f):
        trellis = build_trellis(CodeSpec.from_octal(octal))
        params = ChannelParams.from_gamma(1.0, 2.0, 0.5)
        for seed in range(30):
            _, obs = _frame(trellis, params, 5, seed)
            out = decode(trellis, obs, params, YIConfig(0.0, d_f))
            assert out.critical_flag == pytest.approx(
                brute_force_critical_flag(trellis, obs, d_f), rel=1e-9
            )

    def test_memoryless_code_is_symbolwise(self):
        trellis = build_trellis(CodeSpec((1,), 0))
        params = ChannelParams.from_gamma(1.0, 1.0, 0.5)
        _, obs = _frame(trellis, params, 12, seed=4)
        out = decode(trellis, obs, params, YIConfig(0.0, 1))
        assert np.array_equal(out.bits, (obs.y < 0).astype(np.uint8))
        expected = float(np.min(np.abs(obs.y) * math.sqrt(2.0) / obs.alpha))
        assert out.critical_flag == pytest.approx(expected, rel=1e-12)

    def test_rejects_malformed_observations(self, trellis57):
        params = ChannelParams(1.0, 1.0, 1.0)
        with pytest.raises(ObservationError):
            decode(trellis57, FadedObservation(np.ones(7), np.ones(7)), params, YIConfig(0, 5))
        with pytest.raises(ObservationError):
            decode(trellis57, FadedObservation(np.ones(4), np.ones(4)), params, YIConfig(0, 5))


def _assert_rate(hits: int, trials: int, p: float) -> None:
    # within four standard errors of the exact probability
    assert abs(hits / trials - p) <= 4.0 * math.sqrt(p * (1.0 - p) / trials)


class TestConditionalRates:
    """
    One information bit through a rate-1/3 repetition code gives two codewords that
    differ in every symbol. With the envelopes held fixed, the accepted-error rate is
    q(u) and the retransmission rate is q(-u) - q(u).
    """

    ALPHA = np.array([0.6, 1.0, 0.3])
    TRIALS = 20_000
    CHANNEL = ChannelParams(0.5, 0.0, 1.0)

    @pytest.fixture(scope="class")
    def outcomes(self) -> tuple[np.ndarray, np.ndarray]:
        trellis = build_trellis(CodeSpec((1, 1, 1), 0))
        x = encode(trellis, [0])
        rng = RandomStream(2718)
        critical = np.empty(self.TRIALS)
        wrong = np.zeros(self.TRIALS, dtype=bool)
        for i in range(self.TRIALS):
            obs = transmit(x, self.CHANNEL, "iid", rng, n_c=3, fading=self.ALPHA)
            out = decode(trellis, obs, self.CHANNEL, YIConfig(0.0, 3))
            critical[i] = out.critical_flag
            wrong[i] = bool(out.bits[0])
        return critical, wrong

    @pytest.mark.parametrize("u", [0.0, 1.5, 2.4])
    def test_accepted_error_rate(self, outcomes, u):
        critical, wrong = outcomes
        hits = int(np.count_nonzero(wrong & (u <= critical)))
        error = pairwise_error(self.ALPHA, BoundParams(0.5, u, 3, 1.0, 0.0))
        _assert_rate(hits, self.TRIALS, error)

    @pytest.mark.parametrize("u", [0.0, 1.5, 2.4])
    def test_retransmission_rate(self, outcomes, u):
        critical, _ = outcomes
        hits = int(np.count_nonzero(u > critical))
        band = retransmission_band(self.ALPHA, BoundParams(0.5, u, 3, 1.0, 0.0))
        _assert_rate(hits, self.TRIALS, band)

    def test_decode_label_matches_critical_flag(self):
        trellis = build_trellis(CodeSpec((1, 1, 1), 0))
        rng = RandomStream(11)
        for _ in range(50):
            obs = transmit(encode(trellis, [0]), self.CHANNEL, "iid", rng, n_c=3, fading=self.ALPHA)
            out = decode(trellis, obs, self.CHANNEL, YIConfig(1.5, 3))
            assert out.accepted == out.accepts(1.5)
