"""
Viterbi decoder with the fading-adapted Yamamoto-Itoh reliability label.

Survivor selection maximizes the CSI-weighted correlation sum(alpha * x * y) and never
looks at the flag u. At each merge the survivor keeps label C only if

    sum alpha (x - x') y  >=  (u / d_f) * sqrt(N0 / 2) * sum |x' - x| alpha^2

over the window where survivor and competitor differ. Labels are sticky, so a frame's
verdict depends on u only through one number: the smallest flag, over the merges along
the decoded path, at which that inequality fails. decode() records it as
DecodeOutcome.critical_flag and every u is answered from the same decode.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from viterbi_arq.channel import ChannelParams, FadedObservation
from viterbi_arq.convcode import Trellis, encode
from viterbi_arq.errors import ConfigError, ObservationError


@dataclass(frozen=True, slots=True)
class YIConfig:
    u: float
    d_f: int

    def __post_init__(self) -> None:
        if not self.u >= 0:
            raise ConfigError(f"Yamamoto-Itoh flag must be >= 0, got {self.u}")
        if self.d_f < 1:
            raise ConfigError(f"Free distance must be >= 1, got {self.d_f}")


@dataclass(frozen=True, slots=True)
class DecodeOutcome:
    bits: np.ndarray
    accepted: bool
    metric: float
    critical_flag: float

    def accepts(self, u: float) -> bool:
        """Whether the final survivor keeps label C at flag u."""
        return u <= self.critical_flag


@dataclass
class SurvivorState:
    """
    Survivors after `level` branches: metric[s] is the path sum into state s (-inf when
    unreachable), critical[s] the flag threshold along that survivor, and
    prev_state/prev_input[t, s] the decision taken at branch t.
    """

    metric: list[float]
    critical: list[float]
    prev_state: np.ndarray = field(repr=False)
    prev_input: np.ndarray = field(repr=False)
    level: int = 0

    @classmethod
    def start(cls, num_states: int, num_levels: int) -> "SurvivorState":
        metric = [-math.inf] * num_states
        metric[0] = 0.0
        return cls(
            metric,
            [math.inf] * num_states,
            np.zeros((num_levels, num_states), dtype=np.int64),
            np.zeros((num_levels, num_states), dtype=np.uint8),
        )

    def labels(self, u: float) -> list[str]:
        """'C' or 'X' per reachable state at flag u; '-' where no survivor exists."""
        return [
            "-" if m == -math.inf else ("C" if u <= c else "X")
            for m, c in zip(self.metric, self.critical)
        ]

    def traceback(self, state: int = 0) -> np.ndarray:
        """Input bits of the survivor ending in `state` at the current level."""
        bits = np.empty(self.level, dtype=np.uint8)
        for t in range(self.level - 1, -1, -1):
            bits[t] = self.prev_input[t, state]
            state = int(self.prev_state[t, state])
        return bits


def branch_metric(alpha: np.ndarray, x: np.ndarray, y: np.ndarray) -> float:
    """lambda = sum_i alpha_i x_i y_i for one branch."""
    a, xs, ys = (np.asarray(v, dtype=float).ravel() for v in (alpha, x, y))
    if not a.size == xs.size == ys.size:
        raise ObservationError(
            f"Branch metric length mismatch: alpha={a.size}, x={xs.size}, y={ys.size}"
        )
    return float(np.sum(a * xs * ys))


def divergence_weight(x_survivor: np.ndarray, x_discarded: np.ndarray, alpha: np.ndarray) -> float:
    """sum |x' - x| alpha^2 between two co-terminal symbol sequences."""
    xs = np.asarray(x_survivor, dtype=float).ravel()
    xd = np.asarray(x_discarded, dtype=float).ravel()
    a = np.asarray(alpha, dtype=float).ravel()
    if not xs.size == xd.size == a.size:
        raise ObservationError(
            f"Paths are not co-terminal: {xs.size} vs {xd.size} symbols, {a.size} envelopes"
        )
    return float(np.sum(np.abs(xd - xs) * a * a))


def path_metric(trellis: Trellis, obs: FadedObservation, info_bits: np.ndarray) -> float:
    """Path sum of branch metrics along the terminated codeword of info_bits."""
    x = encode(trellis, info_bits)
    if x.size != len(obs):
        raise ObservationError(f"Codeword has {x.size} symbols, observation {len(obs)}")
    return float(np.sum(obs.alpha * x * obs.y))


def _output_masks(trellis: Trellis) -> list[list[int]]:
    weights = 1 << np.arange(trellis.n_c)
    masks = (trellis.output_bits.astype(np.int64) * weights).sum(axis=2)
    return masks.tolist()


def decode(
    trellis: Trellis, obs: FadedObservation, params: ChannelParams, cfg: YIConfig
) -> DecodeOutcome:
    """
    Decode one terminated frame.

    Metric ties go to the lower-indexed predecessor. The returned bits do not depend on
    cfg.u; `accepted` is the label of the state-0 survivor at the last level.
    """
    n_c, m, S = trellis.n_c, trellis.m, trellis.num_states
    N = len(obs)
    if N % n_c:
        raise ObservationError(f"Observation length {N} is not a multiple of n_c={n_c}")
    T = N // n_c
    H = T - m
    if H < 1:
        raise ObservationError(f"Observation of {T} branches is shorter than the tail m={m}")

    ay = (obs.alpha * obs.y).reshape(T, n_c)
    # metrics[t, s, b]: branch metric of input b from state s at level t
    metrics = np.einsum("ti,sbi->tsb", ay, trellis.symbols).tolist()
    # diff_weight[t, d]: sum |x' - x| alpha^2 on level t for output-difference mask d
    a2 = (obs.alpha * obs.alpha).reshape(T, n_c)
    diff_bits = (np.arange(1 << n_c)[:, None] >> np.arange(n_c)[None, :]) & 1
    diff_weight = (2.0 * a2 @ diff_bits.T).tolist()

    masks = _output_masks(trellis)
    preds = trellis.predecessors.tolist()
    # u_crit = d_f * (metric gap) / (sqrt(N0/2) * divergence weight)
    scale = cfg.d_f / math.sqrt(params.n0 / 2.0)

    state = SurvivorState.start(S, T)
    prev_state = state.prev_state
    prev_input = state.prev_input
    metric = state.metric
    critical = state.critical
    tail_mask = 1 << (m - 1) if m else 0

    for t in range(T):
        bm = metrics[t]
        new_metric = [-math.inf] * S
        new_critical = [math.inf] * S
        for ns in range(S):
            if t >= H and ns & tail_mask:
                continue  # tail inputs are 0
            (p0, b0), (p1, b1) = preds[ns]
            c0 = metric[p0] + bm[p0][b0]
            c1 = metric[p1] + bm[p1][b1]
            if c0 == -math.inf and c1 == -math.inf:
                continue
            if c0 >= c1:
                pw, bw, cw, pl, bl, cl = p0, b0, c0, p1, b1, c1
            else:
                pw, bw, cw, pl, bl, cl = p1, b1, c1, p0, b0, c0
            crit = critical[pw]
            if cl != -math.inf:
                weight = diff_weight[t][masks[pw][bw] ^ masks[pl][bl]]
                sw, sl, tau = pw, pl, t - 1
                while sw != sl:
                    iw, il = int(prev_input[tau, sw]), int(prev_input[tau, sl])
                    qw, ql = int(prev_state[tau, sw]), int(prev_state[tau, sl])
                    weight += diff_weight[tau][masks[qw][iw] ^ masks[ql][il]]
                    sw, sl, tau = qw, ql, tau - 1
                if weight > 0:
                    crit = min(crit, scale * (cw - cl) / weight)
            new_metric[ns] = cw
            new_critical[ns] = crit
            prev_state[t, ns] = pw
            prev_input[t, ns] = bw
        metric[:] = new_metric
        critical[:] = new_critical
        state.level = t + 1

    if metric[0] == -math.inf:
        raise ObservationError("No survivor reached state 0; trellis not terminated")
    bits = state.traceback(0)[:H]
    return DecodeOutcome(
        bits=bits,
        accepted=cfg.u <= critical[0],
        metric=float(metric[0]),
        critical_flag=float(critical[0]),
    )
