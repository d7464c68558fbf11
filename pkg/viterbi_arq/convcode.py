"""
Binary convolutional codes: generator specs, trellis construction, encoding,
free distance and exact transfer-function coefficients.

Generator masks have width m+1; the most significant tap multiplies the current
input bit and bit 0 the oldest one. A state holds the m previous inputs with the
most recent in its top bit.
"""

import heapq
import math
from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np

from viterbi_arq.constants import MAX_EXHAUSTIVE_H, SYMBOL_FOR_BIT
from viterbi_arq.errors import (
    CoefficientOverflowError,
    DivergenceError,
    InvalidCodeError,
    WeightCapError,
)
from viterbi_arq.lib.grid import parse_octal_generators


@dataclass(frozen=True, slots=True)
class CodeSpec:
    """Rate 1/n_c feedforward convolutional code."""

    generators: tuple[int, ...]
    m: int
    k_c: int = 1

    def __post_init__(self) -> None:
        if self.k_c != 1:
            raise InvalidCodeError(f"Only k_c = 1 trellises are supported, got k_c={self.k_c}")
        if self.m < 0:
            raise InvalidCodeError(f"Memory order must be >= 0, got {self.m}")
        if not self.generators:
            raise InvalidCodeError("At least one generator is required")
        width = self.m + 1
        for g in self.generators:
            if g <= 0:
                raise InvalidCodeError(f"Generator mask must be nonzero, got {g}")
            if g >= 1 << width:
                raise InvalidCodeError(
                    f"Generator {g:o} (octal) is wider than m+1 = {width} taps"
                )
        if not any(g >> self.m & 1 for g in self.generators):
            raise InvalidCodeError(
                f"No generator uses tap {self.m}; memory order m={self.m} is not tight"
            )

    @classmethod
    def from_octal(cls, text: str | Sequence[str]) -> "CodeSpec":
        """Build from octal generator text such as "5,7"; m follows the widest mask."""
        joined = text if isinstance(text, str) else ",".join(text)
        masks = parse_octal_generators(joined)
        if any(g == 0 for g in masks):
            raise InvalidCodeError(f"Zero generator in {joined!r}")
        m = max(g.bit_length() for g in masks) - 1
        return cls(tuple(masks), m)

    @property
    def n_c(self) -> int:
        return len(self.generators)

    @property
    def constraint_length(self) -> int:
        return self.m + 1

    @property
    def rate(self) -> float:
        return self.k_c / self.n_c

    def octal_label(self) -> str:
        return ",".join(f"{g:o}" for g in self.generators)


@dataclass(frozen=True)
class Trellis:
    """
    State-transition graph of a CodeSpec.

    next_state[s, b]      state reached from s on input bit b
    output_bits[s, b, i]  i-th coded bit on that branch
    symbols[s, b, i]      antipodal symbol of that bit (0 -> +1, 1 -> -1)
    output_weight[s, b]   Hamming weight of the branch output
    predecessors[s, j]    (state, input) pairs entering s, j in {0, 1}, lower state first
    """

    spec: CodeSpec
    num_states: int
    next_state: np.ndarray
    output_bits: np.ndarray
    symbols: np.ndarray
    output_weight: np.ndarray
    predecessors: np.ndarray = field(repr=False)

    @property
    def n_c(self) -> int:
        return self.spec.n_c

    @property
    def m(self) -> int:
        return self.spec.m


def _parity(x: int) -> int:
    return bin(x).count("1") & 1


def build_trellis(spec: CodeSpec) -> Trellis:
    """Enumerate every (state, input) branch of the code."""
    m, n_c = spec.m, spec.n_c
    num_states = 1 << m
    next_state = np.zeros((num_states, 2), dtype=np.int64)
    output_bits = np.zeros((num_states, 2, n_c), dtype=np.uint8)
    for s in range(num_states):
        for b in (0, 1):
            register = (b << m) | s
            next_state[s, b] = register >> 1
            for i, g in enumerate(spec.generators):
                output_bits[s, b, i] = _parity(register & g)
    symbols = np.where(output_bits == 0, SYMBOL_FOR_BIT[0], SYMBOL_FOR_BIT[1])
    output_weight = output_bits.sum(axis=2).astype(np.int64)

    incoming: list[list[tuple[int, int]]] = [[] for _ in range(num_states)]
    for s in range(num_states):
        for b in (0, 1):
            incoming[int(next_state[s, b])].append((s, b))
    for ns, edges in enumerate(incoming):
        if len(edges) != 2:
            raise InvalidCodeError(f"State {ns} has {len(edges)} incoming branches, expected 2")
    predecessors = np.array([sorted(edges) for edges in incoming], dtype=np.int64)

    for arr in (next_state, output_bits, symbols, output_weight, predecessors):
        arr.setflags(write=False)
    return Trellis(spec, num_states, next_state, output_bits, symbols, output_weight, predecessors)


def _validate_bits(info_bits: Sequence[int] | np.ndarray) -> np.ndarray:
    bits = np.asarray(info_bits, dtype=np.int64).ravel()
    if bits.size == 0:
        raise ValueError("Cannot encode an empty information block")
    if np.any((bits != 0) & (bits != 1)):
        raise ValueError("Information bits must be 0 or 1")
    return bits


def encode_bits(trellis: Trellis, info_bits: Sequence[int] | np.ndarray) -> np.ndarray:
    """Coded bits for info_bits followed by m zero tail bits; length n_c(H+m)."""
    bits = _validate_bits(info_bits)
    padded = np.concatenate([bits, np.zeros(trellis.m, dtype=np.int64)])
    out = np.empty((padded.size, trellis.n_c), dtype=np.uint8)
    state = 0
    for j, b in enumerate(padded):
        out[j] = trellis.output_bits[state, b]
        state = int(trellis.next_state[state, b])
    if state != 0:
        raise AssertionError("Tail bits did not return the encoder to state 0")
    return out.ravel()


def encode(trellis: Trellis, info_bits: Sequence[int] | np.ndarray) -> np.ndarray:
    """Antipodal symbols for info_bits plus tail; length n_c(H+m)."""
    coded = encode_bits(trellis, info_bits)
    return np.where(coded == 0, SYMBOL_FOR_BIT[0], SYMBOL_FOR_BIT[1])


def free_distance(trellis: Trellis, k_cap: int = 64) -> int:
    """
    Minimum output weight over paths that leave state 0 and first return to it
    (Dijkstra over the trellis with state 0 as the only exit).
    """
    dist: dict[int, int] = {}
    heap: list[tuple[int, int]] = []
    best = math.inf
    # A detour starts with input 1 out of state 0
    w0 = int(trellis.output_weight[0, 1])
    s0 = int(trellis.next_state[0, 1])
    if s0 == 0:
        best = w0
    else:
        heapq.heappush(heap, (w0, s0))
    while heap:
        w, s = heapq.heappop(heap)
        if w >= best or w > k_cap:
            break
        if dist.get(s, math.inf) <= w:
            continue
        dist[s] = w
        for b in (0, 1):
            ns = int(trellis.next_state[s, b])
            nw = w + int(trellis.output_weight[s, b])
            if ns == 0:
                best = min(best, nw)
            elif nw < dist.get(ns, math.inf):
                heapq.heappush(heap, (nw, ns))
    if best > k_cap:
        raise WeightCapError(f"No remerging path with weight <= {k_cap}; cap too small")
    return int(best)


@dataclass(frozen=True, slots=True)
class TransferCoefficients:
    """
    Exact series coefficients of T(D, N) truncated at weight k_max:
    a[k] counts detours of output weight k, c[k] sums their input weights.
    """

    d_f: int
    k_max: int
    a: dict[int, int]
    c: dict[int, int]

    def a_k(self, k: int) -> int:
        return self.a.get(k, 0)

    def c_k(self, k: int) -> int:
        return self.c.get(k, 0)

    def as_arrays(self, k_hi: int | None = None) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(k, a_k, c_k) float arrays for k = d_f .. min(k_hi, k_max)."""
        top = self.k_max if k_hi is None else min(k_hi, self.k_max)
        ks = np.arange(self.d_f, top + 1)
        try:
            a = np.array([float(self.a_k(int(k))) for k in ks])
            c = np.array([float(self.c_k(int(k))) for k in ks])
        except OverflowError as exc:
            raise CoefficientOverflowError(
                f"Coefficients up to k={top} exceed double precision"
            ) from exc
        return ks.astype(float), a, c

    def log_arrays(self, k_hi: int | None = None) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(k, log a_k, log c_k) for k = d_f .. min(k_hi, k_max); -inf where a count is 0."""
        top = self.k_max if k_hi is None else min(k_hi, self.k_max)
        ks = np.arange(self.d_f, top + 1)
        log_a = np.array([_log_count(self.a_k(int(k))) for k in ks])
        log_c = np.array([_log_count(self.c_k(int(k))) for k in ks])
        return ks.astype(float), log_a, log_c


def _log_count(n: int) -> float:
    # math.log takes Python ints of any size
    return math.log(n) if n > 0 else -math.inf


def compute_transfer_coefficients(trellis: Trellis, k_max: int) -> TransferCoefficients:
    """
    Count detours from state 0 by output weight, tracking summed input weight.

    Dynamic programming over (state, accumulated weight) one branch at a time;
    Python ints make the counters exact at any width.
    """
    d_f = free_distance(trellis, k_cap=k_max)
    a: dict[int, int] = {}
    c: dict[int, int] = {}
    # (state, weight) -> [path count, summed input weight]
    frontier: dict[tuple[int, int], list[int]] = {}

    def _absorb(target: dict[tuple[int, int], list[int]], state: int, weight: int,
                count: int, inputs: int) -> None:
        if weight > k_max:
            return
        if state == 0:
            a[weight] = a.get(weight, 0) + count
            c[weight] = c.get(weight, 0) + inputs
            return
        slot = target.setdefault((state, weight), [0, 0])
        slot[0] += count
        slot[1] += inputs

    _absorb(frontier, int(trellis.next_state[0, 1]), int(trellis.output_weight[0, 1]), 1, 1)

    # Without zero-weight cycles the weight grows by >= 1 every num_states branches
    depth_limit = trellis.num_states * (k_max + 1) + 1
    depth = 0
    while frontier:
        depth += 1
        if depth > depth_limit:
            raise InvalidCodeError(
                f"Code {trellis.spec.octal_label()} is catastrophic (zero-weight cycle)"
            )
        nxt: dict[tuple[int, int], list[int]] = {}
        for (s, w), (count, inputs) in frontier.items():
            for b in (0, 1):
                _absorb(
                    nxt,
                    int(trellis.next_state[s, b]),
                    w + int(trellis.output_weight[s, b]),
                    count,
                    inputs + b * count,
                )
        frontier = nxt
    return TransferCoefficients(d_f, k_max, a, c)


def ak_length_bound(k: int, length: int, n_c: int) -> int:
    """
    Combinatorial bound on the number of weight-k detours of `length` branches:
    sum_l C(L, l) C(k-1, L-l-1), and 0 when k > L * n_c.
    """
    if k < 1 or length < 1:
        raise ValueError(f"ak_length_bound needs k >= 1 and L >= 1, got k={k}, L={length}")
    if k > length * n_c:
        return 0
    return sum(
        math.comb(length, zeros) * math.comb(k - 1, length - zeros - 1)
        for zeros in range(length)
        if length - zeros - 1 <= k - 1
    )


def transfer_function(trellis: Trellis, d: float) -> tuple[float, float]:
    """
    Evaluate T(d, 1) and dT/dN at N = 1 from the split-state equations.

    Raises DivergenceError when the series in d does not converge (spectral radius
    of the inner-state gain matrix >= 1).
    """
    if not 0.0 <= d < 1.0:
        raise DivergenceError(f"transfer_function needs 0 <= d < 1, got {d}")
    S = trellis.num_states
    inner = S - 1
    gain = d ** trellis.output_weight.astype(float)
    direct = 0.0
    direct_dn = 0.0
    b_vec = np.zeros(inner)
    b_dn = np.zeros(inner)
    c_vec = np.zeros(inner)
    c_dn = np.zeros(inner)
    M = np.zeros((inner, inner))
    M_dn = np.zeros((inner, inner))
    for s in range(S):
        for bit in (0, 1):
            ns = int(trellis.next_state[s, bit])
            g = float(gain[s, bit])
            if s == 0:
                if bit == 0:
                    continue
                if ns == 0:
                    direct += g
                    direct_dn += g
                else:
                    b_vec[ns - 1] += g
                    b_dn[ns - 1] += g
            elif ns == 0:
                c_vec[s - 1] += g
                c_dn[s - 1] += bit * g
            else:
                M[ns - 1, s - 1] += g
                M_dn[ns - 1, s - 1] += bit * g
    if inner == 0:
        return direct, direct_dn
    radius = float(np.max(np.abs(np.linalg.eigvals(M))))
    if radius >= 1.0:
        raise DivergenceError(
            f"Transfer function diverges at D={d:.6g} (spectral radius {radius:.4f})"
        )
    resolvent = np.linalg.inv(np.eye(inner) - M)
    x = resolvent @ b_vec
    t_val = direct + float(c_vec @ x)
    dt = direct_dn + float(c_dn @ x + c_vec @ resolvent @ (M_dn @ x + b_dn))
    return t_val, dt


def codeword_table(trellis: Trellis, H: int) -> tuple[np.ndarray, np.ndarray]:
    """All 2^H information blocks (rows, first bit first) and their antipodal codewords."""
    if not 1 <= H <= MAX_EXHAUSTIVE_H:
        raise ValueError(f"codeword_table supports 1 <= H <= {MAX_EXHAUSTIVE_H}, got {H}")
    idx = np.arange(1 << H)
    info = ((idx[:, None] >> np.arange(H - 1, -1, -1)[None, :]) & 1).astype(np.uint8)
    words = np.stack([encode(trellis, row) for row in info])
    return info, words
