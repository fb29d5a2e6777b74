"""Trellis construction, hard-decision Viterbi decoding and free distance.

The trellis state is the last p input bits (most recent bit in the low
position), so state s on input b moves to ((s << 1) | b) & (2^p - 1) and the
segment outputs are parities of the (p+1)-bit window against each generator.
Zero-tail termination is structural: the final p segments admit only the
zero input, so every decode starts and ends in state 0.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass

import numpy as np

from .bitlinalg import BitVec
from .convcode import MAX_TRELLIS_MEMORY, PolyGenMatrix, encode_streams

_INF = np.int32(1 << 29)
MAX_SEARCH_MEMORY = 12
_FREE_DISTANCE_BUDGET = 40
# precomputing per-symbol branch metric tables costs 2^(n+p+1) bytes;
# beyond this we fall back to per-segment XOR + popcount lookup
_BM_TABLE_LIMIT = 1 << 24


_one64 = np.uint64(1)
_POP8 = np.bitwise_count(np.arange(256, dtype=np.uint8)).astype(np.int32)


def _window_symbols(polys: PolyGenMatrix) -> np.ndarray:
    """Packed n-bit output symbol for every (p+1)-bit input window."""
    p = polys.memory
    w = np.arange(1 << (p + 1), dtype=np.uint64)
    out = np.zeros(1 << (p + 1), dtype=np.uint8)
    for j, pj in enumerate(polys.polys):
        out |= ((np.bitwise_count(w & np.uint64(pj.value)) & _one64) << j).astype(np.uint8)
    return out


class Trellis:
    """Immutable state machine of a terminated rate-1/n code.

    Decoding allocates per-call scratch only, so one trellis can serve many
    concurrent decodes.
    """

    def __init__(self, polys: PolyGenMatrix, K: int):
        p = polys.memory
        if p > MAX_TRELLIS_MEMORY:
            raise ValueError(f"memory {p} exceeds the {MAX_TRELLIS_MEMORY}-bit cap")
        if K < 1:
            raise ValueError("K must be positive")
        self.polys = polys
        self.n = polys.n
        self.p = p
        self.K = K
        self.num_states = 1 << p
        self.segments = K + p
        out = _window_symbols(polys)
        # transition table: window for (state s, input b) is (s << 1) | b
        states = np.arange(self.num_states, dtype=np.int64)
        self.next_state = np.stack(
            [((states << 1) | b) & (self.num_states - 1) for b in (0, 1)], axis=1
        )
        self.out_sym = np.stack([out[(states << 1) | b] for b in (0, 1)], axis=1)
        # reverse view used by the ACS loop: predecessor with top bit 0 or 1
        self._out_lo = out[: self.num_states]
        self._out_hi = out[self.num_states :]
        self._bm_tables = None
        if (1 << (self.n + p + 1)) <= _BM_TABLE_LIMIT:
            syms = np.arange(1 << self.n, dtype=np.uint8)[:, None]
            self._bm_tables = (
                _POP8[self._out_lo[None, :] ^ syms],
                _POP8[self._out_hi[None, :] ^ syms],
            )

    def encode(self, info: BitVec) -> BitVec:
        """Walk the trellis over info plus the zero tail."""
        if info.n != self.K:
            raise ValueError("info length does not match the trellis")
        bits = info.to_bits()
        out = np.zeros(self.segments, dtype=np.uint8)
        state = 0
        for t in range(self.segments):
            b = int(bits[t]) if t < self.K else 0
            out[t] = self.out_sym[state, b]
            state = self.next_state[state, b]
        return _symbols_to_bits(out, self.n)

    def __repr__(self) -> str:
        return f"Trellis(n={self.n}, p={self.p}, K={self.K}, states={self.num_states})"


@dataclass(frozen=True)
class DecodeResult:
    """Maximum-likelihood decode of one received word."""

    info: BitVec
    codeword: BitVec
    error_vector: BitVec
    error_weight: int


def build_trellis(polys: PolyGenMatrix, K: int) -> Trellis:
    return Trellis(polys, K)


def _symbols_to_bits(syms: np.ndarray, n: int) -> BitVec:
    bits = np.zeros(len(syms) * n, dtype=np.uint8)
    for j in range(n):
        bits[j::n] = (syms >> j) & 1
    return BitVec.from_bits(bits)


def _bits_to_symbols(v: BitVec, n: int) -> np.ndarray:
    bits = v.to_bits().reshape(-1, n)
    return (bits << np.arange(n, dtype=np.uint8)).sum(axis=1).astype(np.uint8)


def _forward_pass(trellis: Trellis, rsyms: np.ndarray, collect_metrics: bool = False):
    """ACS recursion; returns final metrics, survivor bits and optional history."""
    ns = trellis.num_states
    segs = trellis.segments
    pm = np.full(ns, _INF, dtype=np.int32)
    pm[0] = 0
    survivors = np.zeros((segs, ns), dtype=bool)
    history = [pm.copy()] if collect_metrics else None
    if trellis.p == 0:
        # single state; the survivor bit stores the chosen input directly
        bm = _POP8[trellis.out_sym[0, 0] ^ rsyms], _POP8[trellis.out_sym[0, 1] ^ rsyms]
        total = np.int32(0)
        for t in range(segs):
            c0, c1 = total + bm[0][t], total + bm[1][t]
            take1 = bool(c1 < c0) and t < trellis.K
            survivors[t, 0] = take1
            total = c1 if take1 else c0
            if collect_metrics:
                history.append(np.array([total], dtype=np.int32))
        return np.array([total], dtype=np.int32), survivors, history
    half = ns >> 1
    if trellis._bm_tables is not None:
        bm_lo, bm_hi = trellis._bm_tables
        get = lambda r: (bm_lo[r], bm_hi[r])
    else:
        get = lambda r: (_POP8[trellis._out_lo ^ r], _POP8[trellis._out_hi ^ r])
    for t in range(segs):
        b0, b1 = get(rsyms[t])
        cand0 = np.repeat(pm[:half], 2) + b0
        cand1 = np.repeat(pm[half:], 2) + b1
        # on ties keep the lower-indexed predecessor
        choose = cand1 < cand0
        pm = np.where(choose, cand1, cand0)
        survivors[t] = choose
        if t >= trellis.K:
            pm[1::2] = _INF
        if collect_metrics:
            history.append(pm.copy())
    return pm, survivors, history


def viterbi_decode(trellis: Trellis, received: BitVec) -> DecodeResult:
    """Minimum-Hamming-distance zero-tail path; deterministic tie-breaks."""
    if received.n != trellis.n * trellis.segments:
        raise ValueError("received length does not match the trellis")
    rsyms = _bits_to_symbols(received, trellis.n)
    pm, survivors, _ = _forward_pass(trellis, rsyms)
    bits = np.zeros(trellis.segments, dtype=np.uint8)
    if trellis.p == 0:
        bits[:] = survivors[:, 0]
    else:
        state = 0
        top_shift = trellis.p - 1
        for t in range(trellis.segments - 1, -1, -1):
            bits[t] = state & 1
            state = (state >> 1) | (int(survivors[t, state]) << top_shift)
    info = BitVec.from_bits(bits[: trellis.K])
    codeword = encode_streams(info, trellis.polys, trellis.p)
    error_vector = received ^ codeword
    weight = error_vector.weight()
    assert weight == int(pm[0]), "path metric disagrees with the survivor path"
    return DecodeResult(info, codeword, error_vector, weight)


def free_distance(polys: PolyGenMatrix) -> int:
    """Minimum weight over detours that leave and rejoin the zero state.

    Dijkstra over the state graph with the segment output weight as the edge
    cost; nonnegative costs make the first completed return optimal.
    """
    p = polys.memory
    if p > MAX_SEARCH_MEMORY:
        raise ValueError(f"memory {p} exceeds the {MAX_SEARCH_MEMORY}-bit search cap")
    out = _window_symbols(polys)
    wt = _POP8[out]
    if p == 0:
        return int(wt[1])
    mask = (1 << p) - 1
    start = 1  # state after the diverging 1-input from state 0
    dist = {start: int(wt[1])}
    heap = [(int(wt[1]), start)]
    done = set()
    best = None
    while heap:
        d, s = heapq.heappop(heap)
        if s in done:
            continue
        done.add(s)
        if best is not None and d >= best:
            break
        for b in (0, 1):
            w = (s << 1) | b
            nxt = w & mask
            nd = d + int(wt[w])
            if nxt == 0:
                if best is None or nd < best:
                    best = nd
                continue
            if nd < dist.get(nxt, 1 << 30):
                dist[nxt] = nd
                heapq.heappush(heap, (nd, nxt))
    if best is None or best > _FREE_DISTANCE_BUDGET:
        raise RuntimeError("free distance search exceeded its weight budget")
    return best
