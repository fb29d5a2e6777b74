"""Quantitative tooling: error propagation, distance bounds, attack cost.

Everything here is a pure function of its arguments. Complexity figures are
reported in log2 because the raw counts overflow fixed-width floats at the
parameter scales of interest.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bitlinalg import MatF2
from .convcode import PolyGenMatrix
from .gf2poly import BinPoly

_LOG2_029 = math.log2(0.29)


@dataclass(frozen=True)
class AlphaEstimate:
    """Monte Carlo estimate of the extra errors created by stream division.

    per_stream holds the mean weight increase of each stream's quotient
    relative to the raw error stream; pure-shift divisors come out near zero
    (slightly negative, since error bits below the divisor degree fall into
    the discarded remainder).
    """

    per_stream: tuple[float, ...]
    trials: int
    stream_len: int

    @property
    def alpha_total(self) -> float:
        return float(sum(self.per_stream))


@dataclass(frozen=True)
class SecurityReport:
    N: int
    K: int
    t: int
    isd_log2: float
    qisd_log2: float
    acs_per_bit_log2: int | None = None


@dataclass(frozen=True)
class KeyRandomnessReport:
    rows: int
    cols: int
    rank: int
    full_rank: bool
    col_weight_mean: float
    col_weight_std: float
    col_weight_min: int
    col_weight_max: int
    col_weight_hist: tuple[tuple[float, int], ...]
    row_weight_mean: float
    row_weight_std: float
    mean_col_weight_z: float


def batch_quotient_weights(bits: np.ndarray, divisor: BinPoly, quot_len: int) -> np.ndarray:
    """Weight of each row's polynomial quotient by `divisor`, truncated.

    Synthetic division run column-wise over a (trials, stream_len) bit
    matrix; row r gets the weight of (row_r(x) div divisor) restricted to
    the quot_len lowest coefficients. Matches poly_divmod bit for bit, which
    the test suite asserts.
    """
    if not divisor.value:
        raise ZeroDivisionError("division by the zero polynomial")
    bits = np.array(bits, dtype=np.uint8)
    trials, stream_len = bits.shape
    d = divisor.degree
    lower = [o for o in divisor.exponents() if o < d]
    width = stream_len - d
    if width <= 0:
        return np.zeros(trials, dtype=np.int64)
    quot = np.zeros((trials, width), dtype=np.uint8)
    for i in range(stream_len - 1, d - 1, -1):
        qbit = bits[:, i]
        quot[:, i - d] = qbit
        for o in lower:
            bits[:, i - d + o] ^= qbit
    return quot[:, : min(quot_len, width)].sum(axis=1).astype(np.int64)


def estimate_alpha(
    g_q: PolyGenMatrix,
    e: float,
    stream_len: int,
    trials: int,
    rng: np.random.Generator,
) -> AlphaEstimate:
    """Mean quotient-weight increase per stream over random error streams.

    Each trial draws an independent Bernoulli(e) stream per polynomial,
    divides it, truncates the quotient to stream_len - q coefficients (the
    same truncation decryption applies) and accumulates the weight change.
    Trials are processed in fixed-size batches through the column-wise
    divider, so the draw order depends only on (stream_len, trials).
    """
    if trials < 1:
        raise ValueError("need at least one trial")
    if not 0 <= e < 1:
        raise ValueError("e must lie in [0, 1)")
    quot_len = stream_len - g_q.memory
    if quot_len <= 0:
        raise ValueError("stream shorter than the divisor degree")
    chunk = max(1, min(trials, (8 << 20) // stream_len))
    totals = [0] * g_q.n
    for j, q_j in enumerate(g_q.polys):
        remaining = trials
        while remaining:
            t = min(chunk, remaining)
            bits = (rng.random((t, stream_len)) < e).astype(np.uint8)
            wt_in = int(bits.sum())
            wt_out = int(batch_quotient_weights(bits, q_j, quot_len).sum())
            totals[j] += wt_out - wt_in
            remaining -= t
    per_stream = tuple(t / trials for t in totals)
    return AlphaEstimate(per_stream=per_stream, trials=trials, stream_len=stream_len)


def effective_error_rate(e: float, alpha: float, N: int) -> float:
    """(e*N + alpha) / N, the error probability seen by the stream decoder."""
    rate = (e * N + alpha) / N
    if not 0 <= rate <= 1:
        raise ValueError("effective rate outside [0, 1]")
    return rate


def binary_entropy(x: float) -> float:
    if not 0 <= x <= 1:
        raise ValueError("entropy argument outside [0, 1]")
    if x in (0.0, 1.0):
        return 0.0
    return -x * math.log2(x) - (1 - x) * math.log2(1 - x)


def gilbert_relative_distance(rho: float, tol: float = 1e-9) -> float:
    """Solve entropy(x) = 1 - rho for x in (0, 1/2) by bisection.

    Estimates the typical relative distance from a random word to the
    nearest codeword of a random rate-rho linear code.
    """
    if not 0 < rho < 1:
        raise ValueError("rate must lie in (0, 1)")
    target = 1.0 - rho
    lo, hi = 0.0, 0.5
    while hi - lo > tol:
        mid = (lo + hi) / 2
        if binary_entropy(mid) < target:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2


def isd_log2(N: int, K: int, t: int) -> float:
    """log2 of C(N, K) / (0.29 * C(N - t, K)), evaluated in the log domain.

    The binomial ratio telescopes to a product of t factors, so no
    large-integer arithmetic is needed at any parameter scale.
    """
    if not 0 < K < N:
        raise ValueError("need 0 < K < N")
    if not 0 <= t <= N - K:
        raise ValueError("need 0 <= t <= N - K")
    total = -_LOG2_029
    for i in range(t):
        total += math.log2((N - i) / (N - K - i))
    return total


def qisd_log2(N: int, K: int, t: int) -> float:
    """Quantum-search cost: square root of the classical iteration count."""
    return isd_log2(N, K, t) / 2.0


def security_report(N: int, K: int, t: int, l: int | None = None, p: int | None = None) -> SecurityReport:
    acs = l + p if l is not None and p is not None else None
    return SecurityReport(
        N=N,
        K=K,
        t=t,
        isd_log2=isd_log2(N, K, t),
        qisd_log2=qisd_log2(N, K, t),
        acs_per_bit_log2=acs,
    )


def window_failure(
    p_eff: float, window_bits: int, t_corr: int, windows: int
) -> tuple[float, float]:
    """Binomial tail model of decoder overload.

    p_window is the exact probability of more than t_corr errors among
    window_bits positions at rate p_eff; the second value is the chance that
    none of `windows` independent windows overloads.
    """
    if not 0 <= p_eff <= 1:
        raise ValueError("p_eff outside [0, 1]")
    if not 0 <= t_corr < window_bits:
        raise ValueError("need 0 <= t_corr < window_bits")
    if windows < 0:
        raise ValueError("negative window count")
    p_window = 0.0
    for i in range(window_bits, t_corr, -1):
        p_window += (
            math.comb(window_bits, i)
            * p_eff**i
            * (1.0 - p_eff) ** (window_bits - i)
        )
    p_window = min(p_window, 1.0)
    return p_window, (1.0 - p_window) ** windows


def key_randomness_report(g: MatF2) -> KeyRandomnessReport:
    """Rank and weight statistics that a random full-rank matrix should show.

    The z-score compares the observed mean column weight against the
    Binomial(K, 1/2) behaviour of independent columns; identity-like or
    sparse matrices show up with extreme values (hundreds). Keys built from
    a rank-l mask have clustered columns, which inflates honest |z| to
    roughly 4 * sqrt(1 + K / 2^l), still far below the degenerate range.
    """
    from .bitlinalg import rank as _rank

    bits = g.to_bits()
    col_w = bits.sum(axis=0)
    row_w = bits.sum(axis=1)
    k = g.rows
    r = _rank(g)
    hist_counts, hist_edges = np.histogram(col_w, bins=min(10, max(1, k)))
    sigma_mean = math.sqrt(k) / 2 / math.sqrt(max(g.cols, 1))
    z = (float(col_w.mean()) - k / 2) / sigma_mean if sigma_mean else 0.0
    return KeyRandomnessReport(
        rows=g.rows,
        cols=g.cols,
        rank=r,
        full_rank=r == min(g.rows, g.cols),
        col_weight_mean=float(col_w.mean()),
        col_weight_std=float(col_w.std()),
        col_weight_min=int(col_w.min()),
        col_weight_max=int(col_w.max()),
        col_weight_hist=tuple(
            (float(hist_edges[i]), int(hist_counts[i])) for i in range(len(hist_counts))
        ),
        row_weight_mean=float(row_w.mean()),
        row_weight_std=float(row_w.std()),
        mean_col_weight_z=float(z),
    )
