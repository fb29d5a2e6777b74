"""Rate-1/n convolutional code machinery.

Covers stream interleaving, expansion of polynomial generator matrices to
finite scalar generator matrices, and stream encoding. Streams are always
materialized at their full padded length so interleaving never sees ragged
inputs.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .bitlinalg import BitVec, MatF2, mat_vec_mul
from .gf2poly import BinPoly, poly_mul

MAX_MASK_RANK = 20
MAX_TRELLIS_MEMORY = 16


@dataclass(frozen=True)
class PolyGenMatrix:
    """One generator polynomial per output stream."""

    polys: tuple[BinPoly, ...]

    def __post_init__(self):
        if not self.polys:
            raise ValueError("need at least one polynomial")
        if any(not p.value for p in self.polys):
            raise ValueError("zero generator polynomial")
        object.__setattr__(self, "polys", tuple(self.polys))

    @classmethod
    def from_exponent_lists(cls, lists) -> "PolyGenMatrix":
        return cls(tuple(BinPoly.from_exponents(e) for e in lists))

    @classmethod
    def from_octal(cls, strings) -> "PolyGenMatrix":
        return cls(tuple(BinPoly.from_octal(s) for s in strings))

    @property
    def n(self) -> int:
        return len(self.polys)

    @property
    def memory(self) -> int:
        return max(p.degree for p in self.polys)


@dataclass(frozen=True)
class CodeParams:
    """System parameters; N is derived as n * (K + p + q).

    K counts message bits including the CRC field, e is the ciphertext
    bit-flip probability kept exact as a rational, and l bounds the mask
    rank (2^l decoding hypotheses).
    """

    n: int
    p: int
    q: int
    K: int
    l: int
    e: Fraction
    r_poly: BinPoly

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("need at least one stream")
        if not 0 < self.p <= MAX_TRELLIS_MEMORY:
            raise ValueError(f"p must be in 1..{MAX_TRELLIS_MEMORY}")
        if self.q < 0:
            raise ValueError("q must be nonnegative")
        if self.K < 1:
            raise ValueError("K must be positive")
        if not 0 <= self.l <= MAX_MASK_RANK:
            raise ValueError(f"l must be in 0..{MAX_MASK_RANK}")
        e = Fraction(self.e)
        if not 0 <= e < 1:
            raise ValueError("e must lie in [0, 1)")
        object.__setattr__(self, "e", e)
        if not self.r_poly.value:
            raise ValueError("CRC polynomial must be nonzero")
        if self.r >= self.K:
            raise ValueError("CRC degree must be smaller than K")

    @property
    def N(self) -> int:
        return self.n * (self.K + self.p + self.q)

    @property
    def r(self) -> int:
        return self.r_poly.degree

    @property
    def plaintext_len(self) -> int:
        return self.K - self.r


def interleave(streams: Sequence[BitVec]) -> BitVec:
    """Alternate the streams element by element: output[n*t + j] = stream_j[t]."""
    if not streams:
        raise ValueError("no streams")
    n = len(streams)
    length = streams[0].n
    if any(s.n != length for s in streams):
        raise ValueError("streams have unequal lengths")
    out = np.empty(n * length, dtype=np.uint8)
    for j, s in enumerate(streams):
        out[j::n] = s.to_bits()
    return BitVec.from_bits(out)


def deinterleave(v: BitVec, n: int, i: int) -> BitVec:
    """Extract stream i: positions i, n+i, 2n+i, ... of v."""
    if n < 1 or v.n % n:
        raise ValueError("length not divisible by the stream count")
    if not 0 <= i < n:
        raise ValueError("stream index out of range")
    return BitVec.from_bits(v.to_bits()[i::n])


def expand_scalar(polys: PolyGenMatrix, K: int, memory: int) -> MatF2:
    """K-row scalar generator matrix; row t is row 0 shifted right n*t bits.

    Row 0 packs the coefficient slices g_0 .. g_memory where slice i holds
    the x^i coefficients of all n polynomials.
    """
    if memory < polys.memory:
        raise ValueError("memory smaller than an actual polynomial degree")
    n = polys.n
    ncols = n * (K + memory)
    row0 = np.zeros(ncols, dtype=np.uint8)
    for j, pj in enumerate(polys.polys):
        for i in pj.exponents():
            row0[n * i + j] = 1
    bits = np.zeros((K, ncols), dtype=np.uint8)
    width = n * (memory + 1)
    for t in range(K):
        hi = min(n * t + width, ncols)
        bits[t, n * t : hi] = row0[: hi - n * t]
    return MatF2.from_bits(bits)


def encode_streams(m: BitVec, polys: PolyGenMatrix, memory: int) -> BitVec:
    """Interleave of m(x) * poly_j(x), each stream padded to K + memory bits."""
    if memory < polys.memory:
        raise ValueError("memory smaller than an actual polynomial degree")
    mp = BinPoly.from_bitvec(m)
    length = m.n + memory
    return interleave([poly_mul(mp, pj).to_bitvec(length) for pj in polys.polys])


def encode_matrix(m: BitVec, polys: PolyGenMatrix, memory: int) -> BitVec:
    """Reference path through the expanded scalar matrix; equals encode_streams."""
    return mat_vec_mul(m, expand_scalar(polys, m.n, memory))
