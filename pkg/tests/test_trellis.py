import numpy as np
import pytest

from mcc.bitlinalg import BitVec
from mcc.convcode import PolyGenMatrix, encode_streams
from mcc.gf2poly import BinPoly
from mcc.trellis import (
    Trellis,
    _forward_pass,
    _bits_to_symbols,
    build_trellis,
    free_distance,
    viterbi_decode,
)

GP = PolyGenMatrix.from_exponent_lists([[0, 2], [0, 1, 2]])
D3 = "0111100010101100"
D0 = "0000011101010011"
D1 = "0101001000000110"
D2 = "0010110111111001"


def random_code(rng, n_max=4, p_max=3):
    n = int(rng.integers(2, n_max + 1))
    p = int(rng.integers(1, p_max + 1))
    polys = []
    for _ in range(n):
        v = int(rng.integers(0, 1 << (p + 1))) | 1 | (1 << p)
        polys.append(BinPoly(v))
    return PolyGenMatrix(tuple(polys))


def brute_force_min_distance(received, polys, K):
    best = None
    for m in range(1 << K):
        cw = encode_streams(BitVec.from_int(K, m), polys, polys.memory)
        d = (cw ^ received).weight()
        if best is None or d < best:
            best = d
    return best


def test_build_reference_trellis():
    t = build_trellis(GP, 6)
    assert t.num_states == 4
    assert t.segments == 8
    assert t.n == 2


def test_build_1024_state_trellis():
    polys = PolyGenMatrix.from_octal(["2327", "2353", "2671", "3175"])
    t = build_trellis(polys, 16)
    assert t.num_states == 1024


def test_build_single_state_repetition():
    rep = PolyGenMatrix((BinPoly.one(), BinPoly.one()))
    t = build_trellis(rep, 4)
    assert t.num_states == 1
    assert t.encode(BitVec.from01("1011")).to01() == "11001111"


def test_memory_cap():
    big = PolyGenMatrix((BinPoly.x_pow(17) + BinPoly.one(), BinPoly.one()))
    with pytest.raises(ValueError):
        build_trellis(big, 4)


def test_trellis_encode_matches_stream_encoder():
    rng = np.random.default_rng(3)
    for _ in range(50):
        polys = random_code(rng)
        k = int(rng.integers(1, 20))
        t = build_trellis(polys, k)
        m = BitVec.random(k, rng)
        assert t.encode(m) == encode_streams(m, polys, polys.memory)


def test_reference_decode_weight_two():
    t = build_trellis(GP, 6)
    res = viterbi_decode(t, BitVec.from01(D3))
    assert res.info.to01() == "110110"
    assert res.error_weight == 2
    assert res.codeword == encode_streams(res.info, GP, 2)
    assert res.error_vector == res.codeword ^ BitVec.from01(D3)


def test_reference_other_candidates_decode_worse():
    t = build_trellis(GP, 6)
    for word in (D0, D1, D2):
        assert viterbi_decode(t, BitVec.from01(word)).error_weight > 2


def test_clean_codeword_decodes_exactly():
    rng = np.random.default_rng(5)
    t = build_trellis(GP, 10)
    for _ in range(20):
        m = BitVec.random(10, rng)
        cw = encode_streams(m, GP, 2)
        res = viterbi_decode(t, cw)
        assert res.info == m and res.error_weight == 0


def test_decode_length_check():
    t = build_trellis(GP, 6)
    with pytest.raises(ValueError):
        viterbi_decode(t, BitVec.zeros(15))


def test_two_errors_always_corrected():
    # free distance 5 corrects any double error of the terminated code
    rng = np.random.default_rng(7)
    t = build_trellis(GP, 12)
    for _ in range(200):
        m = BitVec.random(12, rng)
        cw = encode_streams(m, GP, 2)
        pos = rng.choice(cw.n, size=int(rng.integers(0, 3)), replace=False)
        noisy = cw ^ BitVec.from_indices(cw.n, pos)
        res = viterbi_decode(t, noisy)
        assert res.info == m
        assert res.error_weight == len(pos)


def test_optimality_against_brute_force():
    rng = np.random.default_rng(11)
    for _ in range(40):
        polys = random_code(rng)
        k = int(rng.integers(2, 9))
        t = build_trellis(polys, k)
        received = BitVec.random(t.n * t.segments, rng)
        res = viterbi_decode(t, received)
        assert res.error_weight == brute_force_min_distance(received, polys, k)


def test_path_metrics_never_decrease():
    rng = np.random.default_rng(13)
    t = build_trellis(GP, 8)
    received = BitVec.random(t.n * t.segments, rng)
    rsyms = _bits_to_symbols(received, t.n)
    pm, survivors, history = _forward_pass(t, rsyms, collect_metrics=True)
    state = 0
    metrics = [int(pm[0])]
    for seg in range(t.segments - 1, -1, -1):
        state_prev = (state >> 1) | (int(survivors[seg, state]) << (t.p - 1))
        metrics.append(int(history[seg][state_prev]))
        state = state_prev
    metrics.reverse()
    assert all(b >= a for a, b in zip(metrics, metrics[1:]))


def test_free_distance_reference_codes():
    assert free_distance(GP) == 5
    rep = PolyGenMatrix((BinPoly.one(), BinPoly.one()))
    assert free_distance(rep) == 2


def test_free_distance_matches_terminated_min_weight():
    # short-input brute force: the least-weight nonzero terminated codeword
    rng = np.random.default_rng(17)
    for polys in (GP, PolyGenMatrix((BinPoly.one(), BinPoly.one()))):
        best = min(
            encode_streams(BitVec.from_int(6, m), polys, polys.memory).weight()
            for m in range(1, 64)
        )
        assert free_distance(polys) == best
    for _ in range(10):
        polys = random_code(rng)
        best = min(
            encode_streams(BitVec.from_int(8, m), polys, polys.memory).weight()
            for m in range(1, 256)
        )
        assert free_distance(polys) == best


def test_free_distance_search_cap():
    toobig = PolyGenMatrix((BinPoly.x_pow(13) + BinPoly.one(), BinPoly.one()))
    with pytest.raises(ValueError):
        free_distance(toobig)
