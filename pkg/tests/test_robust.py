from __future__ import annotations

import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from forensic_codes.channel import FlipBudget, inject_flips
from forensic_codes.codec2d import color_map, derive_params_2d, unit_area_threshold
from forensic_codes.errors import CorruptFragmentError, IllegalFragmentError, ParameterError
from forensic_codes.grid import BitGrid2D
from forensic_codes.robust import (
    RepetitionSlicedCodec,
    SlicedCodec,
    decode_robust,
    encode_robust,
    find_min_weight_square,
    optimal_profile_ok,
    ref_decode,
    ref_encode,
    validate_params_robust,
)


def base_for(d: int, m: int = 16):
    return derive_params_2d(2, unit_area_threshold(d, m), 3 * d - 1)


D5 = validate_params_robust(base_for(5), 1)


def test_params_small_instance():
    assert (D5.Q, D5.L, D5.K, D5.k) == (3, 9, 1, 3)
    assert D5.codec.idx_bits == 6


def test_params_d9_example():
    rp = validate_params_robust(base_for(9), 1)
    assert (rp.Q, rp.L, rp.K) == (3, 49, 1)


def test_delta_zero_is_plain_split():
    rp = validate_params_robust(base_for(5), 0)
    assert rp.k == rp.Q * (rp.L - rp.codec.idx_width)


def test_params_reject_large_delta_and_q():
    with pytest.raises(ParameterError) as err:
        validate_params_robust(base_for(5), 3)
    assert err.value.constraint == "2*delta<d"
    with pytest.raises(ParameterError):
        validate_params_robust(derive_params_2d(3, 583, 8), 1)
    with pytest.raises(ParameterError) as err:
        validate_params_robust(base_for(5), 2)
    assert err.value.constraint == "idxBits<L"


def test_optimal_profile_check():
    assert optimal_profile_ok(3, 1000, 1)
    assert not optimal_profile_ok(3, 49, 1)
    assert optimal_profile_ok(3, 7, 0)
    with pytest.raises(ParameterError) as err:
        validate_params_robust(base_for(9), 1, profile="optimal")
    assert err.value.constraint == "optimal-profile"


def test_codec_capacity_examples():
    assert RepetitionSlicedCodec(2, 16, 1).k == 8
    assert RepetitionSlicedCodec(2, 16, 1).idx_bits == 3
    assert RepetitionSlicedCodec(4, 10, 0).k == 4 * 8


def test_codec_satisfies_protocol():
    codec: SlicedCodec = RepetitionSlicedCodec(3, 25, 1)
    assert codec.k == 3 * (25 - 6) // 3


@pytest.mark.parametrize("Q,L", [(2, 16), (3, 25)])
def test_every_single_substitution_corrected(Q, L):
    codec = RepetitionSlicedCodec(Q, L, 1)
    rng = np.random.default_rng(Q * L)
    for _ in range(4):
        msg = rng.integers(0, 2, codec.k).astype(np.uint8)
        slices = codec.encode(msg)
        assert len({s.tobytes() for s in slices}) == Q
        for s, pos in itertools.product(range(Q), range(L)):
            noisy = [x.copy() for x in slices]
            noisy[s][pos] ^= 1
            np.testing.assert_array_equal(codec.decode(noisy[::-1]), msg)


def test_every_double_substitution_corrected_at_k2():
    codec = RepetitionSlicedCodec(2, 16, 2)
    msg = np.array([1, 0, 1], dtype=np.uint8)[:codec.k]
    msg = np.resize(msg, codec.k)
    slices = codec.encode(msg)
    cells = [(s, p) for s in range(2) for p in range(16)]
    for a, b in itertools.combinations(cells, 2):
        noisy = [x.copy() for x in slices]
        for s, p in (a, b):
            noisy[s][p] ^= 1
        np.testing.assert_array_equal(codec.decode(noisy), msg)


def test_flips_beyond_budget_break_a_bit():
    codec = RepetitionSlicedCodec(2, 16, 1)
    msg = np.zeros(codec.k, dtype=np.uint8)
    slices = codec.encode(msg)
    slices[0][codec.idx_bits] ^= 1
    slices[0][codec.idx_bits + 1] ^= 1
    out = codec.decode(slices)
    assert out[0] == 1 and not out[1:].any()


def test_index_collision_reported():
    codec = RepetitionSlicedCodec(2, 16, 1)
    slices = codec.encode(np.zeros(codec.k, dtype=np.uint8))
    with pytest.raises(CorruptFragmentError):
        codec.decode([slices[0], slices[0]])


def test_ref_wrappers_round_trip():
    msg = np.array([1, 0, 1], dtype=np.uint8)
    np.testing.assert_array_equal(ref_decode(D5, ref_encode(D5, msg)), msg)


def test_encode_robust_unit_weights():
    msg = np.array([1, 1, 0], dtype=np.uint8)
    g = encode_robust(D5, msg)
    d = D5.d
    cmap = color_map(D5.base)
    for i, j in itertools.product(range(D5.base.units_per_side), repeat=2):
        w = int(g.cells[i * d:(i + 1) * d, j * d:(j + 1) * d].sum())
        if cmap[i, j] == 0:
            assert w == 0
        else:
            assert w >= 4 * d - 4


def test_min_weight_square_examples():
    g = encode_robust(D5, np.array([0, 1, 1], dtype=np.uint8))
    assert find_min_weight_square(g, 5) == (0, 0)
    cells = g.cells.copy()
    cells[2, 2] = 1
    t, l = find_min_weight_square(BitGrid2D(cells), 5)
    assert t % 5 == 0 and l % 5 == 0 and color_map(D5.base)[t // 5, l // 5] == 0


def _aligned_zero(rp, t, l, top=0, left=0):
    d = rp.d
    R, C = t + top, l + left
    return R % d == 0 and C % d == 0 and color_map(rp.base)[R // d, C // d] == 0


def test_border_concentrated_flips_keep_alignment():
    rp = validate_params_robust(base_for(7), 3)
    rng = np.random.default_rng(3)
    for seed in range(40):
        msg = rng.integers(0, 2, rp.k).astype(np.uint8)
        g = encode_robust(rp, msg)
        noisy, _ = inject_flips(g, FlipBudget(3, "concentrate-on-borders", seed), d=7)
        assert _aligned_zero(rp, *find_min_weight_square(noisy, 7))
        np.testing.assert_array_equal(decode_robust(rp, noisy), msg)


def test_single_flip_sweep_on_fixed_crop():
    msg = np.array([1, 0, 1], dtype=np.uint8)
    g = encode_robust(D5, msg)
    top, left, a, b = 3, 2, 41, 42
    for r, c in itertools.product(range(g.rows), range(g.cols)):
        cells = g.cells.copy()
        cells[r, c] ^= 1
        frag = BitGrid2D(cells).crop(top, left, a, b)
        assert _aligned_zero(D5, *find_min_weight_square(frag, 5), top, left)
        np.testing.assert_array_equal(decode_robust(D5, frag), msg)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.sampled_from(["random", "concentrate-on-zero-unit",
                                                      "concentrate-on-borders"]))
def test_delta_two_end_to_end(seed, strategy):
    rp = validate_params_robust(base_for(7), 2)
    rng = np.random.default_rng(seed)
    msg = rng.integers(0, 2, rp.k).astype(np.uint8)
    g = encode_robust(rp, msg)
    noisy, pos = inject_flips(g, FlipBudget(2, strategy, seed), d=7)
    assert len(pos) == 2
    top = int(rng.integers(0, g.rows - 60))
    left = int(rng.integers(0, g.cols - 60))
    frag = noisy.crop(top, left, 60, 60)
    np.testing.assert_array_equal(decode_robust(rp, frag), msg)


def test_decode_rejects_illegal_and_starved_fragments():
    g = encode_robust(D5, np.array([1, 0, 0], dtype=np.uint8))
    with pytest.raises(IllegalFragmentError):
        decode_robust(D5, g.crop(0, 0, 13, 80))
    with pytest.raises(IllegalFragmentError):
        decode_robust(D5, g.crop(0, 0, 5, 10), enforce_legality=False)
