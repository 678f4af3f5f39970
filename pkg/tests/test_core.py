"""Unit tests for core types, quantization, and distance primitives."""

import numpy as np
import pytest

from slkd import (
    AlignmentResult,
    BitKey,
    BoundsError,
    DataError,
    LengthError,
    ParameterError,
    SyncParams,
    SyncSequence,
    Waveform,
    hamming_count,
    hamming_fraction,
    quantize,
    segment_sq_distance,
)


# ---------------------------------------------------------------- waveform


def test_waveform_basic():
    w = Waveform([1.0, -2.0, 3.0], label="x", seed=7)
    assert len(w) == 3
    assert w.samples.dtype == np.float64
    assert w.label == "x" and w.seed == 7


def test_waveform_is_immutable_and_copies_input():
    src = np.array([1.0, 2.0, 3.0])
    w = Waveform(src)
    src[0] = 99.0
    assert w.samples[0] == 1.0
    with pytest.raises(ValueError):
        w.samples[0] = 5.0


@pytest.mark.parametrize("bad", [[1.0, np.nan], [np.inf, 0.0], [1.0, -np.inf]])
def test_waveform_rejects_non_finite(bad):
    with pytest.raises(DataError):
        Waveform(bad)


def test_waveform_rejects_empty_and_2d():
    with pytest.raises(LengthError):
        Waveform([])
    with pytest.raises(DataError):
        Waveform([[1.0, 2.0]])


# ------------------------------------------------------------- parameters


def test_sync_params_defaults():
    p = SyncParams()
    assert p.sync_len == 1200
    assert p.key_len == 64800
    assert p.success_threshold == 0.08
    assert 0 < p.align_threshold < 1
    assert 0 < p.sync_margin < 1


@pytest.mark.parametrize(
    "kwargs",
    [
        {"align_threshold": 0.0},
        {"align_threshold": 1.0},
        {"align_window": 0},
        {"align_window": 2.5},
        {"sync_margin": -0.1},
        {"sync_margin": 1.0},
        {"sync_len": 0},
        {"key_len": -3},
        {"success_threshold": 0.0},
        {"success_threshold": 1.5},
    ],
)
def test_sync_params_validation(kwargs):
    with pytest.raises(ParameterError):
        SyncParams(**kwargs)


def test_sync_sequence_validation():
    s = SyncSequence([0.5, 1.5], origin=3)
    assert len(s) == 2 and s.origin == 3
    with pytest.raises(BoundsError):
        SyncSequence([0.5], origin=-1)


def test_alignment_result_validation():
    r = AlignmentResult(position=5, score=0.25, algorithm="peak_search")
    assert r.position == 5
    with pytest.raises(BoundsError):
        AlignmentResult(position=-1, score=0.0, algorithm="peak_search")
    with pytest.raises(ParameterError):
        AlignmentResult(position=0, score=-1.0, algorithm="peak_search")
    with pytest.raises(ParameterError):
        AlignmentResult(position=0, score=float("nan"), algorithm="peak_search")
    with pytest.raises(ParameterError):
        AlignmentResult(position=0, score=0.0, algorithm="nonsense")


# ----------------------------------------------------------------- BitKey


def test_bitkey_from_bits_round_trip():
    bits = np.array([1, 0, 1, 1, 0, 0, 1, 0, 1, 1], dtype=np.uint8)
    key = BitKey.from_bits(bits)
    assert len(key) == 10
    assert np.array_equal(key.bits, bits)


def test_bitkey_pad_bits_are_zeroed():
    # Same 3 leading bits, different garbage in the pad region.
    a = BitKey(np.array([0b101_11111], dtype=np.uint8), nbits=3)
    b = BitKey.from_bits([1, 0, 1])
    assert a == b
    assert hash(a) == hash(b)
    assert a.to_bytes() == b.to_bytes() == bytes([0b10100000])


def test_bitkey_bytes_and_hex():
    key = BitKey.from_bits([1, 1, 1, 1, 0, 0, 0, 0, 1, 0, 1, 0, 0, 1, 0, 1])
    assert key.to_bytes() == bytes([0xF0, 0xA5])
    assert key.to_hex() == "f0a5"
    assert BitKey.from_bytes(key.to_bytes(), 16) == key


def test_bitkey_inequality_by_length():
    assert BitKey.from_bits([1, 0]) != BitKey.from_bits([1, 0, 0])
    assert BitKey.from_bits([1, 0]) != "10"


def test_bitkey_rejects_bad_input():
    with pytest.raises(DataError):
        BitKey.from_bits([0, 1, 2])
    with pytest.raises(LengthError):
        BitKey.from_bits([])
    with pytest.raises(LengthError):
        BitKey(np.array([1], dtype=np.uint8), nbits=12)


# --------------------------------------------------------------- quantize


def test_quantize_median_half_split():
    key = quantize([0.0, 0.0, 5.0, 5.0], "median")
    assert np.array_equal(key.bits, [0, 0, 1, 1])


def test_quantize_constant_segment_is_all_zero():
    key = quantize([3.0] * 16, "median")
    assert not key.bits.any()


def test_quantize_fixed_threshold_against_per_sample_oracle():
    segment = np.arange(64, dtype=np.float64)
    key = quantize(segment, 31.5)
    expected = np.array([1 if x > 31.5 else 0 for x in segment], dtype=np.uint8)
    assert np.array_equal(key.bits, expected)
    assert key.bits[:32].sum() == 0 and key.bits[32:].sum() == 32


def test_quantize_mean_policy():
    segment = [0.0, 0.0, 0.0, 4.0]
    key = quantize(segment, "mean")  # mean 1.0, only the last sample above
    assert np.array_equal(key.bits, [0, 0, 0, 1])


def test_quantize_length_contract():
    key = quantize([1.0, 2.0, 3.0], "median", key_len=3)
    assert len(key) == 3
    with pytest.raises(LengthError):
        quantize([1.0, 2.0, 3.0], "median", key_len=4)
    with pytest.raises(LengthError):
        quantize([], "median")


def test_quantize_rejects_bad_input():
    with pytest.raises(DataError):
        quantize([1.0, np.nan], "median")
    with pytest.raises(DataError):
        quantize(np.ones((2, 2)), "median")
    with pytest.raises(ParameterError):
        quantize([1.0, 2.0], "mode")
    with pytest.raises(ParameterError):
        quantize([1.0, 2.0], float("inf"))


# ---------------------------------------------------------------- hamming


def test_hamming_identity_and_complement():
    rng = np.random.default_rng(11)
    bits = rng.integers(0, 2, 101, dtype=np.uint8)
    key = BitKey.from_bits(bits)
    flipped = BitKey.from_bits(1 - bits)
    assert hamming_fraction(key, key) == 0.0
    assert hamming_fraction(key, flipped) == 1.0
    assert hamming_count(key, flipped) == 101


def test_hamming_count_matches_direct_bit_comparison():
    rng = np.random.default_rng(5)
    a_bits = rng.integers(0, 2, 333, dtype=np.uint8)
    b_bits = rng.integers(0, 2, 333, dtype=np.uint8)
    a, b = BitKey.from_bits(a_bits), BitKey.from_bits(b_bits)
    assert hamming_count(a, b) == int((a_bits != b_bits).sum())
    assert hamming_fraction(a, b) == pytest.approx(int((a_bits != b_bits).sum()) / 333)


def test_hamming_random_keys_near_half():
    # Two independent uniform keys disagree on about half the bits.
    rng = np.random.default_rng(123)
    fractions = []
    for _ in range(100):
        a = BitKey.from_bits(rng.integers(0, 2, 64800, dtype=np.uint8))
        b = BitKey.from_bits(rng.integers(0, 2, 64800, dtype=np.uint8))
        fractions.append(hamming_fraction(a, b))
    assert abs(np.mean(fractions) - 0.5) < 0.01


def test_hamming_length_mismatch():
    with pytest.raises(LengthError):
        hamming_count(BitKey.from_bits([1, 0]), BitKey.from_bits([1, 0, 1]))


# ----------------------------------------------------- segment_sq_distance


def test_segment_distance_self_match_is_zero():
    rng = np.random.default_rng(2)
    wave = Waveform(rng.uniform(-1, 1, 400))
    sync = SyncSequence(wave.samples[37 : 37 + 50].copy(), origin=37)
    assert segment_sq_distance(wave, 37, sync) == 0.0


def test_segment_distance_constant_offset():
    base = np.random.default_rng(3).uniform(-1, 1, 1200)
    wave = Waveform(base + 1.0)
    sync = SyncSequence(base, origin=0)
    assert segment_sq_distance(wave, 0, sync) == pytest.approx(1200.0)


def test_segment_distance_matches_loop_oracle_everywhere():
    rng = np.random.default_rng(4)
    wave = Waveform(rng.uniform(-1, 1, 16))
    sync = SyncSequence(rng.uniform(-1, 1, 4), origin=0)
    for i in range(16 - 4 + 1):
        oracle = sum((wave.samples[i + j] - sync.samples[j]) ** 2 for j in range(4))
        assert segment_sq_distance(wave, i, sync) == pytest.approx(oracle, rel=1e-12)


def test_segment_distance_bounds():
    wave = Waveform(np.ones(10))
    sync = SyncSequence(np.ones(4), origin=0)
    with pytest.raises(BoundsError):
        segment_sq_distance(wave, 7, sync)
    with pytest.raises(BoundsError):
        segment_sq_distance(wave, -1, sync)
