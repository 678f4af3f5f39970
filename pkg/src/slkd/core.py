"""Core types and bit-level primitives for waveform key extraction.

Two devices that observe near-identical chaotic waveforms can derive a
shared secret by aligning their captures, cutting a fixed-length segment,
and thresholding it into bits.  This module holds the vocabulary shared by
the alignment algorithms: immutable waveforms, tuning parameters, sync
sequences, alignment results, packed bit keys, and the three primitive
operations (quantize, Hamming distance, windowed squared distance).

Everything here is pure: inputs are never mutated and repeated calls with
equal inputs return equal outputs.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

__all__ = [
    "PEAK_SEARCH",
    "ADAPTIVE_NAIVE",
    "ADAPTIVE_FFT",
    "LengthError",
    "DataError",
    "ParameterError",
    "BoundsError",
    "AlignmentFailure",
    "NoPeakError",
    "InsufficientSamplesError",
    "Waveform",
    "SyncParams",
    "SyncSequence",
    "AlignmentResult",
    "BitKey",
    "quantize",
    "hamming_count",
    "hamming_fraction",
    "segment_sq_distance",
]

# Algorithm tags carried by AlignmentResult.
PEAK_SEARCH = "peak_search"
ADAPTIVE_NAIVE = "adaptive_naive"
ADAPTIVE_FFT = "adaptive_fft"


class LengthError(ValueError):
    """An input has the wrong number of samples or bits."""


class DataError(ValueError):
    """An input contains non-finite or otherwise unusable values."""


class ParameterError(ValueError):
    """A parameter lies outside its valid range."""


class BoundsError(IndexError):
    """An index falls outside the waveform."""


class AlignmentFailure(RuntimeError):
    """Alignment could not produce a usable key position.

    Harness code treats these as hard failures of a trial rather than as
    programming errors.
    """


class NoPeakError(AlignmentFailure):
    """No sample exceeds the peak threshold after the scan start."""


class InsufficientSamplesError(AlignmentFailure):
    """Too few samples remain after the aligned position to cut a key."""


def _as_samples(values, *, what: str = "waveform") -> np.ndarray:
    """Validate and freeze a 1-D float64 sample array."""
    arr = np.array(values, dtype=np.float64, copy=True)
    if arr.ndim != 1:
        raise DataError(f"{what} samples must be one-dimensional, got shape {arr.shape}")
    if arr.size < 1:
        raise LengthError(f"{what} needs at least one sample")
    if not np.all(np.isfinite(arr)):
        raise DataError(f"{what} samples must all be finite")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Waveform:
    """One capture: an immutable sequence of finite float64 amplitudes.

    Attributes:
        samples: read-only 1-D float64 array, length >= 1.
        label: optional free-form source tag ("sender", "receiver", ...).
        seed: optional seed the capture was generated from, for bookkeeping.
    """

    samples: np.ndarray
    label: str = ""
    seed: int | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "samples", _as_samples(self.samples))

    def __len__(self) -> int:
        return int(self.samples.size)


@dataclass(frozen=True)
class SyncParams:
    """Tunables shared by both alignment algorithms.

    Attributes:
        align_threshold: fraction of the global maximum a sample must exceed
            to count as a peak candidate, in (0, 1).
        align_window: number of samples summed by the quiescence scan.
        sync_margin: quiescence level as a fraction of the global maximum
            amplitude, in (0, 1).
        sync_len: length L of the synchronization sequence.
        key_len: length K of the extracted key, in samples (one bit each).
        success_threshold: Hamming fraction below which two keys count as
            agreeing.  Reconciliation of key pairs at or above this level is
            considered failed.
    """

    align_threshold: float = 0.8
    align_window: int = 100
    sync_margin: float = 0.05
    sync_len: int = 1200
    key_len: int = 64800
    success_threshold: float = 0.08

    def __post_init__(self) -> None:
        if not 0.0 < self.align_threshold < 1.0:
            raise ParameterError(f"align_threshold must be in (0, 1), got {self.align_threshold}")
        if int(self.align_window) != self.align_window or self.align_window < 1:
            raise ParameterError(f"align_window must be a positive integer, got {self.align_window}")
        if not 0.0 < self.sync_margin < 1.0:
            raise ParameterError(f"sync_margin must be in (0, 1), got {self.sync_margin}")
        if int(self.sync_len) != self.sync_len or self.sync_len < 1:
            raise ParameterError(f"sync_len must be a positive integer, got {self.sync_len}")
        if int(self.key_len) != self.key_len or self.key_len < 1:
            raise ParameterError(f"key_len must be a positive integer, got {self.key_len}")
        if not 0.0 < self.success_threshold < 1.0:
            raise ParameterError(
                f"success_threshold must be in (0, 1), got {self.success_threshold}"
            )


@dataclass(frozen=True, eq=False)
class SyncSequence:
    """A sender-side sample run used to locate the same content elsewhere.

    Attributes:
        samples: read-only float64 array of length L.
        origin: index in the sender waveform the sequence was cut from.
    """

    samples: np.ndarray
    origin: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "samples", _as_samples(self.samples, what="sync sequence"))
        if self.origin < 0:
            raise BoundsError(f"sync origin must be nonnegative, got {self.origin}")

    def __len__(self) -> int:
        return int(self.samples.size)


@dataclass(frozen=True)
class AlignmentResult:
    """Where an alignment algorithm anchored a waveform.

    Attributes:
        position: sample index of the anchor (peak position, or the start of
            the matched sync window).
        score: nonnegative quality figure; peak amplitude for peak search,
            squared Euclidean distance for the adaptive matchers.
        algorithm: one of PEAK_SEARCH, ADAPTIVE_NAIVE, ADAPTIVE_FFT.
    """

    position: int
    score: float
    algorithm: str

    def __post_init__(self) -> None:
        if self.position < 0:
            raise BoundsError(f"alignment position must be nonnegative, got {self.position}")
        if not np.isfinite(self.score) or self.score < 0.0:
            raise ParameterError(f"alignment score must be finite and nonnegative, got {self.score}")
        if self.algorithm not in (PEAK_SEARCH, ADAPTIVE_NAIVE, ADAPTIVE_FFT):
            raise ParameterError(f"unknown algorithm tag {self.algorithm!r}")


@dataclass(frozen=True, eq=False)
class BitKey:
    """A fixed-length bit sequence packed MSB-first into bytes.

    Construct with :meth:`from_bits` or :meth:`from_bytes`; the raw
    constructor expects already-packed data.  Pad bits beyond ``nbits`` are
    always stored as zero so equal keys compare equal bytewise.
    """

    packed: np.ndarray
    nbits: int

    def __post_init__(self) -> None:
        arr = np.array(self.packed, dtype=np.uint8, copy=True)
        if arr.ndim != 1:
            raise DataError("packed key data must be one-dimensional")
        if self.nbits < 1:
            raise LengthError(f"a key needs at least one bit, got {self.nbits}")
        if arr.size != (self.nbits + 7) // 8:
            raise LengthError(
                f"packed length {arr.size} does not hold exactly {self.nbits} bits"
            )
        # Zero the pad bits so equality can compare raw bytes.
        tail = self.nbits % 8
        if tail:
            arr[-1] &= (0xFF << (8 - tail)) & 0xFF
        arr.setflags(write=False)
        object.__setattr__(self, "packed", arr)

    @classmethod
    def from_bits(cls, bits) -> "BitKey":
        arr = np.asarray(bits)
        if arr.ndim != 1:
            raise DataError("bits must be one-dimensional")
        if arr.size < 1:
            raise LengthError("a key needs at least one bit")
        if arr.dtype != np.bool_ and not np.isin(arr, (0, 1)).all():
            raise DataError("bits must be 0 or 1")
        return cls(np.packbits(arr.astype(np.uint8), bitorder="big"), int(arr.size))

    @classmethod
    def from_bytes(cls, data: bytes, nbits: int) -> "BitKey":
        return cls(np.frombuffer(data, dtype=np.uint8), nbits)

    @property
    def bits(self) -> np.ndarray:
        """The key as a length-``nbits`` array of 0/1 uint8 values."""
        return np.unpackbits(self.packed, bitorder="big")[: self.nbits]

    def to_bytes(self) -> bytes:
        return self.packed.tobytes()

    def to_hex(self) -> str:
        return self.packed.tobytes().hex()

    def __len__(self) -> int:
        return self.nbits

    def __eq__(self, other) -> bool:
        if not isinstance(other, BitKey):
            return NotImplemented
        return self.nbits == other.nbits and bool(np.array_equal(self.packed, other.packed))

    def __hash__(self) -> int:
        return hash((self.nbits, self.packed.tobytes()))


# A quantization policy is "median", "mean", or a fixed numeric threshold.
QuantizePolicy = Union[str, float, int]


def _threshold_for(segment: np.ndarray, policy: QuantizePolicy) -> float:
    if isinstance(policy, str):
        if policy == "median":
            return float(np.median(segment))
        if policy == "mean":
            return float(segment.mean())
        raise ParameterError(f"unknown quantization policy {policy!r}")
    threshold = float(policy)
    if not np.isfinite(threshold):
        raise ParameterError(f"fixed quantization threshold must be finite, got {threshold}")
    return threshold


def quantize(segment, policy: QuantizePolicy = "median", key_len: int | None = None) -> BitKey:
    """Threshold a sample segment into a packed bit key.

    Bit i is 1 exactly when ``segment[i]`` is strictly greater than the
    threshold.  The threshold is the segment median ("median"), the segment
    mean ("mean"), or the numeric value passed as ``policy``.

    Args:
        segment: 1-D finite samples, one per key bit.
        policy: "median", "mean", or a fixed numeric threshold.
        key_len: if given, the exact number of samples required.

    Returns:
        BitKey of ``len(segment)`` bits.

    Raises:
        LengthError: segment length differs from ``key_len``.
        DataError: segment contains non-finite values.
        ParameterError: unknown policy or non-finite threshold.
    """
    arr = np.asarray(segment, dtype=np.float64)
    if arr.ndim != 1:
        raise DataError("segment must be one-dimensional")
    if key_len is not None and arr.size != key_len:
        raise LengthError(f"segment has {arr.size} samples, expected {key_len}")
    if arr.size < 1:
        raise LengthError("segment needs at least one sample")
    if not np.all(np.isfinite(arr)):
        raise DataError("segment samples must all be finite")
    threshold = _threshold_for(arr, policy)
    return BitKey.from_bits(arr > threshold)


def hamming_count(a: BitKey, b: BitKey) -> int:
    """Number of bit positions at which two equal-length keys differ."""
    if len(a) != len(b):
        raise LengthError(f"key lengths differ: {len(a)} vs {len(b)}")
    return int(np.unpackbits(np.bitwise_xor(a.packed, b.packed)).sum())


def hamming_fraction(a: BitKey, b: BitKey) -> float:
    """Fraction of differing bits, in [0, 1]."""
    return hamming_count(a, b) / len(a)


def segment_sq_distance(wave: Waveform, start: int, sync: SyncSequence) -> float:
    """Squared Euclidean distance between a waveform window and a sync sequence.

    Compares ``wave.samples[start : start + len(sync)]`` against the sync
    samples.  Zero exactly when the window equals the sequence element-wise.

    Raises:
        BoundsError: the window does not fit inside the waveform.
    """
    length = len(sync)
    if start < 0 or start + length > len(wave):
        raise BoundsError(
            f"window [{start}, {start + length}) outside waveform of length {len(wave)}"
        )
    diff = wave.samples[start : start + length] - sync.samples
    return float(diff @ diff)
