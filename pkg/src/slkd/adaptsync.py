"""Adaptive time synchronization by sliding-window distance matching.

The sender cuts the first L samples from its located waveform start and
sends them in the clear as a synchronization sequence.  The receiver slides
that sequence over its own capture and keeps the offset with the smallest
squared Euclidean distance.  Both sides then read their keys from the
sample right after the synchronization region, so the keys stay aligned
even when the captures are shifted relative to each other or one capture is
locally damaged: the matcher simply locks onto the cleanest copy of the
sync content.

``match_naive`` evaluates every candidate offset directly and is the
reference implementation.  ``match_fft`` computes all candidate scores at
once through the correlation identity

    sum((w[i+j] - s[j])^2) = sum(w[i+j]^2) - 2 * corr(w, s)[i] + sum(s[j]^2)

using a real FFT for the correlation and prefix sums for the sliding
energy, then re-evaluates the near-minimal candidates directly so that its
returned position and score are exactly those of ``match_naive``.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .core import (
    ADAPTIVE_FFT,
    ADAPTIVE_NAIVE,
    AlignmentResult,
    LengthError,
    ParameterError,
    SyncParams,
    SyncSequence,
    Waveform,
    segment_sq_distance,
)
from .peaksearch import find_waveform_start

__all__ = [
    "SyncOutcome",
    "select_sync_sequence",
    "match_naive",
    "match_fft",
    "adaptive_sync",
]

# Relative width of the near-tie band re-checked directly by match_fft.
# FFT and prefix-sum round-off is below 1e-11 of the score scale for any
# practical capture length, so this band always contains the true minimum.
_REFINE_RTOL = 1e-9


def _next_fast_len(n: int) -> int:
    """Smallest 5-smooth integer >= n; numpy's FFT is fast at these sizes."""
    best = 1 << max((n - 1).bit_length(), 0)
    p5 = 1
    while p5 < best:
        p35 = p5
        while p35 < best:
            size = p35
            while size < n:
                size *= 2
            if size < best:
                best = size
            p35 *= 3
        p5 *= 5
    return best


class SyncOutcome(NamedTuple):
    """Key start indices produced by one adaptive synchronization run."""

    sender_key_start: int
    receiver_key_start: int
    result: AlignmentResult


def select_sync_sequence(sender: Waveform, params: SyncParams) -> SyncSequence:
    """Cut the sender's synchronization sequence.

    Takes the first ``sync_len`` samples from the sender's located waveform
    start.  The sender key is read from ``origin + sync_len`` onward, so at
    least ``sync_len + key_len`` samples must follow the start.

    Raises:
        LengthError: the capture is too short past the located start.
    """
    start = find_waveform_start(sender, params)
    needed = start + params.sync_len + params.key_len
    if needed > len(sender):
        raise LengthError(
            f"sender needs {needed} samples for sync plus key from start {start}, "
            f"has {len(sender)}"
        )
    return SyncSequence(samples=sender.samples[start : start + params.sync_len], origin=start)


def _check_match_inputs(receiver: Waveform, sync: SyncSequence, params: SyncParams) -> int:
    if len(sync) != params.sync_len:
        raise LengthError(f"sync sequence has {len(sync)} samples, expected {params.sync_len}")
    last = len(receiver) - params.sync_len - params.key_len
    if last < 0:
        raise LengthError(
            f"receiver of length {len(receiver)} cannot hold sync_len + key_len = "
            f"{params.sync_len + params.key_len} samples"
        )
    return last


def match_naive(receiver: Waveform, sync: SyncSequence, params: SyncParams) -> AlignmentResult:
    """Slide the sync sequence over the receiver, scoring every offset directly.

    Candidate offsets run from 0 through ``len(receiver) - sync_len -
    key_len`` inclusive so a full key always fits after the match.  Ties are
    resolved to the smallest offset.
    """
    last = _check_match_inputs(receiver, sync, params)
    w = receiver.samples
    s = sync.samples
    length = s.size
    best = np.inf
    best_i = 0
    for i in range(last + 1):
        diff = w[i : i + length] - s
        value = float(diff @ diff)
        if value < best:
            best = value
            best_i = i
    return AlignmentResult(position=best_i, score=best, algorithm=ADAPTIVE_NAIVE)


def match_fft(receiver: Waveform, sync: SyncSequence, params: SyncParams) -> AlignmentResult:
    """FFT-accelerated equivalent of :func:`match_naive`.

    Returns the same position and score as the naive matcher on every
    input: all offsets whose fast score falls within a small band of the
    minimum are re-evaluated with the direct sum, which also resolves
    near-ties to the smallest offset.
    """
    last = _check_match_inputs(receiver, sync, params)
    w = receiver.samples
    s = sync.samples
    length = s.size

    # Zero-padding to the waveform length already rules out circular
    # wrap-around for every candidate lag (i + L - 1 < len(w) <= size).
    size = _next_fast_len(w.size)
    spectrum = np.fft.rfft(w, size) * np.conj(np.fft.rfft(s, size))
    corr = np.fft.irfft(spectrum, size)[: last + 1]

    csum = np.concatenate(([0.0], np.cumsum(w * w)))
    window_sq = csum[length : length + last + 1] - csum[: last + 1]
    sync_sq = float(s @ s)
    scores = window_sq - 2.0 * corr + sync_sq

    lowest = float(scores.min())
    tolerance = _REFINE_RTOL * (float(window_sq.max()) + sync_sq) + 1e-12
    candidates = np.flatnonzero(scores <= lowest + tolerance)

    best = np.inf
    best_i = 0
    for i in candidates:
        value = segment_sq_distance(receiver, int(i), sync)
        if value < best:
            best = value
            best_i = int(i)
    return AlignmentResult(position=best_i, score=best, algorithm=ADAPTIVE_FFT)


def adaptive_sync(
    sender: Waveform,
    receiver: Waveform,
    params: SyncParams,
    matcher: str = "fft",
) -> SyncOutcome:
    """Full adaptive synchronization of a capture pair.

    Selects the sender sync sequence, matches it inside the receiver, and
    returns both key start indices: ``origin + sync_len`` on the sender and
    ``match position + sync_len`` on the receiver.

    Args:
        matcher: "fft" (default) or "naive".
    """
    if matcher == "fft":
        match = match_fft
    elif matcher == "naive":
        match = match_naive
    else:
        raise ParameterError(f"unknown matcher {matcher!r}, expected 'fft' or 'naive'")
    sync = select_sync_sequence(sender, params)
    result = match(receiver, sync, params)
    return SyncOutcome(
        sender_key_start=sync.origin + params.sync_len,
        receiver_key_start=result.position + params.sync_len,
        result=result,
    )
