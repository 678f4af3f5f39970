"""Waveform-start and first-peak alignment.

Captures come in two shapes: some open on a quiet stretch before the
waveform proper, others begin mid-burst.  A windowed quiescence scan finds
the first quiet window and positions the search just past it, which lands
either right after the leading quiet zone or inside the gap separating two
bursts.  From there the first local peak above a relative amplitude
threshold anchors the capture; the key is read starting one sample after
that peak.

Both sides anchor independently, so this method needs no exchange beyond
the shared driving signal, but any disagreement about which sample is the
first peak desynchronizes the extracted keys completely.
"""

from __future__ import annotations

import numpy as np

from .core import (
    PEAK_SEARCH,
    AlignmentResult,
    BoundsError,
    InsufficientSamplesError,
    LengthError,
    NoPeakError,
    SyncParams,
    Waveform,
)

__all__ = ["find_waveform_start", "find_first_peak", "peak_align"]


def find_waveform_start(wave: Waveform, params: SyncParams) -> int:
    """Locate the scan start by finding the first quiescent window.

    Slides a window of ``align_window`` samples from the head of the capture
    and returns ``i + align_window`` for the smallest ``i`` at which the
    windowed sum of absolute amplitudes is at most
    ``align_window * sync_margin * max(|wave|)``.

    A capture that opens quiet therefore yields ``align_window`` (the first
    index past the initial quiet window).  A capture that opens mid-burst
    yields a position inside the first inter-burst gap.  If no window is
    quiet enough the scan gives up and returns 0 so the peak search covers
    the whole capture.

    Raises:
        LengthError: the capture is shorter than ``align_window``.
    """
    window = params.align_window
    if len(wave) < window:
        raise LengthError(f"waveform of length {len(wave)} is shorter than align_window {window}")
    mags = np.abs(wave.samples)
    limit = window * params.sync_margin * float(mags.max())
    sums = np.lib.stride_tricks.sliding_window_view(mags, window).sum(axis=1)
    quiet = np.flatnonzero(sums <= limit)
    if quiet.size == 0:
        return 0
    return int(quiet[0]) + window


def find_first_peak(wave: Waveform, start: int, params: SyncParams) -> AlignmentResult:
    """Find the first local peak above the relative amplitude threshold.

    Scans from ``start`` and considers only samples strictly above
    ``align_threshold * max(wave)``.  A running maximum tracks those
    samples; the scan stops at the first above-threshold sample that fails
    to exceed the running maximum, and the position of the running maximum
    is returned.  Samples below the threshold never stop the scan, so dips
    between bursts are skipped.  Plateaus keep the earliest index.

    Args:
        wave: capture to scan.
        start: first index considered.
        params: supplies ``align_threshold``.

    Returns:
        AlignmentResult with the peak position, the peak amplitude as the
        score, and algorithm tag "peak_search".

    Raises:
        BoundsError: ``start`` is outside the waveform.
        NoPeakError: no sample after ``start`` exceeds the threshold.
    """
    samples = wave.samples
    if not 0 <= start < samples.size:
        raise BoundsError(f"scan start {start} outside waveform of length {samples.size}")
    threshold = params.align_threshold * float(samples.max())
    above = np.flatnonzero(samples[start:] > threshold)
    if above.size == 0:
        raise NoPeakError(
            f"no sample after index {start} exceeds {params.align_threshold:g} of the maximum"
        )
    above += start
    peak_pos = int(above[0])
    peak_val = float(samples[peak_pos])
    for i in above[1:]:
        value = float(samples[i])
        if value > peak_val:
            peak_pos = int(i)
            peak_val = value
        else:
            break
    return AlignmentResult(position=peak_pos, score=peak_val, algorithm=PEAK_SEARCH)


def peak_align(wave: Waveform, params: SyncParams) -> AlignmentResult:
    """Run the full start scan plus first-peak search on one capture.

    The key is read from ``position + 1`` onward, so the capture must hold
    ``key_len`` samples past the peak.

    Raises:
        NoPeakError: no sample exceeds the peak threshold.
        InsufficientSamplesError: fewer than ``key_len`` samples follow the
            peak.
    """
    start = find_waveform_start(wave, params)
    if start >= len(wave):
        # The only quiet window is the capture tail; nothing follows it.
        raise NoPeakError(f"capture is quiet from index {start - params.align_window} to its end")
    result = find_first_peak(wave, start, params)
    key_start = result.position + 1
    if key_start + params.key_len > len(wave):
        raise InsufficientSamplesError(
            f"only {len(wave) - key_start} samples follow the peak at {result.position}, "
            f"need {params.key_len}"
        )
    return result
