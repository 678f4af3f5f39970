"""Key distribution from synchronized chaotic waveforms.

Two devices driven by a shared sequence settle into near-identical
waveforms; each side locates the same segment in its own capture, quantizes
it, and keeps the result as a key.  This package provides the two alignment
strategies (threshold peak search and sliding-window adaptive matching), the
bit-level tooling, a capture simulator with channel models, a cross-pairing
experiment harness, report rendering, and file formats for waveforms and
keys.
"""

from .adaptsync import (
    SyncOutcome,
    adaptive_sync,
    match_fft,
    match_naive,
    select_sync_sequence,
)
from .core import (
    ADAPTIVE_FFT,
    ADAPTIVE_NAIVE,
    PEAK_SEARCH,
    AlignmentFailure,
    AlignmentResult,
    BitKey,
    BoundsError,
    DataError,
    InsufficientSamplesError,
    LengthError,
    NoPeakError,
    ParameterError,
    SyncParams,
    SyncSequence,
    Waveform,
    hamming_count,
    hamming_fraction,
    quantize,
    segment_sq_distance,
)
from .harness import (
    ALGORITHMS,
    ADAPTIVE_ALGORITHM,
    PEAK_SEARCH_ALGORITHM,
    CellSummary,
    ExperimentConfig,
    ExperimentReport,
    TrialOutcome,
    run_experiment,
    run_trial,
)
from .peaksearch import find_first_peak, find_waveform_start, peak_align
from .report import (
    render_csv,
    render_figures,
    render_report,
    render_table,
    render_trials_csv,
    report_from_json,
    report_to_json,
)
from .simulator import (
    CALIBRATED_NOISE_SIGMA,
    CHANNEL_PRESETS,
    DRIVING_KINDS,
    CapturePair,
    ChannelModel,
    DrivingSequence,
    apply_channel,
    channel_preset,
    gen_chaotic_response,
    gen_driving,
    make_base_signal,
    make_pair,
    preset_length_factor,
)
from .waveio import (
    KEY_MAGIC,
    WAVE_MAGIC,
    read_key,
    read_waveform,
    read_waveform_binary,
    read_waveform_csv,
    write_key,
    write_waveform_binary,
    write_waveform_csv,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # core
    "Waveform",
    "SyncParams",
    "SyncSequence",
    "AlignmentResult",
    "BitKey",
    "quantize",
    "hamming_count",
    "hamming_fraction",
    "segment_sq_distance",
    "PEAK_SEARCH",
    "ADAPTIVE_NAIVE",
    "ADAPTIVE_FFT",
    # errors
    "LengthError",
    "DataError",
    "ParameterError",
    "BoundsError",
    "AlignmentFailure",
    "NoPeakError",
    "InsufficientSamplesError",
    # peak search
    "find_waveform_start",
    "find_first_peak",
    "peak_align",
    # adaptive synchronization
    "SyncOutcome",
    "select_sync_sequence",
    "match_naive",
    "match_fft",
    "adaptive_sync",
    # simulator
    "DrivingSequence",
    "ChannelModel",
    "CapturePair",
    "DRIVING_KINDS",
    "CHANNEL_PRESETS",
    "CALIBRATED_NOISE_SIGMA",
    "gen_driving",
    "gen_chaotic_response",
    "make_base_signal",
    "apply_channel",
    "make_pair",
    "channel_preset",
    "preset_length_factor",
    # harness
    "ALGORITHMS",
    "ADAPTIVE_ALGORITHM",
    "PEAK_SEARCH_ALGORITHM",
    "TrialOutcome",
    "ExperimentConfig",
    "CellSummary",
    "ExperimentReport",
    "run_trial",
    "run_experiment",
    # report
    "render_table",
    "render_csv",
    "render_trials_csv",
    "render_report",
    "render_figures",
    "report_to_json",
    "report_from_json",
    # file io
    "WAVE_MAGIC",
    "KEY_MAGIC",
    "read_waveform",
    "read_waveform_csv",
    "read_waveform_binary",
    "write_waveform_csv",
    "write_waveform_binary",
    "read_key",
    "write_key",
]
