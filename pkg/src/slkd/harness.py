"""Experiment harness: single trials and seeded cross-pairing experiments.

An experiment mirrors the reference protocol: for each driving kind both
sides capture the shared response ``n_per_side`` times through independent
channel realizations, and every sender capture is paired with every
receiver capture, giving ``n_per_side ** 2`` trials per kind and algorithm.
A trial aligns the pair with one algorithm, quantizes the two key segments,
and records their Hamming fraction.  Alignment errors are not exceptions at
this level: they are recorded as hard failures with a Hamming fraction of
1.0 so failure accounting stays honest.

Everything is deterministic in ``master_seed``.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional, Sequence, Union

import numpy as np

from .adaptsync import adaptive_sync
from .core import (
    AlignmentFailure,
    ParameterError,
    QuantizePolicy,
    SyncParams,
    Waveform,
    hamming_fraction,
    quantize,
)
from .peaksearch import peak_align
from .simulator import (
    DRIVING_KINDS,
    PSEUDO_RANDOM,
    CapturePair,
    ChannelModel,
    apply_channel,
    channel_preset,
    gen_driving,
    make_base_signal,
    preset_length_factor,
)

__all__ = [
    "PEAK_SEARCH_ALGORITHM",
    "ADAPTIVE_ALGORITHM",
    "ALGORITHMS",
    "TrialOutcome",
    "ExperimentConfig",
    "CellSummary",
    "ExperimentReport",
    "run_trial",
    "run_experiment",
]

PEAK_SEARCH_ALGORITHM = "peak_search"
ADAPTIVE_ALGORITHM = "adaptive"
ALGORITHMS = (ADAPTIVE_ALGORITHM, PEAK_SEARCH_ALGORITHM)


@dataclass(frozen=True)
class TrialOutcome:
    """Result of aligning and comparing one capture pair with one algorithm."""

    driving_kind: str
    algorithm: str
    hamming: float
    success: bool
    hard_failure: bool
    sender_trial_id: int
    receiver_trial_id: int


@dataclass(frozen=True)
class ExperimentConfig:
    """Echo of everything an experiment was run with."""

    kinds: tuple[str, ...]
    algorithms: tuple[str, ...]
    n_per_side: int
    channel_preset: str
    channel: ChannelModel
    master_seed: int
    length: int
    period: int
    policy: str
    params: SyncParams


@dataclass(frozen=True)
class CellSummary:
    """Aggregates for one driving kind under one algorithm."""

    driving_kind: str
    algorithm: str
    trials: int
    failures: int
    hard_failures: int
    failure_rate: float
    mean_hamming: float
    median_hamming: float
    max_hamming: float


@dataclass(frozen=True)
class ExperimentReport:
    """Full record of an experiment: config echo plus every trial outcome."""

    config: ExperimentConfig
    outcomes: tuple[TrialOutcome, ...]

    def cell_keys(self) -> list[tuple[str, str]]:
        """(kind, algorithm) pairs present in the outcomes, in config order."""
        present = {(o.driving_kind, o.algorithm) for o in self.outcomes}
        ordered = [
            (kind, algorithm)
            for kind in self.config.kinds
            for algorithm in self.config.algorithms
            if (kind, algorithm) in present
        ]
        # Keep any outcome whose key is not covered by the config echo.
        for key in sorted(present - set(ordered)):
            ordered.append(key)
        return ordered

    def hammings(self, driving_kind: str, algorithm: str) -> list[float]:
        return [
            o.hamming
            for o in self.outcomes
            if o.driving_kind == driving_kind and o.algorithm == algorithm
        ]

    def cell(self, driving_kind: str, algorithm: str) -> CellSummary:
        picked = [
            o
            for o in self.outcomes
            if o.driving_kind == driving_kind and o.algorithm == algorithm
        ]
        if not picked:
            raise ParameterError(f"no outcomes for ({driving_kind!r}, {algorithm!r})")
        values = np.array([o.hamming for o in picked])
        failures = sum(not o.success for o in picked)
        return CellSummary(
            driving_kind=driving_kind,
            algorithm=algorithm,
            trials=len(picked),
            failures=failures,
            hard_failures=sum(o.hard_failure for o in picked),
            failure_rate=failures / len(picked),
            mean_hamming=float(values.mean()),
            median_hamming=float(np.median(values)),
            max_hamming=float(values.max()),
        )

    def summaries(self) -> list[CellSummary]:
        return [self.cell(kind, algorithm) for kind, algorithm in self.cell_keys()]


def _key_pair(pair: CapturePair, algorithm: str, params: SyncParams):
    """Aligned key segments for one pair, as a (sender, receiver) array tuple."""
    K = params.key_len
    if algorithm == PEAK_SEARCH_ALGORITHM:
        sender_res = peak_align(pair.sender, params)
        receiver_res = peak_align(pair.receiver, params)
        s0 = sender_res.position + 1
        r0 = receiver_res.position + 1
    elif algorithm == ADAPTIVE_ALGORITHM:
        outcome = adaptive_sync(pair.sender, pair.receiver, params, matcher="fft")
        s0 = outcome.sender_key_start
        r0 = outcome.receiver_key_start
    else:
        raise ParameterError(f"unknown algorithm {algorithm!r}, expected one of {ALGORITHMS}")
    return pair.sender.samples[s0 : s0 + K], pair.receiver.samples[r0 : r0 + K]


def run_trial(
    pair: CapturePair,
    algorithm: str,
    params: SyncParams,
    policy: QuantizePolicy = "median",
    driving_kind: str = "",
    sender_trial_id: int = 0,
    receiver_trial_id: int = 0,
) -> TrialOutcome:
    """Align one pair, extract and quantize both keys, record the Hamming fraction.

    Alignment failures (no peak, key does not fit) become hard failures with
    a recorded Hamming fraction of 1.0.  Unknown algorithm names are
    programming errors and raise.
    """
    try:
        sender_key, receiver_key = _key_pair(pair, algorithm, params)
        hamming = hamming_fraction(
            quantize(sender_key, policy, params.key_len),
            quantize(receiver_key, policy, params.key_len),
        )
        hard = False
    except AlignmentFailure:
        hamming = 1.0
        hard = True
    return TrialOutcome(
        driving_kind=driving_kind,
        algorithm=algorithm,
        hamming=hamming,
        success=hamming < params.success_threshold,
        hard_failure=hard,
        sender_trial_id=sender_trial_id,
        receiver_trial_id=receiver_trial_id,
    )


def _resolve_channel(channel: Union[str, ChannelModel]) -> tuple[str, ChannelModel, float]:
    if isinstance(channel, ChannelModel):
        return "custom", channel, 2.0
    name = str(channel)
    return name, channel_preset(name), preset_length_factor(name)


def run_experiment(
    kinds: Sequence[str] = DRIVING_KINDS,
    algorithms: Sequence[str] = ALGORITHMS,
    n_per_side: int = 30,
    channel: Union[str, ChannelModel] = "paper-calibrated",
    master_seed: int = 0,
    params: Optional[SyncParams] = None,
    length: Optional[int] = None,
    period: int = 64,
    policy: QuantizePolicy = "median",
) -> ExperimentReport:
    """Run the full cross-pairing experiment, deterministically in the seed.

    For each kind, ``n_per_side`` sender captures and ``n_per_side``
    receiver captures of the same base signal are taken through the channel
    with independently derived seeds, and all ``n_per_side ** 2`` pairings
    run through every requested algorithm.

    Args:
        kinds: driving kinds to cover.
        algorithms: algorithm names from ALGORITHMS.
        n_per_side: captures per side and kind.
        channel: a preset name or an explicit ChannelModel (its seed field
            is replaced per capture).
        length: driving length; defaults to the preset's recommended factor
            times ``sync_len + key_len``.
        period: base period for the periodic kinds.
        policy: quantization policy for every trial.
    """
    if params is None:
        params = SyncParams()
    if n_per_side < 1:
        raise ParameterError(f"n_per_side must be positive, got {n_per_side}")
    for algorithm in algorithms:
        if algorithm not in ALGORITHMS:
            raise ParameterError(f"unknown algorithm {algorithm!r}, expected one of {ALGORITHMS}")

    preset_name, base_channel, factor = _resolve_channel(channel)
    if length is None:
        length = int(factor * (params.sync_len + params.key_len))

    config = ExperimentConfig(
        kinds=tuple(kinds),
        algorithms=tuple(algorithms),
        n_per_side=n_per_side,
        channel_preset=preset_name,
        channel=base_channel,
        master_seed=master_seed,
        length=length,
        period=period,
        policy=str(policy),
        params=params,
    )

    outcomes: list[TrialOutcome] = []
    for kind_index, kind in enumerate(config.kinds):
        seeds = np.random.SeedSequence(master_seed, spawn_key=(kind_index,)).generate_state(
            2 + 2 * n_per_side
        )
        driving = gen_driving(
            kind,
            length,
            period=None if kind == PSEUDO_RANDOM else period,
            seed=int(seeds[0]),
        )
        base = make_base_signal(driving, int(seeds[1]), params, ramp=base_channel.ramp)

        def capture(seed: int, label: str) -> Waveform:
            distorted = apply_channel(base, replace(base_channel, seed=seed))
            return Waveform(distorted, label=label, seed=seed)

        senders = [
            capture(int(seeds[2 + i]), f"{kind}/sender[{i}]") for i in range(n_per_side)
        ]
        receivers = [
            capture(int(seeds[2 + n_per_side + j]), f"{kind}/receiver[{j}]")
            for j in range(n_per_side)
        ]
        for algorithm in config.algorithms:
            for i in range(n_per_side):
                for j in range(n_per_side):
                    pair = CapturePair(
                        sender=senders[i],
                        receiver=receivers[j],
                        truth_offset=base_channel.offset,
                    )
                    outcomes.append(
                        run_trial(
                            pair,
                            algorithm,
                            params,
                            policy=policy,
                            driving_kind=kind,
                            sender_trial_id=i,
                            receiver_trial_id=j,
                        )
                    )
    return ExperimentReport(config=config, outcomes=tuple(outcomes))
