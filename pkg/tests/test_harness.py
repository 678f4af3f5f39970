"""Unit tests for trial execution and the cross-pairing experiment."""

import numpy as np
import pytest

from slkd import (
    ALGORITHMS,
    CapturePair,
    ChannelModel,
    ParameterError,
    SyncParams,
    Waveform,
    channel_preset,
    gen_driving,
    make_pair,
    run_experiment,
    run_trial,
)

SMALL = SyncParams(sync_len=60, key_len=240)


def small_pair(channel=ChannelModel(), seed=0):
    driving = gen_driving("pseudo_random", 600, seed=seed)
    return make_pair(driving, channel, SMALL)


# -------------------------------------------------------------- run_trial


def test_trial_identity_pair_adaptive():
    outcome = run_trial(small_pair(), "adaptive", SMALL, driving_kind="pseudo_random")
    assert outcome.hamming == 0.0
    assert outcome.success
    assert not outcome.hard_failure
    assert outcome.algorithm == "adaptive"
    assert outcome.driving_kind == "pseudo_random"


def test_trial_subthreshold_pair_is_a_hard_failure():
    flat = Waveform(np.zeros(600))
    pair = CapturePair(sender=flat, receiver=flat, truth_offset=0)
    outcome = run_trial(pair, "peak_search", SMALL)
    assert outcome.hard_failure
    assert outcome.hamming == 1.0
    assert not outcome.success


def test_trial_calibrated_adaptive_succeeds():
    params = SyncParams()
    driving = gen_driving("pseudo_random", 2 * 66000, seed=1)
    pair = make_pair(driving, channel_preset("paper-calibrated", seed=1), params)
    outcome = run_trial(pair, "adaptive", params)
    assert outcome.hamming < 0.08
    assert outcome.success and not outcome.hard_failure


def test_trial_peak_search_on_identity_pair():
    outcome = run_trial(small_pair(seed=3), "peak_search", SMALL)
    assert outcome.hamming == 0.0 and outcome.success


def test_trial_unknown_algorithm():
    with pytest.raises(ParameterError):
        run_trial(small_pair(), "oracle", SMALL)


def test_trial_success_never_coincides_with_hard_failure():
    for seed in range(10):
        pair = small_pair(ChannelModel(noise_sigma=0.4, seed=seed), seed=seed)
        for algorithm in ALGORITHMS:
            outcome = run_trial(pair, algorithm, SMALL)
            assert not (outcome.success and outcome.hard_failure)
            assert 0.0 <= outcome.hamming <= 1.0


# --------------------------------------------------------- run_experiment


def test_experiment_produces_900_outcomes():
    report = run_experiment(
        kinds=("pseudo_random",),
        algorithms=("adaptive",),
        n_per_side=30,
        channel="clean",
        master_seed=0,
        params=SMALL,
        length=600,
    )
    assert len(report.outcomes) == 900
    cell = report.cell("pseudo_random", "adaptive")
    assert cell.trials == 900
    assert report.config.n_per_side == 30


def test_experiment_single_perfect_pair():
    report = run_experiment(
        kinds=("pseudo_random",),
        algorithms=("adaptive",),
        n_per_side=1,
        channel="clean",
        master_seed=1,
        params=SMALL,
        length=600,
    )
    assert len(report.outcomes) == 1
    assert report.cell("pseudo_random", "adaptive").failure_rate == 0.0


def test_experiment_accounting_and_invariants():
    report = run_experiment(
        n_per_side=3,
        channel=ChannelModel(noise_sigma=0.5),  # noisy enough to fail sometimes
        master_seed=2,
        params=SMALL,
        length=600,
        period=16,
    )
    assert len(report.outcomes) == 3 * 3 * len(report.config.kinds) * len(ALGORITHMS)
    for cell in report.summaries():
        successes = sum(
            o.success
            for o in report.outcomes
            if (o.driving_kind, o.algorithm) == (cell.driving_kind, cell.algorithm)
        )
        assert successes + cell.failures == cell.trials
        assert cell.hard_failures <= cell.failures
        assert cell.failure_rate == cell.failures / cell.trials
        assert 0.0 <= cell.mean_hamming <= 1.0
        assert cell.max_hamming >= cell.median_hamming
    for outcome in report.outcomes:
        assert not (outcome.success and outcome.hard_failure)
        assert 0.0 <= outcome.hamming <= 1.0
        assert 0 <= outcome.sender_trial_id < 3
        assert 0 <= outcome.receiver_trial_id < 3


def test_experiment_is_deterministic():
    kwargs = dict(n_per_side=2, channel="paper-calibrated", master_seed=5, params=SMALL, length=600)
    assert run_experiment(**kwargs).outcomes == run_experiment(**kwargs).outcomes


def test_experiment_seed_changes_outcomes():
    kwargs = dict(
        kinds=("pseudo_random",),
        algorithms=("adaptive",),
        n_per_side=2,
        channel="paper-calibrated",
        params=SMALL,
        length=600,
    )
    a = run_experiment(master_seed=1, **kwargs)
    b = run_experiment(master_seed=2, **kwargs)
    assert [o.hamming for o in a.outcomes] != [o.hamming for o in b.outcomes]


def test_experiment_covers_all_kinds_and_algorithms():
    report = run_experiment(n_per_side=1, channel="clean", master_seed=0, params=SMALL, length=600)
    assert report.cell_keys() == [
        (kind, algorithm)
        for kind in report.config.kinds
        for algorithm in report.config.algorithms
    ]
    assert len(report.config.kinds) == 3


def test_experiment_validation():
    with pytest.raises(ParameterError):
        run_experiment(n_per_side=0, params=SMALL, length=600)
    with pytest.raises(ParameterError):
        run_experiment(algorithms=("oracle",), params=SMALL, length=600)
    with pytest.raises(ParameterError):
        run_experiment(channel="pristine", params=SMALL, length=600)


def test_report_cell_missing_key():
    report = run_experiment(
        kinds=("periodic",),
        algorithms=("adaptive",),
        n_per_side=1,
        channel="clean",
        master_seed=0,
        params=SMALL,
        length=600,
    )
    with pytest.raises(ParameterError):
        report.cell("pseudo_random", "adaptive")


def test_report_hammings_match_outcomes():
    report = run_experiment(
        kinds=("periodic", "pseudo_random"),
        algorithms=("adaptive",),
        n_per_side=2,
        channel="paper-calibrated",
        master_seed=3,
        params=SMALL,
        length=600,
    )
    values = report.hammings("periodic", "adaptive")
    assert len(values) == 4
    assert values == [
        o.hamming for o in report.outcomes if o.driving_kind == "periodic"
    ]
