"""Command line interface.

Subcommands cover the full pipeline: ``simulate`` writes a capture pair,
``align`` locates the shared key region, ``extract-key`` quantizes and saves
both keys, ``hamming`` compares two key files, ``experiment`` runs the
cross-pairing study and writes its report files, and ``report`` re-renders a
saved report.  All randomness is seeded; the same flags and seed reproduce
the same bytes.  The process exits nonzero only on hard errors (unreadable
files, impossible alignment), never on an unfavourable comparison result.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import fields, replace
from pathlib import Path

from .adaptsync import adaptive_sync
from .core import (
    AlignmentFailure,
    DataError,
    LengthError,
    ParameterError,
    SyncParams,
    hamming_count,
    hamming_fraction,
    quantize,
)
from .harness import ALGORITHMS, PEAK_SEARCH_ALGORITHM, run_experiment
from .peaksearch import peak_align
from .report import REPORT_FORMATS, render_figures, render_report, report_from_json, report_to_json
from .simulator import (
    CHANNEL_PRESETS,
    DRIVING_KINDS,
    ChannelModel,
    channel_preset,
    gen_driving,
    make_pair,
    preset_length_factor,
)
from .waveio import read_key, read_waveform, write_key, write_waveform_binary, write_waveform_csv

__all__ = ["main"]

_PARAM_FIELDS = [f.name for f in fields(SyncParams)]


def _add_params_args(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("synchronization parameters")
    group.add_argument("--params-file", metavar="JSON", help="json file with parameter overrides")
    group.add_argument("--align-threshold", type=float)
    group.add_argument("--align-window", type=int)
    group.add_argument("--sync-margin", type=float)
    group.add_argument("--sync-len", type=int)
    group.add_argument("--key-len", type=int)
    group.add_argument("--success-threshold", type=float)


def _resolve_params(args: argparse.Namespace) -> SyncParams:
    """Defaults, then the params file, then explicit flags."""
    values: dict = {}
    if args.params_file:
        try:
            loaded = json.loads(Path(args.params_file).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise DataError(f"cannot read params file {args.params_file}: {exc}") from None
        unknown = set(loaded) - set(_PARAM_FIELDS)
        if unknown:
            raise ParameterError(f"unknown parameters in {args.params_file}: {sorted(unknown)}")
        values.update(loaded)
    for name in _PARAM_FIELDS:
        flag = getattr(args, name, None)
        if flag is not None:
            values[name] = flag
    return SyncParams(**values)


def _add_channel_args(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("channel model")
    group.add_argument(
        "--channel-preset",
        choices=CHANNEL_PRESETS,
        default="clean",
        help="named channel configuration (default: clean)",
    )
    group.add_argument("--offset", type=int, help="receiver capture delay in samples")
    group.add_argument("--noise-sigma", type=float, help="noise level relative to signal rms")
    group.add_argument("--gain", type=float, help="receiver amplitude scale")
    group.add_argument("--stretch", type=float, help="resampling factor on the trailing half")
    group.add_argument("--ramp", type=float, help="warm-up envelope depth, 0 disables")


def _resolve_channel(args: argparse.Namespace, seed: int) -> ChannelModel:
    channel = channel_preset(args.channel_preset, seed=seed)
    overrides = {
        name: value
        for name in ("offset", "noise_sigma", "gain", "stretch", "ramp")
        if (value := getattr(args, name)) is not None
    }
    return replace(channel, **overrides) if overrides else channel


def _write_wave(path: str, wave, fmt: str) -> None:
    if fmt == "binary":
        write_waveform_binary(path, wave)
    else:
        write_waveform_csv(path, wave)


def _align(sender, receiver, algorithm: str, matcher: str, params: SyncParams):
    """Locate the key start on both sides; returns (sender_start, receiver_start, score)."""
    if algorithm == PEAK_SEARCH_ALGORITHM:
        res_s = peak_align(sender, params)
        res_r = peak_align(receiver, params)
        return res_s.position + 1, res_r.position + 1, res_r.score
    outcome = adaptive_sync(sender, receiver, params, matcher=matcher)
    return outcome.sender_key_start, outcome.receiver_key_start, outcome.result.score


def _parse_policy(text: str):
    try:
        return float(text)
    except ValueError:
        return text


def _cmd_simulate(args: argparse.Namespace) -> int:
    params = _resolve_params(args)
    channel = _resolve_channel(args, seed=args.channel_seed if args.channel_seed is not None else args.seed)
    length = args.length
    if length is None:
        factor = preset_length_factor(args.channel_preset)
        length = int(factor * (params.sync_len + params.key_len))
    driving = gen_driving(args.kind, length, period=args.period, seed=args.seed)
    pair = make_pair(driving, channel, params, device_seed=args.device_seed)
    _write_wave(args.sender, pair.sender, args.format)
    _write_wave(args.receiver, pair.receiver, args.format)
    print(f"kind: {args.kind}")
    print(f"samples: {len(pair.sender)} sender, {len(pair.receiver)} receiver")
    print(f"channel: {channel}")
    print(f"wrote: {args.sender} {args.receiver}")
    return 0


def _cmd_align(args: argparse.Namespace) -> int:
    params = _resolve_params(args)
    sender = read_waveform(args.sender)
    receiver = read_waveform(args.receiver)
    start_s, start_r, score = _align(sender, receiver, args.algorithm, args.matcher, params)
    print(f"algorithm: {args.algorithm}")
    print(f"sender key start: {start_s}")
    print(f"receiver key start: {start_r}")
    print(f"score: {score!r}")
    return 0


def _cmd_extract_key(args: argparse.Namespace) -> int:
    params = _resolve_params(args)
    policy = _parse_policy(args.policy)
    sender = read_waveform(args.sender)
    receiver = read_waveform(args.receiver)
    start_s, start_r, _ = _align(sender, receiver, args.algorithm, args.matcher, params)
    k = params.key_len
    key_s = quantize(sender.samples[start_s : start_s + k], policy, key_len=k)
    key_r = quantize(receiver.samples[start_r : start_r + k], policy, key_len=k)
    if args.sender_key:
        write_key(args.sender_key, key_s, hex=args.hex)
        print(f"wrote: {args.sender_key}")
    if args.receiver_key:
        write_key(args.receiver_key, key_r, hex=args.hex)
        print(f"wrote: {args.receiver_key}")
    frac = hamming_fraction(key_s, key_r)
    print(f"bits: {len(key_s)}")
    print(f"hamming fraction: {frac:.6f}")
    print(f"success: {frac < params.success_threshold}")
    return 0


def _cmd_hamming(args: argparse.Namespace) -> int:
    first = read_key(args.first)
    second = read_key(args.second)
    count = hamming_count(first, second)
    frac = hamming_fraction(first, second)
    print(f"bits: {len(first)}")
    print(f"hamming count: {count}")
    print(f"hamming fraction: {frac:.6f}")
    print(f"success: {frac < args.threshold}")
    return 0


def _cmd_experiment(args: argparse.Namespace) -> int:
    params = _resolve_params(args)
    report = run_experiment(
        kinds=tuple(args.kinds),
        algorithms=tuple(args.algorithms),
        n_per_side=args.n_per_side,
        channel=args.channel_preset,
        master_seed=args.seed,
        params=params,
        length=args.length,
        period=args.period,
        policy=_parse_policy(args.policy),
    )
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    written = []
    for name, text in [
        ("report.json", report_to_json(report)),
        ("summary.csv", render_report(report, "csv")),
        ("trials.csv", render_report(report, "csv", per_trial=True)),
        ("report.txt", render_report(report, "table", per_trial=args.per_trial)),
    ]:
        (outdir / name).write_text(text)
        written.append(outdir / name)
    if not args.no_figures:
        written.extend(render_figures(report, outdir))
    sys.stdout.write(render_report(report, "table"))
    print(f"wrote: {' '.join(str(p) for p in written)}")
    return 0


def _cmd_report(args: argparse.Namespace) -> int:
    try:
        report = report_from_json(Path(args.report).read_text())
    except OSError as exc:
        raise DataError(f"cannot read report {args.report}: {exc}") from None
    text = render_report(report, args.format, per_trial=args.per_trial)
    if args.out:
        Path(args.out).write_text(text)
        written = [Path(args.out)]
        if not args.no_figures:
            written.extend(render_figures(report, Path(args.out).parent))
        print(f"wrote: {' '.join(str(p) for p in written)}")
    else:
        sys.stdout.write(text)
        if args.figures_dir:
            paths = render_figures(report, args.figures_dir)
            print(f"wrote: {' '.join(str(p) for p in paths)}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="slkd", description="synchronized-waveform key distribution toolkit"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="generate a sender/receiver capture pair")
    p.add_argument("--kind", choices=DRIVING_KINDS, default="pseudo_random")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--device-seed", type=int, default=None, help="chaotic device seed (default: --seed)")
    p.add_argument("--channel-seed", type=int, default=None, help="noise seed (default: --seed)")
    p.add_argument("--length", type=int, default=None, help="driving sequence length")
    p.add_argument("--period", type=int, default=64, help="period for the periodic kinds")
    p.add_argument("--sender", required=True, help="output path for the sender capture")
    p.add_argument("--receiver", required=True, help="output path for the receiver capture")
    p.add_argument("--format", choices=("csv", "binary"), default="csv")
    _add_channel_args(p)
    _add_params_args(p)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("align", help="locate the key start on both captures")
    p.add_argument("sender")
    p.add_argument("receiver")
    p.add_argument("--algorithm", choices=ALGORITHMS, default="adaptive")
    p.add_argument("--matcher", choices=("fft", "naive"), default="fft")
    _add_params_args(p)
    p.set_defaults(func=_cmd_align)

    p = sub.add_parser("extract-key", help="align, quantize, and save both keys")
    p.add_argument("sender")
    p.add_argument("receiver")
    p.add_argument("--algorithm", choices=ALGORITHMS, default="adaptive")
    p.add_argument("--matcher", choices=("fft", "naive"), default="fft")
    p.add_argument("--policy", default="median", help="median, mean, or a fixed threshold value")
    p.add_argument("--sender-key", help="output path for the sender key")
    p.add_argument("--receiver-key", help="output path for the receiver key")
    p.add_argument("--hex", action="store_true", help="write keys as hex text instead of raw bits")
    _add_params_args(p)
    p.set_defaults(func=_cmd_extract_key)

    p = sub.add_parser("hamming", help="compare two key files")
    p.add_argument("first")
    p.add_argument("second")
    p.add_argument("--threshold", type=float, default=SyncParams().success_threshold)
    p.set_defaults(func=_cmd_hamming)

    p = sub.add_parser("experiment", help="run the cross-pairing study and write report files")
    p.add_argument("--kinds", nargs="+", choices=DRIVING_KINDS, default=list(DRIVING_KINDS))
    p.add_argument("--algorithms", nargs="+", choices=ALGORITHMS, default=list(ALGORITHMS))
    p.add_argument("--n-per-side", type=int, default=10, help="captures per side and kind")
    p.add_argument("--channel-preset", choices=CHANNEL_PRESETS, default="paper-calibrated")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--length", type=int, default=None, help="driving sequence length")
    p.add_argument("--period", type=int, default=64)
    p.add_argument("--policy", default="median")
    p.add_argument("--per-trial", action="store_true", help="include per-trial grids in report.txt")
    p.add_argument("--no-figures", action="store_true", help="skip the png figures")
    p.add_argument("--out", required=True, help="output directory for report files")
    _add_params_args(p)
    p.set_defaults(func=_cmd_experiment)

    p = sub.add_parser("report", help="re-render a saved report")
    p.add_argument("report")
    p.add_argument("--format", choices=REPORT_FORMATS, default="table")
    p.add_argument("--per-trial", action="store_true", help="per-trial rows or grids")
    p.add_argument("--out", help="write the rendering here (figures go alongside)")
    p.add_argument("--figures-dir", help="render figures here when printing to stdout")
    p.add_argument("--no-figures", action="store_true")
    p.set_defaults(func=_cmd_report)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (AlignmentFailure, DataError, LengthError, ParameterError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
