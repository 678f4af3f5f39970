"""Rendering of experiment reports: text table, csv, json, and figures.

The table view mirrors the reference result sheets: a driving-kind by
algorithm grid of failure rates (two-decimal percentages), optionally
followed by per-trial Hamming grids (four-decimal percentages) with sender
captures as rows and receiver captures as columns.  The csv and json views
carry the same numbers at full precision with a stable schema, and the json
round-trips losslessly.  Figures plot the same failure-rate grid and the
per-trial Hamming fractions.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict
from pathlib import Path
from typing import Sequence

from .core import ParameterError, SyncParams
from .harness import (
    CellSummary,
    ExperimentConfig,
    ExperimentReport,
    TrialOutcome,
)
from .simulator import ChannelModel

__all__ = [
    "REPORT_SCHEMA",
    "REPORT_FORMATS",
    "render_table",
    "render_csv",
    "render_trials_csv",
    "report_to_json",
    "report_from_json",
    "render_report",
    "render_figures",
]

REPORT_SCHEMA = "slkd-report-v1"
REPORT_FORMATS = ("table", "csv", "json")

_SUMMARY_COLUMNS = [
    "driving_kind",
    "algorithm",
    "trials",
    "failures",
    "hard_failures",
    "failure_rate",
    "mean_hamming",
    "median_hamming",
    "max_hamming",
]

_TRIAL_COLUMNS = [
    "driving_kind",
    "algorithm",
    "sender_trial_id",
    "receiver_trial_id",
    "hamming",
    "success",
    "hard_failure",
]


def _pct2(value: float) -> str:
    return f"{value * 100.0:.2f}%"


def _pct4(value: float) -> str:
    return f"{value * 100.0:.4f}%"


def _grid(report: ExperimentReport, field: str) -> tuple[list[str], list[str], dict]:
    keys = report.cell_keys()
    kinds = list(dict.fromkeys(kind for kind, _ in keys))
    algorithms = list(dict.fromkeys(algorithm for _, algorithm in keys))
    cells = {key: getattr(report.cell(*key), field) for key in keys}
    return kinds, algorithms, cells


def _format_rows(rows: list[list[str]]) -> list[str]:
    widths = [max(len(row[c]) for row in rows) for c in range(len(rows[0]))]
    out = []
    for row in rows:
        first = row[0].ljust(widths[0])
        rest = [cell.rjust(width) for cell, width in zip(row[1:], widths[1:])]
        out.append("  ".join([first] + rest).rstrip())
    return out


def render_table(report: ExperimentReport, per_trial: bool = False) -> str:
    """Human-readable summary table, optionally with per-trial grids."""
    cfg = report.config
    lines = [
        "key distribution experiment",
        f"  channel preset: {cfg.channel_preset}    captures per side: {cfg.n_per_side}"
        f"    master seed: {cfg.master_seed}",
        f"  sync_len: {cfg.params.sync_len}    key_len: {cfg.params.key_len}"
        f"    success threshold: {_pct2(cfg.params.success_threshold)}"
        f"    quantize: {cfg.policy}",
        f"  trials recorded: {len(report.outcomes)}",
    ]
    if not report.outcomes:
        return "\n".join(lines) + "\n"

    for title, field, fmt in [
        ("failure rate", "failure_rate", _pct2),
        ("mean hamming", "mean_hamming", _pct2),
    ]:
        kinds, algorithms, cells = _grid(report, field)
        lines.extend(["", f"{title} by driving kind and algorithm"])
        rows = [["driving kind"] + algorithms]
        for kind in kinds:
            rows.append(
                [kind]
                + [
                    fmt(cells[(kind, a)]) if (kind, a) in cells else "-"
                    for a in algorithms
                ]
            )
        lines.extend(_format_rows(rows))

    if per_trial:
        for kind, algorithm in report.cell_keys():
            picked = [
                o
                for o in report.outcomes
                if o.driving_kind == kind and o.algorithm == algorithm
            ]
            senders = sorted({o.sender_trial_id for o in picked})
            receivers = sorted({o.receiver_trial_id for o in picked})
            value = {(o.sender_trial_id, o.receiver_trial_id): o.hamming for o in picked}
            lines.extend(["", f"per-trial hamming: {kind} / {algorithm}"])
            rows = [["sender\\receiver"] + [str(j) for j in receivers]]
            for i in senders:
                rows.append(
                    [str(i)]
                    + [
                        _pct4(value[(i, j)]) if (i, j) in value else "-"
                        for j in receivers
                    ]
                )
            lines.extend(_format_rows(rows))
    return "\n".join(lines) + "\n"


def render_csv(report: ExperimentReport) -> str:
    """Summary csv: one row per (driving kind, algorithm) cell."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(_SUMMARY_COLUMNS)
    for summary in report.summaries():
        writer.writerow(
            [
                summary.driving_kind,
                summary.algorithm,
                summary.trials,
                summary.failures,
                summary.hard_failures,
                repr(summary.failure_rate),
                repr(summary.mean_hamming),
                repr(summary.median_hamming),
                repr(summary.max_hamming),
            ]
        )
    return buf.getvalue()


def render_trials_csv(report: ExperimentReport) -> str:
    """Per-trial csv: one row per outcome."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(_TRIAL_COLUMNS)
    for o in report.outcomes:
        writer.writerow(
            [
                o.driving_kind,
                o.algorithm,
                o.sender_trial_id,
                o.receiver_trial_id,
                repr(o.hamming),
                int(o.success),
                int(o.hard_failure),
            ]
        )
    return buf.getvalue()


def report_to_json(report: ExperimentReport) -> str:
    """Serialize a report with its full outcome list; round-trips losslessly."""
    payload = {
        "schema": REPORT_SCHEMA,
        "config": asdict(report.config),
        "outcomes": [asdict(o) for o in report.outcomes],
    }
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def report_from_json(text: str) -> ExperimentReport:
    """Rebuild a report serialized by :func:`report_to_json`."""
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParameterError(f"not a valid report file: {exc}") from None
    if payload.get("schema") != REPORT_SCHEMA:
        raise ParameterError(f"unsupported report schema {payload.get('schema')!r}")
    raw_config = payload["config"]
    config = ExperimentConfig(
        kinds=tuple(raw_config["kinds"]),
        algorithms=tuple(raw_config["algorithms"]),
        n_per_side=raw_config["n_per_side"],
        channel_preset=raw_config["channel_preset"],
        channel=ChannelModel(**raw_config["channel"]),
        master_seed=raw_config["master_seed"],
        length=raw_config["length"],
        period=raw_config["period"],
        policy=raw_config["policy"],
        params=SyncParams(**raw_config["params"]),
    )
    outcomes = tuple(TrialOutcome(**o) for o in payload["outcomes"])
    return ExperimentReport(config=config, outcomes=outcomes)


def render_report(report: ExperimentReport, fmt: str = "table", per_trial: bool = False) -> str:
    """Render a report as "table", "csv" (per-trial rows if asked), or "json"."""
    if fmt == "table":
        return render_table(report, per_trial=per_trial)
    if fmt == "csv":
        return render_trials_csv(report) if per_trial else render_csv(report)
    if fmt == "json":
        return report_to_json(report)
    raise ParameterError(f"unknown report format {fmt!r}, expected one of {REPORT_FORMATS}")


def render_figures(report: ExperimentReport, outdir, stem: str = "report") -> list[Path]:
    """Render report figures as PNG files and return their paths.

    Produces a grouped failure-rate bar chart and a per-trial Hamming
    scatter per algorithm with the success threshold marked.
    """
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    paths: list[Path] = []
    if not report.outcomes:
        return paths

    kinds, algorithms, rates = _grid(report, "failure_rate")
    threshold = report.config.params.success_threshold * 100.0

    fig, ax = plt.subplots(figsize=(7.0, 4.2))
    width = 0.8 / max(len(algorithms), 1)
    for a_idx, algorithm in enumerate(algorithms):
        xs = [k_idx + a_idx * width for k_idx in range(len(kinds))]
        ys = [rates.get((kind, algorithm), 0.0) * 100.0 for kind in kinds]
        ax.bar(xs, ys, width=width * 0.92, label=algorithm)
    ax.set_xticks([k + 0.4 - width / 2 for k in range(len(kinds))])
    ax.set_xticklabels(kinds)
    ax.set_ylabel("failure rate [%]")
    ax.set_title(f"key agreement failures ({report.config.channel_preset})")
    ax.legend()
    fig.tight_layout()
    path = outdir / f"{stem}_failure_rates.png"
    fig.savefig(path, dpi=130)
    plt.close(fig)
    paths.append(path)

    fig, axes = plt.subplots(
        1, len(algorithms), figsize=(5.2 * len(algorithms), 4.2), sharey=True, squeeze=False
    )
    for ax, algorithm in zip(axes[0], algorithms):
        for kind in kinds:
            values = report.hammings(kind, algorithm)
            ax.plot(range(len(values)), [v * 100.0 for v in values], ".", ms=4, label=kind)
        ax.axhline(threshold, color="k", lw=1, ls="--")
        ax.set_title(algorithm)
        ax.set_xlabel("trial")
    axes[0][0].set_ylabel("hamming distance [%]")
    axes[0][-1].legend(loc="upper right", fontsize=8)
    fig.tight_layout()
    path = outdir / f"{stem}_trial_hamming.png"
    fig.savefig(path, dpi=130)
    plt.close(fig)
    paths.append(path)
    return paths
