"""Command-line front end: synth, extract, experiment, plot, inspect.

Exit codes: 0 success, 1 runtime failure (bad data, unreadable files,
unknown metric, ...), 2 argument-parsing failure (argparse's own).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Sequence

from .audio_io import load_wav
from .classifiers import default_classifier_specs
from .config import PipelineConfig, apply_overrides, load_config
from .corpus import (SUBJECT_VARIABILITY_FRAC, UTTERANCES_PER_EMOTION,
                     CorpusSpec, load_manifest, synth_corpus)
from .dataset import Dataset, read_csv, write_arff, write_csv
from .errors import IoFailure, PipelineError
from .evaluation import (ExperimentConfig, compare_individual_vs_group,
                         read_report_csv, run_experiment, write_delta_csv,
                         write_report_csv)
from .features import compute_contour, extract_record, find_contour_peaks
from .plotting import write_plot_csv, write_svg


def parse_fractions(text: str) -> tuple[float, ...]:
    """``start:stop:step`` (inclusive) or a comma-separated list."""
    try:
        if ":" in text:
            parts = text.split(":")
            if len(parts) != 3:
                raise ValueError("expected start:stop:step")
            start, stop, step = (float(p) for p in parts)
            if step <= 0.0:
                raise ValueError("step must be positive")
            values = []
            v = start
            while v <= stop + 1e-9:
                values.append(round(v, 10))
                v += step
            fractions = tuple(values)
        else:
            fractions = tuple(float(p) for p in text.split(",") if p.strip())
        if not fractions:
            raise ValueError("no fractions given")
    except ValueError as exc:
        raise argparse.ArgumentTypeError(
            f"bad fractions {text!r}: {exc}") from exc
    return fractions


def _pipeline_config(args: argparse.Namespace) -> PipelineConfig:
    cfg = PipelineConfig()
    if args.config:
        cfg = load_config(args.config, base=cfg)
    if args.set:
        cfg = apply_overrides(cfg, args.set)
    return cfg


def _add_config_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", default=None,
                        help="key=value file of pipeline settings")
    parser.add_argument("--set", action="append", default=[],
                        metavar="KEY=VALUE",
                        help="override one pipeline setting (repeatable)")


def cmd_synth(args: argparse.Namespace) -> int:
    emotions = tuple(p.strip() for p in args.emotions.split(","))
    if any(not p for p in emotions):
        raise ValueError(f"bad emotion list {args.emotions!r}")
    spec = CorpusSpec(n_subjects=args.subjects,
                      utterances_per_emotion=args.per_emotion,
                      emotions=emotions,
                      subject_variability_frac=args.variability,
                      master_seed=args.seed)
    manifest = synth_corpus(spec, args.out)
    print(manifest)
    return 0


def cmd_extract(args: argparse.Namespace) -> int:
    config = _pipeline_config(args)
    manifest_path = Path(args.manifest)
    rows = load_manifest(manifest_path)
    records = []
    skipped = 0
    for row in rows:
        try:
            buffer = load_wav(manifest_path.parent / row.wav_path)
            records.append(extract_record(buffer, config, row.subject_id,
                                          row.utterance_id, row.emotion,
                                          heart_rate_bpm=row.heart_rate_bpm))
        except PipelineError as exc:
            print(f"skipping {row.utterance_id}: {exc}", file=sys.stderr)
            skipped += 1
    if not records:
        print(f"error: none of the {len(rows)} manifest rows produced a "
              f"record", file=sys.stderr)
        return 1
    data = Dataset.from_records(records)
    write_csv(data, args.out)
    if args.arff:
        write_arff(data, args.arff)
    print(f"wrote {len(records)} records to {args.out} ({skipped} skipped)")
    return 0


def _derived_path(out: Path, tag: str) -> Path:
    suffix = out.suffix or ".csv"
    return out.with_name(f"{out.stem}_{tag}{suffix}")


def cmd_experiment(args: argparse.Namespace) -> int:
    data = read_csv(args.data)
    config = ExperimentConfig(
        train_fractions=args.fractions,
        repetitions=args.reps,
        classifier_specs=default_classifier_specs(seed=args.seed),
        master_seed=args.seed)
    out = Path(args.out)
    if args.group_by_subject:
        subjects = data.subject_ids()
        per_subject = [data.restricted_to_subject(s) for s in subjects]
        result = compare_individual_vs_group(per_subject, config)
        paths = (_derived_path(out, "individual"), _derived_path(out, "group"),
                 _derived_path(out, "delta"))
        write_report_csv(result.individual, paths[0])
        write_report_csv(result.group, paths[1])
        write_delta_csv(result, paths[2])
        for path in paths:
            print(f"wrote {path}")
        print(f"mean accuracy delta (individual - group): "
              f"{result.mean_delta!r}")
    else:
        report = run_experiment(data, config)
        write_report_csv(report, out)
        print(f"wrote {out}")
    return 0


def cmd_plot(args: argparse.Namespace) -> int:
    report = read_report_csv(args.report)
    write_svg(report, args.metric, args.out)
    if args.csv:
        write_plot_csv(report, args.metric, args.csv)
    print(f"wrote {args.out}")
    return 0


def _write_rows(path: Path, header: str, rows: list[str]) -> None:
    try:
        path.write_text("\n".join([header] + rows) + "\n", encoding="utf-8")
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc


def cmd_inspect(args: argparse.Namespace) -> int:
    config = _pipeline_config(args)
    buffer = load_wav(args.wav)
    contour, hop_ms, power, coeffs = compute_contour(buffer, config)
    peaks = find_contour_peaks(contour, hop_ms, config)
    prefix = args.out_prefix

    n_bins = power.shape[1]
    n_fft = 2 * (n_bins - 1)
    freqs = [k * buffer.sample_rate_hz / n_fft for k in range(n_bins)]
    power_path = Path(f"{prefix}_power.csv")
    _write_rows(power_path,
                "frame," + ",".join(repr(float(f)) for f in freqs),
                [f"{i}," + ",".join(repr(float(v)) for v in row)
                 for i, row in enumerate(power)])

    matrix = coeffs.coefficients
    mfcc_path = Path(f"{prefix}_mfcc.csv")
    _write_rows(mfcc_path,
                "frame," + ",".join(f"c{j}" for j in range(matrix.shape[1])),
                [f"{i}," + ",".join(repr(float(v)) for v in row)
                 for i, row in enumerate(matrix)])

    peak_frames = set(peaks.indices)
    contour_path = Path(f"{prefix}_contour.csv")
    _write_rows(contour_path,
                "frame,contour,is_peak",
                [f"{i},{float(v)!r},{1 if i in peak_frames else 0}"
                 for i, v in enumerate(contour)])

    for path in (power_path, mfcc_path, contour_path):
        print(f"wrote {path}")
    print(f"{len(peaks.indices)} peak(s), hop {hop_ms!r} ms")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="emospeech",
        description="Synthetic emotional-speech corpora, timing features, "
                    "and classifier sweeps.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a labeled synthetic corpus")
    p.add_argument("--subjects", type=int, required=True,
                   help="number of synthetic speakers")
    p.add_argument("--per-emotion", type=int, default=UTTERANCES_PER_EMOTION,
                   help="utterances per (subject, emotion)")
    p.add_argument("--emotions", default="A,B,C",
                   help="comma-separated label names")
    p.add_argument("--variability", type=float,
                   default=SUBJECT_VARIABILITY_FRAC,
                   help="between-subject timing/rate spread, as a fraction")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="corpus output directory")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("extract",
                       help="turn a corpus manifest into a feature table")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", required=True, help="feature CSV path")
    p.add_argument("--arff", default=None, help="also write this ARFF file")
    _add_config_flags(p)
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("experiment",
                       help="repeated train-fraction sweep over a feature "
                            "table")
    p.add_argument("--data", required=True, help="feature CSV path")
    p.add_argument("--fractions", type=parse_fractions,
                   default="0.1:0.9:0.1",
                   help="start:stop:step (inclusive) or comma list")
    p.add_argument("--reps", type=int, default=30,
                   help="repetitions per train fraction")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="report CSV path")
    p.add_argument("--group-by-subject", action="store_true",
                   help="also compare per-subject models against one pooled "
                        "model; writes *_individual/_group/_delta CSVs")
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("plot", help="render a sweep report as an SVG chart")
    p.add_argument("--report", required=True, help="report CSV path")
    p.add_argument("--metric", default="accuracy",
                   help="accuracy (plotted in percent) or auc")
    p.add_argument("--out", required=True, help="SVG output path")
    p.add_argument("--csv", default=None,
                   help="also write the plotted points to this CSV")
    p.set_defaults(func=cmd_plot)

    p = sub.add_parser("inspect",
                       help="dump per-frame spectra, coefficients, and the "
                            "peak-marked contour for one WAV")
    p.add_argument("--wav", required=True)
    p.add_argument("--out-prefix", required=True, dest="out_prefix")
    _add_config_flags(p)
    p.set_defaults(func=cmd_inspect)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (PipelineError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
