"""Metrics and the repeated train-fraction sweep experiment harness.

Accuracy and macro one-vs-rest AUC are computed per repetition; each
(classifier, train fraction) cell aggregates mean and sample standard
deviation over repetitions.  Splits are shared across classifiers within a
repetition so classifier comparisons are paired.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .classifiers import ClassifierSpec, default_classifier_specs
from .classifiers import train as train_classifier
from .dataset import Dataset, concat_datasets, stratified_split
from .errors import (
    DegenerateClasses,
    EmptyInput,
    InsufficientRepetitions,
    IoFailure,
    LengthMismatch,
    MalformedRow,
    SchemaMismatch,
)
from .seeding import derive_seed

DEFAULT_TRAIN_FRACTIONS = (0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9)

REPORT_CSV_HEADER = ("classifier", "train_fraction", "metric", "mean", "std",
                     "repetitions", "skipped")


# ---------------------------------------------------------------------------
# Metrics

def accuracy(predicted: Sequence[str], truth: Sequence[str]) -> float:
    """Fraction of exact label matches."""
    if len(predicted) != len(truth):
        raise LengthMismatch(
            f"predicted {len(predicted)} labels for {len(truth)} records")
    if len(truth) == 0:
        raise EmptyInput("accuracy of zero records is undefined")
    hits = sum(1 for p, t in zip(predicted, truth) if p == t)
    return hits / len(truth)


def _mid_ranks(values: np.ndarray) -> np.ndarray:
    """1-based ranks with ties assigned the group mid-rank."""
    order = np.argsort(values, kind="stable")
    sorted_values = values[order]
    ranks = np.empty(len(values), dtype=np.float64)
    i = 0
    n = len(values)
    while i < n:
        j = i
        while j + 1 < n and sorted_values[j + 1] == sorted_values[i]:
            j += 1
        ranks[order[i:j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def auc_binary(scores: np.ndarray, labels: np.ndarray) -> float:
    """Mann-Whitney AUC with mid-rank tie handling.

    Equals the trapezoidal area under the ROC curve:
    (#{score_pos > score_neg} + 0.5 * #{ties}) / (P * N).
    """
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels, dtype=bool)
    if len(scores) != len(labels):
        raise LengthMismatch(
            f"{len(scores)} scores for {len(labels)} labels")
    n_pos = int(labels.sum())
    n_neg = len(labels) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise DegenerateClasses(
            f"need both classes, got {n_pos} positives / {n_neg} negatives")
    ranks = _mid_ranks(scores)
    rank_sum = float(ranks[labels].sum())
    return (rank_sum - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg)


def auc_macro(probabilities: np.ndarray, class_labels: Sequence[str],
              truth: Sequence[str]) -> float:
    """Unweighted mean of one-vs-rest AUCs over classes present in truth."""
    probabilities = np.asarray(probabilities, dtype=np.float64)
    truth = tuple(truth)
    if probabilities.shape != (len(truth), len(class_labels)):
        raise LengthMismatch(
            f"probability matrix {probabilities.shape} does not match "
            f"{len(truth)} records x {len(class_labels)} classes")
    present = [c for c in class_labels if c in set(truth)]
    if len(present) < 2:
        raise DegenerateClasses(
            f"need >= 2 classes present in truth, got {len(present)}")
    per_class = []
    for label in present:
        column = class_labels.index(label)
        positives = np.array([t == label for t in truth])
        per_class.append(auc_binary(probabilities[:, column], positives))
    return float(np.mean(per_class))


# ---------------------------------------------------------------------------
# Experiment configuration and report types

@dataclass(frozen=True)
class ExperimentConfig:
    train_fractions: tuple[float, ...] = DEFAULT_TRAIN_FRACTIONS
    repetitions: int = 30
    classifier_specs: tuple[ClassifierSpec, ...] = field(
        default_factory=default_classifier_specs)
    master_seed: int = 0

    def __post_init__(self) -> None:
        fractions = tuple(self.train_fractions)
        object.__setattr__(self, "train_fractions", fractions)
        object.__setattr__(self, "classifier_specs",
                           tuple(self.classifier_specs))
        if not fractions:
            raise ValueError("need at least one train fraction")
        for f in fractions:
            if not 0.0 < f < 1.0:
                raise ValueError(f"train fraction {f} outside (0, 1)")
        if any(b <= a for a, b in zip(fractions, fractions[1:])):
            raise ValueError("train fractions must be strictly increasing")
        if self.repetitions < 1:
            raise ValueError("repetitions must be >= 1")
        if not self.classifier_specs:
            raise ValueError("need at least one classifier spec")
        kinds = [s.kind for s in self.classifier_specs]
        if len(set(kinds)) != len(kinds):
            raise ValueError("classifier kinds must be unique")


@dataclass(frozen=True)
class ReportCell:
    classifier: str
    train_fraction: float
    mean_accuracy: float
    std_accuracy: float
    mean_auc: float
    std_auc: float
    repetitions: int
    skipped: int


@dataclass(frozen=True)
class EvalReport:
    cells: tuple[ReportCell, ...]

    def cell(self, classifier: str, train_fraction: float) -> ReportCell:
        for c in self.cells:
            if c.classifier == classifier and c.train_fraction == train_fraction:
                return c
        raise KeyError((classifier, train_fraction))

    def classifiers(self) -> tuple[str, ...]:
        seen: dict[str, None] = {}
        for c in self.cells:
            seen.setdefault(c.classifier, None)
        return tuple(seen)

    def train_fractions(self) -> tuple[float, ...]:
        seen: dict[float, None] = {}
        for c in self.cells:
            seen.setdefault(c.train_fraction, None)
        return tuple(seen)


# ---------------------------------------------------------------------------
# The sweep

def _mean_std(values: list[float]) -> tuple[float, float]:
    if len(values) == 1:
        return float(values[0]), 0.0
    return float(np.mean(values)), float(np.std(values, ddof=1))


def run_experiment(dataset: Dataset, config: ExperimentConfig,
                   trainer: Callable[[ClassifierSpec, Dataset], object]
                   = train_classifier) -> EvalReport:
    """Repeated stratified splits; accuracy and macro AUC per cell.

    The split for (fraction index fi, repetition r) derives from
    (master_seed, "split", fi, r) and is shared by every classifier.  Each
    classifier trains with a per-cell seed derived from (spec.seed, fi, r).
    A repetition whose test split lacks one of the dataset's classes is
    skipped (counted per cell); a cell with every repetition skipped raises
    :class:`InsufficientRepetitions`.
    """
    declared = dataset.label_set
    per_cell_acc: dict[tuple[str, float], list[float]] = {}
    per_cell_auc: dict[tuple[str, float], list[float]] = {}
    per_cell_skipped: dict[tuple[str, float], int] = {}
    for spec in config.classifier_specs:
        for fraction in config.train_fractions:
            key = (spec.kind, fraction)
            per_cell_acc[key] = []
            per_cell_auc[key] = []
            per_cell_skipped[key] = 0

    for fi, fraction in enumerate(config.train_fractions):
        for r in range(config.repetitions):
            split_seed = derive_seed(config.master_seed, "split", fi, r)
            pair = stratified_split(dataset, fraction, split_seed)
            test_present = set(pair.test.labels())
            if any(label not in test_present for label in declared):
                for spec in config.classifier_specs:
                    per_cell_skipped[(spec.kind, fraction)] += 1
                continue
            test_matrix = pair.test.feature_matrix()
            truth = pair.test.labels()
            for spec in config.classifier_specs:
                cell_spec = replace(
                    spec, seed=derive_seed(spec.seed, fi, r))
                model = trainer(cell_spec, pair.train)
                probs = model.predict_proba_batch(test_matrix)
                predicted = tuple(
                    model.label_set[i] for i in np.argmax(probs, axis=1))
                key = (spec.kind, fraction)
                per_cell_acc[key].append(accuracy(predicted, truth))
                per_cell_auc[key].append(
                    auc_macro(probs, model.label_set, truth))

    cells = []
    for spec in config.classifier_specs:
        for fraction in config.train_fractions:
            key = (spec.kind, fraction)
            used = per_cell_acc[key]
            if not used:
                raise InsufficientRepetitions(
                    f"every repetition skipped for {spec.kind} at "
                    f"fraction {fraction}")
            mean_acc, std_acc = _mean_std(used)
            mean_auc, std_auc = _mean_std(per_cell_auc[key])
            cells.append(ReportCell(spec.kind, fraction, mean_acc, std_acc,
                                    mean_auc, std_auc, len(used),
                                    per_cell_skipped[key]))
    return EvalReport(tuple(cells))


# ---------------------------------------------------------------------------
# Report persistence

def write_report_csv(report: EvalReport, path: str | Path) -> None:
    """Two rows per cell (metric accuracy, then auc), repr-serialized."""
    lines = [",".join(REPORT_CSV_HEADER)]
    for c in report.cells:
        for metric, mean, std in (("accuracy", c.mean_accuracy,
                                   c.std_accuracy),
                                  ("auc", c.mean_auc, c.std_auc)):
            lines.append(",".join((c.classifier, repr(c.train_fraction),
                                   metric, repr(mean), repr(std),
                                   str(c.repetitions), str(c.skipped))))
    try:
        Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc


def read_report_csv(path: str | Path) -> EvalReport:
    """Inverse of :func:`write_report_csv`."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise IoFailure(f"cannot read {path}: {exc}") from exc
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or tuple(lines[0].split(",")) != REPORT_CSV_HEADER:
        raise SchemaMismatch(
            f"expected header {','.join(REPORT_CSV_HEADER)!r} in {path}")
    partial: dict[tuple[str, float], dict[str, tuple[float, float, int, int]]] = {}
    order: list[tuple[str, float]] = []
    for row_number, line in enumerate(lines[1:], start=1):
        parts = line.split(",")
        if len(parts) != len(REPORT_CSV_HEADER):
            raise MalformedRow(
                f"row {row_number}: expected {len(REPORT_CSV_HEADER)} "
                f"fields, got {len(parts)}")
        classifier, fraction_text, metric, mean_text, std_text, reps_text, \
            skipped_text = parts
        if metric not in ("accuracy", "auc"):
            raise MalformedRow(
                f"row {row_number}: unknown metric {metric!r}")
        try:
            key = (classifier, float(fraction_text))
            entry = (float(mean_text), float(std_text), int(reps_text),
                     int(skipped_text))
        except ValueError as exc:
            raise MalformedRow(f"row {row_number}: {exc}") from exc
        if key not in partial:
            partial[key] = {}
            order.append(key)
        partial[key][metric] = entry
    cells = []
    for key in order:
        metrics = partial[key]
        if set(metrics) != {"accuracy", "auc"}:
            raise SchemaMismatch(
                f"cell {key} needs both accuracy and auc rows")
        acc = metrics["accuracy"]
        auc = metrics["auc"]
        if acc[2:] != auc[2:]:
            raise SchemaMismatch(
                f"cell {key} repetition/skip counts disagree across metrics")
        cells.append(ReportCell(key[0], key[1], acc[0], acc[1], auc[0],
                                auc[1], acc[2], acc[3]))
    return EvalReport(tuple(cells))


# ---------------------------------------------------------------------------
# Individual vs pooled-group comparison

@dataclass(frozen=True)
class DeltaCell:
    classifier: str
    train_fraction: float
    delta: float


@dataclass(frozen=True)
class ComparisonResult:
    individual: EvalReport
    group: EvalReport
    accuracy_deltas: tuple[DeltaCell, ...]

    @property
    def mean_delta(self) -> float:
        return float(np.mean([d.delta for d in self.accuracy_deltas]))


DELTA_CSV_HEADER = ("classifier", "train_fraction", "delta")


def write_delta_csv(result: ComparisonResult, path: str | Path) -> None:
    """One row per cell: individual-minus-group accuracy delta."""
    lines = [",".join(DELTA_CSV_HEADER)]
    for cell in result.accuracy_deltas:
        lines.append(f"{cell.classifier},{cell.train_fraction!r},"
                     f"{cell.delta!r}")
    try:
        Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc


def compare_individual_vs_group(
        per_subject: Sequence[Dataset],
        config: ExperimentConfig,
        trainer: Callable[[ClassifierSpec, Dataset], object]
        = train_classifier) -> ComparisonResult:
    """Per-subject sweeps averaged, versus one sweep over the pooled union.

    The individual report's cell means (and stds) are the unweighted average
    of the per-subject cell means (and stds); repetition and skip counts are
    summed.  Deltas are individual minus group mean accuracy per cell.
    """
    if len(per_subject) < 2:
        raise ValueError(
            f"need >= 2 subject datasets, got {len(per_subject)}")
    subject_reports = [run_experiment(d, config, trainer=trainer)
                       for d in per_subject]
    merged_cells = []
    template = subject_reports[0]
    for i, cell in enumerate(template.cells):
        stack = [r.cells[i] for r in subject_reports]
        merged_cells.append(ReportCell(
            cell.classifier, cell.train_fraction,
            float(np.mean([c.mean_accuracy for c in stack])),
            float(np.mean([c.std_accuracy for c in stack])),
            float(np.mean([c.mean_auc for c in stack])),
            float(np.mean([c.std_auc for c in stack])),
            sum(c.repetitions for c in stack),
            sum(c.skipped for c in stack)))
    individual = EvalReport(tuple(merged_cells))
    group = run_experiment(concat_datasets(per_subject), config,
                           trainer=trainer)
    deltas = tuple(
        DeltaCell(ind.classifier, ind.train_fraction,
                  ind.mean_accuracy - grp.mean_accuracy)
        for ind, grp in zip(individual.cells, group.cells))
    return ComparisonResult(individual, group, deltas)
