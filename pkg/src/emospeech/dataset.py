"""Labeled feature datasets: CSV/ARFF persistence, stratified splits, scaling.

A dataset is an ordered collection of :class:`~emospeech.features.FeatureRecord`
rows sharing one schema: the heart-rate column is either present for every
record or absent for every record.  CSV files written here round-trip exactly
because floats are serialized with ``repr``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    ClassTooSmall,
    DegenerateFractionWarning,
    EmptyTrain,
    IoFailure,
    MalformedRow,
    SchemaMismatch,
    UnknownLabel,
)
from .features import FeatureRecord
from .seeding import rng_from

CSV_HEADER = ("subject_id", "utterance_id", "emotion",
              "feature_distance_ms", "heart_rate_bpm")

ARFF_RELATION = "emotion_features"


@dataclass(frozen=True)
class Dataset:
    """Immutable ordered collection of feature records with a fixed label set."""

    records: tuple[FeatureRecord, ...]
    label_set: tuple[str, ...]

    def __post_init__(self) -> None:
        if len(set(self.label_set)) != len(self.label_set):
            raise ValueError("label_set contains duplicates")
        known = set(self.label_set)
        hr_flags = {r.heart_rate_bpm is not None for r in self.records}
        if len(hr_flags) > 1:
            raise SchemaMismatch(
                "heart rate must be present for all records or none")
        for i, record in enumerate(self.records):
            if record.label not in known:
                raise UnknownLabel(
                    f"record {i} has label {record.label!r}, "
                    f"not in {sorted(known)}")

    @classmethod
    def from_records(cls, records: Iterable[FeatureRecord],
                     label_set: Sequence[str] | None = None) -> "Dataset":
        """Build a dataset; with no explicit label set, infer it sorted."""
        rows = tuple(records)
        if label_set is None:
            label_set = tuple(sorted({r.label for r in rows}))
        return cls(rows, tuple(label_set))

    def __len__(self) -> int:
        return len(self.records)

    @property
    def has_heart_rate(self) -> bool:
        return bool(self.records) and self.records[0].heart_rate_bpm is not None

    @property
    def feature_names(self) -> tuple[str, ...]:
        if self.has_heart_rate:
            return ("feature_distance_ms", "heart_rate_bpm")
        return ("feature_distance_ms",)

    def feature_matrix(self) -> np.ndarray:
        """Numeric features as an (n_records, n_features) float array."""
        if not self.records:
            return np.zeros((0, len(self.feature_names)))
        cols = [[r.feature_distance_ms for r in self.records]]
        if self.has_heart_rate:
            cols.append([r.heart_rate_bpm for r in self.records])
        return np.array(cols, dtype=np.float64).T

    def labels(self) -> tuple[str, ...]:
        return tuple(r.label for r in self.records)

    def class_counts(self) -> dict[str, int]:
        counts: dict[str, int] = {}
        for record in self.records:
            counts[record.label] = counts.get(record.label, 0) + 1
        return counts

    def subject_ids(self) -> tuple[str, ...]:
        """Distinct subject identifiers in order of first appearance."""
        seen: dict[str, None] = {}
        for record in self.records:
            seen.setdefault(record.subject_id, None)
        return tuple(seen)

    def restricted_to_subject(self, subject_id: str) -> "Dataset":
        rows = tuple(r for r in self.records if r.subject_id == subject_id)
        return Dataset(rows, self.label_set)


def concat_datasets(datasets: Sequence[Dataset]) -> Dataset:
    """Concatenate datasets; the merged label set is the sorted union."""
    records: list[FeatureRecord] = []
    labels: set[str] = set()
    for data in datasets:
        records.extend(data.records)
        labels.update(data.label_set)
    return Dataset(tuple(records), tuple(sorted(labels)))


# ---------------------------------------------------------------------------
# CSV persistence

def write_csv(dataset: Dataset, path: str | Path) -> None:
    """Write the dataset as CSV with ``repr``-serialized floats."""
    lines = [",".join(CSV_HEADER)]
    for record in dataset.records:
        hr = "" if record.heart_rate_bpm is None else repr(record.heart_rate_bpm)
        lines.append(",".join((record.subject_id, record.utterance_id,
                               record.label, repr(record.feature_distance_ms),
                               hr)))
    try:
        Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc


def _parse_float(text: str, row_number: int, column: str) -> float:
    try:
        return float(text)
    except ValueError as exc:
        raise MalformedRow(
            f"row {row_number}: {column} value {text!r} is not a number"
        ) from exc


def read_csv(path: str | Path,
             label_set: Sequence[str] | None = None) -> Dataset:
    """Read a dataset written by :func:`write_csv`.

    With an explicit ``label_set``, rows with labels outside it raise
    :class:`UnknownLabel` naming the offending data row (1-based).  Otherwise
    the label set is inferred, sorted.
    """
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise IoFailure(f"cannot read {path}: {exc}") from exc
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or tuple(lines[0].split(",")) != CSV_HEADER:
        raise SchemaMismatch(
            f"expected header {','.join(CSV_HEADER)!r} in {path}")
    known = set(label_set) if label_set is not None else None
    records: list[FeatureRecord] = []
    for row_number, line in enumerate(lines[1:], start=1):
        parts = line.split(",")
        if len(parts) != len(CSV_HEADER):
            raise MalformedRow(
                f"row {row_number}: expected {len(CSV_HEADER)} fields, "
                f"got {len(parts)}")
        subject_id, utterance_id, label, fd_text, hr_text = parts
        if known is not None and label not in known:
            raise UnknownLabel(
                f"row {row_number}: label {label!r} not in {sorted(known)}")
        distance = _parse_float(fd_text, row_number, "feature_distance_ms")
        heart_rate = (None if hr_text == ""
                      else _parse_float(hr_text, row_number, "heart_rate_bpm"))
        try:
            records.append(FeatureRecord(subject_id, utterance_id, distance,
                                         heart_rate, label))
        except ValueError as exc:
            raise MalformedRow(f"row {row_number}: {exc}") from exc
    return Dataset.from_records(records, label_set)


# ---------------------------------------------------------------------------
# ARFF export

def write_arff(dataset: Dataset, path: str | Path,
               relation: str = ARFF_RELATION) -> None:
    """Write the dataset in ARFF form (numeric features, nominal class)."""
    lines = [f"@relation {relation}", "",
             "@attribute featuredistance numeric"]
    if dataset.has_heart_rate:
        lines.append("@attribute heartrate numeric")
    lines.append("@attribute class {" + ",".join(dataset.label_set) + "}")
    lines.extend(["", "@data"])
    for record in dataset.records:
        fields = [repr(record.feature_distance_ms)]
        if dataset.has_heart_rate:
            fields.append(repr(record.heart_rate_bpm))
        fields.append(record.label)
        lines.append(",".join(fields))
    try:
        Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc


# ---------------------------------------------------------------------------
# Stratified splitting

@dataclass(frozen=True)
class SplitPair:
    train: Dataset
    test: Dataset


def stratified_split(dataset: Dataset, train_fraction: float,
                     seed: int) -> SplitPair:
    """Split per class at ``train_fraction`` with a deterministic shuffle.

    Each class with records draws its own permutation from a seed derived from
    ``(seed, "split", label)``, so adding a class never disturbs another
    class's assignment.  The train share per class is
    ``max(1, round_half_up(fraction * n))``; if that consumes the whole class
    a :class:`DegenerateFractionWarning` is emitted and the class contributes
    no test rows.  Classes with fewer than two records raise
    :class:`ClassTooSmall`.  Output datasets preserve the input record order.
    """
    if not 0.0 < train_fraction < 1.0:
        raise ValueError(
            f"train_fraction must lie strictly between 0 and 1, "
            f"got {train_fraction}")
    train_positions: list[int] = []
    test_positions: list[int] = []
    for label in dataset.label_set:
        positions = [i for i, r in enumerate(dataset.records)
                     if r.label == label]
        if not positions:
            continue
        n_class = len(positions)
        if n_class < 2:
            raise ClassTooSmall(
                f"class {label!r} has {n_class} record(s); need at least 2")
        n_train = max(1, int(np.floor(train_fraction * n_class + 0.5)))
        if n_train >= n_class:
            warnings.warn(
                f"train_fraction {train_fraction} leaves no test records "
                f"for class {label!r} ({n_class} records)",
                DegenerateFractionWarning, stacklevel=2)
            n_train = n_class
        rng = rng_from(seed, "split", label)
        order = rng.permutation(n_class)
        chosen = {positions[j] for j in order[:n_train]}
        train_positions.extend(p for p in positions if p in chosen)
        test_positions.extend(p for p in positions if p not in chosen)
    train = Dataset(tuple(dataset.records[p] for p in sorted(train_positions)),
                    dataset.label_set)
    test = Dataset(tuple(dataset.records[p] for p in sorted(test_positions)),
                   dataset.label_set)
    return SplitPair(train, test)


# ---------------------------------------------------------------------------
# Min-max scaling

@dataclass(frozen=True)
class MinMaxScaler:
    """Column-wise affine map fitted on training data.

    Columns that were constant in training map everything to 0.5.
    """

    minima: np.ndarray
    maxima: np.ndarray
    _span: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        span = np.asarray(self.maxima, dtype=np.float64) - self.minima
        object.__setattr__(self, "_span", span)

    def transform(self, matrix: np.ndarray) -> np.ndarray:
        matrix = np.asarray(matrix, dtype=np.float64)
        with np.errstate(divide="ignore", invalid="ignore"):
            scaled = (matrix - self.minima) / self._span
        constant = self._span == 0.0
        if np.any(constant):
            scaled[:, constant] = 0.5
        return scaled


def min_max_fit_transform(
        train: np.ndarray,
        test: np.ndarray) -> tuple[np.ndarray, np.ndarray, MinMaxScaler]:
    """Fit a min-max scaler on ``train`` and apply it to both matrices."""
    train = np.asarray(train, dtype=np.float64)
    test = np.asarray(test, dtype=np.float64)
    if train.shape[0] == 0:
        raise EmptyTrain("cannot fit a scaler on an empty training matrix")
    scaler = MinMaxScaler(train.min(axis=0), train.max(axis=0))
    return scaler.transform(train), scaler.transform(test), scaler
