"""Shared helpers: small labeled datasets built from plain matrices."""

import numpy as np
import pytest

from emospeech.dataset import Dataset
from emospeech.features import FeatureRecord


def matrix_dataset(matrix, labels, label_set=None, subject="s0"):
    """Build a Dataset from a positive-valued feature matrix (1 or 2 columns)."""
    matrix = np.asarray(matrix, dtype=np.float64)
    if matrix.ndim == 1:
        matrix = matrix[:, None]
    records = []
    for i, (row, label) in enumerate(zip(matrix, labels)):
        heart_rate = float(row[1]) if matrix.shape[1] == 2 else None
        records.append(FeatureRecord(subject, f"u{i}", float(row[0]),
                                     heart_rate, label))
    return Dataset.from_records(records, label_set)


def smoke_dataset(n_per_class=30, seed=7):
    """Two well-separated Gaussian blobs in 2-D: linearly separable."""
    rng = np.random.default_rng(seed)
    rows, labels = [], []
    for label, (cx, cy) in (("P", (100.0, 70.0)), ("Q", (300.0, 110.0))):
        for _ in range(n_per_class):
            rows.append([cx + rng.normal(0.0, 3.0), cy + rng.normal(0.0, 2.0)])
            labels.append(label)
    return matrix_dataset(rows, labels)


@pytest.fixture(scope="session")
def smoke_data():
    return smoke_dataset()
