"""Seven from-scratch classifiers over labeled feature datasets.

Each classifier trains from a :class:`~emospeech.dataset.Dataset` and yields
an immutable model whose ``predict_proba`` returns a distribution over the
classes present in training (ordered as in the dataset's label set).  All
seven are deterministic given ``(spec, seed, dataset order)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Callable, Mapping

import numpy as np

from ._kernels import grow_tree, logistic_gd
from .dataset import Dataset, MinMaxScaler
from .errors import (
    DimensionMismatch,
    EmptyInput,
    EmptyTrain,
    NonFiniteFeature,
    SingleClassTraining,
)
from .seeding import derive_seed, rng_from

CLASSIFIER_KINDS = ("NaiveBayes", "NearestNeighbor1", "RbfNetwork",
                    "Logistic", "AdaBoostM1", "Bagging", "RandomTree")

VARIANCE_FLOOR = 1e-6
GRADIENT_TOLERANCE = 1e-6
ALPHA_CAP = math.log(1e10)
WIDTH_FLOOR = 1e-3
KMEANS_MAX_ITER = 100

_HYPER_DEFAULTS: dict[str, dict[str, Any]] = {
    "NaiveBayes": {},
    "NearestNeighbor1": {},
    "RbfNetwork": {"clusters_per_class": 2},
    "Logistic": {"ridge": 1e-8, "step_size": 0.1, "max_iterations": 2000},
    "AdaBoostM1": {"rounds": 10},
    "Bagging": {"bags": 10},
    "RandomTree": {"max_depth": 20},
}
_INTEGER_PARAMS = frozenset(
    {"clusters_per_class", "max_iterations", "rounds", "bags", "max_depth"})


@dataclass(frozen=True)
class ClassifierSpec:
    """A classifier kind plus seed and hyperparameter overrides."""

    kind: str
    seed: int = 0
    overrides: tuple[tuple[str, Any], ...] = ()

    def __post_init__(self) -> None:
        if self.kind not in CLASSIFIER_KINDS:
            raise ValueError(
                f"unknown classifier kind {self.kind!r}; "
                f"expected one of {CLASSIFIER_KINDS}")
        allowed = _HYPER_DEFAULTS[self.kind]
        for key, value in self.overrides:
            if key not in allowed:
                raise ValueError(
                    f"{self.kind} accepts {sorted(allowed)}, not {key!r}")
            if key in _INTEGER_PARAMS:
                if not isinstance(value, (int, np.integer)) or value < 1:
                    raise ValueError(f"{key} must be an integer >= 1, "
                                     f"got {value!r}")
            elif key == "ridge":
                if not value >= 0.0:
                    raise ValueError(f"ridge must be >= 0, got {value!r}")
            elif key == "step_size":
                if not value > 0.0:
                    raise ValueError(f"step_size must be > 0, got {value!r}")

    @classmethod
    def make(cls, kind: str, seed: int = 0, **overrides: Any) -> "ClassifierSpec":
        return cls(kind, seed, tuple(sorted(overrides.items())))

    def hyper(self, name: str) -> Any:
        merged = dict(_HYPER_DEFAULTS[self.kind])
        merged.update(self.overrides)
        return merged[name]


def default_classifier_specs(seed: int = 0) -> tuple[ClassifierSpec, ...]:
    """The seven classifiers with default hyperparameters, sharing one seed."""
    return tuple(ClassifierSpec.make(kind, seed=seed)
                 for kind in CLASSIFIER_KINDS)


# ---------------------------------------------------------------------------
# Shared model machinery

class TrainedModel:
    """Base for all trained models: dimension checks + prediction surface.

    Subclasses provide ``_proba_batch(matrix) -> (n, n_classes)``; ties in
    ``predict_label`` resolve to the lowest class index.
    """

    kind: str
    label_set: tuple[str, ...]
    n_features: int

    def _check_matrix(self, matrix: np.ndarray) -> np.ndarray:
        matrix = np.asarray(matrix, dtype=np.float64)
        if matrix.ndim != 2 or matrix.shape[1] != self.n_features:
            raise DimensionMismatch(
                f"expected (n, {self.n_features}) features, "
                f"got shape {matrix.shape}")
        if not np.all(np.isfinite(matrix)):
            raise NonFiniteFeature("query features must be finite")
        return matrix

    def predict_proba(self, features: np.ndarray) -> np.ndarray:
        vector = np.asarray(features, dtype=np.float64)
        if vector.ndim != 1 or vector.shape[0] != self.n_features:
            raise DimensionMismatch(
                f"expected a {self.n_features}-vector, got shape "
                f"{vector.shape}")
        return self.predict_proba_batch(vector[None, :])[0]

    def predict_proba_batch(self, matrix: np.ndarray) -> np.ndarray:
        return self._proba_batch(self._check_matrix(matrix))

    def predict_label(self, features: np.ndarray) -> str:
        return self.label_set[int(np.argmax(self.predict_proba(features)))]

    def predict_labels(self, matrix: np.ndarray) -> tuple[str, ...]:
        probs = self.predict_proba_batch(matrix)
        return tuple(self.label_set[i] for i in np.argmax(probs, axis=1))

    def _proba_batch(self, matrix: np.ndarray) -> np.ndarray:
        raise NotImplementedError


@dataclass(frozen=True)
class _Standardizer:
    means: np.ndarray
    stds: np.ndarray

    @classmethod
    def fit(cls, matrix: np.ndarray) -> "_Standardizer":
        stds = matrix.std(axis=0)
        return cls(matrix.mean(axis=0), np.where(stds == 0.0, 1.0, stds))

    def apply(self, matrix: np.ndarray) -> np.ndarray:
        return (matrix - self.means) / self.stds


def _normalize_log_weights(log_scores: np.ndarray) -> np.ndarray:
    shifted = log_scores - log_scores.max(axis=1, keepdims=True)
    weights = np.exp(shifted)
    return weights / weights.sum(axis=1, keepdims=True)


# ---------------------------------------------------------------------------
# Naive Bayes

@dataclass(frozen=True)
class NaiveBayesModel(TrainedModel):
    kind: str
    label_set: tuple[str, ...]
    n_features: int
    log_priors: np.ndarray
    means: np.ndarray
    variances: np.ndarray

    def _proba_batch(self, matrix: np.ndarray) -> np.ndarray:
        gap = matrix[:, None, :] - self.means[None, :, :]
        log_lik = -0.5 * (np.log(2.0 * np.pi * self.variances)[None]
                          + gap ** 2 / self.variances[None]).sum(axis=2)
        return _normalize_log_weights(log_lik + self.log_priors[None, :])


def _train_naive_bayes(spec: ClassifierSpec, matrix: np.ndarray,
                       targets: np.ndarray,
                       label_set: tuple[str, ...]) -> NaiveBayesModel:
    n_classes = len(label_set)
    n, d = matrix.shape
    means = np.empty((n_classes, d))
    variances = np.empty((n_classes, d))
    log_priors = np.empty(n_classes)
    for c in range(n_classes):
        rows = matrix[targets == c]
        means[c] = rows.mean(axis=0)
        variances[c] = np.maximum(rows.var(axis=0), VARIANCE_FLOOR)
        log_priors[c] = math.log(len(rows) / n)
    return NaiveBayesModel("NaiveBayes", label_set, d, log_priors, means,
                           variances)


# ---------------------------------------------------------------------------
# 1-nearest-neighbor

@dataclass(frozen=True)
class NearestNeighborModel(TrainedModel):
    kind: str
    label_set: tuple[str, ...]
    n_features: int
    scaler: MinMaxScaler
    stored: np.ndarray
    stored_targets: np.ndarray

    def _proba_batch(self, matrix: np.ndarray) -> np.ndarray:
        queries = self.scaler.transform(matrix)
        squared = ((queries[:, None, :] - self.stored[None, :, :]) ** 2
                   ).sum(axis=2)
        winners = self.stored_targets[np.argmin(squared, axis=1)]
        probs = np.zeros((len(matrix), len(self.label_set)))
        probs[np.arange(len(matrix)), winners] = 1.0
        return probs


def _train_nearest_neighbor(spec: ClassifierSpec, matrix: np.ndarray,
                            targets: np.ndarray,
                            label_set: tuple[str, ...]) -> NearestNeighborModel:
    scaler = MinMaxScaler(matrix.min(axis=0), matrix.max(axis=0))
    return NearestNeighborModel("NearestNeighbor1", label_set,
                                matrix.shape[1], scaler,
                                scaler.transform(matrix), targets.copy())


# ---------------------------------------------------------------------------
# Multinomial logistic regression

@dataclass(frozen=True)
class _LogisticCore:
    standardizer: _Standardizer
    weights: np.ndarray

    def proba(self, matrix: np.ndarray) -> np.ndarray:
        scaled = self.standardizer.apply(matrix)
        biased = np.hstack([scaled, np.ones((len(scaled), 1))])
        return _normalize_log_weights(biased @ self.weights)


def _fit_logistic_core(matrix: np.ndarray, targets: np.ndarray,
                       n_classes: int, ridge: float, step_size: float,
                       max_iterations: int) -> _LogisticCore:
    standardizer = _Standardizer.fit(matrix)
    scaled = standardizer.apply(matrix)
    biased = np.ascontiguousarray(
        np.hstack([scaled, np.ones((len(scaled), 1))]))
    weights = logistic_gd(biased, targets.astype(np.int64), n_classes,
                          max_iterations, step_size, ridge,
                          GRADIENT_TOLERANCE)
    return _LogisticCore(standardizer, weights)


@dataclass(frozen=True)
class LogisticModel(TrainedModel):
    kind: str
    label_set: tuple[str, ...]
    n_features: int
    core: _LogisticCore

    def _proba_batch(self, matrix: np.ndarray) -> np.ndarray:
        return self.core.proba(matrix)


def _train_logistic(spec: ClassifierSpec, matrix: np.ndarray,
                    targets: np.ndarray,
                    label_set: tuple[str, ...]) -> LogisticModel:
    core = _fit_logistic_core(matrix, targets, len(label_set),
                              spec.hyper("ridge"), spec.hyper("step_size"),
                              spec.hyper("max_iterations"))
    return LogisticModel("Logistic", label_set, matrix.shape[1], core)


# ---------------------------------------------------------------------------
# RBF network

def _kmeans(points: np.ndarray, k: int,
            rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Lloyd's iterations with seeded record initialization.

    Empty clusters are re-seeded to the point farthest from its assigned
    center.  Returns (centers, assignments).
    """
    n = len(points)
    centers = points[rng.choice(n, size=k, replace=False)].copy()
    assignments = np.full(n, -1)
    for _ in range(KMEANS_MAX_ITER):
        squared = ((points[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
        new_assignments = np.argmin(squared, axis=1)
        for c in range(k):
            if not np.any(new_assignments == c):
                own = squared[np.arange(n), new_assignments]
                new_assignments[int(np.argmax(own))] = c
        if np.array_equal(new_assignments, assignments):
            break
        assignments = new_assignments
        for c in range(k):
            centers[c] = points[assignments == c].mean(axis=0)
    return centers, assignments


@dataclass(frozen=True)
class RbfNetworkModel(TrainedModel):
    kind: str
    label_set: tuple[str, ...]
    n_features: int
    standardizer: _Standardizer
    centers: np.ndarray
    widths: np.ndarray
    core: _LogisticCore

    def _activations(self, matrix: np.ndarray) -> np.ndarray:
        scaled = self.standardizer.apply(matrix)
        squared = ((scaled[:, None, :] - self.centers[None, :, :]) ** 2
                   ).sum(axis=2)
        return np.exp(-squared / (2.0 * self.widths[None, :] ** 2))

    def _proba_batch(self, matrix: np.ndarray) -> np.ndarray:
        return self.core.proba(self._activations(matrix))


def _train_rbf_network(spec: ClassifierSpec, matrix: np.ndarray,
                       targets: np.ndarray,
                       label_set: tuple[str, ...]) -> RbfNetworkModel:
    clusters_per_class = spec.hyper("clusters_per_class")
    standardizer = _Standardizer.fit(matrix)
    scaled = standardizer.apply(matrix)
    centers: list[np.ndarray] = []
    widths: list[float] = []
    for c in range(len(label_set)):
        points = scaled[targets == c]
        k = min(clusters_per_class, len(points))
        # seeding by class size (not name or position) keeps predictions
        # exactly equivariant under label renaming
        rng = rng_from(spec.seed, "kmeans", len(points))
        class_centers, assignments = _kmeans(points, k, rng)
        for j in range(k):
            members = points[assignments == j]
            radius = math.sqrt(
                float(((members - class_centers[j]) ** 2).sum(axis=1).mean()))
            centers.append(class_centers[j])
            widths.append(max(radius, WIDTH_FLOOR))
    center_matrix = np.vstack(centers)
    width_vector = np.array(widths)
    squared = ((scaled[:, None, :] - center_matrix[None, :, :]) ** 2
               ).sum(axis=2)
    activations = np.exp(-squared / (2.0 * width_vector[None, :] ** 2))
    core = _fit_logistic_core(
        activations, targets, len(label_set),
        _HYPER_DEFAULTS["Logistic"]["ridge"],
        _HYPER_DEFAULTS["Logistic"]["step_size"],
        _HYPER_DEFAULTS["Logistic"]["max_iterations"])
    return RbfNetworkModel("RbfNetwork", label_set, matrix.shape[1],
                           standardizer, center_matrix, width_vector, core)


# ---------------------------------------------------------------------------
# Decision stumps + AdaBoost.M1

@dataclass(frozen=True)
class DecisionStump:
    """Single-threshold classifier; feature -1 means a constant prediction."""

    feature: int
    threshold: float
    left_class: int
    right_class: int


def train_decision_stump(features: np.ndarray, label_indices: np.ndarray,
                         weights: np.ndarray, n_classes: int) -> DecisionStump:
    """Exhaustive best stump under weighted 0/1 error.

    Scans every (feature, midpoint-between-consecutive-distinct-values) pair;
    ties prefer the lower feature index, then the lower threshold.  With no
    usable threshold (all features constant) the stump predicts the overall
    weighted-majority class everywhere.
    """
    features = np.asarray(features, dtype=np.float64)
    label_indices = np.asarray(label_indices)
    weights = np.asarray(weights, dtype=np.float64)
    n, d = features.shape
    if n == 0:
        raise EmptyInput("cannot fit a stump on zero records")
    one_hot = np.zeros((n, n_classes))
    one_hot[np.arange(n), label_indices] = 1.0
    weighted = one_hot * weights[:, None]
    class_totals = weighted.sum(axis=0)
    total = class_totals.sum()

    best_error = math.inf
    best: DecisionStump | None = None
    for j in range(d):
        ranks = np.argsort(features[:, j], kind="stable")
        sorted_values = features[ranks, j]
        cuts = np.nonzero(sorted_values[:-1] != sorted_values[1:])[0]
        if len(cuts) == 0:
            continue
        cumulative = np.cumsum(weighted[ranks], axis=0)
        left_sums = cumulative[cuts]
        right_sums = class_totals[None, :] - left_sums
        errors = (total - left_sums.max(axis=1) - right_sums.max(axis=1))
        pick = int(np.argmin(errors))
        if errors[pick] < best_error:
            best_error = float(errors[pick])
            cut = cuts[pick]
            best = DecisionStump(
                j, 0.5 * (sorted_values[cut] + sorted_values[cut + 1]),
                int(np.argmax(left_sums[pick])),
                int(np.argmax(right_sums[pick])))
    if best is None:
        majority = int(np.argmax(class_totals))
        return DecisionStump(-1, 0.0, majority, majority)
    return best


def stump_predict(stump: DecisionStump, matrix: np.ndarray) -> np.ndarray:
    """Predicted class index per row."""
    matrix = np.asarray(matrix, dtype=np.float64)
    if matrix.ndim == 1:
        matrix = matrix[:, None]
    if stump.feature < 0:
        return np.full(len(matrix), stump.left_class, dtype=np.int64)
    return np.where(matrix[:, stump.feature] <= stump.threshold,
                    stump.left_class, stump.right_class).astype(np.int64)


def stump_weighted_error(stump: DecisionStump, features: np.ndarray,
                         label_indices: np.ndarray,
                         weights: np.ndarray) -> float:
    predictions = stump_predict(stump, features)
    return float(np.asarray(weights)[predictions != label_indices].sum())


@dataclass(frozen=True)
class AdaBoostModel(TrainedModel):
    kind: str
    label_set: tuple[str, ...]
    n_features: int
    stumps: tuple[DecisionStump, ...]
    alphas: tuple[float, ...]
    fallback: np.ndarray  # training class frequencies, used when no stumps

    def _proba_batch(self, matrix: np.ndarray) -> np.ndarray:
        if not self.stumps:
            return np.tile(self.fallback, (len(matrix), 1))
        scores = np.zeros((len(matrix), len(self.label_set)))
        for stump, alpha in zip(self.stumps, self.alphas):
            votes = stump_predict(stump, matrix)
            scores[np.arange(len(matrix)), votes] += alpha
        return scores / scores.sum(axis=1, keepdims=True)


def _train_adaboost(spec: ClassifierSpec, matrix: np.ndarray,
                    targets: np.ndarray,
                    label_set: tuple[str, ...]) -> AdaBoostModel:
    n_classes = len(label_set)
    n = len(matrix)
    weights = np.full(n, 1.0 / n)
    stumps: list[DecisionStump] = []
    alphas: list[float] = []
    for _ in range(spec.hyper("rounds")):
        stump = train_decision_stump(matrix, targets, weights, n_classes)
        misses = stump_predict(stump, matrix) != targets
        error = float(weights[misses].sum())
        if error == 0.0:
            stumps.append(stump)
            alphas.append(ALPHA_CAP)
            break
        if error >= 0.5:
            break
        stumps.append(stump)
        alphas.append(math.log((1.0 - error) / error))
        weights[misses] *= (1.0 - error) / error
        weights /= weights.sum()
    fallback = np.bincount(targets, minlength=n_classes) / n
    return AdaBoostModel("AdaBoostM1", label_set, matrix.shape[1],
                         tuple(stumps), tuple(alphas), fallback)


# ---------------------------------------------------------------------------
# Random trees + bagging

@dataclass(frozen=True)
class TreeArrays:
    """Flattened tree: parallel node arrays; feature -1 marks a leaf."""

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    counts: np.ndarray

    @property
    def n_classes(self) -> int:
        return self.counts.shape[1]


def grow_random_tree(features: np.ndarray, label_indices: np.ndarray,
                     n_classes: int, seed: int,
                     max_depth: int = 20) -> TreeArrays:
    """Induce a random tree (randomized feature subsets at each node)."""
    features = np.ascontiguousarray(features, dtype=np.float64)
    label_indices = np.ascontiguousarray(label_indices, dtype=np.int64)
    d = features.shape[1]
    k = min(1 + int(math.floor(math.log2(d))), d)
    arrays = grow_tree(features, label_indices, n_classes, k, max_depth,
                       seed % 2 ** 32)
    return TreeArrays(*(np.ascontiguousarray(a) for a in arrays))


def tree_predict_proba(tree: TreeArrays, matrix: np.ndarray) -> np.ndarray:
    """Laplace-smoothed leaf distributions for each query row."""
    matrix = np.asarray(matrix, dtype=np.float64)
    nodes = np.zeros(len(matrix), dtype=np.int64)
    while True:
        at_internal = tree.feature[nodes] >= 0
        if not np.any(at_internal):
            break
        rows = np.nonzero(at_internal)[0]
        current = nodes[rows]
        split_features = tree.feature[current]
        go_left = (matrix[rows, split_features]
                   <= tree.threshold[current])
        nodes[rows] = np.where(go_left, tree.left[current],
                               tree.right[current])
    leaf_counts = tree.counts[nodes]
    smoothed = leaf_counts + 1.0
    return smoothed / smoothed.sum(axis=1, keepdims=True)


@dataclass(frozen=True)
class RandomTreeModel(TrainedModel):
    kind: str
    label_set: tuple[str, ...]
    n_features: int
    tree: TreeArrays

    def _proba_batch(self, matrix: np.ndarray) -> np.ndarray:
        return tree_predict_proba(self.tree, matrix)


def _train_random_tree(spec: ClassifierSpec, matrix: np.ndarray,
                       targets: np.ndarray,
                       label_set: tuple[str, ...]) -> RandomTreeModel:
    tree = grow_random_tree(matrix, targets, len(label_set),
                            derive_seed(spec.seed, "tree"),
                            spec.hyper("max_depth"))
    return RandomTreeModel("RandomTree", label_set, matrix.shape[1], tree)


@dataclass(frozen=True)
class BaggingModel(TrainedModel):
    kind: str
    label_set: tuple[str, ...]
    n_features: int
    members: tuple[RandomTreeModel, ...]

    def _proba_batch(self, matrix: np.ndarray) -> np.ndarray:
        stacked = np.stack([m._proba_batch(matrix) for m in self.members])
        return stacked.mean(axis=0)


def _train_bagging(spec: ClassifierSpec, matrix: np.ndarray,
                   targets: np.ndarray,
                   label_set: tuple[str, ...]) -> BaggingModel:
    n = len(matrix)
    rng = rng_from(spec.seed, "bagging")
    members = []
    for b in range(spec.hyper("bags")):
        picks = rng.integers(0, n, size=n)
        tree = grow_random_tree(matrix[picks], targets[picks], len(label_set),
                                derive_seed(spec.seed, "bag-tree", b))
        members.append(RandomTreeModel("RandomTree", label_set,
                                       matrix.shape[1], tree))
    return BaggingModel("Bagging", label_set, matrix.shape[1], tuple(members))


# ---------------------------------------------------------------------------
# Dispatch

_TRAINERS: Mapping[str, Callable[..., TrainedModel]] = {
    "NaiveBayes": _train_naive_bayes,
    "NearestNeighbor1": _train_nearest_neighbor,
    "RbfNetwork": _train_rbf_network,
    "Logistic": _train_logistic,
    "AdaBoostM1": _train_adaboost,
    "Bagging": _train_bagging,
    "RandomTree": _train_random_tree,
}


def train(spec: ClassifierSpec, train_data: Dataset) -> TrainedModel:
    """Train one classifier on a dataset's numeric features.

    The model's label set is the dataset's label order restricted to classes
    that actually appear in training; fewer than two such classes is an
    error.
    """
    if len(train_data) == 0:
        raise EmptyTrain("training dataset has no records")
    matrix = train_data.feature_matrix()
    if not np.all(np.isfinite(matrix)):
        raise NonFiniteFeature("training features must be finite")
    present = set(train_data.labels())
    label_set = tuple(lbl for lbl in train_data.label_set if lbl in present)
    if len(label_set) < 2:
        raise SingleClassTraining(
            f"training data contains {len(label_set)} class(es); need >= 2")
    index = {label: i for i, label in enumerate(label_set)}
    targets = np.array([index[r.label] for r in train_data.records],
                       dtype=np.int64)
    return _TRAINERS[spec.kind](spec, matrix, targets, label_set)
