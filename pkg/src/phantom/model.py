"""Feature selection, standardization, cluster fitting, and prediction.

A fitted model stores everything needed to classify unseen repositories:
the retained feature indices, the training scaler, the two centroids, and
which cluster maps to the "engineered" flag.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from phantom.errors import (AllFeaturesDropped, ConstantColumn, MissingLabels,
                            TooFewRows)
from phantom.features import FEATURE_COUNT, FEATURE_NAMES, FeatureVector
from phantom.kmeans import KMeansResult, kmeans_fit
from phantom.measures import MeasureKind

SUM_Y_INDEX = FEATURE_NAMES.index("sum_y")


@dataclass(frozen=True)
class FeatureRow:
    """One (repository, measure) observation as carried by the features CSV."""

    repo_id: str
    measure: MeasureKind
    vector: FeatureVector
    label: bool | None = None


@dataclass
class FeatureTable:
    """Single-measure matrix of feature vectors with optional labels."""

    repo_ids: list[str]
    measure: MeasureKind
    matrix: np.ndarray                     # (n, 43) float64
    labels: np.ndarray | None = None       # (n,) bool

    def __post_init__(self) -> None:
        self.matrix = np.asarray(self.matrix, dtype=np.float64)
        if self.matrix.ndim != 2 or self.matrix.shape[1] != FEATURE_COUNT:
            raise ValueError(f"matrix must be (n, {FEATURE_COUNT})")
        if self.matrix.shape[0] != len(self.repo_ids):
            raise ValueError("row count must match repo id count")
        if not np.isfinite(self.matrix).all():
            raise ValueError("feature matrix entries must be finite")
        if self.labels is not None:
            self.labels = np.asarray(self.labels, dtype=bool)
            if self.labels.shape[0] != self.matrix.shape[0]:
                raise ValueError("label count must match row count")

    @classmethod
    def from_rows(cls, rows: Iterable[FeatureRow],
                  measure: MeasureKind) -> "FeatureTable":
        picked = [r for r in rows if r.measure is measure]
        matrix = np.array([r.vector for r in picked], dtype=np.float64)
        if not picked:
            matrix = matrix.reshape(0, FEATURE_COUNT)
        labels = None
        if picked and all(r.label is not None for r in picked):
            labels = np.array([r.label for r in picked], dtype=bool)
        return cls([r.repo_id for r in picked], measure, matrix, labels)

    @property
    def n_rows(self) -> int:
        return self.matrix.shape[0]


def pearson_matrix(table: FeatureTable | np.ndarray) -> np.ndarray:
    """Pairwise Pearson correlations between feature columns.

    Entries involving a zero-variance column are NaN (correlation undefined
    there); everything else is clipped into [-1, 1].
    """
    X = np.asarray(getattr(table, "matrix", table), dtype=np.float64)
    if X.shape[0] < 2:
        raise TooFewRows("correlation needs at least two rows")
    centered = X - X.mean(axis=0)
    sumsq = np.einsum("ij,ij->j", centered, centered)
    denom = np.sqrt(np.outer(sumsq, sumsq))
    with np.errstate(invalid="ignore", divide="ignore"):
        r = (centered.T @ centered) / denom
    r = np.clip(r, -1.0, 1.0)
    constant = sumsq == 0
    r[constant, :] = np.nan
    r[:, constant] = np.nan
    np.fill_diagonal(r, np.where(constant, np.nan, 1.0))
    return r


def select_features(table: FeatureTable, threshold: float) -> list[int]:
    """Greedy correlation pruning in canonical column order.

    Zero-variance columns are dropped outright; a remaining column is kept
    iff its |r| with every previously kept column stays strictly below the
    threshold (meeting the threshold removes it).
    """
    if not 0.0 < threshold <= 1.0:
        raise ValueError(f"threshold must be in (0, 1], got {threshold}")
    r = pearson_matrix(table)
    abs_r = np.abs(r)
    kept: list[int] = []
    for j in range(r.shape[0]):
        if np.isnan(r[j, j]):
            continue  # constant column
        if all(abs_r[j, k] < threshold for k in kept):
            kept.append(j)
    if not kept:
        raise AllFeaturesDropped(
            f"threshold {threshold} removed every usable feature")
    return kept


@dataclass(frozen=True)
class Scaler:
    """Per-feature standard-score parameters learned from training data."""

    mean: np.ndarray
    std: np.ndarray

    def transform(self, vectors: np.ndarray) -> np.ndarray:
        return (np.asarray(vectors, dtype=np.float64) - self.mean) / self.std


def fit_scaler(table: FeatureTable | np.ndarray,
               retained: Sequence[int]) -> Scaler:
    """Population-standard-deviation scaler over the retained columns."""
    X = np.asarray(getattr(table, "matrix", table), dtype=np.float64)
    if len(retained) == 0:
        raise ValueError("retained feature list must be non-empty")
    cols = X[:, list(retained)]
    mean = cols.mean(axis=0)
    std = cols.std(axis=0)
    if (std == 0).any():
        bad = [FEATURE_NAMES[retained[i]] for i in np.flatnonzero(std == 0)]
        raise ConstantColumn(f"constant column(s): {', '.join(bad)}")
    return Scaler(mean=mean, std=std)


def apply_scaler(vectors: np.ndarray, scaler: Scaler) -> np.ndarray:
    return scaler.transform(vectors)


def _f_measure(tp: int, fp: int, fn: int) -> float:
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    if precision + recall == 0:
        return 0.0
    return 2 * precision * recall / (precision + recall)


def map_clusters(assignments: np.ndarray, labels: np.ndarray | None) -> int:
    """Pick which cluster id means "engineered": the one whose mapping
    maximizes the F-measure of that class (tie prefers cluster 0)."""
    if labels is None:
        raise MissingLabels("cluster mapping requires ground-truth labels")
    assignments = np.asarray(assignments)
    labels = np.asarray(labels, dtype=bool)
    if assignments.shape[0] != labels.shape[0]:
        raise MissingLabels("labels must cover every assigned row")
    scores = []
    for positive in (0, 1):
        predicted = assignments == positive
        tp = int(np.count_nonzero(predicted & labels))
        fp = int(np.count_nonzero(predicted & ~labels))
        fn = int(np.count_nonzero(~predicted & labels))
        scores.append(_f_measure(tp, fp, fn))
    return 0 if scores[0] >= scores[1] else 1


MODEL_FORMAT_TAG = "phantom-model/1"


@dataclass(frozen=True)
class PhantomModel:
    """Everything a fit produced, in plain serializable values."""

    measure: MeasureKind
    threshold: float
    retained: tuple[int, ...]
    scaler_mean: tuple[float, ...]
    scaler_std: tuple[float, ...]
    centroids: tuple[tuple[float, ...], tuple[float, ...]]
    positive_cluster: int
    seed: int
    provenance: str = ""

    def __post_init__(self) -> None:
        if not self.retained:
            raise ValueError("a model must retain at least one feature")
        if self.positive_cluster not in (0, 1):
            raise ValueError("positive_cluster must be 0 or 1")
        if len(self.centroids) != 2 or self.centroids[0] == self.centroids[1]:
            raise ValueError("a model must have exactly two distinct centroids")
        width = len(self.retained)
        lengths = {len(self.scaler_mean), len(self.scaler_std),
                   len(self.centroids[0]), len(self.centroids[1])}
        if lengths != {width}:
            raise ValueError("model parameter lengths must match the "
                             "retained feature count")
        if any(s <= 0 for s in self.scaler_std):
            raise ValueError("scaler std entries must be positive")

    @property
    def retained_names(self) -> tuple[str, ...]:
        return tuple(FEATURE_NAMES[i] for i in self.retained)


def _heuristic_positive_cluster(table: FeatureTable,
                                assignments: np.ndarray) -> int:
    # label-free fallback: the busier cluster (larger mean standardized
    # sum_y over the whole table) is taken as engineered
    col = table.matrix[:, SUM_Y_INDEX]
    std = col.std()
    z = (col - col.mean()) / std if std > 0 else np.zeros_like(col)
    mean0 = z[assignments == 0].mean() if (assignments == 0).any() else -np.inf
    mean1 = z[assignments == 1].mean() if (assignments == 1).any() else -np.inf
    return 0 if mean0 >= mean1 else 1


def fit_model(table: FeatureTable, threshold: float, seed: int = 42,
              provenance: str = "", label_free: bool = False) -> PhantomModel:
    """Compose selection, standardization, clustering, and label mapping."""
    if table.n_rows < 2:
        raise TooFewRows(f"measure {table.measure.value}: need at least "
                         f"2 rows to fit, got {table.n_rows}")
    if table.labels is None and not label_free:
        raise MissingLabels(
            "fitting requires labels (or explicit label-free mode)")
    retained = select_features(table, threshold)
    scaler = fit_scaler(table, retained)
    standardized = scaler.transform(table.matrix[:, retained])
    km: KMeansResult = kmeans_fit(standardized, k=2, inits=10,
                                  max_iter=300, seed=seed)
    if table.labels is not None:
        positive = map_clusters(km.assignments, table.labels)
    else:
        positive = _heuristic_positive_cluster(table, km.assignments)
    return PhantomModel(
        measure=table.measure,
        threshold=float(threshold),
        retained=tuple(retained),
        scaler_mean=tuple(float(v) for v in scaler.mean),
        scaler_std=tuple(float(v) for v in scaler.std),
        centroids=(tuple(float(v) for v in km.centroids[0]),
                   tuple(float(v) for v in km.centroids[1])),
        positive_cluster=positive,
        seed=seed,
        provenance=provenance,
    )


def predict(model: PhantomModel, vectors: np.ndarray) -> np.ndarray:
    """Engineered flag per row of a complete (n, 43) feature matrix."""
    X = np.asarray(vectors, dtype=np.float64)
    single = X.ndim == 1
    if single:
        X = X.reshape(1, -1)
    if X.shape[1] != FEATURE_COUNT:
        raise ValueError(f"expected {FEATURE_COUNT} feature columns")
    Z = (X[:, list(model.retained)] - np.asarray(model.scaler_mean)) \
        / np.asarray(model.scaler_std)
    centroids = np.asarray(model.centroids)
    d2 = np.stack([np.einsum("ij,ij->i", Z - c, Z - c) for c in centroids],
                  axis=1)
    # argmin resolves distance ties toward cluster 0
    flags = d2.argmin(axis=1) == model.positive_cluster
    return flags[0] if single else flags
