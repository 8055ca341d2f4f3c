"""Confusion metrics, naive baselines, the threshold sweep, and model choice."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from phantom.errors import (AllFeaturesDropped, ConstantColumn,
                            EmptyEvaluation, MissingLabels, NoSuccessfulCell,
                            TooFewPoints, TooFewRows)
from phantom.measures import MeasureKind
from phantom.model import FeatureTable, PhantomModel, fit_model, predict

#: correlation thresholds 0.05, 0.10, ..., 1.00
DEFAULT_GRID: tuple[float, ...] = tuple(round(i * 0.05, 2) for i in range(1, 21))


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int
    fp: int
    fn: int
    tn: int

    def __post_init__(self) -> None:
        if min(self.tp, self.fp, self.fn, self.tn) < 0:
            raise ValueError("confusion counts must be non-negative")

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn

    @classmethod
    def from_predictions(cls, labels, predictions) -> "ConfusionMatrix":
        labels = np.asarray(labels, dtype=bool)
        predictions = np.asarray(predictions, dtype=bool)
        if labels.shape != predictions.shape:
            raise ValueError("labels and predictions must align")
        return cls(
            tp=int(np.count_nonzero(predictions & labels)),
            fp=int(np.count_nonzero(predictions & ~labels)),
            fn=int(np.count_nonzero(~predictions & labels)),
            tn=int(np.count_nonzero(~predictions & ~labels)),
        )


@dataclass(frozen=True)
class EvaluationReport:
    confusion: ConfusionMatrix
    precision: float
    recall: float
    f_measure: float
    mcc: float
    model: str = ""


def metrics(confusion: ConfusionMatrix, model: str = "") -> EvaluationReport:
    """Precision, recall, F-measure, and MCC; undefined denominators give 0."""
    if confusion.total == 0:
        raise EmptyEvaluation("cannot evaluate zero rows")
    tp, fp, fn, tn = confusion.tp, confusion.fp, confusion.fn, confusion.tn
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f_measure = (2 * precision * recall / (precision + recall)
                 if precision + recall else 0.0)
    denom = (tp + fp) * (tp + fn) * (tn + fp) * (tn + fn)
    mcc = (tp * tn - fp * fn) / math.sqrt(denom) if denom else 0.0
    return EvaluationReport(confusion=confusion, precision=precision,
                            recall=recall, f_measure=f_measure, mcc=mcc,
                            model=model)


def naive_baselines(labels, seed: int = 42) -> dict[str, EvaluationReport]:
    """Uniform-coin, label-frequency-coin, and constant-majority predictors.

    The majority predictor resolves a tied label distribution toward the
    positive class.
    """
    labels = np.asarray(labels, dtype=bool)
    if labels.size == 0:
        raise EmptyEvaluation("baselines need at least one label")
    rng = np.random.default_rng(seed)
    n = labels.size
    p_true = labels.mean()
    predictors = {
        "uniform": rng.random(n) < 0.5,
        "stratified": rng.random(n) < p_true,
        "majority": np.full(n, p_true >= 0.5),
    }
    return {
        name: metrics(ConfusionMatrix.from_predictions(labels, preds),
                      model=f"baseline:{name}")
        for name, preds in predictors.items()
    }


@dataclass(frozen=True)
class SweepCell:
    measure: MeasureKind
    threshold: float
    status: str                      # "ok" or "failed:<ErrorName>"
    n_features: int = 0
    report: EvaluationReport | None = None
    model: PhantomModel | None = None

    @property
    def ok(self) -> bool:
        return self.status == "ok"


@dataclass(frozen=True)
class SweepResult:
    grid: tuple[float, ...]
    cells: tuple[SweepCell, ...]


_SWEEP_RECOVERABLE = (AllFeaturesDropped, ConstantColumn, TooFewRows,
                      TooFewPoints, MissingLabels)


def sweep(table: FeatureTable, grid=None, seed: int = 42,
          eval_table: FeatureTable | None = None) -> SweepResult:
    """Fit one model per threshold and evaluate it.

    By default each model is evaluated on its own fitting table
    (rediscovery); pass ``eval_table`` to evaluate on held-out data
    instead. Failed cells are recorded, never fatal.
    """
    grid = tuple(DEFAULT_GRID if grid is None else grid)
    if not grid:
        raise ValueError("threshold grid must be non-empty")
    target = table if eval_table is None else eval_table
    if target.n_rows == 0:
        raise EmptyEvaluation(
            f"no feature rows for measure {table.measure.value}")
    if target.labels is None:
        raise MissingLabels("evaluation table has no labels")
    cells = []
    for threshold in grid:
        try:
            model = fit_model(table, threshold, seed=seed,
                              provenance=f"sweep@{threshold:g}")
            flags = predict(model, target.matrix)
            report = metrics(
                ConfusionMatrix.from_predictions(target.labels, flags),
                model=f"{table.measure.value}@{threshold:g}")
            cells.append(SweepCell(table.measure, threshold, "ok",
                                   n_features=len(model.retained),
                                   report=report, model=model))
        except _SWEEP_RECOVERABLE as exc:
            cells.append(SweepCell(table.measure, threshold,
                                   f"failed:{type(exc).__name__}"))
    return SweepResult(grid=grid, cells=tuple(cells))


def select_best(result: SweepResult) -> SweepCell:
    """Highest F-measure, then precision, then recall, then lowest threshold."""
    ok = [c for c in result.cells if c.ok and c.report is not None]
    if not ok:
        raise NoSuccessfulCell("every sweep cell failed")
    return min(ok, key=lambda c: (-c.report.f_measure, -c.report.precision,
                                  -c.report.recall, c.threshold))
