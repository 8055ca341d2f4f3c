"""Bit-exact persistence for logs, feature tables, models, and reports.

Every write goes through an atomic temp-file rename, so readers never see
partial files and interrupted runs never corrupt completed stages. Floats
are serialized with Python's shortest round-trip representation.
"""
from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from phantom.errors import (ParseError, SchemaMismatch, VersionMismatch)
from phantom.evaluation import EvaluationReport, SweepCell, SweepResult
from phantom.features import FEATURE_COUNT, FEATURE_NAMES, FeatureVector
from phantom.gitlog import RepoRef
from phantom.measures import MeasureKind, MeasureSeries, week_start
from phantom.model import MODEL_FORMAT_TAG, FeatureRow, PhantomModel

LABEL_COLUMN = "engineered"
FEATURES_HEADER = ("repo_id", "measure", *FEATURE_NAMES)
PREDICTIONS_HEADER = ("repo_id", "measure", "engineered")
SWEEP_HEADER = ("measure", "threshold", "n_features", "precision", "recall",
                "f_measure", "mcc", "status")
EVALUATION_HEADER = ("model", "measure", "tp", "fp", "fn", "tn", "precision",
                     "recall", "f_measure", "mcc")
SERIES_HEADER = ("repo_id", "kind", "week_start_date", "value")
LABELS_HEADER = ("repo_id", "engineered")

_TRUE = {"1", "true"}
_FALSE = {"0", "false"}


@dataclass(frozen=True)
class CorpusLayout:
    """Directory layout of one working corpus."""

    root: Path

    @property
    def logs_dir(self) -> Path:
        return self.root / "logs"

    @property
    def features_dir(self) -> Path:
        return self.root / "features"

    @property
    def models_dir(self) -> Path:
        return self.root / "models"

    @property
    def reports_dir(self) -> Path:
        return self.root / "reports"

    @property
    def clones_dir(self) -> Path:
        return self.root / "clones"

    @property
    def unavailable_path(self) -> Path:
        return self.reports_dir / "unavailable.csv"

    @property
    def features_path(self) -> Path:
        return self.features_dir / "features.csv"

    @property
    def series_path(self) -> Path:
        return self.features_dir / "series.csv"

    @property
    def sweep_path(self) -> Path:
        return self.reports_dir / "sweep.csv"

    @property
    def best_models_path(self) -> Path:
        return self.reports_dir / "best_models.json"

    @property
    def predictions_path(self) -> Path:
        return self.reports_dir / "predictions.csv"

    @property
    def evaluation_path(self) -> Path:
        return self.reports_dir / "evaluation.csv"

    def model_path(self, measure: MeasureKind, best: bool = False) -> Path:
        prefix = "best_" if best else "model_"
        return self.models_dir / f"{prefix}{measure.value}.json"

    def ensure(self) -> "CorpusLayout":
        for d in (self.root, self.logs_dir, self.features_dir,
                  self.models_dir, self.reports_dir):
            d.mkdir(parents=True, exist_ok=True)
        return self


def atomic_write_text(path: Path | str, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name + ".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def _fmt(value: float) -> str:
    return repr(float(value))


def write_features(path: Path | str, rows: Iterable[FeatureRow]) -> None:
    rows = list(rows)
    labeled = any(r.label is not None for r in rows)
    if labeled and any(r.label is None for r in rows):
        raise ValueError("either every row carries a label or none does")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    header = FEATURES_HEADER + ((LABEL_COLUMN,) if labeled else ())
    writer.writerow(header)
    for r in rows:
        record = [r.repo_id, r.measure.value, *(_fmt(v) for v in r.vector)]
        if labeled:
            record.append("1" if r.label else "0")
        writer.writerow(record)
    atomic_write_text(path, buf.getvalue())


def _parse_flag(text: str, path: Path, line: int) -> bool:
    lowered = text.strip().lower()
    if lowered in _TRUE:
        return True
    if lowered in _FALSE:
        return False
    raise ParseError(f"{path}:{line}: bad boolean {text!r}")


def read_features(path: Path | str) -> list[FeatureRow]:
    path = Path(path)
    with open(path, encoding="utf-8", newline="") as handle:
        reader = csv.reader(handle)
        try:
            header = tuple(next(reader))
        except StopIteration:
            raise SchemaMismatch(f"{path}: empty file") from None
        if header not in (FEATURES_HEADER, FEATURES_HEADER + (LABEL_COLUMN,)):
            raise SchemaMismatch(
                f"{path}: header does not match the features schema")
        labeled = header[-1] == LABEL_COLUMN
        width = len(header)
        rows: list[FeatureRow] = []
        for line_no, record in enumerate(reader, start=2):
            if len(record) != width:
                raise ParseError(
                    f"{path}:{line_no}: expected {width} columns, "
                    f"got {len(record)}")
            try:
                measure = MeasureKind(record[1])
            except ValueError:
                raise ParseError(
                    f"{path}:{line_no}: unknown measure {record[1]!r}") from None
            try:
                values = [float(v) for v in record[2:2 + FEATURE_COUNT]]
            except ValueError as exc:
                raise ParseError(f"{path}:{line_no}: {exc}") from None
            label = _parse_flag(record[-1], path, line_no) if labeled else None
            rows.append(FeatureRow(repo_id=record[0], measure=measure,
                                   vector=FeatureVector(*values), label=label))
    return rows


def read_labels(path: Path | str) -> dict[str, bool]:
    path = Path(path)
    with open(path, encoding="utf-8", newline="") as handle:
        reader = csv.reader(handle)
        try:
            header = tuple(next(reader))
        except StopIteration:
            raise SchemaMismatch(f"{path}: empty file") from None
        if header != LABELS_HEADER:
            raise SchemaMismatch(f"{path}: expected header repo_id,engineered")
        labels: dict[str, bool] = {}
        for line_no, record in enumerate(reader, start=2):
            if len(record) != 2:
                raise ParseError(f"{path}:{line_no}: expected 2 columns")
            labels[record[0]] = _parse_flag(record[1], path, line_no)
    return labels


def attach_labels(rows: Sequence[FeatureRow],
                  labels: Mapping[str, bool]) -> list[FeatureRow]:
    out = []
    for r in rows:
        if r.repo_id not in labels:
            from phantom.errors import MissingLabels
            raise MissingLabels(f"no label for repository {r.repo_id!r}")
        out.append(FeatureRow(r.repo_id, r.measure, r.vector,
                              labels[r.repo_id]))
    return out


def write_model(path: Path | str, model: PhantomModel) -> None:
    payload = {
        "format": MODEL_FORMAT_TAG,
        "measure": model.measure.value,
        "threshold": model.threshold,
        "retained": list(model.retained_names),
        "scaler_mean": list(model.scaler_mean),
        "scaler_std": list(model.scaler_std),
        "centroids": [list(c) for c in model.centroids],
        "positive_cluster": model.positive_cluster,
        "seed": model.seed,
        "provenance": model.provenance,
    }
    atomic_write_text(path, json.dumps(payload, indent=2, sort_keys=True) + "\n")


def read_model(path: Path | str) -> PhantomModel:
    path = Path(path)
    try:
        with open(path, encoding="utf-8") as handle:
            payload = json.load(handle)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: corrupt model file: {exc}") from None
    if not isinstance(payload, dict) or payload.get("format") != MODEL_FORMAT_TAG:
        raise VersionMismatch(
            f"{path}: unknown model format {payload.get('format')!r}"
            if isinstance(payload, dict) else f"{path}: not a model file")
    try:
        retained = tuple(FEATURE_NAMES.index(name)
                         for name in payload["retained"])
    except ValueError:
        raise VersionMismatch(
            f"{path}: model references unknown feature names") from None
    try:
        return PhantomModel(
            measure=MeasureKind(payload["measure"]),
            threshold=float(payload["threshold"]),
            retained=retained,
            scaler_mean=tuple(float(v) for v in payload["scaler_mean"]),
            scaler_std=tuple(float(v) for v in payload["scaler_std"]),
            centroids=(tuple(float(v) for v in payload["centroids"][0]),
                       tuple(float(v) for v in payload["centroids"][1])),
            positive_cluster=int(payload["positive_cluster"]),
            seed=int(payload["seed"]),
            provenance=str(payload.get("provenance", "")),
        )
    except (KeyError, IndexError, TypeError, ValueError) as exc:
        raise ParseError(f"{path}: corrupt model file: {exc}") from None


def write_predictions(path: Path | str,
                      rows: Iterable[tuple[str, MeasureKind, bool]]) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(PREDICTIONS_HEADER)
    for repo_id, measure, flag in rows:
        writer.writerow([repo_id, measure.value, "1" if flag else "0"])
    atomic_write_text(path, buf.getvalue())


def read_predictions(path: Path | str) -> list[tuple[str, MeasureKind, bool]]:
    path = Path(path)
    with open(path, encoding="utf-8", newline="") as handle:
        reader = csv.reader(handle)
        try:
            header = tuple(next(reader))
        except StopIteration:
            raise SchemaMismatch(f"{path}: empty file") from None
        if header != PREDICTIONS_HEADER:
            raise SchemaMismatch(
                f"{path}: expected header repo_id,measure,engineered")
        out = []
        for line_no, record in enumerate(reader, start=2):
            if len(record) != 3:
                raise ParseError(f"{path}:{line_no}: expected 3 columns")
            try:
                measure = MeasureKind(record[1])
            except ValueError:
                raise ParseError(
                    f"{path}:{line_no}: unknown measure {record[1]!r}") from None
            out.append((record[0], measure,
                        _parse_flag(record[2], path, line_no)))
    return out


def write_sweep_csv(path: Path | str, results: Iterable[SweepResult]) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SWEEP_HEADER)
    for result in results:
        for cell in result.cells:
            if cell.ok and cell.report is not None:
                writer.writerow([
                    cell.measure.value, _fmt(cell.threshold),
                    cell.n_features, _fmt(cell.report.precision),
                    _fmt(cell.report.recall), _fmt(cell.report.f_measure),
                    _fmt(cell.report.mcc), cell.status,
                ])
            else:
                writer.writerow([cell.measure.value, _fmt(cell.threshold),
                                 "", "", "", "", "", cell.status])
    atomic_write_text(path, buf.getvalue())


def write_best_models(path: Path | str,
                      best: Mapping[MeasureKind, tuple[SweepCell, Path]]) -> None:
    payload = {}
    for measure, (cell, model_path) in best.items():
        assert cell.report is not None
        payload[measure.value] = {
            "threshold": cell.threshold,
            "n_features": cell.n_features,
            "precision": cell.report.precision,
            "recall": cell.report.recall,
            "f_measure": cell.report.f_measure,
            "mcc": cell.report.mcc,
            "model_path": str(model_path),
        }
    atomic_write_text(path, json.dumps(payload, indent=2, sort_keys=True) + "\n")


def write_evaluation_csv(path: Path | str,
                         reports: Iterable[tuple[MeasureKind,
                                                 EvaluationReport]]) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(EVALUATION_HEADER)
    for measure, report in reports:
        c = report.confusion
        writer.writerow([report.model, measure.value, c.tp, c.fp, c.fn, c.tn,
                         _fmt(report.precision), _fmt(report.recall),
                         _fmt(report.f_measure), _fmt(report.mcc)])
    atomic_write_text(path, buf.getvalue())


def write_series_csv(path: Path | str,
                     series: Iterable[MeasureSeries]) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SERIES_HEADER)
    for s in series:
        for offset, value in enumerate(s.values):
            writer.writerow([s.repo_id, s.kind.value,
                             week_start(s.week_of(offset)).isoformat(), value])
    atomic_write_text(path, buf.getvalue())


def write_unavailable_csv(path: Path | str,
                          entries: Iterable[tuple[str, str]]) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(("repo_id", "reason"))
    for repo_id, reason in entries:
        writer.writerow([repo_id, reason])
    atomic_write_text(path, buf.getvalue())


def read_manifest(path: Path | str) -> list[RepoRef]:
    """One repository per line: ``source`` or ``source<TAB>id``.

    Blank lines and ``#`` comments are skipped; ids must end up unique.
    """
    path = Path(path)
    refs: list[RepoRef] = []
    seen: dict[str, int] = {}
    with open(path, encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            source, _, repo_id = line.partition("\t")
            source = source.strip()
            repo_id = repo_id.strip() or source
            if repo_id in seen:
                raise ParseError(
                    f"{path}:{line_no}: duplicate repository id {repo_id!r} "
                    f"(first used on line {seen[repo_id]})")
            seen[repo_id] = line_no
            refs.append(RepoRef(id=repo_id, source=source))
    return refs
