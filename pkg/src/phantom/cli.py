"""Operator-facing command line wiring the pipeline stages together.

Stages run per invocation: ingest -> extract -> fit | sweep -> predict ->
evaluate -> report. Settings resolve in order built-in defaults <
PHANTOM_WORKDIR < config file < flags. Pipeline errors exit non-zero with
one machine-readable JSON line on stderr; per-repository data problems are
reported in counts and never fail a run.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from dataclasses import dataclass
from pathlib import Path

from phantom.errors import MissingLabels, NoSuccessfulCell, PhantomError
from phantom.evaluation import (DEFAULT_GRID, ConfusionMatrix, metrics,
                                select_best, sweep)
from phantom.corpus import extract_corpus, ingest_corpus
from phantom.gitlog import COMMA, UNIT_SEP
from phantom.measures import ALL_MEASURES, MeasureKind
from phantom.model import FeatureTable, fit_model, predict
from phantom.store import (CorpusLayout, attach_labels, read_features,
                           read_labels, read_manifest, read_model,
                           read_predictions, write_best_models,
                           write_evaluation_csv, write_features, write_model,
                           write_predictions, write_series_csv,
                           write_sweep_csv)

logger = logging.getLogger(__name__)

_DELIMITERS = {"comma": COMMA, "unit-sep": UNIT_SEP}


@dataclass
class RunConfig:
    workdir: Path = Path(".")
    workers: int = 4
    timeout_secs: float = 600.0
    seed: int = 42
    measure: str = "all"
    threshold: float = 0.9
    grid: tuple[float, ...] = DEFAULT_GRID
    labels: Path | None = None
    anonymize: bool = False
    replication_discard_logs: bool = False
    salt: str = "phantom"
    log_delimiter: str = "comma"

    def measures(self) -> tuple[MeasureKind, ...]:
        if self.measure == "all":
            return ALL_MEASURES
        return (MeasureKind.parse(self.measure),)


def _parse_grid(text: str) -> tuple[float, ...]:
    if text.strip() == "default":
        return DEFAULT_GRID
    try:
        values = tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad grid {text!r}") from None
    if not values:
        raise argparse.ArgumentTypeError("grid must contain thresholds")
    return values


_CONFIG_KEYS = ("workdir", "workers", "timeout_secs", "seed", "measure",
                "threshold", "grid", "labels", "anonymize",
                "replication_discard_logs", "salt", "log_delimiter")
_BOOL_KEYS = ("anonymize", "replication_discard_logs")


def _read_config_file(path: Path) -> dict:
    values: dict = {}
    for line_no, line in enumerate(path.read_text(encoding="utf-8").splitlines(),
                                   start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        key = key.strip().replace("-", "_")
        if not sep or key not in _CONFIG_KEYS:
            raise PhantomError(f"{path}:{line_no}: bad config line {line!r}")
        values[key] = value.strip()
    return values


def _coerce(key: str, value):
    if isinstance(value, str):
        if key in _BOOL_KEYS:
            lowered = value.lower()
            if lowered in ("1", "true", "yes"):
                return True
            if lowered in ("0", "false", "no"):
                return False
            raise PhantomError(f"config key {key} expects a boolean")
        if key == "grid":
            return _parse_grid(value)
        if key in ("workdir", "labels"):
            return Path(value)
        if key == "workers":
            return int(value)
        if key in ("timeout_secs", "threshold"):
            return float(value)
        if key == "seed":
            return int(value)
    return value


def resolve_config(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig()
    env_workdir = os.environ.get("PHANTOM_WORKDIR")
    if env_workdir:
        cfg.workdir = Path(env_workdir)
    config_path = getattr(args, "config", None)
    if config_path:
        for key, value in _read_config_file(Path(config_path)).items():
            setattr(cfg, key, _coerce(key, value))
    for key in _CONFIG_KEYS:
        value = getattr(args, key, None)
        if value is not None:
            setattr(cfg, key, _coerce(key, value))
    if cfg.workers < 1:
        raise PhantomError("workers must be >= 1")
    return cfg


def _load_rows(args: argparse.Namespace, cfg: RunConfig,
               layout: CorpusLayout, need_labels: bool):
    features_path = getattr(args, "features", None) or layout.features_path
    rows = read_features(features_path)
    if cfg.labels is not None:
        rows = attach_labels(rows, read_labels(cfg.labels))
    if need_labels and any(r.label is None for r in rows):
        raise MissingLabels(
            "no labels: embed an engineered column or pass --labels")
    return rows, Path(features_path)


def _model_paths(args: argparse.Namespace, cfg: RunConfig,
                 layout: CorpusLayout) -> list[Path]:
    explicit = getattr(args, "model", None)
    if explicit:
        return [Path(explicit)]
    paths = []
    for measure in cfg.measures():
        fitted = layout.model_path(measure)
        best = layout.model_path(measure, best=True)
        if fitted.exists():
            paths.append(fitted)
        elif best.exists():
            paths.append(best)
        else:
            raise PhantomError(
                f"no model for measure {measure.value!r}; run fit or sweep "
                "first, or pass --model")
    return paths


def cmd_ingest(args, cfg: RunConfig, layout: CorpusLayout) -> int:
    manifest = read_manifest(args.manifest)
    salt = cfg.salt.encode() if cfg.anonymize else None
    stats = ingest_corpus(manifest, layout, parallelism=cfg.workers,
                          timeout=cfg.timeout_secs, anonymize_salt=salt,
                          log_delimiter=_DELIMITERS[cfg.log_delimiter])
    print(f"ingested {stats.available} of {stats.requested} repositories "
          f"({stats.unavailable} unavailable) in {stats.elapsed:.1f}s")
    if stats.unavailable:
        print(f"unavailable repositories listed in {layout.unavailable_path}")
    return 0


def cmd_extract(args, cfg: RunConfig, layout: CorpusLayout) -> int:
    result = extract_corpus(layout,
                            discard_malformed_logs=cfg.replication_discard_logs,
                            collect_series=args.dump_series)
    write_features(layout.features_path, result.rows)
    if args.dump_series:
        write_series_csv(layout.series_path, result.series)
        print(f"series dumped to {layout.series_path}")
    print(f"extracted {len(result.rows)} feature rows from {result.repos} "
          f"repositories ({result.discarded_rows} rows discarded, "
          f"{result.discarded_logs} whole logs discarded)")
    print(f"features written to {layout.features_path}")
    return 0


def cmd_fit(args, cfg: RunConfig, layout: CorpusLayout) -> int:
    rows, features_path = _load_rows(args, cfg, layout,
                                     need_labels=not args.label_free)
    for measure in cfg.measures():
        table = FeatureTable.from_rows(rows, measure)
        model = fit_model(table, cfg.threshold, seed=cfg.seed,
                          provenance=features_path.name,
                          label_free=args.label_free)
        path = layout.model_path(measure)
        write_model(path, model)
        print(f"{measure.value}: retained {len(model.retained)} features, "
              f"model written to {path}")
    return 0


def cmd_sweep(args, cfg: RunConfig, layout: CorpusLayout) -> int:
    rows, _ = _load_rows(args, cfg, layout, need_labels=True)
    eval_rows = None
    if args.eval_features:
        eval_rows = read_features(args.eval_features)
        if args.eval_labels:
            eval_rows = attach_labels(eval_rows, read_labels(args.eval_labels))
        if any(r.label is None for r in eval_rows):
            raise MissingLabels("held-out table needs labels "
                                "(embedded or via --eval-labels)")
    results = {}
    best = {}
    for measure in cfg.measures():
        table = FeatureTable.from_rows(rows, measure)
        eval_table = (FeatureTable.from_rows(eval_rows, measure)
                      if eval_rows is not None else None)
        results[measure] = sweep(table, grid=cfg.grid, seed=cfg.seed,
                                 eval_table=eval_table)
        try:
            cell = select_best(results[measure])
        except NoSuccessfulCell:
            logger.warning("no successful cell for %s", measure.value)
            continue
        assert cell.model is not None and cell.report is not None
        path = layout.model_path(measure, best=True)
        write_model(path, cell.model)
        best[measure] = (cell, path)
        print(f"{measure.value}: best threshold {cell.threshold:g} "
              f"(F={cell.report.f_measure:.3f} P={cell.report.precision:.3f} "
              f"R={cell.report.recall:.3f} MCC={cell.report.mcc:.3f}, "
              f"{cell.n_features} features)")
    write_sweep_csv(layout.sweep_path, results.values())
    print(f"sweep report written to {layout.sweep_path}")
    if not best:
        raise NoSuccessfulCell("every cell of every measure failed")
    write_best_models(layout.best_models_path, best)
    print(f"best models indexed in {layout.best_models_path}")
    return 0


def cmd_predict(args, cfg: RunConfig, layout: CorpusLayout) -> int:
    rows, _ = _load_rows(args, cfg, layout, need_labels=False)
    predictions = []
    for path in _model_paths(args, cfg, layout):
        model = read_model(path)
        table = FeatureTable.from_rows(rows, model.measure)
        flags = predict(model, table.matrix)
        predictions.extend(
            (repo_id, model.measure, bool(flag))
            for repo_id, flag in zip(table.repo_ids, flags))
    write_predictions(layout.predictions_path, predictions)
    print(f"{len(predictions)} predictions written to "
          f"{layout.predictions_path}")
    return 0


def cmd_evaluate(args, cfg: RunConfig, layout: CorpusLayout) -> int:
    rows, _ = _load_rows(args, cfg, layout, need_labels=True)
    reports = []
    for path in _model_paths(args, cfg, layout):
        model = read_model(path)
        table = FeatureTable.from_rows(rows, model.measure)
        flags = predict(model, table.matrix)
        report = metrics(ConfusionMatrix.from_predictions(table.labels, flags),
                         model=path.name)
        reports.append((model.measure, report))
        print(f"{model.measure.value}: P={report.precision:.3f} "
              f"R={report.recall:.3f} F={report.f_measure:.3f} "
              f"MCC={report.mcc:.3f}")
    write_evaluation_csv(layout.evaluation_path, reports)
    print(f"evaluation written to {layout.evaluation_path}")
    return 0


def cmd_report(args, cfg: RunConfig, layout: CorpusLayout) -> int:
    path = args.predictions or layout.predictions_path
    by_measure: dict[MeasureKind, list[bool]] = {}
    for _, measure, flag in read_predictions(path):
        by_measure.setdefault(measure, []).append(flag)
    if not by_measure:
        print("no predictions to report")
        return 0
    for measure in ALL_MEASURES:
        flags = by_measure.get(measure)
        if flags is None:
            continue
        positive = sum(flags)
        share = 100.0 * positive / len(flags)
        print(f"{measure.value}: {positive} of {len(flags)} "
              f"({share:.1f}%) classified engineered")
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--workdir", type=Path, default=None,
                        help="corpus root (default: $PHANTOM_WORKDIR or .)")
    common.add_argument("--config", type=Path, default=None,
                        help="key=value config file; flags override it")
    common.add_argument("--workers", type=int, default=None,
                        help="parallel clone jobs for ingest")
    common.add_argument("--timeout-secs", dest="timeout_secs", type=float,
                        default=None, help="per-clone time budget")
    common.add_argument("--seed", type=int, default=None,
                        help="rng seed (default 42)")
    common.add_argument("--measure", default=None,
                        choices=[k.value for k in ALL_MEASURES] + ["all"],
                        help="measure selection (default all)")
    common.add_argument("--threshold", type=float, default=None,
                        help="correlation threshold for fit (default 0.9)")
    common.add_argument("--grid", type=_parse_grid, default=None,
                        help="'default' or comma-separated thresholds")
    common.add_argument("--labels", type=Path, default=None,
                        help="CSV repo_id,engineered with ground truth")
    common.add_argument("--anonymize", action=argparse.BooleanOptionalAction,
                        default=None,
                        help="store logs with pseudonymized identities")
    common.add_argument("--salt", default=None,
                        help="pseudonymization salt (with --anonymize)")
    common.add_argument("--replication-discard-logs",
                        dest="replication_discard_logs",
                        action=argparse.BooleanOptionalAction, default=None,
                        help="discard whole logs containing malformed rows")
    common.add_argument("--log-delimiter", dest="log_delimiter", default=None,
                        choices=sorted(_DELIMITERS),
                        help="delimiter for newly generated logs")

    parser = argparse.ArgumentParser(
        prog="phantom",
        description="curate git repositories by commit-history time series")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", parents=[common],
                       help="clone repositories and store their logs")
    p.add_argument("manifest", type=Path,
                   help="one source per line, optional tab-separated id")
    p.set_defaults(handler=cmd_ingest)

    p = sub.add_parser("extract", parents=[common],
                       help="turn stored logs into the features CSV")
    p.add_argument("--dump-series", action="store_true",
                   help="also write the weekly series CSV")
    p.set_defaults(handler=cmd_extract)

    p = sub.add_parser("fit", parents=[common],
                       help="fit one model per selected measure")
    p.add_argument("--features", type=Path, default=None,
                   help="features CSV (default: workdir features)")
    p.add_argument("--label-free", action="store_true",
                   help="fit without labels using the busier-cluster heuristic")
    p.set_defaults(handler=cmd_fit)

    p = sub.add_parser("sweep", parents=[common],
                       help="fit a model per grid threshold and pick the best")
    p.add_argument("--features", type=Path, default=None)
    p.add_argument("--eval-features", type=Path, default=None,
                   help="held-out features CSV to evaluate on")
    p.add_argument("--eval-labels", type=Path, default=None,
                   help="labels for the held-out table")
    p.set_defaults(handler=cmd_sweep)

    p = sub.add_parser("predict", parents=[common],
                       help="classify repositories with fitted models")
    p.add_argument("--features", type=Path, default=None)
    p.add_argument("--model", type=Path, default=None,
                   help="explicit model JSON (default: fitted/best per measure)")
    p.set_defaults(handler=cmd_predict)

    p = sub.add_parser("evaluate", parents=[common],
                       help="score fitted models against labels")
    p.add_argument("--features", type=Path, default=None)
    p.add_argument("--model", type=Path, default=None)
    p.set_defaults(handler=cmd_evaluate)

    p = sub.add_parser("report", parents=[common],
                       help="summarize predictions per measure")
    p.add_argument("--predictions", type=Path, default=None)
    p.set_defaults(handler=cmd_report)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = resolve_config(args)
        layout = CorpusLayout(cfg.workdir).ensure()
        return args.handler(args, cfg, layout)
    except PhantomError as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}),
              file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(json.dumps({"error": "FileNotFound", "message": str(exc)}),
              file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
