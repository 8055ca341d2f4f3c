"""Curate collections of git repositories into engineered / not-engineered
classes by clustering fixed-length feature vectors extracted from weekly
commit-history time series."""

from phantom.errors import PhantomError
from phantom.evaluation import (DEFAULT_GRID, ConfusionMatrix,
                                EvaluationReport, SweepCell, SweepResult,
                                metrics, naive_baselines, select_best, sweep)
from phantom.features import (FEATURE_COUNT, FEATURE_NAMES, FeatureVector,
                              detect_peaks, extract_features)
from phantom.gitlog import (CommitRecord, GitLog, IngestStats, RepoRef,
                            anonymize, clone_repository, format_log,
                            generate_log, parse_log)
from phantom.kmeans import KMeansResult, kmeans_fit
from phantom.measures import (ALL_MEASURES, MeasureKind, MeasureSeries,
                              build_all_series, build_series, week_index,
                              week_start)
from phantom.model import (FeatureRow, FeatureTable, PhantomModel, Scaler,
                           apply_scaler, fit_model, fit_scaler, map_clusters,
                           pearson_matrix, predict, select_features)
from phantom.corpus import extract_corpus, extract_log, ingest_corpus
from phantom.store import (CorpusLayout, read_features, read_labels,
                           read_manifest, read_model, write_features,
                           write_model, write_predictions)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
