"""Corpus-level pipeline stages: parallel ingest and feature extraction.

Ingest is resumable: a repository whose log file already exists is skipped,
and every clone/log job touches only its own files, so any parallelism is
safe. Individual repository failures are recorded in the unavailable
report, never raised.
"""
from __future__ import annotations

import logging
import shutil
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field
from time import perf_counter
from urllib.parse import unquote

from phantom.errors import NotARepository, Timeout, Unavailable
from phantom.features import extract_features
from phantom.gitlog import (COMMA, GitLog, IngestStats, RepoRef, anonymize,
                            clone_repository, format_log, generate_log,
                            log_filename, parse_log)
from phantom.measures import ALL_MEASURES, MeasureSeries, build_all_series
from phantom.model import FeatureRow
from phantom.store import CorpusLayout, atomic_write_text, write_unavailable_csv

logger = logging.getLogger(__name__)

_PER_REPO_FAILURES = (Unavailable, Timeout, NotARepository)


def _ingest_one(repo: RepoRef, layout: CorpusLayout, timeout: float,
                salt: bytes | None, delimiter: str) -> bool:
    """Clone, generate, and store one log; returns False when already present."""
    log_file = layout.logs_dir / log_filename(repo.id)
    if log_file.exists():
        return False
    clone = clone_repository(repo, layout.clones_dir, timeout)
    try:
        raw = generate_log(clone, delimiter)
        if salt is not None:
            # re-serialization drops malformed rows, which is exactly the
            # set of rows that could leak un-pseudonymized identities
            raw = format_log(anonymize(parse_log(raw, repo, delimiter), salt),
                             delimiter)
        atomic_write_text(log_file, raw)
    finally:
        shutil.rmtree(clone, ignore_errors=True)
    return True


def ingest_corpus(manifest: list[RepoRef], layout: CorpusLayout,
                  parallelism: int = 4, timeout: float = 600.0,
                  anonymize_salt: bytes | None = None,
                  log_delimiter: str = COMMA) -> IngestStats:
    """Obtain logs for every repository in the manifest."""
    if parallelism < 1:
        raise ValueError("parallelism must be >= 1")
    layout.ensure()
    start = perf_counter()
    failures: dict[str, str] = {}
    available = 0
    with ThreadPoolExecutor(max_workers=parallelism) as pool:
        futures = {
            pool.submit(_ingest_one, repo, layout, timeout,
                        anonymize_salt, log_delimiter): repo
            for repo in manifest
        }
        for future in as_completed(futures):
            repo = futures[future]
            try:
                fresh = future.result()
            except _PER_REPO_FAILURES as exc:
                failures[repo.id] = f"{type(exc).__name__}: {exc}"
                logger.warning("unavailable %s: %s", repo.id, exc)
            else:
                available += 1
                logger.info("%s %s", "ingested" if fresh else "kept", repo.id)
    ordered = [(repo.id, failures[repo.id]) for repo in manifest
               if repo.id in failures]
    write_unavailable_csv(layout.unavailable_path, ordered)
    return IngestStats(requested=len(manifest), available=available,
                       unavailable=len(ordered),
                       elapsed=perf_counter() - start)


def iter_corpus_logs(layout: CorpusLayout):
    """Parse every stored log, in deterministic filename order."""
    for path in sorted(layout.logs_dir.glob("*.log")):
        repo_id = unquote(path.stem)
        raw = path.read_text(encoding="utf-8", errors="replace")
        yield parse_log(raw, RepoRef(id=repo_id, source=str(path)))


@dataclass
class ExtractResult:
    rows: list[FeatureRow] = field(default_factory=list)
    series: list[MeasureSeries] = field(default_factory=list)
    repos: int = 0
    discarded_rows: int = 0
    discarded_logs: int = 0


def extract_log(log: GitLog,
                collect_series: bool = False) -> tuple[list[FeatureRow],
                                                       list[MeasureSeries]]:
    """All five feature rows of one parsed log."""
    by_kind = build_all_series(log)
    rows = [FeatureRow(log.repo.id, kind, extract_features(by_kind[kind]))
            for kind in ALL_MEASURES]
    return rows, (list(by_kind.values()) if collect_series else [])


def extract_corpus(layout: CorpusLayout, discard_malformed_logs: bool = False,
                   collect_series: bool = False) -> ExtractResult:
    """Feature rows for the whole corpus.

    With ``discard_malformed_logs`` any log containing at least one
    malformed row is skipped entirely (replication of whole-log
    discarding); the default keeps well-formed rows and only counts the
    bad ones.
    """
    result = ExtractResult()
    for log in iter_corpus_logs(layout):
        if discard_malformed_logs and log.discarded_rows > 0:
            result.discarded_logs += 1
            continue
        result.discarded_rows += log.discarded_rows
        result.repos += 1
        rows, series = extract_log(log, collect_series)
        result.rows.extend(rows)
        result.series.extend(series)
    return result
