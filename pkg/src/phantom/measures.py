"""Weekly time-series measures derived from a parsed git log.

Weeks start Monday 00:00 UTC. A week index counts Monday-start weeks since
the week containing 1970-01-05 (the first Monday of the unix epoch).
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from datetime import date, timedelta

from phantom.gitlog import GitLog

SECONDS_PER_DAY = 86_400
_EPOCH_MONDAY_DAY = 4  # 1970-01-05 is four days after the epoch


class MeasureKind(enum.Enum):
    COMMITS = "commits"
    INTEGRATIONS = "integrations"
    COMMITTERS = "committers"
    INTEGRATORS = "integrators"
    MERGES = "merges"

    @classmethod
    def parse(cls, name: str) -> "MeasureKind":
        try:
            return cls(name.lower())
        except ValueError:
            raise ValueError(f"unknown measure {name!r}; expected one of "
                             f"{[k.value for k in cls]}") from None


ALL_MEASURES: tuple[MeasureKind, ...] = tuple(MeasureKind)


def week_index(ts: int | float) -> int:
    """Monday-aligned UTC week bucket of a unix timestamp."""
    return (int(ts) // SECONDS_PER_DAY - _EPOCH_MONDAY_DAY) // 7


def week_start(index: int) -> date:
    """Monday date on which week ``index`` begins."""
    return date(1970, 1, 1) + timedelta(days=index * 7 + _EPOCH_MONDAY_DAY)


@dataclass
class MeasureSeries:
    """Dense weekly values from the first to the last active week.

    Interior inactive weeks are zero-filled. The merges series spans the
    repository's whole observed activity range (author and committer weeks
    combined), so a repository without merges still yields a well-defined
    all-zero series; the other four measures span the activity range of
    their own date column.
    """

    repo_id: str
    kind: MeasureKind
    first_week: int
    values: list[int]

    def __len__(self) -> int:
        return len(self.values)

    def week_of(self, offset: int) -> int:
        return self.first_week + offset

    def value_at_week(self, week: int) -> int:
        offset = week - self.first_week
        if 0 <= offset < len(self.values):
            return self.values[offset]
        return 0


def build_series(log: GitLog, kind: MeasureKind) -> MeasureSeries:
    """Convert a log into one weekly measure series (empty log, empty series)."""
    if not log.records:
        return MeasureSeries(log.repo.id, kind, 0, [])
    author_weeks = [week_index(r.author_date) for r in log.records]
    committer_weeks = [week_index(r.committer_date) for r in log.records]

    if kind in (MeasureKind.COMMITS, MeasureKind.COMMITTERS):
        event_weeks = author_weeks
    else:
        event_weeks = committer_weeks

    if kind is MeasureKind.MERGES:
        first = min(min(author_weeks), min(committer_weeks))
        last = max(max(author_weeks), max(committer_weeks))
    else:
        first = min(event_weeks)
        last = max(event_weeks)
    values = [0] * (last - first + 1)

    if kind is MeasureKind.COMMITS:
        for w in author_weeks:
            values[w - first] += 1
    elif kind is MeasureKind.INTEGRATIONS:
        for w in committer_weeks:
            values[w - first] += 1
    elif kind is MeasureKind.MERGES:
        for r, w in zip(log.records, committer_weeks):
            if r.is_merge:
                values[w - first] += 1
    elif kind is MeasureKind.COMMITTERS:
        seen: dict[int, set[str]] = {}
        for r, w in zip(log.records, author_weeks):
            seen.setdefault(w, set()).add(r.author_email)
        for w, emails in seen.items():
            values[w - first] = len(emails)
    else:  # INTEGRATORS
        seen = {}
        for r, w in zip(log.records, committer_weeks):
            seen.setdefault(w, set()).add(r.committer_email)
        for w, emails in seen.items():
            values[w - first] = len(emails)

    return MeasureSeries(log.repo.id, kind, first, values)


def build_all_series(log: GitLog) -> dict[MeasureKind, MeasureSeries]:
    return {kind: build_series(log, kind) for kind in ALL_MEASURES}
