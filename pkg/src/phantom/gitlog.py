"""Git log acquisition, parsing, and identity anonymization.

The interchange log format is one commit per line with eight fields:
commit hash, parent hashes (space-separated), author name, author email,
author timestamp, committer name, committer email, committer timestamp.
Timestamps are unix epoch seconds (UTC). Fields are comma-separated by
default; the unit-separator control character (0x1F) is supported as an
alternative delimiter for newly generated logs, since it cannot occur in
names and therefore never produces ambiguous rows.
"""
from __future__ import annotations

import hashlib
import shutil
import subprocess
from dataclasses import dataclass, field, replace
from pathlib import Path
from urllib.parse import quote

from phantom.errors import NotARepository, Timeout, ToolMissing, Unavailable

COMMA = ","
UNIT_SEP = "\x1f"

# git pretty-format placeholders, in column order
_LOG_FIELDS = ("%H", "%P", "%an", "%ae", "%at", "%cn", "%ce", "%ct")
LOG_FIELD_COUNT = len(_LOG_FIELDS)


@dataclass(frozen=True)
class RepoRef:
    """Key and location of one repository in a corpus."""

    id: str
    source: str

    def __post_init__(self) -> None:
        if not self.id:
            raise ValueError("repository id must be non-empty")


@dataclass(frozen=True)
class CommitRecord:
    commit_hash: str
    parent_hashes: tuple[str, ...]
    author_name: str
    author_email: str
    author_date: int
    committer_name: str
    committer_email: str
    committer_date: int

    @property
    def is_merge(self) -> bool:
        return len(self.parent_hashes) >= 2


@dataclass
class GitLog:
    repo: RepoRef
    records: list[CommitRecord] = field(default_factory=list)
    discarded_rows: int = 0


@dataclass(frozen=True)
class IngestStats:
    requested: int
    available: int
    unavailable: int
    elapsed: float

    def __post_init__(self) -> None:
        if self.requested != self.available + self.unavailable:
            raise ValueError("requested must equal available + unavailable")


def log_filename(repo_id: str) -> str:
    """Filesystem-safe, reversible file name for a repository id."""
    return quote(repo_id, safe="") + ".log"


def pretty_format(delimiter: str = COMMA) -> str:
    return delimiter.join(_LOG_FIELDS)


def _parse_row(line: str, delimiter: str) -> CommitRecord | None:
    parts = line.split(delimiter)
    if len(parts) != LOG_FIELD_COUNT:
        return None
    commit, parents, a_name, a_email, a_date, c_name, c_email, c_date = parts
    if not commit:
        return None
    try:
        author_ts = int(a_date)
        committer_ts = int(c_date)
    except ValueError:
        return None
    if author_ts < 0 or committer_ts < 0:
        return None
    return CommitRecord(
        commit_hash=commit,
        parent_hashes=tuple(parents.split()),
        author_name=a_name,
        author_email=a_email,
        author_date=author_ts,
        committer_name=c_name,
        committer_email=c_email,
        committer_date=committer_ts,
    )


def parse_log(raw: str, repo: RepoRef, delimiter: str | None = None) -> GitLog:
    """Parse log text into records; ambiguous or malformed rows are counted
    in ``discarded_rows`` and skipped, never raised. A row is ambiguous when
    its delimiter count does not yield exactly eight fields (names containing
    the delimiter make correct separation impossible)."""
    if delimiter is None:
        delimiter = UNIT_SEP if UNIT_SEP in raw else COMMA
    records: list[CommitRecord] = []
    discarded = 0
    for line in raw.splitlines():
        if not line.strip():
            continue
        record = _parse_row(line, delimiter)
        if record is None:
            discarded += 1
        else:
            records.append(record)
    return GitLog(repo=repo, records=records, discarded_rows=discarded)


def format_log(log: GitLog, delimiter: str = COMMA) -> str:
    """Serialize records back to log text (inverse of parse_log)."""
    lines = []
    for r in log.records:
        fields = (r.commit_hash, " ".join(r.parent_hashes),
                  r.author_name, r.author_email, str(r.author_date),
                  r.committer_name, r.committer_email, str(r.committer_date))
        for f in fields:
            if delimiter in f:
                raise ValueError(
                    f"field {f!r} contains the delimiter; "
                    "use the unit-separator format instead")
        lines.append(delimiter.join(fields))
    return "\n".join(lines) + ("\n" if lines else "")


def anonymize(log: GitLog, salt: bytes) -> GitLog:
    """Replace names and emails with salted-hash placeholders.

    The mapping is deterministic for a given salt and injective per distinct
    input, so per-week distinct-identity counts are unchanged. Timestamps,
    hashes, and parent structure are untouched.
    """
    key = hashlib.blake2b(salt, digest_size=32).digest()
    cache: dict[tuple[bytes, str], str] = {}

    def pseudonym(domain: bytes, value: str) -> str:
        try:
            return cache[(domain, value)]
        except KeyError:
            pass
        digest = hashlib.blake2b(value.encode("utf-8", "backslashreplace"),
                                 key=key, person=domain,
                                 digest_size=16).hexdigest()
        out = f"user-{digest}" if domain == b"name" else f"{digest}@anon.invalid"
        cache[(domain, value)] = out
        return out

    records = [
        replace(r,
                author_name=pseudonym(b"name", r.author_name),
                author_email=pseudonym(b"email", r.author_email),
                committer_name=pseudonym(b"name", r.committer_name),
                committer_email=pseudonym(b"email", r.committer_email))
        for r in log.records
    ]
    return GitLog(repo=log.repo, records=records,
                  discarded_rows=log.discarded_rows)


def _run_git(args: list[str], cwd: Path | str | None = None,
             timeout: float | None = None) -> subprocess.CompletedProcess:
    try:
        return subprocess.run(
            ["git", *args], cwd=cwd, capture_output=True,
            text=True, errors="replace", timeout=timeout,
        )
    except FileNotFoundError as exc:
        raise ToolMissing("git executable not found on PATH") from exc


def generate_log(local_repo: Path | str, delimiter: str = COMMA) -> str:
    """Emit the log of all commits reachable from the default branch head."""
    repo = Path(local_repo)
    if _run_git(["rev-parse", "--git-dir"], cwd=repo).returncode != 0:
        raise NotARepository(f"{repo} is not a git repository")
    if _run_git(["rev-parse", "--verify", "--quiet", "HEAD"],
                cwd=repo).returncode != 0:
        return ""  # repository has no commits yet
    proc = _run_git(["log", "HEAD", f"--pretty=format:{pretty_format(delimiter)}"],
                    cwd=repo)
    if proc.returncode != 0:
        raise NotARepository(f"git log failed in {repo}: {proc.stderr.strip()}")
    return proc.stdout


def clone_repository(repo: RepoRef, workdir: Path | str,
                     timeout: float = 600.0) -> Path:
    """Clone enough of ``repo`` to generate its full commit log.

    Uses a bare, single-branch clone; URL sources additionally request a
    blobless transfer so only history metadata moves over the network.
    """
    workdir = Path(workdir)
    workdir.mkdir(parents=True, exist_ok=True)
    dest = workdir / (quote(repo.id, safe="") + ".git")
    if dest.exists():
        shutil.rmtree(dest)  # stale partial clone from an interrupted run
    cmd = ["clone", "--quiet", "--bare", "--single-branch"]
    if "://" in repo.source or repo.source.startswith("git@"):
        cmd.append("--filter=blob:none")
    cmd += ["--", repo.source, str(dest)]
    try:
        proc = subprocess.run(
            ["git", "-c", "credential.helper=", *cmd],
            capture_output=True, text=True, errors="replace", timeout=timeout,
            env=_noninteractive_env(),
        )
    except FileNotFoundError as exc:
        raise ToolMissing("git executable not found on PATH") from exc
    except subprocess.TimeoutExpired as exc:
        shutil.rmtree(dest, ignore_errors=True)
        raise Timeout(f"clone of {repo.source} exceeded {timeout:.0f}s") from exc
    if proc.returncode != 0:
        shutil.rmtree(dest, ignore_errors=True)
        reason = proc.stderr.strip().splitlines()
        raise Unavailable(reason[-1] if reason else "clone failed")
    return dest


def _noninteractive_env() -> dict:
    import os
    env = dict(os.environ)
    env["GIT_TERMINAL_PROMPT"] = "0"  # deleted/private repos must fail, not prompt
    env.setdefault("GIT_SSH_COMMAND", "ssh -oBatchMode=yes")
    return env
