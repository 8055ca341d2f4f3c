"""Shared fixtures: the reference example log and scripted git repositories."""
from __future__ import annotations

import shutil
import subprocess
from pathlib import Path

import numpy as np
import pytest

from phantom.gitlog import RepoRef, parse_log

# Three commits by one author; the newest was integrated by a second person.
EXAMPLE_LOG = (
    "b57f4f3,82c9f95,ab,a@b.com,1519904296,cd,c@d.com,1519904396\n"
    "82c9f95,efaf9cd,ab,a@b.com,1519834072,ab,a@b.com,1519904296\n"
    "efaf9cd,703b7b1,ab,a@b.com,1519404672,ab,a@b.com,1519824672\n"
)

WEEK = 7 * 86_400
BASE_MONDAY = 1_578_268_800  # 2020-01-06 00:00 UTC

git_required = pytest.mark.skipif(shutil.which("git") is None,
                                  reason="git not installed")


@pytest.fixture
def example_log():
    return parse_log(EXAMPLE_LOG, RepoRef(id="example", source="inline"))


def _git(args, cwd, input_bytes=None):
    proc = subprocess.run(["git", *args], cwd=cwd, input=input_bytes,
                          capture_output=True)
    if proc.returncode != 0:
        raise RuntimeError(f"git {' '.join(args)} failed: "
                           f"{proc.stderr.decode(errors='replace')}")
    return proc.stdout.decode(errors="replace")


def build_repo(path: Path, commits: list[dict]) -> Path:
    """Create a repository whose history is the given commit list.

    Each commit dict has author=(name, email), committer=(name, email),
    at/ct timestamps, and an optional merge flag. Merge commits get a
    synthetic side parent so the parent field carries two hashes.
    """
    path.mkdir(parents=True)
    _git(["init", "-q"], cwd=path)
    _git(["symbolic-ref", "HEAD", "refs/heads/master"], cwd=path)
    lines: list[str] = []
    mark = 0
    tip = None

    def emit(ref: str, commit: dict, parents: list[int]) -> int:
        nonlocal mark
        mark += 1
        an, ae = commit["author"]
        cn, ce = commit["committer"]
        msg = f"c{mark}"
        lines.append(f"commit {ref}")
        lines.append(f"mark :{mark}")
        lines.append(f"author {an} <{ae}> {commit['at']} +0000")
        lines.append(f"committer {cn} <{ce}> {commit['ct']} +0000")
        lines.append(f"data {len(msg)}")
        lines.append(msg)
        if parents:
            lines.append(f"from :{parents[0]}")
        for extra in parents[1:]:
            lines.append(f"merge :{extra}")
        lines.append("")
        return mark

    for commit in commits:
        if commit.get("merge") and tip is not None:
            side = emit("refs/heads/_side", commit, [tip])
            tip = emit("refs/heads/master", commit, [tip, side])
        else:
            tip = emit("refs/heads/master", commit, [tip] if tip else [])
    stream = "\n".join(lines).encode()
    _git(["fast-import", "--quiet"], cwd=path, input_bytes=stream)
    return path


def simple_commit(name: str, email: str, at: int, ct: int | None = None,
                  merge: bool = False) -> dict:
    return {"author": (name, email), "committer": (name, email),
            "at": at, "ct": at + 60 if ct is None else ct, "merge": merge}


def active_profile(rng: np.random.Generator) -> list[dict]:
    """Multi-contributor repository with ~40 weeks of steady activity."""
    devs = [("Alice Example", "alice@corp.example"),
            ("Bob Builder", "bob@corp.example"),
            ("Carol Ops", "carol@corp.example")]
    commits = []
    for week in range(40):
        for _ in range(int(rng.integers(1, 4))):
            name, email = devs[int(rng.integers(0, len(devs)))]
            at = BASE_MONDAY + week * WEEK + int(rng.integers(0, 5 * 86_400))
            commits.append(simple_commit(name, email, at,
                                         at + int(rng.integers(60, 3_600))))
        if week % 4 == 3:
            name, email = devs[0]
            at = BASE_MONDAY + week * WEEK + 6 * 86_400
            commits.append({"author": (name, email),
                            "committer": (name, email),
                            "at": at, "ct": at + 120, "merge": True})
    commits.sort(key=lambda c: c["at"])
    return commits


def burst_profile(rng: np.random.Generator) -> list[dict]:
    """Single author dumping a handful of commits within a few days."""
    name, email = "Dave Solo", "dave@home.example"
    start = BASE_MONDAY + int(rng.integers(0, 10)) * WEEK
    commits = []
    at = start
    for _ in range(int(rng.integers(4, 10))):
        at += int(rng.integers(600, 7_200))
        commits.append(simple_commit(name, email, at))
    return commits


def scripted_corpus(root: Path, n_active: int = 10, n_burst: int = 10,
                    seed: int = 7) -> tuple[list[str], dict[str, bool]]:
    """Build the fixture corpus; returns manifest lines and true labels."""
    rng = np.random.default_rng(seed)
    manifest, labels = [], {}
    for i in range(n_active):
        repo_id = f"active-{i:02d}"
        path = build_repo(root / repo_id, active_profile(rng))
        manifest.append(f"{path}\t{repo_id}")
        labels[repo_id] = True
    for i in range(n_burst):
        repo_id = f"burst-{i:02d}"
        path = build_repo(root / repo_id, burst_profile(rng))
        manifest.append(f"{path}\t{repo_id}")
        labels[repo_id] = False
    return manifest, labels
