"""Independent reference implementations used to pin expected values.

Everything here favors directness over speed (vectorized masks, library
reductions, exhaustive enumeration) and deliberately shares no code with
the package's own implementations.
"""
from __future__ import annotations

import itertools
from datetime import date, datetime, timedelta, timezone

import numpy as np

from phantom.features import FEATURE_NAMES


def oracle_features(values) -> dict[str, float]:
    """Brute-force feature extraction over one series."""
    y = np.asarray(values, dtype=float)
    n = int(y.size)
    feats = dict.fromkeys(FEATURE_NAMES, 0.0)
    if n == 0:
        return feats

    def mam(prefix: str, arr: np.ndarray) -> None:
        feats[f"min_{prefix}"] = float(arr.min())
        feats[f"avg_{prefix}"] = float(arr.mean())
        feats[f"max_{prefix}"] = float(arr.max())

    feats["duration"] = float(n)
    feats["max_y"] = float(y.max())
    feats["max_y_pos"] = float(np.argmax(y))
    feats["mean_y"] = float(y.mean())
    feats["sum_y"] = float(y.sum())
    feats["q25"], feats["q50"], feats["q75"] = (
        float(q) for q in np.quantile(y, [0.25, 0.5, 0.75]))
    feats["std"] = float(y.std())

    marks = np.zeros(n)
    if n > 3:
        mid = y[1:-1]
        marks[1:-1] = np.where((mid > y[:-2]) & (mid > y[2:]), 1.0,
                               np.where((mid < y[:-2]) & (mid < y[2:]),
                                        -1.0, 0.0))
    up = np.flatnonzero(marks == 1)
    down = np.flatnonzero(marks == -1)
    feats["peak_up"] = float(up.size)
    feats["peak_down"] = float(down.size)
    feats["peak_none"] = float(n - up.size - down.size)
    if up.size >= 2:
        mam("tbp_up", np.diff(up).astype(float))
    if down.size >= 2:
        mam("tbp_down", np.diff(down).astype(float))
    if up.size and y.max() != 0:
        mam("amp", (y[up] - y[up - 1]) / y.max())
    if up.size:
        mam("ppd", y[up] - y.mean())
    if down.size:
        mam("npd", y[down] - y.mean())

    g = np.diff(y)
    pos, neg = g[g > 0], g[g < 0]
    if pos.size:
        mam("pg", pos)
    if neg.size:
        mam("ng", neg)
    feats["pg_count"] = float(pos.size)
    feats["ng_count"] = float(neg.size)

    runs: dict[int, list[float]] = {1: [], -1: []}
    for sign, group in itertools.groupby(np.sign(g)):
        length = len(list(group))
        if sign != 0 and length >= 2:
            runs[int(sign)].append(float(length))
    for prefix, sign in (("ps", 1), ("ns", -1)):
        arr = np.asarray(runs[sign])
        if arr.size:
            mam(prefix, arr)
            feats[f"sum_{prefix}"] = float(arr.sum())
    return feats


def oracle_run_lengths(values) -> tuple[list[int], list[int]]:
    """(positive, negative) same-sign gradient run lengths (runs of >= 2)."""
    g = np.diff(np.asarray(values, dtype=float))
    pos, neg = [], []
    for sign, group in itertools.groupby(np.sign(g)):
        length = len(list(group))
        if length >= 2 and sign > 0:
            pos.append(length)
        elif length >= 2 and sign < 0:
            neg.append(length)
    return pos, neg


def oracle_pearson(matrix) -> np.ndarray:
    """Textbook pairwise correlation; NaN where a column is constant."""
    X = np.asarray(matrix, dtype=float)
    d = X.shape[1]
    out = np.full((d, d), np.nan)
    for i in range(d):
        for j in range(d):
            a = X[:, i] - X[:, i].mean()
            b = X[:, j] - X[:, j].mean()
            denom = np.sqrt((a * a).sum() * (b * b).sum())
            if denom > 0:
                out[i, j] = (a * b).sum() / denom
    return out


def oracle_metrics(tp: int, fp: int, fn: int,
                   tn: int) -> tuple[float, float, float, float]:
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    denom = (tp + fp) * (tp + fn) * (tn + fp) * (tn + fn)
    mcc = (tp * tn - fp * fn) / np.sqrt(denom) if denom else 0.0
    return precision, recall, f, float(mcc)


def oracle_best_two_partition(points) -> float:
    """Exhaustive minimum inertia over all 2-way partitions (both non-empty)."""
    pts = np.asarray(points, dtype=float)
    n = pts.shape[0]
    best = np.inf
    for bits in range(1, 2 ** (n - 1)):
        in_b = np.array([(bits >> i) & 1 for i in range(n - 1)], dtype=bool)
        group_b = pts[1:][in_b]
        group_a = np.vstack([pts[:1], pts[1:][~in_b]])
        inertia = 0.0
        for group in (group_a, group_b):
            centroid = group.mean(axis=0)
            inertia += ((group - centroid) ** 2).sum()
        best = min(best, inertia)
    return float(best)


def oracle_week_monday(ts: int) -> date:
    """Monday of the UTC calendar week containing a unix timestamp."""
    d = datetime.fromtimestamp(ts, tz=timezone.utc).date()
    return d - timedelta(days=d.weekday())
