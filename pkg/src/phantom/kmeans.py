"""Deterministic k-means used to split standardized feature vectors.

Seeding is the classic D²-weighted scheme; iteration is plain Lloyd with
an assignment-fixpoint / relative-inertia stopping rule. All randomness
flows from one SeedSequence and every tie is broken by index, so repeated
fits are bit-identical no matter how restarts would be scheduled.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from phantom.errors import TooFewPoints

LLOYD_REL_TOL = 1e-6


@dataclass(frozen=True)
class KMeansResult:
    centroids: np.ndarray          # (k, d)
    inertia: float
    assignments: np.ndarray        # (n,) int
    n_iter: int
    inertia_history: tuple[float, ...]  # one entry per Lloyd assignment step


def _sq_distances(data: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    d2 = np.empty((data.shape[0], centroids.shape[0]))
    for j in range(centroids.shape[0]):
        diff = data - centroids[j]
        d2[:, j] = np.einsum("ij,ij->i", diff, diff)
    return d2


def _seed_centroids(data: np.ndarray, k: int,
                    rng: np.random.Generator) -> np.ndarray:
    n = data.shape[0]
    centroids = np.empty((k, data.shape[1]))
    centroids[0] = data[rng.integers(n)]
    diff = data - centroids[0]
    closest = np.einsum("ij,ij->i", diff, diff)
    for j in range(1, k):
        total = closest.sum()
        if total > 0:
            idx = rng.choice(n, p=closest / total)
        else:
            idx = rng.integers(n)  # all remaining points coincide
        centroids[j] = data[idx]
        diff = data - centroids[j]
        np.minimum(closest, np.einsum("ij,ij->i", diff, diff), out=closest)
    return centroids


def _lloyd(data: np.ndarray, centroids: np.ndarray,
           max_iter: int) -> tuple[np.ndarray, float, np.ndarray, int, list[float]]:
    n, k = data.shape[0], centroids.shape[0]
    prev_assign: np.ndarray | None = None
    prev_inertia = np.inf
    history: list[float] = []
    assign = np.zeros(n, dtype=np.intp)
    inertia = 0.0
    for iteration in range(1, max_iter + 1):
        d2 = _sq_distances(data, centroids)
        assign = d2.argmin(axis=1)  # ties go to the lowest cluster index
        inertia = float(d2[np.arange(n), assign].sum())
        history.append(inertia)
        if prev_assign is not None and np.array_equal(assign, prev_assign):
            break
        if np.isfinite(prev_inertia) and prev_inertia > 0 \
                and (prev_inertia - inertia) / prev_inertia < LLOYD_REL_TOL:
            break
        prev_assign, prev_inertia = assign, inertia
        point_cost = d2[np.arange(n), assign]
        for j in range(k):
            members = assign == j
            if members.any():
                centroids[j] = data[members].mean(axis=0)
            else:
                # deterministic empty-cluster rescue: steal the costliest point
                centroids[j] = data[int(point_cost.argmax())]
    return centroids, inertia, assign, iteration, history


def kmeans_fit(data: np.ndarray, k: int = 2, inits: int = 10,
               max_iter: int = 300, seed: int = 42) -> KMeansResult:
    """Best-of-``inits`` Lloyd clustering; ties keep the earliest restart."""
    data = np.asarray(data, dtype=np.float64)
    if data.ndim != 2:
        raise ValueError("data must be a 2-D array")
    if data.shape[0] < k:
        raise TooFewPoints(f"need at least {k} points, got {data.shape[0]}")
    best: KMeansResult | None = None
    for child in np.random.SeedSequence(seed).spawn(inits):
        rng = np.random.default_rng(child)
        centroids = _seed_centroids(data, k, rng)
        centroids, inertia, assign, n_iter, history = _lloyd(
            data, centroids, max_iter)
        if best is None or inertia < best.inertia:
            best = KMeansResult(centroids=centroids, inertia=inertia,
                                assignments=assign, n_iter=n_iter,
                                inertia_history=tuple(history))
    assert best is not None
    return best
