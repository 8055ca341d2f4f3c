"""Fixed-length numeric characterization of weekly activity series.

Each series reduces to 43 features covering value statistics, peaks, time
between peaks, amplitudes, peak deviations from the mean, same-sign
gradient runs, and gradients. Slots that cannot be measured on a given
series are exactly zero, so vectors are always complete and finite.

Two interchangeable backends compute the vector: a compiled kernel
(phantom.features._kernel, built from Cython) and a pure-Python fallback
(phantom.features._pure). The compiled kernel is picked at import time
when present; set PHANTOM_FEATURES_BACKEND=pure|compiled to force one.
``python -m phantom.bench`` compares their throughput.
"""
from __future__ import annotations

import os
from typing import Callable, NamedTuple, Sequence

import numpy as np

from phantom.features import _pure

PEAK_UP = 1
PEAK_NONE = 0
PEAK_DOWN = -1


class FeatureVector(NamedTuple):
    duration: float
    max_y: float
    max_y_pos: float
    mean_y: float
    sum_y: float
    q25: float
    q50: float
    q75: float
    std: float
    peak_down: float
    peak_none: float
    peak_up: float
    min_tbp_up: float
    avg_tbp_up: float
    max_tbp_up: float
    min_tbp_down: float
    avg_tbp_down: float
    max_tbp_down: float
    min_amp: float
    avg_amp: float
    max_amp: float
    min_ppd: float
    avg_ppd: float
    max_ppd: float
    min_npd: float
    avg_npd: float
    max_npd: float
    min_ps: float
    avg_ps: float
    max_ps: float
    sum_ps: float
    min_ns: float
    avg_ns: float
    max_ns: float
    sum_ns: float
    min_pg: float
    avg_pg: float
    max_pg: float
    min_ng: float
    avg_ng: float
    max_ng: float
    pg_count: float
    ng_count: float


FEATURE_NAMES: tuple[str, ...] = FeatureVector._fields
FEATURE_COUNT = len(FEATURE_NAMES)
assert FEATURE_COUNT == 43

ZERO_VECTOR = FeatureVector(*([0.0] * FEATURE_COUNT))


def _make_compiled_compute() -> Callable[[Sequence[float]], Sequence[float]]:
    from phantom.features import _kernel

    def compiled_compute(values: Sequence[float]) -> Sequence[float]:
        return _kernel.compute(np.ascontiguousarray(values, dtype=np.float64))

    return compiled_compute


_requested = os.environ.get("PHANTOM_FEATURES_BACKEND")
if _requested not in (None, "", "pure", "compiled"):
    raise ValueError(
        f"PHANTOM_FEATURES_BACKEND={_requested!r}: expected 'pure' or 'compiled'")

BACKEND: str
_compute: Callable[[Sequence[float]], Sequence[float]]
if _requested == "pure":
    BACKEND, _compute = "pure", _pure.compute
else:
    try:
        BACKEND, _compute = "compiled", _make_compiled_compute()
    except ImportError:
        if _requested == "compiled":
            raise
        BACKEND, _compute = "pure", _pure.compute


def available_backends() -> dict[str, Callable[[Sequence[float]], Sequence[float]]]:
    """Name -> compute callable for every importable backend."""
    backends: dict[str, Callable] = {"pure": _pure.compute}
    try:
        backends["compiled"] = _make_compiled_compute()
    except ImportError:
        pass
    return backends


def _series_values(series) -> Sequence[float]:
    return getattr(series, "values", series)


def detect_peaks(series) -> list[int]:
    """Classify every index of a series as PEAK_UP, PEAK_DOWN, or PEAK_NONE."""
    return _pure.classify_peaks(_series_values(series))


def extract_features(series) -> FeatureVector:
    """Reduce a measure series (or bare value sequence) to its 43 features."""
    return FeatureVector(*_compute(_series_values(series)))
