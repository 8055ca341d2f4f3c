"""Pure-Python feature-extraction backend.

Mirrors the compiled kernel in phantom.features._kernel; any change here
must be replicated there (the test suite pins the two to each other and to
an independent oracle).
"""
from __future__ import annotations

import math
from typing import Sequence

N_FEATURES = 43


def classify_peaks(values: Sequence[float]) -> list[int]:
    """Per-index peak marks: 1 up, -1 down, 0 none.

    An interior point is an up (down) peak iff strictly greater (less) than
    both neighbours. Series of length three or less carry no peaks at all.
    """
    n = len(values)
    marks = [0] * n
    if n <= 3:
        return marks
    for i in range(1, n - 1):
        if values[i] > values[i - 1] and values[i] > values[i + 1]:
            marks[i] = 1
        elif values[i] < values[i - 1] and values[i] < values[i + 1]:
            marks[i] = -1
    return marks


def _min_avg_max(vals: list[float]) -> tuple[float, float, float]:
    if not vals:
        return 0.0, 0.0, 0.0
    lo = hi = vals[0]
    total = 0.0
    for v in vals:
        if v < lo:
            lo = v
        if v > hi:
            hi = v
        total += v
    return lo, total / len(vals), hi


def _quantile(sorted_vals: list[float], q: float) -> float:
    # linear interpolation between closest ranks at position q*(n-1)
    n = len(sorted_vals)
    pos = q * (n - 1)
    lo = int(pos)
    frac = pos - lo
    if frac > 0.0 and lo + 1 < n:
        return sorted_vals[lo] + (sorted_vals[lo + 1] - sorted_vals[lo]) * frac
    return sorted_vals[lo]


def compute(values: Sequence[float]) -> list[float]:
    """All 43 features of one series, in canonical order."""
    y = values
    n = len(y)
    if n == 0:
        return [0.0] * N_FEATURES

    total = 0.0
    max_y = float(y[0])
    max_pos = 0
    for i in range(n):
        v = float(y[i])
        total += v
        if v > max_y:
            max_y = v
            max_pos = i
    mean_y = total / n

    var = 0.0
    for i in range(n):
        d = float(y[i]) - mean_y
        var += d * d
    std = math.sqrt(var / n)

    s = sorted(float(v) for v in y)
    q25 = _quantile(s, 0.25)
    q50 = _quantile(s, 0.50)
    q75 = _quantile(s, 0.75)

    marks = classify_peaks(y)
    up = [i for i in range(n) if marks[i] == 1]
    down = [i for i in range(n) if marks[i] == -1]
    peak_up = len(up)
    peak_down = len(down)
    peak_none = n - peak_up - peak_down

    tbp_up = [float(b - a) for a, b in zip(up, up[1:])]
    tbp_down = [float(b - a) for a, b in zip(down, down[1:])]
    min_tbp_up, avg_tbp_up, max_tbp_up = _min_avg_max(tbp_up)
    min_tbp_down, avg_tbp_down, max_tbp_down = _min_avg_max(tbp_down)

    amps = []
    if max_y != 0.0:
        for i in up:
            a = (float(y[i]) - float(y[i - 1])) / max_y
            if math.isfinite(a):  # overflow guard keeps extraction total
                amps.append(a)
    min_amp, avg_amp, max_amp = _min_avg_max(amps)

    ppd = [float(y[i]) - mean_y for i in up]
    npd = [float(y[i]) - mean_y for i in down]
    min_ppd, avg_ppd, max_ppd = _min_avg_max(ppd)
    min_npd, avg_npd, max_npd = _min_avg_max(npd)

    # gradients and same-sign runs (>= 2 gradients; zero gradients break runs)
    pos_grads: list[float] = []
    neg_grads: list[float] = []
    pos_runs: list[float] = []
    neg_runs: list[float] = []
    run_sign = 0
    run_len = 0
    for j in range(n - 1):
        g = float(y[j + 1]) - float(y[j])
        sign = 1 if g > 0 else (-1 if g < 0 else 0)
        if sign > 0:
            pos_grads.append(g)
        elif sign < 0:
            neg_grads.append(g)
        if sign != 0 and sign == run_sign:
            run_len += 1
        else:
            if run_sign != 0 and run_len >= 2:
                (pos_runs if run_sign > 0 else neg_runs).append(float(run_len))
            run_sign = sign
            run_len = 1 if sign != 0 else 0
    if run_sign != 0 and run_len >= 2:
        (pos_runs if run_sign > 0 else neg_runs).append(float(run_len))

    min_ps, avg_ps, max_ps = _min_avg_max(pos_runs)
    min_ns, avg_ns, max_ns = _min_avg_max(neg_runs)
    sum_ps = 0.0
    for v in pos_runs:
        sum_ps += v
    sum_ns = 0.0
    for v in neg_runs:
        sum_ns += v

    min_pg, avg_pg, max_pg = _min_avg_max(pos_grads)
    min_ng, avg_ng, max_ng = _min_avg_max(neg_grads)

    return [
        float(n), max_y, float(max_pos), mean_y, total, q25, q50, q75, std,
        float(peak_down), float(peak_none), float(peak_up),
        min_tbp_up, avg_tbp_up, max_tbp_up,
        min_tbp_down, avg_tbp_down, max_tbp_down,
        min_amp, avg_amp, max_amp,
        min_ppd, avg_ppd, max_ppd, min_npd, avg_npd, max_npd,
        min_ps, avg_ps, max_ps, sum_ps, min_ns, avg_ns, max_ns, sum_ns,
        min_pg, avg_pg, max_pg, min_ng, avg_ng, max_ng,
        float(len(pos_grads)), float(len(neg_grads)),
    ]
