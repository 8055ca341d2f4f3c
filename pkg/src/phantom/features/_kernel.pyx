# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled feature-extraction kernel.

Same algorithm as phantom.features._pure, specialized for float64 input;
keep the two implementations in lockstep.
"""
from libc.math cimport isfinite, sqrt

import numpy as np


cdef double _quantile(double[::1] s, double q) noexcept:
    cdef Py_ssize_t n = s.shape[0]
    cdef double pos = q * (n - 1)
    cdef Py_ssize_t lo = <Py_ssize_t> pos
    cdef double frac = pos - lo
    if frac > 0.0 and lo + 1 < n:
        return s[lo] + (s[lo + 1] - s[lo]) * frac
    return s[lo]


def compute(double[::1] y):
    """All 43 features of one series, in canonical order (float64 array)."""
    cdef Py_ssize_t n = y.shape[0]
    out_arr = np.zeros(43, dtype=np.float64)
    cdef double[::1] out = out_arr
    if n == 0:
        return out_arr

    cdef Py_ssize_t i, j
    cdef double total = 0.0
    cdef double max_y = y[0]
    cdef Py_ssize_t max_pos = 0
    cdef double v
    for i in range(n):
        v = y[i]
        total += v
        if v > max_y:
            max_y = v
            max_pos = i
    cdef double mean_y = total / n

    cdef double var = 0.0
    cdef double d
    for i in range(n):
        d = y[i] - mean_y
        var += d * d
    cdef double std = sqrt(var / n)

    sorted_arr = np.sort(np.asarray(y))
    cdef double[::1] s = sorted_arr

    # peak indices (up / down); no peaks at all when n <= 3
    up_arr = np.empty(n, dtype=np.intp)
    down_arr = np.empty(n, dtype=np.intp)
    cdef Py_ssize_t[::1] up = up_arr
    cdef Py_ssize_t[::1] down = down_arr
    cdef Py_ssize_t n_up = 0, n_down = 0
    if n > 3:
        for i in range(1, n - 1):
            if y[i] > y[i - 1] and y[i] > y[i + 1]:
                up[n_up] = i
                n_up += 1
            elif y[i] < y[i - 1] and y[i] < y[i + 1]:
                down[n_down] = i
                n_down += 1

    # time between consecutive same-direction peaks
    cdef double min_tbp_up = 0.0, avg_tbp_up = 0.0, max_tbp_up = 0.0
    cdef double min_tbp_down = 0.0, avg_tbp_down = 0.0, max_tbp_down = 0.0
    cdef double acc, gap
    if n_up >= 2:
        min_tbp_up = max_tbp_up = up[1] - up[0]
        acc = 0.0
        for j in range(1, n_up):
            gap = up[j] - up[j - 1]
            if gap < min_tbp_up:
                min_tbp_up = gap
            if gap > max_tbp_up:
                max_tbp_up = gap
            acc += gap
        avg_tbp_up = acc / (n_up - 1)
    if n_down >= 2:
        min_tbp_down = max_tbp_down = down[1] - down[0]
        acc = 0.0
        for j in range(1, n_down):
            gap = down[j] - down[j - 1]
            if gap < min_tbp_down:
                min_tbp_down = gap
            if gap > max_tbp_down:
                max_tbp_down = gap
            acc += gap
        avg_tbp_down = acc / (n_down - 1)

    # amplitude of each up peak relative to the series maximum
    cdef double min_amp = 0.0, avg_amp = 0.0, max_amp = 0.0
    cdef double a
    cdef Py_ssize_t amp_count = 0
    if n_up > 0 and max_y != 0.0:
        acc = 0.0
        for j in range(n_up):
            a = (y[up[j]] - y[up[j] - 1]) / max_y
            if not isfinite(a):  # overflow guard keeps extraction total
                continue
            if amp_count == 0:
                min_amp = max_amp = a
            else:
                if a < min_amp:
                    min_amp = a
                if a > max_amp:
                    max_amp = a
            acc += a
            amp_count += 1
        if amp_count > 0:
            avg_amp = acc / amp_count

    # peak deviations from the series mean
    cdef double min_ppd = 0.0, avg_ppd = 0.0, max_ppd = 0.0
    cdef double min_npd = 0.0, avg_npd = 0.0, max_npd = 0.0
    if n_up > 0:
        min_ppd = max_ppd = y[up[0]] - mean_y
        acc = 0.0
        for j in range(n_up):
            a = y[up[j]] - mean_y
            if a < min_ppd:
                min_ppd = a
            if a > max_ppd:
                max_ppd = a
            acc += a
        avg_ppd = acc / n_up
    if n_down > 0:
        min_npd = max_npd = y[down[0]] - mean_y
        acc = 0.0
        for j in range(n_down):
            a = y[down[j]] - mean_y
            if a < min_npd:
                min_npd = a
            if a > max_npd:
                max_npd = a
            acc += a
        avg_npd = acc / n_down

    # gradients and same-sign runs (>= 2 gradients; zero gradients break runs)
    cdef double min_pg = 0.0, avg_pg = 0.0, max_pg = 0.0
    cdef double min_ng = 0.0, avg_ng = 0.0, max_ng = 0.0
    cdef double sum_pg = 0.0, sum_ng = 0.0
    cdef Py_ssize_t pg_count = 0, ng_count = 0
    cdef double min_ps = 0.0, avg_ps = 0.0, max_ps = 0.0, sum_ps = 0.0
    cdef double min_ns = 0.0, avg_ns = 0.0, max_ns = 0.0, sum_ns = 0.0
    cdef Py_ssize_t ps_runs = 0, ns_runs = 0
    cdef int run_sign = 0, sign
    cdef Py_ssize_t run_len = 0
    cdef double g, rl
    for j in range(n - 1):
        g = y[j + 1] - y[j]
        if g > 0:
            sign = 1
            if pg_count == 0:
                min_pg = max_pg = g
            else:
                if g < min_pg:
                    min_pg = g
                if g > max_pg:
                    max_pg = g
            sum_pg += g
            pg_count += 1
        elif g < 0:
            sign = -1
            if ng_count == 0:
                min_ng = max_ng = g
            else:
                if g < min_ng:
                    min_ng = g
                if g > max_ng:
                    max_ng = g
            sum_ng += g
            ng_count += 1
        else:
            sign = 0
        if sign != 0 and sign == run_sign:
            run_len += 1
        else:
            if run_sign != 0 and run_len >= 2:
                rl = run_len
                if run_sign > 0:
                    if ps_runs == 0:
                        min_ps = max_ps = rl
                    else:
                        if rl < min_ps:
                            min_ps = rl
                        if rl > max_ps:
                            max_ps = rl
                    sum_ps += rl
                    ps_runs += 1
                else:
                    if ns_runs == 0:
                        min_ns = max_ns = rl
                    else:
                        if rl < min_ns:
                            min_ns = rl
                        if rl > max_ns:
                            max_ns = rl
                    sum_ns += rl
                    ns_runs += 1
            run_sign = sign
            run_len = 1 if sign != 0 else 0
    if run_sign != 0 and run_len >= 2:
        rl = run_len
        if run_sign > 0:
            if ps_runs == 0:
                min_ps = max_ps = rl
            else:
                if rl < min_ps:
                    min_ps = rl
                if rl > max_ps:
                    max_ps = rl
            sum_ps += rl
            ps_runs += 1
        else:
            if ns_runs == 0:
                min_ns = max_ns = rl
            else:
                if rl < min_ns:
                    min_ns = rl
                if rl > max_ns:
                    max_ns = rl
            sum_ns += rl
            ns_runs += 1
    if pg_count > 0:
        avg_pg = sum_pg / pg_count
    if ng_count > 0:
        avg_ng = sum_ng / ng_count
    if ps_runs > 0:
        avg_ps = sum_ps / ps_runs
    if ns_runs > 0:
        avg_ns = sum_ns / ns_runs

    out[0] = n
    out[1] = max_y
    out[2] = max_pos
    out[3] = mean_y
    out[4] = total
    out[5] = _quantile(s, 0.25)
    out[6] = _quantile(s, 0.50)
    out[7] = _quantile(s, 0.75)
    out[8] = std
    out[9] = n_down
    out[10] = n - n_up - n_down
    out[11] = n_up
    out[12] = min_tbp_up
    out[13] = avg_tbp_up
    out[14] = max_tbp_up
    out[15] = min_tbp_down
    out[16] = avg_tbp_down
    out[17] = max_tbp_down
    out[18] = min_amp
    out[19] = avg_amp
    out[20] = max_amp
    out[21] = min_ppd
    out[22] = avg_ppd
    out[23] = max_ppd
    out[24] = min_npd
    out[25] = avg_npd
    out[26] = max_npd
    out[27] = min_ps
    out[28] = avg_ps
    out[29] = max_ps
    out[30] = sum_ps
    out[31] = min_ns
    out[32] = avg_ns
    out[33] = max_ns
    out[34] = sum_ns
    out[35] = min_pg
    out[36] = avg_pg
    out[37] = max_pg
    out[38] = min_ng
    out[39] = avg_ng
    out[40] = max_ng
    out[41] = pg_count
    out[42] = ng_count
    return out_arr
