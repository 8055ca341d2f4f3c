"""Feature extraction: frozen examples, oracle equivalence, invariants."""
from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import oracle_features, oracle_run_lengths
from phantom.features import (FEATURE_COUNT, FEATURE_NAMES, PEAK_DOWN,
                              PEAK_NONE, PEAK_UP, FeatureVector,
                              available_backends, detect_peaks,
                              extract_features)

BACKENDS = sorted(available_backends().items())


def as_vector(computed) -> FeatureVector:
    return FeatureVector(*computed)


class TestDetectPeaks:
    def test_length_three_has_no_peaks(self):
        assert detect_peaks([1, 3, 1]) == [PEAK_NONE] * 3

    def test_hand_classified_series(self):
        marks = detect_peaks([0, 1, 3, 1, 2, 0, 2])
        assert marks[2] == PEAK_UP
        assert marks[4] == PEAK_UP
        assert marks[3] == PEAK_DOWN
        assert marks[5] == PEAK_DOWN
        assert marks[0] == marks[1] == marks[6] == PEAK_NONE

    def test_constant_series(self):
        assert detect_peaks([5, 5, 5, 5, 5]) == [PEAK_NONE] * 5

    def test_plateaus_are_not_peaks(self):
        assert detect_peaks([0, 2, 2, 0, 0]) == [PEAK_NONE] * 5

    def test_empty(self):
        assert detect_peaks([]) == []


class TestFrozenExamples:
    """Hand-evaluated expectations, spot-checked against the oracle."""

    def test_two_point_rising_series(self):
        v = extract_features([1, 2])
        assert v.duration == 2
        assert v.mean_y == 1.5
        assert v.max_y == 2
        assert v.max_y_pos == 1
        assert v.sum_y == 3
        assert v.std == 0.5
        assert (v.q25, v.q50, v.q75) == (1.25, 1.5, 1.75)
        assert v.peak_none == 2 and v.peak_up == 0 and v.peak_down == 0
        assert v.pg_count == 1 and v.min_pg == v.max_pg == 1
        assert v.sum_ps == 0  # a single gradient is not a run

    def test_all_zero_two_point_series(self):
        v = extract_features([0, 0])
        assert v.duration == 2
        assert v.mean_y == 0
        assert v.max_y == 0
        assert v.pg_count == 0 and v.ng_count == 0

    def test_empty_series_is_all_zero(self):
        assert extract_features([]) == FeatureVector(*([0.0] * FEATURE_COUNT))

    def test_five_point_hand_example(self):
        v = extract_features([0, 4, 1, 5, 0])
        assert v.duration == 5
        assert v.max_y == 5 and v.max_y_pos == 3
        assert v.peak_up == 2 and v.peak_down == 1 and v.peak_none == 2
        assert v.min_amp == v.avg_amp == v.max_amp == pytest.approx(0.8)
        assert v.min_tbp_up == v.avg_tbp_up == v.max_tbp_up == 2
        assert v.min_tbp_down == v.avg_tbp_down == v.max_tbp_down == 0
        assert (v.min_ppd, v.avg_ppd, v.max_ppd) == (2, 2.5, 3)
        assert (v.min_npd, v.avg_npd, v.max_npd) == (-1, -1, -1)
        assert (v.min_pg, v.avg_pg, v.max_pg) == (4, 4, 4)
        assert (v.min_ng, v.avg_ng, v.max_ng) == (-5, -4, -3)
        assert v.pg_count == 2 and v.ng_count == 2
        assert v.sum_ps == 0 and v.sum_ns == 0  # alternating gradients

    def test_length_three_zeroes_peak_families(self):
        v = extract_features([1, 3, 1])
        assert v.peak_up == 0 and v.peak_down == 0 and v.peak_none == 3
        assert v.min_amp == v.avg_amp == v.max_amp == 0
        assert v.min_ppd == v.max_npd == 0
        # gradient and sequence families still measured
        assert v.pg_count == 1 and v.ng_count == 1

    def test_runs(self):
        v = extract_features([0, 1, 2, 3, 2, 1, 3, 3])
        # gradients: + + + - - + 0 -> one positive run of 3, one negative of 2
        assert (v.min_ps, v.avg_ps, v.max_ps, v.sum_ps) == (3, 3, 3, 3)
        assert (v.min_ns, v.avg_ns, v.max_ns, v.sum_ns) == (2, 2, 2, 2)

    def test_matches_oracle_on_examples(self):
        for series in ([1, 2], [0, 0], [0, 4, 1, 5, 0], [1, 3, 1],
                       [0, 1, 2, 3, 2, 1, 3, 3], [7], []):
            expected = oracle_features(series)
            got = extract_features(series)._asdict()
            assert got == pytest.approx(expected, abs=1e-12), series


@pytest.mark.parametrize("name,compute", BACKENDS)
class TestOracleEquivalence:
    def test_random_series(self, name, compute):
        rng = np.random.default_rng(20_24)
        for _ in range(250):
            n = int(rng.integers(0, 120))
            series = [float(v) for v in rng.integers(0, 1001, size=n)]
            got = dict(zip(FEATURE_NAMES, compute(series)))
            expected = oracle_features(series)
            for key in FEATURE_NAMES:
                assert got[key] == pytest.approx(expected[key], abs=1e-9), \
                    (key, series)


def test_backends_agree_exactly():
    backends = available_backends()
    if len(backends) < 2:
        pytest.skip("compiled kernel not built")
    rng = np.random.default_rng(7)
    for _ in range(500):
        n = int(rng.integers(0, 200))
        series = [float(v) for v in rng.integers(0, 1001, size=n)]
        assert list(backends["pure"](series)) == \
            list(backends["compiled"](series))


int_series = st.lists(st.integers(min_value=0, max_value=1000), max_size=120)


class TestInvariants:
    @settings(max_examples=250, deadline=None)
    @given(int_series)
    def test_peak_counts_sum_to_length(self, series):
        v = extract_features(series)
        assert v.peak_up + v.peak_down + v.peak_none == len(series)

    @settings(max_examples=250, deadline=None)
    @given(int_series)
    def test_gradient_counts(self, series):
        v = extract_features(series)
        zeros = sum(1 for a, b in zip(series, series[1:]) if a == b)
        if series:
            assert v.pg_count + v.ng_count + zeros == len(series) - 1

    @settings(max_examples=250, deadline=None)
    @given(int_series)
    def test_run_sums(self, series):
        v = extract_features(series)
        pos_runs, neg_runs = oracle_run_lengths(series)
        assert v.sum_ps >= 2 * len(pos_runs)
        assert v.sum_ns >= 2 * len(neg_runs)
        assert v.sum_ps == sum(pos_runs)
        assert v.sum_ns == sum(neg_runs)

    @settings(max_examples=250, deadline=None)
    @given(int_series)
    def test_amplitude_bounds(self, series):
        v = extract_features(series)
        if v.max_y > 0:
            for value in (v.min_amp, v.avg_amp, v.max_amp):
                assert 0.0 <= value <= 1.0

    @settings(max_examples=250, deadline=None)
    @given(st.lists(st.floats(min_value=-1e6, max_value=1e6,
                              allow_nan=False, allow_infinity=False),
                    max_size=100))
    def test_total_and_finite(self, series):
        v = extract_features(series)
        assert all(math.isfinite(x) for x in v)

    @settings(max_examples=200, deadline=None)
    @given(int_series, st.sampled_from([2.0, 4.0, 0.5, 8.0]))
    def test_scale_invariant_slots(self, series, factor):
        a = extract_features(series)
        b = extract_features([v * factor for v in series])
        for name in ("duration", "max_y_pos", "peak_up", "peak_down",
                     "peak_none", "min_tbp_up", "avg_tbp_up", "max_tbp_up",
                     "min_tbp_down", "avg_tbp_down", "max_tbp_down",
                     "min_amp", "avg_amp", "max_amp", "pg_count", "ng_count"):
            assert getattr(a, name) == getattr(b, name), name
