from __future__ import annotations

import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from geoagent.errors import InvalidInputError
from geoagent.kits import analysis as an
from geoagent.raster import from_array

series = st.lists(st.floats(-50, 50, allow_nan=False), min_size=4, max_size=24)


def ols_oracle(y):
    """Closed-form sums OLS, independent of the implementation path."""
    n = len(y)
    xs = list(range(n))
    sx, sy = sum(xs), sum(y)
    sxx = sum(x * x for x in xs)
    sxy = sum(x * v for x, v in zip(xs, y))
    slope = (n * sxy - sx * sy) / (n * sxx - sx * sx)
    return slope, (sy - slope * sx) / n


class TestLinearTrend:
    def test_exact_line(self):
        fit = an.linear_trend([1, 3, 5, 7])
        assert fit.slope == 2.0 and fit.intercept == 1.0

    def test_constant_series(self):
        fit = an.linear_trend([4.0, 4.0, 4.0])
        assert fit.slope == 0.0

    def test_matches_closed_form(self):
        rng = np.random.default_rng(0)
        y = rng.normal(size=50).tolist()
        fit = an.linear_trend(y)
        slope, intercept = ols_oracle(y)
        assert abs(fit.slope - slope) < 1e-12
        assert abs(fit.intercept - intercept) < 1e-12

    def test_degenerate(self):
        with pytest.raises(InvalidInputError):
            an.linear_trend([1.0])

    def test_missing_values_skipped(self):
        fit = an.linear_trend([1.0, None, 5.0])  # positions 0 and 2
        assert fit.slope == 2.0


def mk_oracle(x):
    """All-pairs S and tie-corrected variance, straight from the definitions."""
    n = len(x)
    s = sum(
        (x[j] > x[i]) - (x[j] < x[i])
        for i in range(n) for j in range(i + 1, n)
    )
    counts = {}
    for v in x:
        counts[v] = counts.get(v, 0) + 1
    correction = sum(q * (q - 1) * (2 * q + 5) for q in counts.values() if q > 1)
    var = (n * (n - 1) * (2 * n + 5) - correction) / 18.0
    return s, var


class TestMannKendall:
    def test_monotone_series(self):
        res = an.mann_kendall([1, 2, 3, 4, 5])
        assert res.s == 10 and res.tau == 1.0 and res.trend == "increasing"

    def test_reversal_antisymmetry(self):
        fwd = an.mann_kendall([1, 2, 3, 4, 5])
        rev = an.mann_kendall([5, 4, 3, 2, 1])
        assert rev.s == -fwd.s and rev.trend == "decreasing"

    def test_ties_match_bruteforce(self):
        x = [3.0, 1.0, 3.0, 2.0, 3.0, 1.0, 4.0]
        res = an.mann_kendall(x)
        s, var = mk_oracle(x)
        assert res.s == s and abs(res.var_s - var) < 1e-12

    @settings(max_examples=80, deadline=None)
    @given(series)
    def test_property_vs_oracle(self, x):
        res = an.mann_kendall(x)
        s, var = mk_oracle(x)
        assert res.s == s
        assert abs(res.var_s - var) < 1e-9

    @settings(max_examples=40, deadline=None)
    @given(series)
    def test_monotone_transform_invariance(self, x):
        res = an.mann_kendall(x)
        transformed = an.mann_kendall([math.atan(v) + 3 * v for v in x])
        assert res.s == transformed.s

    def test_too_short(self):
        with pytest.raises(InvalidInputError):
            an.mann_kendall([1, 2, 3])


class TestSensSlope:
    def test_exact_line(self):
        assert an.sens_slope([1, 3, 5, 7]) == 2.0

    def test_three_points(self):
        # pairwise slopes {10, 1, -8}
        assert an.sens_slope([0, 10, 2]) == 1.0

    def test_shift_invariance(self):
        x = [4.0, -2.0, 7.0, 1.0]
        assert an.sens_slope(x) == an.sens_slope([v + 11.0 for v in x])

    @settings(max_examples=60, deadline=None)
    @given(series, st.floats(-5, 5, allow_nan=False), st.floats(-20, 20, allow_nan=False))
    def test_equivariance(self, x, a, b):
        base = an.sens_slope(x)
        scaled = an.sens_slope([a * v + b for v in x])
        assert abs(scaled - a * base) < 1e-9 * max(1.0, abs(base))

    def test_pairwise_median_oracle(self):
        rng = np.random.default_rng(1)
        x = rng.normal(size=12).tolist()
        slopes = [(x[j] - x[i]) / (j - i)
                  for i in range(12) for j in range(i + 1, 12)]
        assert an.sens_slope(x) == float(np.median(slopes))


class TestStl:
    def test_pure_sine_residual_tiny(self):
        p = 12
        t = np.arange(p * 10)
        amp = 5.0
        x = amp * np.sin(2 * np.pi * t / p)
        dec = an.stl_decompose(x, period=p)
        assert np.max(np.abs(dec.residual)) < 1e-6 * amp

    def test_constant_series(self):
        x = np.full(30, 7.5)
        dec = an.stl_decompose(x, period=5)
        assert np.allclose(dec.trend, 7.5, atol=1e-9)
        assert np.allclose(dec.seasonal, 0.0, atol=1e-9)

    def test_reconstruction_identity(self):
        rng = np.random.default_rng(3)
        x = rng.normal(size=48) + np.linspace(0, 4, 48)
        dec = an.stl_decompose(x, period=6)
        assert np.max(np.abs(x - (dec.trend + dec.seasonal + dec.residual))) < 1e-9

    def test_seasonal_sums_near_zero(self):
        p = 8
        t = np.arange(p * 8)
        x = 3.0 * np.sin(2 * np.pi * t / p) + 0.05 * t
        dec = an.stl_decompose(x, period=p)
        for c in range(0, t.size, p):
            assert abs(dec.seasonal[c:c + p].sum()) < 0.35

    def test_period_too_long(self):
        with pytest.raises(InvalidInputError):
            an.stl_decompose(np.arange(10.0), period=8)


def pelt_oracle(x, penalty, min_seg=2):
    """Exhaustive minimum-cost segmentation for small n."""
    n = len(x)

    def seg_cost(s, t):
        seg = x[s:t]
        m = sum(seg) / len(seg)
        return sum((v - m) ** 2 for v in seg)

    best = (math.inf, [])
    positions = range(min_seg, n - min_seg + 1)
    for k in range(0, n // min_seg):
        for cut in itertools.combinations(positions, k):
            bounds = [0, *cut, n]
            if any(b - a < min_seg for a, b in zip(bounds, bounds[1:])):
                continue
            cost = sum(seg_cost(a, b) for a, b in zip(bounds, bounds[1:]))
            cost += penalty * k
            if cost < best[0] - 1e-12:
                best = (cost, list(cut))
    return best


class TestPelt:
    def test_step_function(self):
        x = [0.0] * 20 + [10.0] * 20
        assert an.detect_change_points(x, penalty=5.0) == [20]

    def test_constant_series(self):
        assert an.detect_change_points([3.0] * 25, penalty=2.0) == []

    @settings(max_examples=40, deadline=None)
    @given(
        x=st.lists(st.floats(-10, 10, allow_nan=False), min_size=4, max_size=14),
        penalty=st.floats(0.1, 20.0),
    )
    def test_matches_exhaustive_cost(self, x, penalty):
        got = an.detect_change_points(x, penalty)
        got_cost = an.segmentation_cost(x, got, penalty)
        oracle_cost, _ = pelt_oracle(x, penalty)
        assert got_cost <= oracle_cost + 1e-9

    def test_cost_not_beaten_by_manual_splits(self):
        rng = np.random.default_rng(6)
        x = np.concatenate([rng.normal(0, 1, 10), rng.normal(8, 1, 10)]).tolist()
        penalty = 4.0
        got_cost = an.segmentation_cost(x, an.detect_change_points(x, penalty), penalty)
        for cut in ([5], [10], [15], [8, 14]):
            assert got_cost <= an.segmentation_cost(x, cut, penalty) + 1e-9


def acf_oracle(x, max_lag):
    n = len(x)
    mean = sum(x) / n
    denom = sum((v - mean) ** 2 for v in x)
    out = []
    for k in range(max_lag + 1):
        num = sum((x[t] - mean) * (x[t + k] - mean) for t in range(n - k))
        out.append(num / denom)
    return out


class TestAcf:
    def test_lag_zero_is_one(self):
        assert an.acf([1.0, 4.0, 2.0, 8.0], 2)[0] == 1.0

    def test_alternating_signs(self):
        rho = an.acf([1.0, -1.0] * 10, 3)
        assert rho[1] < 0 < rho[2]

    def test_matches_double_loop(self):
        rng = np.random.default_rng(9)
        x = rng.normal(size=40).tolist()
        got = an.acf(x, 10)
        want = acf_oracle(x, 10)
        assert all(abs(g - w) < 1e-12 for g, w in zip(got, want))

    def test_zero_variance(self):
        with pytest.raises(InvalidInputError):
            an.acf([2.0, 2.0, 2.0], 1)


class TestSeasonalityDetection:
    def test_sine_period_12(self):
        t = np.arange(120)
        x = np.sin(2 * np.pi * t / 12)
        assert an.detect_seasonality_acf(x) == 12

    def test_white_noise_none(self):
        rng = np.random.default_rng(123)
        assert an.detect_seasonality_acf(rng.normal(size=200)) is None

    def test_constant_rejected(self):
        with pytest.raises(InvalidInputError):
            an.detect_seasonality_acf([5.0] * 20)


class TestCountSpikes:
    def test_hand_case(self):
        # diffs {4, -3, 7}
        assert an.count_spikes([1, 5, 2, 9], 3.0) == 2

    def test_monotone_decreasing(self):
        assert an.count_spikes([9, 7, 4, 1], 0.0) == 0

    def test_very_negative_threshold(self):
        assert an.count_spikes([3, 1, 4, 1, 5], -1e9) == 4

    def test_missing_values_bridged(self):
        assert an.count_spikes([1, None, 5], 3.0) == 1


def gi_star_oracle(grid, radius):
    """Direct double-loop Gi* for dense small rasters."""
    h, w = grid.shape
    flat = grid.ravel()
    n = flat.size
    mean = flat.mean()
    s = math.sqrt((flat * flat).mean() - mean * mean)
    out = np.zeros_like(grid, dtype=float)
    for i in range(h):
        for j in range(w):
            wsum = cnt = 0.0
            for y in range(h):
                for x in range(w):
                    if abs(y - i) <= radius and abs(x - j) <= radius:
                        wsum += grid[y, x]
                        cnt += 1
            num = wsum - mean * cnt
            den = s * math.sqrt((n * cnt - cnt * cnt) / (n - 1))
            out[i, j] = num / den if den > 0 else 0.0
    return out


class TestGetisOrd:
    def test_constant_raster_all_zero(self):
        out = an.getis_ord_gi_star(from_array(np.full((4, 4), 3.0)), 1)
        assert np.allclose(out.data, 0.0)

    def test_hot_pixel_peak(self):
        grid = np.zeros((7, 7))
        grid[3, 3] = 10.0
        out = an.getis_ord_gi_star(from_array(grid), 1).data[0]
        # every window covering the hot pixel ties at the max; (3,3) is one of them
        assert out[3, 3] == np.max(out)
        assert out[0, 0] < out[3, 3]

    def test_matches_direct_formula(self):
        rng = np.random.default_rng(17)
        grid = rng.normal(size=(5, 5))
        got = an.getis_ord_gi_star(from_array(grid), 1).data[0].astype(np.float64)
        want = gi_star_oracle(from_array(grid).band(), 1)
        assert np.max(np.abs(got - want)) < 1e-6  # f32 storage of the z map

    def test_mean_near_zero_on_large_field(self):
        rng = np.random.default_rng(42)
        out = an.getis_ord_gi_star(from_array(rng.normal(size=(64, 64))), 2)
        assert abs(float(np.mean(out.data))) < 0.1


class TestHotspotDirection:
    def test_due_north(self):
        grid = np.zeros((9, 9))
        grid[0:3, 4] = 1  # column above center is on the center column -> excluded
        grid[0:3, 3] = 1
        grid[0:3, 5] = 1
        direction, counts = an.hotspot_direction(from_array(grid, dtype="u8"))
        assert direction == "N"
        assert counts["S"] == counts["E"] == counts["W"] == 0

    def test_empty_center_balanced(self):
        direction, counts = an.hotspot_direction(from_array(np.zeros((4, 4)), dtype="u8"))
        assert direction == "center-balanced"
        assert all(v == 0 for v in counts.values())

    def test_counts_sum_excludes_center_axes(self):
        rng = np.random.default_rng(5)
        grid = (rng.uniform(size=(9, 9)) < 0.4).astype(np.uint8)
        direction, counts = an.hotspot_direction(from_array(grid, dtype="u8"))
        on_axes = int(grid[4, :].sum() + grid[:, 4].sum() - grid[4, 4])
        diagonal_or_axis = sum(
            1 for y in range(9) for x in range(9)
            if grid[y, x] and (y == 4 or x == 4)
        )
        assert sum(counts.values()) == int(grid.sum()) - diagonal_or_axis
        assert on_axes == diagonal_or_axis

    def test_ties_lexicographic(self):
        grid = np.zeros((5, 5))
        grid[0, 2 - 1] = 1  # N sector
        grid[4, 2 - 1] = 1  # S sector
        direction, counts = an.hotspot_direction(from_array(grid, dtype="u8"))
        assert counts["N"] == counts["S"] == 1
        assert direction == "N"

    def test_non_binary_rejected(self):
        with pytest.raises(InvalidInputError):
            an.hotspot_direction(from_array([[0, 7]], dtype="u8"))
