"""Spatiotemporal analysis kernels: trends, decomposition, change points,
autocorrelation, and local spatial statistics.

Series arrive as float64 vectors where NaN marks a missing observation; each
operation documents how it treats the gaps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import InvalidInputError
from ..raster import Raster
from .common import as_binary


def _clean_series(values) -> np.ndarray:
    arr = np.asarray([np.nan if v is None else float(v) for v in values], dtype=np.float64)
    return arr


def _valid_with_positions(values) -> tuple[np.ndarray, np.ndarray]:
    arr = _clean_series(values)
    pos = np.flatnonzero(~np.isnan(arr))
    return arr[pos], pos.astype(np.float64)


@dataclass(frozen=True)
class LinearTrend:
    slope: float
    intercept: float


@dataclass(frozen=True)
class MannKendallResult:
    s: int
    var_s: float
    tau: float
    z: float
    p_value: float
    trend: str  # increasing | decreasing | no-trend


def linear_trend(values, timestamps=None) -> LinearTrend:
    """Ordinary least squares y = a*x + b over index positions (or timestamps)."""
    y, pos = _valid_with_positions(values)
    x = pos if timestamps is None else np.asarray(timestamps, dtype=np.float64)[
        pos.astype(int)]
    if y.size < 2 or np.unique(x).size < 2:
        raise InvalidInputError("linear trend needs at least 2 distinct x positions")
    xm, ym = x.mean(), y.mean()
    sxx = float(np.sum((x - xm) ** 2))
    sxy = float(np.sum((x - xm) * (y - ym)))
    slope = sxy / sxx
    return LinearTrend(slope=slope, intercept=float(ym - slope * xm))


def mann_kendall(values, alpha: float = 0.05) -> MannKendallResult:
    """Mann-Kendall monotonic trend test.

    S sums the signs of all forward pairwise differences; the variance uses
    the tie-group correction; the z-score applies the +-1 continuity
    correction; the p-value is the two-sided normal approximation.
    """
    x, _ = _valid_with_positions(values)
    n = x.size
    if n < 4:
        raise InvalidInputError(f"Mann-Kendall needs n >= 4 valid values, got {n}")

    diffs = np.sign(x[np.newaxis, :] - x[:, np.newaxis])
    s = int(np.triu(diffs, k=1).sum())

    _, tie_counts = np.unique(x, return_counts=True)
    ties = tie_counts[tie_counts > 1]
    var_s = (n * (n - 1) * (2 * n + 5) - np.sum(ties * (ties - 1) * (2 * ties + 5))) / 18.0

    pairs = n * (n - 1) / 2
    tie_pairs = float(np.sum(ties * (ties - 1) / 2))
    denom = math.sqrt((pairs - tie_pairs) * pairs)
    tau = s / denom if denom > 0 else 0.0

    if s > 0:
        z = (s - 1) / math.sqrt(var_s)
    elif s < 0:
        z = (s + 1) / math.sqrt(var_s)
    else:
        z = 0.0
    p = math.erfc(abs(z) / math.sqrt(2.0))

    if p < alpha and s > 0:
        trend = "increasing"
    elif p < alpha and s < 0:
        trend = "decreasing"
    else:
        trend = "no-trend"
    return MannKendallResult(s=s, var_s=float(var_s), tau=float(tau), z=float(z),
                             p_value=float(p), trend=trend)


def sens_slope(values, timestamps=None) -> float:
    """Median of all pairwise slopes (x_j - x_i) / (t_j - t_i), i < j."""
    y, pos = _valid_with_positions(values)
    t = pos if timestamps is None else np.asarray(timestamps, dtype=np.float64)[
        pos.astype(int)]
    if y.size < 2:
        raise InvalidInputError("Sen's slope needs at least 2 valid values")
    slopes = []
    for i in range(y.size - 1):
        dt = t[i + 1:] - t[i]
        dy = y[i + 1:] - y[i]
        ok = dt != 0
        slopes.append(dy[ok] / dt[ok])
    allslopes = np.concatenate(slopes)
    if allslopes.size == 0:
        raise InvalidInputError("Sen's slope: no pairs with distinct times")
    return float(np.median(allslopes))


# ---------------------------------------------------------------------------
# STL decomposition (classical LOESS-based inner loop)
# ---------------------------------------------------------------------------


def _tricube(u: np.ndarray) -> np.ndarray:
    w = np.clip(1.0 - np.abs(u) ** 3, 0.0, None)
    return w ** 3


def _loess(x: np.ndarray, y: np.ndarray, span: int, at: np.ndarray,
           rho: np.ndarray | None = None) -> np.ndarray:
    """Degree-1 LOESS of y(x) evaluated at `at`, with `span` nearest points.

    `rho` holds optional robustness weights aligned with x.
    """
    n = x.size
    span = min(max(span, 2), n)
    out = np.empty(at.size)
    for k, x0 in enumerate(at):
        d = np.abs(x - x0)
        idx = np.argpartition(d, span - 1)[:span]
        dmax = d[idx].max()
        w = _tricube(d[idx] / dmax) if dmax > 0 else np.ones(idx.size)
        if rho is not None:
            w = w * rho[idx]
        sw = w.sum()
        if sw <= 0:
            out[k] = y[idx].mean()
            continue
        xw = np.sum(w * x[idx]) / sw
        yw = np.sum(w * y[idx]) / sw
        sxx = np.sum(w * (x[idx] - xw) ** 2)
        if sxx <= 1e-12 * max(1.0, xw * xw):
            out[k] = yw
        else:
            beta = np.sum(w * (x[idx] - xw) * (y[idx] - yw)) / sxx
            out[k] = yw + beta * (x0 - xw)
    return out


def _moving_average(y: np.ndarray, width: int) -> np.ndarray:
    kernel = np.full(width, 1.0 / width)
    return np.convolve(y, kernel, mode="valid")


def _next_odd(v: float) -> int:
    k = int(math.ceil(v))
    return k if k % 2 == 1 else k + 1


@dataclass(frozen=True)
class Decomposition:
    trend: np.ndarray
    seasonal: np.ndarray
    residual: np.ndarray


def stl_decompose(values, period: int, seasonal_span: int = 7,
                  inner_iterations: int = 2, robust_iterations: int = 1) -> Decomposition:
    """Additive seasonal-trend decomposition via the classical LOESS loop.

    trend + seasonal + residual reconstructs the input exactly; the seasonal
    component is the low-pass-filtered cycle-subseries smooth, so it averages
    to ~0 over each full cycle.
    """
    x = _clean_series(values)
    if np.isnan(x).any():
        raise InvalidInputError("decomposition requires a gap-free series")
    n = x.size
    if period < 2:
        raise InvalidInputError("period must be at least 2 samples")
    if n < 2 * period:
        raise InvalidInputError(
            f"series of length {n} too short for period {period} (need >= {2 * period})"
        )

    trend_span = _next_odd(1.5 * period / (1.0 - 1.5 / seasonal_span))
    lowpass_span = _next_odd(period)
    positions = np.arange(n, dtype=np.float64)

    trend = np.zeros(n)
    seasonal = np.zeros(n)
    weights = np.ones(n)

    for outer in range(robust_iterations + 1):
        for _ in range(inner_iterations):
            detrended = x - trend
            # cycle-subseries smoothing, extended one cycle on each side
            extended = np.empty(n + 2 * period)
            for phase in range(period):
                sub = detrended[phase::period]
                sub_pos = positions[phase::period]
                eval_pos = np.concatenate((
                    [sub_pos[0] - period], sub_pos, [sub_pos[-1] + period]))
                extended[phase::period] = _loess(
                    sub_pos, sub, seasonal_span, eval_pos,
                    rho=weights[phase::period])
            # low-pass filter: MA(period) twice, MA(3), then LOESS
            lp = _moving_average(_moving_average(extended, period), period)
            lp = _moving_average(lp, 3)
            lp = _loess(positions, lp, lowpass_span, positions)
            seasonal = extended[period:period + n] - lp
            deseason = x - seasonal
            trend = _loess(positions, deseason, trend_span, positions, rho=weights)
        if outer < robust_iterations:
            resid = x - trend - seasonal
            s = np.median(np.abs(resid))
            if s <= 0:
                break
            u = np.clip(resid / (6.0 * s), -1.0, 1.0)
            weights = (1.0 - u * u) ** 2
    residual = x - trend - seasonal
    return Decomposition(trend=trend, seasonal=seasonal, residual=residual)


# ---------------------------------------------------------------------------
# PELT change-point detection, piecewise-constant-mean L2 cost
# ---------------------------------------------------------------------------

MIN_SEGMENT = 2


def _segment_cost_fn(x: np.ndarray):
    """L2 cost of x[s:t] around its own mean, via cumulative sums."""
    c1 = np.concatenate(([0.0], np.cumsum(x)))
    c2 = np.concatenate(([0.0], np.cumsum(x * x)))

    def cost(s: int, t: int) -> float:
        n = t - s
        sm = c1[t] - c1[s]
        return float(c2[t] - c2[s] - sm * sm / n)

    return cost


def detect_change_points(values, penalty: float) -> list[int]:
    """PELT breakpoints (segment start indices) under an L2 mean-shift cost.

    Pruning honors the minimum segment length: a candidate dominated at time
    t is only discarded from time t + MIN_SEGMENT on, because the dominating
    split point is not itself admissible before then.
    """
    x = _clean_series(values)
    x = x[~np.isnan(x)]
    n = x.size
    if penalty <= 0:
        raise InvalidInputError("penalty must be positive")
    if n < 2 * MIN_SEGMENT:
        return []
    cost = _segment_cost_fn(x)

    f = {0: -penalty}
    last = {0: 0}
    candidates = [0]
    kill_at: dict[int, int] = {}
    for t in range(MIN_SEGMENT, n + 1):
        candidates = [s for s in candidates if kill_at.get(s, n + 1) > t]
        best_val = math.inf
        best_s = 0
        usable = [s for s in candidates if t - s >= MIN_SEGMENT]
        for s in usable:
            val = f[s] + cost(s, t) + penalty
            if val < best_val:
                best_val = val
                best_s = s
        f[t] = best_val
        last[t] = best_s
        for s in usable:
            if s not in kill_at and f[s] + cost(s, t) > f[t]:
                kill_at[s] = t + MIN_SEGMENT
        candidates.append(t)

    bkps = []
    t = n
    while t > 0:
        s = last[t]
        if s == 0:
            break
        bkps.append(s)
        t = s
    return sorted(bkps)


def segmentation_cost(values, breakpoints: list[int], penalty: float) -> float:
    """Total penalized cost of a given segmentation (for oracle comparisons)."""
    x = _clean_series(values)
    x = x[~np.isnan(x)]
    cost = _segment_cost_fn(x)
    bounds = [0] + sorted(breakpoints) + [x.size]
    total = penalty * (len(bounds) - 2)
    for s, t in zip(bounds[:-1], bounds[1:]):
        total += cost(s, t)
    return float(total)


# ---------------------------------------------------------------------------
# Autocorrelation and seasonality
# ---------------------------------------------------------------------------


def acf(values, max_lag: int) -> list[float]:
    """Biased autocorrelation estimates for lags 0..max_lag."""
    x = _clean_series(values)
    x = x[~np.isnan(x)]
    n = x.size
    if max_lag >= n:
        raise InvalidInputError(f"max_lag {max_lag} must be below series length {n}")
    xc = x - x.mean()
    denom = float(np.sum(xc * xc))
    if denom == 0.0:
        raise InvalidInputError("series has zero variance")
    return [float(np.sum(xc[: n - k] * xc[k:]) / denom) for k in range(max_lag + 1)]


def detect_seasonality_acf(values, max_lag: int | None = None) -> int | None:
    """First significant local ACF maximum at lag >= 2, or None.

    Significance band is the white-noise bound 1.96/sqrt(n).
    """
    x = _clean_series(values)
    x = x[~np.isnan(x)]
    n = x.size
    if max_lag is None:
        max_lag = n // 2
    rho = acf(x, max_lag)
    band = 1.96 / math.sqrt(n)
    for k in range(2, max_lag + 1):
        left = rho[k] > rho[k - 1]
        right = k == max_lag or rho[k] >= rho[k + 1]
        if left and right and rho[k] > band:
            return k
    return None


def count_spikes(values, threshold: float) -> int:
    """Count consecutive valid-value increases greater than the threshold."""
    x = _clean_series(values)
    x = x[~np.isnan(x)]
    if x.size < 2:
        return 0
    return int(np.count_nonzero(np.diff(x) > threshold))


# ---------------------------------------------------------------------------
# Local spatial statistics
# ---------------------------------------------------------------------------


def gi_star_zscores(band: np.ndarray, kernel_radius: int = 1) -> np.ndarray:
    """Getis-Ord Gi* z-scores (float64) with a binary square window
    including the center.

    NaN pixels are excluded from the global moments and the neighborhood
    sums and stay NaN in the output; a zero-variance field yields zeros.
    """
    if kernel_radius < 1:
        raise InvalidInputError("kernel radius must be >= 1")
    valid = ~np.isnan(band)
    n = int(np.count_nonzero(valid))
    if n == 0:
        raise InvalidInputError("raster has no valid pixels")
    vals = band[valid]
    mean = float(vals.mean())
    s = float(math.sqrt(max(np.mean(vals * vals) - mean * mean, 0.0)))

    h, w = band.shape
    if s == 0.0 or n < 2:
        return np.where(valid, 0.0, np.nan)

    filled = np.where(valid, band, 0.0)
    ones = valid.astype(np.float64)
    k = kernel_radius

    def window_sum(a: np.ndarray) -> np.ndarray:
        integral = np.zeros((h + 1, w + 1))
        integral[1:, 1:] = np.cumsum(np.cumsum(a, axis=0), axis=1)
        out_arr = np.empty((h, w))
        for i in range(h):
            for j in range(w):
                r0, r1 = max(0, i - k), min(h, i + k + 1)
                c0, c1 = max(0, j - k), min(w, j + k + 1)
                out_arr[i, j] = (integral[r1, c1] - integral[r0, c1]
                                 - integral[r1, c0] + integral[r0, c0])
        return out_arr

    wsum = window_sum(filled)
    wcount = window_sum(ones)

    with np.errstate(divide="ignore", invalid="ignore"):
        num = wsum - mean * wcount
        den = s * np.sqrt(np.maximum(n * wcount - wcount * wcount, 0.0) / (n - 1))
        z = np.where(den > 0, num / den, 0.0)
    return np.where(valid, z, np.nan)


def getis_ord_gi_star(r: Raster, kernel_radius: int = 1) -> Raster:
    """Gi* hot/cold-spot z map of a raster (f32, nodata-aware)."""
    z = gi_star_zscores(r.band(), kernel_radius)
    nodata = float("nan") if np.isnan(z).any() else None
    return Raster(z.astype(np.float32), nodata=nodata, geo=r.geo)


DIRECTIONS = ("N", "E", "S", "W")


def hotspot_direction(binary_map: Raster) -> tuple[str, dict[str, int]]:
    """Dominant cardinal sector of 1-pixels relative to the map center.

    Pixels exactly on the center row or column are excluded; diagonal-sector
    assignment sends |dy| >= |dx| to N/S and the rest to E/W. Ties resolve
    lexicographically (N < E < S < W); an empty map is center-balanced.
    """
    band = as_binary(binary_map.band(), "hotspot map")
    h, w = band.shape
    cy, cx = (h - 1) / 2.0, (w - 1) / 2.0
    counts = {d: 0 for d in DIRECTIONS}
    ys, xs = np.nonzero(band == 1.0)
    for y, x in zip(ys, xs):
        dy, dx = y - cy, x - cx
        if dy == 0 or dx == 0:
            continue
        if abs(dy) >= abs(dx):
            counts["N" if dy < 0 else "S"] += 1
        else:
            counts["E" if dx > 0 else "W"] += 1
    best = max(counts.values())
    if best == 0:
        return "center-balanced", counts
    winner = min(d for d in DIRECTIONS if counts[d] == best)
    return winner, counts
