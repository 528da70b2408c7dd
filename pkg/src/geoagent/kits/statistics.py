"""Descriptive statistics, batch image statistics, threshold queries,
scalar utilities, and the Landsat surface-reflectance preprocessing pair.

Moments are population (biased) estimators and kurtosis is reported as
excess, so a normal distribution scores 0. Comparators are strict unless a
tool explicitly asks otherwise.
"""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np

from ..errors import InvalidInputError, MissingFileError
from ..raster import Raster, like, require_same_grid
from .common import nonempty

COMPARATORS = {
    ">": np.greater,
    "<": np.less,
    ">=": np.greater_equal,
    "<=": np.less_equal,
}

KELVIN_OFFSET = 273.15

# Landsat Collection-2 surface reflectance scale pair
SR_SCALE = 2.75e-5
SR_OFFSET = -0.2

# QA bit positions treated as cloud-contaminated
QA_MASK_BITS = (1, 2, 3, 4)  # dilated cloud, cirrus, cloud, shadow


def _compare(values: np.ndarray, comparator: str, threshold: float) -> np.ndarray:
    if comparator not in COMPARATORS:
        raise InvalidInputError(f"unknown comparator {comparator!r}")
    return COMPARATORS[comparator](values, threshold)


# ---------------------------------------------------------------------------
# scalar statistics over inline datasets
# ---------------------------------------------------------------------------


def mean(data) -> float:
    arr = np.asarray(data, dtype=np.float64)
    if arr.size == 0:
        raise InvalidInputError("mean of empty dataset")
    return float(arr.mean())


def coefficient_of_variation(data) -> float:
    arr = np.asarray(data, dtype=np.float64)
    if arr.size < 2:
        raise InvalidInputError("CV needs at least 2 values")
    m = arr.mean()
    if m == 0.0:
        raise InvalidInputError("CV undefined at zero mean")
    return float(arr.std() / m)


def skewness(data) -> float:
    arr = np.asarray(data, dtype=np.float64)
    if arr.size < 3:
        raise InvalidInputError("skewness needs at least 3 values")
    m = arr.mean()
    m2 = np.mean((arr - m) ** 2)
    if m2 == 0.0:
        raise InvalidInputError("skewness undefined at zero variance")
    return float(np.mean((arr - m) ** 3) / m2 ** 1.5)


def kurtosis(data) -> float:
    """Excess kurtosis: population fourth moment over variance squared, minus 3."""
    arr = np.asarray(data, dtype=np.float64)
    if arr.size < 4:
        raise InvalidInputError("kurtosis needs at least 4 values")
    m = arr.mean()
    m2 = np.mean((arr - m) ** 2)
    if m2 == 0.0:
        raise InvalidInputError("kurtosis undefined at zero variance")
    return float(np.mean((arr - m) ** 4) / (m2 * m2) - 3.0)


_SCALAR_STATS = {
    "mean": mean,
    "cv": coefficient_of_variation,
    "skewness": skewness,
    "kurtosis": kurtosis,
}


def scalar_stat(data, stat: str) -> float:
    if stat not in _SCALAR_STATS:
        raise InvalidInputError(f"unknown scalar statistic {stat!r}")
    return _SCALAR_STATS[stat](data)


# ---------------------------------------------------------------------------
# per-image statistics over batches
# ---------------------------------------------------------------------------


def image_stat(r: Raster, stat: str, band: int = 1) -> float:
    vals = nonempty(r.values(band), "image")
    if stat == "mean":
        return float(vals.mean())
    if stat == "std":
        return float(vals.std())
    if stat == "median":
        return float(np.median(vals))
    if stat == "min":
        return float(vals.min())
    if stat == "max":
        return float(vals.max())
    if stat == "sum":
        return float(vals.sum())
    if stat == "skewness":
        return skewness(vals)
    if stat == "kurtosis":
        return kurtosis(vals)
    raise InvalidInputError(f"unknown image statistic {stat!r}")


def batch_image_stat(rasters: list[Raster], stat: str, band: int = 1) -> list[float]:
    if not rasters:
        raise InvalidInputError("empty image batch")
    return [image_stat(r, stat, band) for r in rasters]


def batch_aggregate(rasters: list[Raster], agg: str, band: int = 1):
    if agg == "mean_of_means":
        return float(np.mean(batch_image_stat(rasters, "mean", band)))
    if agg == "max_of_means":
        return float(np.max(batch_image_stat(rasters, "mean", band)))
    if agg == "mean_max_min_triple":
        return (
            float(np.mean(batch_image_stat(rasters, "mean", band))),
            float(np.max(batch_image_stat(rasters, "max", band))),
            float(np.min(batch_image_stat(rasters, "min", band))),
        )
    raise InvalidInputError(f"unknown aggregate {agg!r}")


# ---------------------------------------------------------------------------
# threshold queries
# ---------------------------------------------------------------------------


def percent_satisfying(r: Raster, comparator: str, threshold: float,
                       band: int = 1) -> float:
    vals = nonempty(r.values(band), "image")
    return float(100.0 * np.count_nonzero(_compare(vals, comparator, threshold))
                 / vals.size)


def hotspot_percentages(rasters: list[Raster], threshold: float,
                        comparator: str = ">", band: int = 1) -> list[float]:
    if not rasters:
        raise InvalidInputError("empty image batch")
    return [percent_satisfying(r, comparator, threshold, band) for r in rasters]


def hotspot_map(r: Raster, threshold: float, band: int = 1) -> Raster:
    """Binary map, 1 where the pixel is BELOW the threshold."""
    b = r.band(band)
    out = np.where(np.isnan(b), 0, (b < threshold).astype(np.uint8))
    return Raster(out.astype(np.uint8), geo=r.geo)


def threshold_ratio(rasters: list[Raster], threshold: float, band: int = 1,
                    comparator: str = ">") -> float:
    """Average percentage of pixels satisfying the threshold across images."""
    return float(np.mean(hotspot_percentages(rasters, threshold, comparator, band)))


def multi_band_condition_mask(r: Raster, conditions: list[dict]) -> np.ndarray:
    """Joint boolean mask of pixels satisfying every (band, comparator, value)."""
    if not conditions:
        raise InvalidInputError("at least one condition required")
    mask = None
    valid = None
    for cond in conditions:
        band_idx = int(cond.get("band", 1))
        comparator = cond.get("comparator", ">")
        value = float(cond["value"])
        b = r.band(band_idx)
        this_valid = ~np.isnan(b)
        this = _compare(b, comparator, value) & this_valid
        mask = this if mask is None else (mask & this)
        valid = this_valid if valid is None else (valid & this_valid)
    return mask & valid


def multi_band_threshold_ratio(r: Raster, conditions: list[dict]) -> float:
    mask = multi_band_condition_mask(r, conditions)
    valid = ~np.isnan(r.band(int(conditions[0].get("band", 1))))
    total = int(np.count_nonzero(valid))
    if total == 0:
        raise InvalidInputError("image has no valid pixels")
    return float(100.0 * np.count_nonzero(mask) / total)


def count_pixels_satisfying(r: Raster, conditions: list[dict]) -> int:
    return int(np.count_nonzero(multi_band_condition_mask(r, conditions)))


def count_images_exceeding_ratio(rasters: list[Raster], threshold: float,
                                 ratio: float, band: int = 1,
                                 comparator: str = ">") -> int:
    """Images whose percentage of pixels beyond the threshold exceeds `ratio`."""
    pcts = hotspot_percentages(rasters, threshold, comparator, band)
    return int(sum(1 for p in pcts if p > ratio))


def average_ratio_exceeding(rasters: list[Raster], threshold: float,
                            ratio_threshold: float, band: int = 1,
                            comparator: str = ">") -> float:
    """Mean percentage over images whose percentage exceeds the ratio threshold."""
    pcts = [p for p in hotspot_percentages(rasters, threshold, comparator, band)
            if p > ratio_threshold]
    if not pcts:
        raise InvalidInputError("no image exceeds the ratio threshold")
    return float(np.mean(pcts))


def images_mean_vs_threshold(rasters: list[Raster], threshold: float,
                             direction: str = "above", mode: str = "count",
                             band: int = 1) -> float:
    """Count (or percentage) of images whose band mean is above/below a threshold."""
    means = batch_image_stat(rasters, "mean", band)
    if direction == "above":
        hits = sum(1 for m in means if m > threshold)
    elif direction == "below":
        hits = sum(1 for m in means if m < threshold)
    else:
        raise InvalidInputError(f"direction must be above or below, got {direction!r}")
    if mode == "count":
        return float(hits)
    if mode == "percentage":
        return float(100.0 * hits / len(means))
    raise InvalidInputError(f"mode must be count or percentage, got {mode!r}")


def count_images_vs_mean_multiplier(rasters: list[Raster], multiplier: float,
                                    direction: str = "above", band: int = 1) -> int:
    """Images whose mean is above/below multiplier x (mean of all image means)."""
    means = batch_image_stat(rasters, "mean", band)
    reference = multiplier * float(np.mean(means))
    if direction == "above":
        return int(sum(1 for m in means if m > reference))
    if direction == "below":
        return int(sum(1 for m in means if m < reference))
    raise InvalidInputError(f"direction must be above or below, got {direction!r}")


def fire_pixel_counts(rasters: list[Raster], threshold: float,
                      band: int = 1) -> list[int]:
    if not rasters:
        raise InvalidInputError("empty image batch")
    out = []
    for r in rasters:
        vals = r.values(band)
        out.append(int(np.count_nonzero(vals > threshold)))
    return out


def fire_increase_map(before: Raster, after: Raster, threshold: float) -> Raster:
    """Binary map where (after - before) exceeds the threshold."""
    require_same_grid(before, after)
    diff = after.band() - before.band()
    out = np.where(np.isnan(diff), 0, (diff > threshold).astype(np.uint8))
    return Raster(out.astype(np.uint8), geo=before.geo)


def fire_prone_areas(hotspot: Raster, percentile: float) -> Raster:
    """Binary map of pixels at or above the N-th percentile of the map."""
    vals = nonempty(hotspot.values(), "hotspot map")
    cut = float(np.percentile(vals, percentile))
    b = hotspot.band()
    out = np.where(np.isnan(b), 0, (b >= cut).astype(np.uint8))
    return Raster(out.astype(np.uint8), geo=hotspot.geo)


# ---------------------------------------------------------------------------
# conditional band statistics
# ---------------------------------------------------------------------------


def band_mean_by_condition(target: Raster, condition: Raster, comparator: str,
                           threshold: float, target_band: int = 1,
                           condition_band: int = 1) -> float:
    require_same_grid(target, condition)
    t = target.band(target_band)
    c = condition.band(condition_band)
    sel = _compare(c, comparator, threshold) & ~np.isnan(c) & ~np.isnan(t)
    if not sel.any():
        raise InvalidInputError("condition selects no valid pixels")
    return float(t[sel].mean())


def threshold_value_mean(selector: Raster, target: Raster, threshold: float) -> float:
    """Mean of target pixels where the selector raster exceeds the threshold."""
    return band_mean_by_condition(target, selector, ">", threshold)


def intersection_percentage(a: Raster, b: Raster, comparator_a: str, threshold_a: float,
                            comparator_b: str, threshold_b: float) -> float:
    """Percentage of pixels satisfying both single-band conditions at once."""
    require_same_grid(a, b)
    xa, xb = a.band(), b.band()
    valid = ~np.isnan(xa) & ~np.isnan(xb)
    total = int(np.count_nonzero(valid))
    if total == 0:
        raise InvalidInputError("no jointly valid pixels")
    joint = _compare(xa, comparator_a, threshold_a) & \
        _compare(xb, comparator_b, threshold_b) & valid
    return float(100.0 * np.count_nonzero(joint) / total)


def image_division_mean(num: Raster, den: Raster, num_band: int = 1,
                        den_band: int = 1) -> float:
    """Mean of the pixelwise quotient, excluding zero denominators."""
    require_same_grid(num, den)
    x, y = num.band(num_band), den.band(den_band)
    sel = ~np.isnan(x) & ~np.isnan(y) & (y != 0.0)
    if not sel.any():
        raise InvalidInputError("no valid pixels with nonzero denominator")
    return float((x[sel] / y[sel]).mean())


# ---------------------------------------------------------------------------
# scalar utilities
# ---------------------------------------------------------------------------


def difference(a: float, b: float) -> float:
    return abs(a - b)


def division(a: float, b: float) -> float:
    if b == 0:
        raise InvalidInputError("division by zero")
    return a / b


def percentage_change(old: float, new: float) -> float:
    if old == 0:
        raise InvalidInputError("percentage change undefined for zero base")
    return 100.0 * (new - old) / abs(old)


def multiply(a: float, b: float) -> float:
    return a * b


def ceil_number(x: float) -> int:
    return math.ceil(x)


def kelvin_to_celsius(k: float) -> float:
    return k - KELVIN_OFFSET


def celsius_to_kelvin(c: float) -> float:
    return c + KELVIN_OFFSET


def max_with_index(values) -> tuple[float, int]:
    arr = list(values)
    if not arr:
        raise InvalidInputError("empty list")
    idx = int(np.argmax(arr))
    return float(arr[idx]), idx


def min_with_index(values) -> tuple[float, int]:
    arr = list(values)
    if not arr:
        raise InvalidInputError("empty list")
    idx = int(np.argmin(arr))
    return float(arr[idx]), idx


def list_select(items: list, indexes: list[int]) -> list:
    out = []
    for i in indexes:
        if not -len(items) <= i < len(items):
            raise InvalidInputError(f"index {i} out of range for list of {len(items)}")
        out.append(items[int(i)])
    return out


# ---------------------------------------------------------------------------
# image utilities
# ---------------------------------------------------------------------------


def area_nonzero(r: Raster, band: int = 1) -> int:
    vals = r.values(band)
    return int(np.count_nonzero(vals != 0.0))


def percentile_value(r: Raster, percentile: float, band: int = 1) -> float:
    vals = nonempty(r.values(band), "image")
    if not 0.0 <= percentile <= 100.0:
        raise InvalidInputError("percentile must be within [0, 100]")
    return float(np.percentile(vals, percentile))


def _viridis_lut() -> np.ndarray:
    """256-entry RGB lookup table interpolated between fixed anchors."""
    anchors = np.array([
        (68, 1, 84), (71, 44, 122), (59, 81, 139), (44, 113, 142),
        (33, 144, 141), (39, 173, 129), (92, 200, 99), (170, 220, 50),
        (253, 231, 37),
    ], dtype=np.float64)
    xs = np.linspace(0, 255, anchors.shape[0])
    grid = np.arange(256, dtype=np.float64)
    lut = np.stack([np.interp(grid, xs, anchors[:, c]) for c in range(3)], axis=1)
    return np.clip(np.round(lut), 0, 255).astype(np.uint8)


COLORMAP_LUT = _viridis_lut()


def grayscale_to_colormap(r: Raster, band: int = 1) -> Raster:
    """Map a grayscale band through the fixed LUT to a 3-band u8 raster.

    Values are min/max stretched to [0, 255] first; nodata maps to black.
    """
    b = r.band(band)
    vals = nonempty(b[~np.isnan(b)], "image")
    lo, hi = float(vals.min()), float(vals.max())
    if hi > lo:
        scaled = np.clip((b - lo) / (hi - lo) * 255.0, 0, 255)
    else:
        scaled = np.zeros_like(b)
    idx = np.where(np.isnan(scaled), 0, scaled).astype(np.uint8)
    rgb = COLORMAP_LUT[idx].transpose(2, 0, 1).copy()
    rgb[:, np.isnan(b)] = 0
    return Raster(rgb, geo=r.geo)


def get_filelist(directory: str | Path, pattern: str | None = None) -> list[str]:
    """Lexicographically sorted file names in a directory."""
    d = Path(directory)
    if not d.is_dir():
        raise MissingFileError(f"no such directory: {directory}")
    names = [p.name for p in d.iterdir() if p.is_file()]
    if pattern:
        import fnmatch

        names = [n for n in names if fnmatch.fnmatch(n, pattern)]
    return sorted(names)


def radiometric_correction_sr(r: Raster, band: int = 1) -> Raster:
    """Scale Landsat SR digital numbers to reflectance, clamped to [0, 1]."""
    if r.dtype_name != "u16":
        raise InvalidInputError(
            f"surface-reflectance correction expects u16 digital numbers, got {r.dtype_name}"
        )
    b = r.band(band)
    return like(r, np.clip(SR_SCALE * b + SR_OFFSET, 0.0, 1.0))


def apply_cloud_mask(band_raster: Raster, qa: Raster, band: int = 1) -> Raster:
    """Set pixels flagged by the QA band's cloud/shadow bits to nodata."""
    require_same_grid(band_raster, qa)
    if qa.dtype_name != "u16":
        raise InvalidInputError(f"QA band must be u16, got {qa.dtype_name}")
    qa_vals = qa.data[0].astype(np.uint16)
    flagged = np.zeros(qa_vals.shape, dtype=bool)
    for bit in QA_MASK_BITS:
        flagged |= (qa_vals >> bit) & 1 == 1
    b = band_raster.band(band)
    return like(band_raster, np.where(flagged, np.nan, b))
