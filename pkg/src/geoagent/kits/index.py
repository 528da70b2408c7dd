"""Spectral-index kernels.

Each index is a per-pixel band combination; inputs arrive as NaN-masked
float64 bands and results keep NaN where any input is invalid or a
denominator vanishes. Band roles per index follow the tool catalog
(note NDWI here is the NIR/SWIR variant).
"""

from __future__ import annotations

import numpy as np

from ..errors import InvalidInputError
from ..raster import Raster, like, require_same_grid
from .common import as_binary, nonempty

# index name -> ordered band roles
INDEX_BANDS: dict[str, tuple[str, ...]] = {
    "ndvi": ("nir", "red"),
    "ndwi": ("nir", "swir"),
    "ndbi": ("swir", "nir"),
    "evi": ("nir", "red", "blue"),
    "nbr": ("nir", "swir"),
    "wri": ("green", "red", "nir", "swir"),
    "ndti": ("red", "green"),
    "ndsi": ("green", "swir"),
    "fvc": ("nir", "red"),
}

# value range of each index on valid pixels
INDEX_RANGES: dict[str, tuple[float, float]] = {
    "ndvi": (-1.0, 1.0),
    "ndwi": (-1.0, 1.0),
    "ndbi": (-1.0, 1.0),
    "nbr": (-1.0, 1.0),
    "ndti": (-1.0, 1.0),
    "ndsi": (-1.0, 1.0),
    "fvc": (0.0, 1.0),
}

FVC_NDVI_MIN = 0.05
FVC_NDVI_MAX = 0.86


def _ratio(num: np.ndarray, den: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(den == 0.0, np.nan, num / den)


def normalized_difference(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return _ratio(a - b, a + b)


def compute_index(kind: str, bands: dict[str, Raster]) -> Raster:
    """Compute one spectral index from a role->raster map."""
    kind = kind.lower()
    if kind not in INDEX_BANDS:
        raise InvalidInputError(f"unknown index kind {kind!r}")
    roles = INDEX_BANDS[kind]
    missing = [r for r in roles if r not in bands]
    if missing:
        raise InvalidInputError(f"{kind} requires band roles {missing}")
    rs = [bands[r] for r in roles]
    require_same_grid(*rs)
    b = {role: bands[role].band() for role in roles}

    if kind in ("ndvi", "ndwi", "nbr", "ndbi", "ndti", "ndsi"):
        first, second = roles
        out = normalized_difference(b[first], b[second])
    elif kind == "evi":
        den = b["nir"] + 6.0 * b["red"] - 7.5 * b["blue"] + 1.0
        out = _ratio(2.5 * (b["nir"] - b["red"]), den)
    elif kind == "wri":
        out = _ratio(b["green"] + b["red"], b["nir"] + b["swir"])
    elif kind == "fvc":
        ndvi = normalized_difference(b["nir"], b["red"])
        out = fvc_from_ndvi(ndvi, FVC_NDVI_MIN, FVC_NDVI_MAX)
    else:  # pragma: no cover - kinds table is exhaustive
        raise InvalidInputError(f"unhandled index kind {kind!r}")
    return like(rs[0], out)


def fvc_from_ndvi(ndvi: np.ndarray, ndvi_min: float, ndvi_max: float) -> np.ndarray:
    """Fractional vegetation cover: squared clamped NDVI fraction."""
    if not ndvi_max > ndvi_min:
        raise InvalidInputError(
            f"degenerate NDVI range: min {ndvi_min} >= max {ndvi_max}"
        )
    frac = np.clip((ndvi - ndvi_min) / (ndvi_max - ndvi_min), 0.0, 1.0)
    return frac * frac


def compute_fvc(ndvi: Raster, ndvi_min: float = FVC_NDVI_MIN,
                ndvi_max: float = FVC_NDVI_MAX) -> Raster:
    return like(ndvi, fvc_from_ndvi(ndvi.band(), ndvi_min, ndvi_max))


def frp_mask(r: Raster, threshold: float, band: int = 1) -> Raster:
    """Binary fire-radiative-power mask: 1 where value > threshold."""
    b = r.band(band)
    mask = np.where(np.isnan(b), 0, (b > threshold).astype(np.uint8))
    return Raster(mask.astype(np.uint8), geo=r.geo)


def extreme_snow_loss_percentage(binary_map: Raster) -> float:
    """Percentage of 1-pixels among valid pixels of a binary map."""
    b = as_binary(binary_map.band(), "snow loss map")
    valid = nonempty(b[~np.isnan(b)], "snow loss map")
    return float(100.0 * np.count_nonzero(valid == 1.0) / valid.size)


def fit_tvdi_edges(ndvi: np.ndarray, lst: np.ndarray, bins: int = 20,
                   min_bin_pixels: int = 3):
    """Fit dry (max-LST) and wet (min-LST) edges over NDVI bins.

    Returns ((dry_slope, dry_intercept), (wet_slope, wet_intercept)).
    Bins with fewer than min_bin_pixels pixels are skipped; fewer than two
    usable bins is an error.
    """
    ok = ~(np.isnan(ndvi) | np.isnan(lst))
    x, y = ndvi[ok], lst[ok]
    if x.size == 0:
        raise InvalidInputError("TVDI: no valid NDVI/LST pixels")
    lo, hi = float(np.min(x)), float(np.max(x))
    if hi <= lo:
        raise InvalidInputError("TVDI: constant NDVI field")
    edges = np.linspace(lo, hi, bins + 1)
    centers, dry, wet = [], [], []
    for i in range(bins):
        upper = edges[i + 1] if i < bins - 1 else hi + 1e-12
        sel = (x >= edges[i]) & (x < upper)
        if np.count_nonzero(sel) < min_bin_pixels:
            continue
        centers.append(0.5 * (edges[i] + edges[i + 1]))
        dry.append(float(np.max(y[sel])))
        wet.append(float(np.min(y[sel])))
    if len(centers) < 2:
        raise InvalidInputError(
            f"TVDI: only {len(centers)} usable NDVI bin(s), need at least 2"
        )
    c = np.asarray(centers)
    dry_fit = np.polyfit(c, np.asarray(dry), 1)
    wet_fit = np.polyfit(c, np.asarray(wet), 1)
    return (float(dry_fit[0]), float(dry_fit[1])), (float(wet_fit[0]), float(wet_fit[1]))


def compute_tvdi(ndvi: Raster, lst: Raster, bins: int = 20, edges=None) -> Raster:
    """Temperature-vegetation dryness index in [0,1].

    Edges are fitted from the data unless precomputed ((dry_slope, dry_int),
    (wet_slope, wet_int)) lines are supplied.
    """
    require_same_grid(ndvi, lst)
    nb, lb = ndvi.band(), lst.band()
    (ds, di), (ws, wi) = edges if edges is not None \
        else fit_tvdi_edges(nb, lb, bins=bins)
    dry = ds * nb + di
    wet = ws * nb + wi
    span = dry - wet
    with np.errstate(divide="ignore", invalid="ignore"):
        tvdi = np.where(span <= 0.0, np.nan, (lb - wet) / span)
    return like(ndvi, np.clip(tvdi, 0.0, 1.0))
