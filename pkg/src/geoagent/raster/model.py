"""In-memory raster model.

A Raster is an immutable multi-band grid with optional nodata marking and
opaque georeference bytes carried through from the source file. All kit
arithmetic happens in float64 on NaN-masked views regardless of the stored
sample type.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import InvalidInputError, ShapeMismatchError

DTYPES = {
    "u8": np.dtype(np.uint8),
    "u16": np.dtype(np.uint16),
    "f32": np.dtype(np.float32),
}
_DTYPE_NAMES = {v: k for k, v in DTYPES.items()}


@dataclass(frozen=True)
class GeoRef:
    """Georeference tags copied verbatim from the source file.

    Each entry is (tiff tag, tiff field type, raw little-endian value bytes).
    Treated as opaque: preserved byte-exactly on save, never reprojected.
    """

    tags: tuple[tuple[int, int, bytes], ...] = ()

    @property
    def affine(self) -> tuple[float, float, float, float] | None:
        """(origin_x, origin_y, pixel_w, pixel_h) when scale+tiepoint exist."""
        raw = dict((t, (ft, b)) for t, ft, b in self.tags)
        if 33550 not in raw or 33922 not in raw:
            return None
        scale = np.frombuffer(raw[33550][1], dtype="<f8")
        tie = np.frombuffer(raw[33922][1], dtype="<f8")
        if scale.size < 2 or tie.size < 6:
            return None
        i, j, _, x, y, _ = tie[:6]
        return (float(x - i * scale[0]), float(y + j * scale[1]),
                float(scale[0]), float(-scale[1]))


@dataclass(frozen=True)
class Raster:
    """Band-sequential raster: data has shape (bands, height, width)."""

    data: np.ndarray
    nodata: float | None = None
    geo: GeoRef = field(default_factory=GeoRef)

    def __post_init__(self) -> None:
        if self.data.ndim == 2:
            object.__setattr__(self, "data", self.data[np.newaxis, :, :])
        if self.data.ndim != 3:
            raise InvalidInputError(f"raster data must be 2-D or 3-D, got {self.data.ndim}-D")
        if self.data.dtype not in _DTYPE_NAMES:
            raise InvalidInputError(f"unsupported raster dtype {self.data.dtype}")
        self.data.setflags(write=False)

    @property
    def bands(self) -> int:
        return self.data.shape[0]

    @property
    def height(self) -> int:
        return self.data.shape[1]

    @property
    def width(self) -> int:
        return self.data.shape[2]

    @property
    def dtype_name(self) -> str:
        return _DTYPE_NAMES[self.data.dtype]

    def band(self, index: int = 1) -> np.ndarray:
        """One band (1-based) as float64 with NaN at nodata pixels."""
        if not 1 <= index <= self.bands:
            raise InvalidInputError(
                f"band {index} out of range for raster with {self.bands} band(s)"
            )
        out = self.data[index - 1].astype(np.float64)
        if self.nodata is not None and not np.isnan(self.nodata):
            out[self.data[index - 1] == self.data.dtype.type(self.nodata)] = np.nan
        return out

    def values(self, band: int = 1) -> np.ndarray:
        """Valid pixel values of one band as a 1-D float64 vector."""
        b = self.band(band)
        return b[~np.isnan(b)]

    def same_shape(self, other: "Raster") -> bool:
        return (self.height, self.width) == (other.height, other.width)


def from_array(values, dtype: str = "f32", nodata: float | None = None,
               geo: GeoRef | None = None) -> Raster:
    """Build a raster from any array-like, casting to a supported dtype."""
    if dtype not in DTYPES:
        raise InvalidInputError(f"unknown dtype {dtype!r}")
    arr = np.asarray(values)
    return Raster(arr.astype(DTYPES[dtype]), nodata=nodata,
                  geo=geo if geo is not None else GeoRef())


def like(reference: Raster, band_f64: np.ndarray) -> Raster:
    """Wrap a float64 result band as an f32 raster inheriting the reference geo.

    NaN pixels become the output nodata marker.
    """
    out = band_f64.astype(np.float32)
    nodata = float("nan") if np.isnan(out).any() else None
    return Raster(out, nodata=nodata, geo=reference.geo)


def require_same_grid(*rasters: Raster) -> None:
    first = rasters[0]
    for r in rasters[1:]:
        if not first.same_shape(r):
            raise ShapeMismatchError(
                f"grids differ: {first.width}x{first.height} vs {r.width}x{r.height}"
            )


def pixelwise(a: Raster, b: Raster, op: str, band_a: int = 1, band_b: int = 1) -> Raster:
    """Pixelwise arithmetic between two rasters in float64, downcast to f32.

    Division by zero yields nodata at the offending pixel; nodata in either
    input propagates.
    """
    require_same_grid(a, b)
    x = a.band(band_a)
    y = b.band(band_b)
    if op == "add":
        out = x + y
    elif op == "sub":
        out = x - y
    elif op == "div":
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.where(y == 0.0, np.nan, x / y)
    elif op == "abs_diff":
        out = np.abs(x - y)
    else:
        raise InvalidInputError(f"unknown pixelwise op {op!r}")
    return like(a, out)
