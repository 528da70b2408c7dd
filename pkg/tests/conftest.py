from __future__ import annotations

import numpy as np
import pytest

from geoagent.raster import GeoRef, Raster, from_array, save_raster
from geoagent.workspace import Workspace


def make_georef() -> GeoRef:
    """A small but realistic georeference: pixel scale + tiepoint + geokeys."""
    scale = np.array([30.0, 30.0, 0.0], dtype="<f8").tobytes()
    tie = np.array([0.0, 0.0, 0.0, 500000.0, 4600000.0, 0.0], dtype="<f8").tobytes()
    keys = np.array([1, 1, 0, 1, 3072, 0, 1, 32633], dtype="<u2").tobytes()
    return GeoRef(tags=((33550, 12, scale), (33922, 12, tie), (34735, 3, keys)))


@pytest.fixture
def workspace(tmp_path) -> Workspace:
    return Workspace(tmp_path)


@pytest.fixture
def georef() -> GeoRef:
    return make_georef()


def write_raster(path, values, dtype="f32", nodata=None, geo=None):
    r = from_array(values, dtype=dtype, nodata=nodata, geo=geo)
    path.parent.mkdir(parents=True, exist_ok=True)
    save_raster(r, path)
    return r


def random_raster(rng, dtype="f32", max_side=6, bands=1) -> Raster:
    h = int(rng.integers(1, max_side + 1))
    w = int(rng.integers(1, max_side + 1))
    if dtype == "u8":
        data = rng.integers(0, 256, size=(bands, h, w))
    elif dtype == "u16":
        data = rng.integers(0, 65536, size=(bands, h, w))
    else:
        data = rng.normal(size=(bands, h, w)) * 100.0
    return from_array(data, dtype=dtype)
