from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from geoagent.errors import (
    CorruptFileError,
    InvalidInputError,
    MissingFileError,
    ShapeMismatchError,
    UnsupportedLayoutError,
    WorkspaceEscapeError,
)
from geoagent.raster import from_array, load_raster, pixelwise, save_raster
from geoagent.raster.tiff import read_tiff, write_tiff

from conftest import make_georef


def rasters_equal(a, b) -> bool:
    return (
        a.data.shape == b.data.shape
        and a.data.dtype == b.data.dtype
        and np.array_equal(a.data, b.data)
        and (a.nodata == b.nodata or (a.nodata is not None and b.nodata is not None
                                      and np.isnan(a.nodata) and np.isnan(b.nodata)))
        and a.geo == b.geo
    )


class TestRoundTrip:
    def test_identity_2x2_f32(self, tmp_path):
        r = from_array([[1.0, 2.0], [3.0, 4.0]])
        save_raster(r, tmp_path / "a.tif")
        loaded = load_raster(tmp_path / "a.tif")
        assert loaded.width == 2 and loaded.height == 2 and loaded.bands == 1
        assert loaded.data.ravel().tolist() == [1.0, 2.0, 3.0, 4.0]

    @pytest.mark.parametrize("dtype", ["u8", "u16", "f32"])
    @pytest.mark.parametrize("bands", [1, 3])
    @pytest.mark.parametrize("compress", [False, True])
    def test_round_trip_dtypes(self, tmp_path, dtype, bands, compress):
        rng = np.random.default_rng(7)
        data = rng.integers(0, 200, size=(bands, 4, 5)) if dtype != "f32" \
            else rng.normal(size=(bands, 4, 5))
        r = from_array(data, dtype=dtype, geo=make_georef())
        write_tiff(r, tmp_path / "x.tif", compress=compress)
        assert rasters_equal(read_tiff(tmp_path / "x.tif"), r)

    def test_f32_bitwise_samples(self, tmp_path):
        rng = np.random.default_rng(3)
        r = from_array(rng.normal(size=(1, 8, 8)) * 1e6)
        save_raster(r, tmp_path / "b.tif")
        loaded = load_raster(tmp_path / "b.tif")
        assert loaded.data.tobytes() == r.data.tobytes()

    def test_georef_bytes_preserved(self, tmp_path):
        r = from_array(np.ones((2, 2)), geo=make_georef())
        save_raster(r, tmp_path / "g.tif")
        assert load_raster(tmp_path / "g.tif").geo == r.geo

    def test_nodata_round_trip(self, tmp_path):
        r = from_array([[1.0, -9999.0]], nodata=-9999.0)
        save_raster(r, tmp_path / "n.tif")
        loaded = load_raster(tmp_path / "n.tif")
        assert loaded.nodata == -9999.0
        assert loaded.values().tolist() == [1.0]

    def test_nan_nodata_round_trip(self, tmp_path):
        r = from_array([[1.0, np.nan]], nodata=float("nan"))
        save_raster(r, tmp_path / "nn.tif")
        loaded = load_raster(tmp_path / "nn.tif")
        assert np.isnan(loaded.nodata)
        assert loaded.values().tolist() == [1.0]

    @settings(max_examples=60, deadline=None)
    @given(
        dtype=st.sampled_from(["u8", "u16", "f32"]),
        h=st.integers(1, 5),
        w=st.integers(1, 5),
        bands=st.integers(1, 3),
        seed=st.integers(0, 2**31),
        compress=st.booleans(),
    )
    def test_round_trip_property(self, tmp_path_factory, dtype, h, w, bands, seed, compress):
        tmp = tmp_path_factory.mktemp("rt")
        rng = np.random.default_rng(seed)
        data = rng.integers(0, 255, size=(bands, h, w)) if dtype != "f32" \
            else rng.normal(size=(bands, h, w)) * 50
        r = from_array(data, dtype=dtype, geo=make_georef())
        write_tiff(r, tmp / "p.tif", compress=compress)
        assert rasters_equal(read_tiff(tmp / "p.tif"), r)

    @settings(max_examples=40, deadline=None)
    @given(
        ascii_len=st.integers(1, 19),
        n_doubles=st.integers(1, 5),
        seed=st.integers(0, 2**31),
    )
    def test_georef_round_trip_arbitrary_tags(self, tmp_path_factory, ascii_len,
                                              n_doubles, seed):
        # odd-length ASCII values exercise the word-boundary padding path
        from geoagent.raster import GeoRef

        tmp = tmp_path_factory.mktemp("geo")
        rng = np.random.default_rng(seed)
        text = bytes(rng.integers(32, 127, ascii_len).tolist()) + b"\x00"
        doubles = rng.normal(size=n_doubles).astype("<f8").tobytes()
        shorts = rng.integers(0, 2**16, 4 * n_doubles).astype("<u2").tobytes()
        geo = GeoRef(tags=((33550, 12, doubles), (34735, 3, shorts),
                           (34737, 2, text)))
        r = from_array(rng.normal(size=(2, 3)), geo=geo)
        write_tiff(r, tmp / "g.tif")
        assert read_tiff(tmp / "g.tif").geo == geo


def build_tiff(width, height, samples, dtype_bits_fmt, payload_chunks,
               planar, rows_per_strip=None, order="<"):
    """Hand-assemble a classic TIFF to exercise reader paths the writer
    never produces (chunky interleave, multiple strips, big-endian)."""
    import struct

    bits, fmt = dtype_bits_fmt
    fields = []
    offsets, counts, pos = [], [], 8
    for chunk in payload_chunks:
        offsets.append(pos)
        counts.append(len(chunk))
        pos += len(chunk)
    n = len(payload_chunks)

    def pack(fmtchar, *vals):
        return struct.pack(order + fmtchar * len(vals), *vals)

    fields.append((256, 4, pack("I", width)))
    fields.append((257, 4, pack("I", height)))
    fields.append((258, 3, pack("H", *([bits] * samples))))
    fields.append((259, 3, pack("H", 1)))
    fields.append((262, 3, pack("H", 1)))
    fields.append((273, 4, pack("I", *offsets)))
    fields.append((277, 3, pack("H", samples)))
    fields.append((278, 4, pack("I", rows_per_strip or height)))
    fields.append((279, 4, pack("I", *counts)))
    fields.append((284, 3, pack("H", planar)))
    fields.append((339, 3, pack("H", *([fmt] * samples))))
    fields.sort(key=lambda f: f[0])

    ifd_offset = pos
    n_entries = len(fields)
    overflow_start = ifd_offset + 2 + 12 * n_entries + 4
    entries, overflow = b"", b""
    type_size = {3: 2, 4: 4}
    for tag, ftype, raw in fields:
        count = len(raw) // type_size[ftype]
        entry = struct.pack(order + "HHI", tag, ftype, count)
        if len(raw) <= 4:
            entry += raw.ljust(4, b"\x00")
        else:
            entry += struct.pack(order + "I", overflow_start + len(overflow))
            overflow += raw
        entries += entry
    out = struct.pack(order + "2sHI", b"II" if order == "<" else b"MM", 42,
                      ifd_offset)
    out += b"".join(payload_chunks)
    out += struct.pack(order + "H", n_entries) + entries
    out += struct.pack(order + "I", 0) + overflow
    return out


class TestForeignLayouts:
    def test_chunky_interleaved_multiband(self, tmp_path):
        # 2x2, 3 bands, pixel-interleaved u8 in one strip
        pixels = np.arange(12, dtype="<u1").reshape(2, 2, 3)
        buf = build_tiff(2, 2, 3, (8, 1), [pixels.tobytes()], planar=1)
        (tmp_path / "chunky.tif").write_bytes(buf)
        r = load_raster(tmp_path / "chunky.tif")
        assert r.bands == 3
        assert np.array_equal(r.data, pixels.transpose(2, 0, 1))

    def test_multi_strip_single_band(self, tmp_path):
        rows = np.arange(16, dtype="<f4").reshape(4, 4)
        strips = [rows[0:2].tobytes(), rows[2:4].tobytes()]
        buf = build_tiff(4, 4, 1, (32, 3), strips, planar=1, rows_per_strip=2)
        (tmp_path / "strips.tif").write_bytes(buf)
        r = load_raster(tmp_path / "strips.tif")
        assert np.array_equal(r.data[0], rows)

    def test_big_endian_file(self, tmp_path):
        rows = np.arange(6, dtype=">u2").reshape(2, 3)
        buf = build_tiff(3, 2, 1, (16, 1), [rows.tobytes()], planar=1, order=">")
        (tmp_path / "be.tif").write_bytes(buf)
        r = load_raster(tmp_path / "be.tif")
        assert r.data[0].tolist() == [[0, 1, 2], [3, 4, 5]]

    def test_planar_multi_strip_per_plane(self, tmp_path):
        data = np.arange(16, dtype="<u1").reshape(2, 2, 4)  # 2 bands, 2x4
        chunks = [data[0, 0:1].tobytes(), data[0, 1:2].tobytes(),
                  data[1, 0:1].tobytes(), data[1, 1:2].tobytes()]
        buf = build_tiff(4, 2, 2, (8, 1), chunks, planar=2, rows_per_strip=1)
        (tmp_path / "planar.tif").write_bytes(buf)
        r = load_raster(tmp_path / "planar.tif")
        assert np.array_equal(r.data, data)


class TestErrors:
    def test_missing_file(self, tmp_path):
        with pytest.raises(MissingFileError):
            load_raster(tmp_path / "absent.tif")

    def test_not_a_tiff(self, tmp_path):
        (tmp_path / "junk.tif").write_bytes(b"this is not imagery")
        with pytest.raises(CorruptFileError):
            load_raster(tmp_path / "junk.tif")

    def test_truncated(self, tmp_path):
        r = from_array(np.ones((4, 4)))
        save_raster(r, tmp_path / "t.tif")
        full = (tmp_path / "t.tif").read_bytes()
        (tmp_path / "t.tif").write_bytes(full[: len(full) // 2])
        with pytest.raises(CorruptFileError):
            load_raster(tmp_path / "t.tif")

    def test_unsupported_sample_layout(self, tmp_path):
        # hand-build a 64-bit float TIFF header to exercise the reject path
        r = from_array(np.ones((2, 2)))
        save_raster(r, tmp_path / "u.tif")
        buf = bytearray((tmp_path / "u.tif").read_bytes())
        idx = buf.find((258).to_bytes(2, "little") + (3).to_bytes(2, "little"))
        buf[idx + 8] = 64
        (tmp_path / "u.tif").write_bytes(bytes(buf))
        with pytest.raises(UnsupportedLayoutError):
            load_raster(tmp_path / "u.tif")


class TestPixelwise:
    def test_sub(self):
        a = from_array([[4.0, 6.0]])
        b = from_array([[1.0, 2.0]])
        assert pixelwise(a, b, "sub").data.ravel().tolist() == [3.0, 4.0]

    def test_div_by_zero_is_nodata(self):
        a = from_array([[1.0, 1.0]])
        b = from_array([[2.0, 0.0]])
        out = pixelwise(a, b, "div")
        assert out.data.ravel()[0] == 0.5
        assert np.isnan(out.data.ravel()[1])

    def test_abs_diff(self):
        a = from_array([[1.0, 5.0]])
        b = from_array([[3.0, 2.0]])
        assert pixelwise(a, b, "abs_diff").data.ravel().tolist() == [2.0, 3.0]

    def test_shape_mismatch(self):
        with pytest.raises(ShapeMismatchError):
            pixelwise(from_array(np.ones((2, 2))), from_array(np.ones((3, 3))), "add")

    def test_nodata_propagates(self):
        a = from_array([[1.0, 2.0]], nodata=2.0)
        b = from_array([[1.0, 1.0]])
        out = pixelwise(a, b, "add")
        assert out.data.ravel()[0] == 2.0
        assert np.isnan(out.data.ravel()[1])


class TestWorkspace:
    def test_output_inside_root(self, workspace):
        p = workspace.resolve_output("q1/out.tif")
        assert p.is_relative_to(workspace.root)
        assert p.parent.is_dir()

    def test_escape_rejected(self, workspace):
        with pytest.raises(WorkspaceEscapeError):
            workspace.resolve_output("../../etc/x.tif")

    def test_relativize(self, workspace):
        p = workspace.resolve_output("a/b.tif")
        assert workspace.relativize(p) == "a/b.tif"


class TestStatsWithNodata:
    def test_valid_values_filter(self):
        r = from_array([[1.0, 2.0], [3.0, -1.0]], nodata=-1.0)
        vals = r.values()
        dense = [v for v in [1.0, 2.0, 3.0, -1.0] if v != -1.0]
        assert sorted(vals.tolist()) == sorted(dense)
        assert float(np.mean(vals)) == float(np.mean(dense))

    def test_band_out_of_range(self):
        r = from_array(np.ones((2, 2)))
        with pytest.raises(InvalidInputError):
            r.band(2)
