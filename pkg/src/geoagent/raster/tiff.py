"""Minimal GeoTIFF reader/writer.

Deliberately small subset: classic (non-Big) TIFF, baseline strips,
uncompressed or Deflate, u8/u16/f32 samples, band-sequential or
pixel-interleaved planes. Georeference tags (ModelPixelScale, ModelTiepoint
and the three GeoKey tags) plus the nodata tag are carried through; anything
fancier raises UnsupportedLayoutError.

The writer always emits little-endian files with one strip per plane, which
keeps round-trips byte-stable for testing.
"""

from __future__ import annotations

import struct
import zlib
from pathlib import Path

import numpy as np

from ..errors import CorruptFileError, UnsupportedLayoutError
from .model import DTYPES, GeoRef, Raster

# TIFF field types and their byte widths
_TYPE_SIZE = {1: 1, 2: 1, 3: 2, 4: 4, 5: 8, 6: 1, 7: 1, 8: 2, 9: 4, 10: 8, 11: 4, 12: 8}

_TAG_WIDTH = 256
_TAG_HEIGHT = 257
_TAG_BITS = 258
_TAG_COMPRESSION = 259
_TAG_PHOTOMETRIC = 262
_TAG_STRIP_OFFSETS = 273
_TAG_SAMPLES = 277
_TAG_ROWS_PER_STRIP = 278
_TAG_STRIP_COUNTS = 279
_TAG_PLANAR = 284
_TAG_SAMPLE_FORMAT = 339
_TAG_TILE_MARKERS = (322, 323, 324, 325)
_TAG_NODATA = 42113

GEO_TAGS = (33550, 33922, 34735, 34736, 34737)

# (bits, sample format) -> dtype name
_FORMATS = {(8, 1): "u8", (16, 1): "u16", (32, 3): "f32"}
_FORMATS_INV = {"u8": (8, 1), "u16": (16, 1), "f32": (32, 3)}


def _read_entries(buf: bytes, order: str) -> dict[int, tuple[int, int, bytes]]:
    """Parse IFD0 into tag -> (field type, count, raw value bytes)."""
    (ifd_off,) = struct.unpack(order + "I", buf[4:8])
    if ifd_off + 2 > len(buf):
        raise CorruptFileError("IFD offset beyond end of file")
    (n_entries,) = struct.unpack(order + "H", buf[ifd_off:ifd_off + 2])
    entries: dict[int, tuple[int, int, bytes]] = {}
    for i in range(n_entries):
        base = ifd_off + 2 + 12 * i
        if base + 12 > len(buf):
            raise CorruptFileError("truncated IFD")
        tag, ftype, count = struct.unpack(order + "HHI", buf[base:base + 8])
        size = _TYPE_SIZE.get(ftype, 1) * count
        if size <= 4:
            raw = buf[base + 8:base + 8 + size]
        else:
            (off,) = struct.unpack(order + "I", buf[base + 8:base + 12])
            if off + size > len(buf):
                raise CorruptFileError(f"tag {tag} value beyond end of file")
            raw = buf[off:off + size]
        entries[tag] = (ftype, count, raw)
    return entries


def _ints(entry: tuple[int, int, bytes], order: str) -> list[int]:
    ftype, count, raw = entry
    fmt = {3: "H", 4: "I", 1: "B"}.get(ftype)
    if fmt is None:
        raise CorruptFileError(f"unexpected field type {ftype} for integer tag")
    return list(struct.unpack(order + fmt * count, raw))


def _scalar(entries, tag: int, order: str, default: int | None = None) -> int:
    if tag not in entries:
        if default is None:
            raise CorruptFileError(f"required TIFF tag {tag} missing")
        return default
    return _ints(entries[tag], order)[0]


def read_tiff(path: str | Path) -> Raster:
    buf = Path(path).read_bytes()
    if len(buf) < 8:
        raise CorruptFileError("file too short to be a TIFF")
    if buf[:2] == b"II":
        order = "<"
    elif buf[:2] == b"MM":
        order = ">"
    else:
        raise CorruptFileError("not a TIFF file (bad byte-order mark)")
    (magic,) = struct.unpack(order + "H", buf[2:4])
    if magic != 42:
        raise CorruptFileError(f"not a classic TIFF (magic {magic})")

    entries = _read_entries(buf, order)
    for tag in _TAG_TILE_MARKERS:
        if tag in entries:
            raise UnsupportedLayoutError("tiled TIFF not supported")

    width = _scalar(entries, _TAG_WIDTH, order)
    height = _scalar(entries, _TAG_HEIGHT, order)
    samples = _scalar(entries, _TAG_SAMPLES, order, default=1)
    compression = _scalar(entries, _TAG_COMPRESSION, order, default=1)
    planar = _scalar(entries, _TAG_PLANAR, order, default=1)
    rows_per_strip = _scalar(entries, _TAG_ROWS_PER_STRIP, order, default=height)

    if compression not in (1, 8, 32946):
        raise UnsupportedLayoutError(f"compression {compression} not supported")
    if planar not in (1, 2):
        raise UnsupportedLayoutError(f"planar configuration {planar} not supported")

    bits = _ints(entries[_TAG_BITS], order) if _TAG_BITS in entries else [1] * samples
    fmts = (_ints(entries[_TAG_SAMPLE_FORMAT], order)
            if _TAG_SAMPLE_FORMAT in entries else [1] * samples)
    if len(set(bits)) != 1 or len(set(fmts)) != 1:
        raise UnsupportedLayoutError("mixed per-band sample types not supported")
    key = (bits[0], fmts[0])
    if key not in _FORMATS:
        raise UnsupportedLayoutError(f"sample layout bits={bits[0]} format={fmts[0]} not supported")
    dtype_name = _FORMATS[key]
    itemsize = bits[0] // 8

    offsets = _ints(entries[_TAG_STRIP_OFFSETS], order)
    counts = _ints(entries[_TAG_STRIP_COUNTS], order)
    if len(offsets) != len(counts):
        raise CorruptFileError("strip offset/count mismatch")

    chunks = []
    for off, cnt in zip(offsets, counts):
        if off + cnt > len(buf):
            raise CorruptFileError("strip beyond end of file")
        raw = buf[off:off + cnt]
        if compression in (8, 32946):
            try:
                raw = zlib.decompress(raw)
            except zlib.error as exc:
                raise CorruptFileError(f"bad deflate strip: {exc}") from exc
        chunks.append(raw)
    payload = b"".join(chunks)

    if planar == 1:
        expected = width * height * samples * itemsize
        if len(payload) < expected:
            raise CorruptFileError("pixel data shorter than image dimensions require")
        flat = np.frombuffer(payload[:expected], dtype=order + DTYPES[dtype_name].str[1:])
        data = flat.reshape(height, width, samples).transpose(2, 0, 1)
    else:
        strips_per_plane = max(1, -(-height // rows_per_strip))
        if len(offsets) != strips_per_plane * samples:
            raise CorruptFileError("strip count does not match planar layout")
        expected = width * height * samples * itemsize
        if len(payload) < expected:
            raise CorruptFileError("pixel data shorter than image dimensions require")
        flat = np.frombuffer(payload[:expected], dtype=order + DTYPES[dtype_name].str[1:])
        data = flat.reshape(samples, height, width)

    data = np.ascontiguousarray(data.astype(DTYPES[dtype_name]))

    nodata = None
    if _TAG_NODATA in entries:
        text = entries[_TAG_NODATA][2].split(b"\x00")[0].decode("ascii", "replace").strip()
        try:
            nodata = float(text)
        except ValueError:
            nodata = None

    geo_tags = []
    for tag in GEO_TAGS:
        if tag in entries:
            ftype, _count, raw = entries[tag]
            if order == ">":
                raw = _swap_to_le(raw, ftype)
            geo_tags.append((tag, ftype, raw))
    return Raster(data, nodata=nodata, geo=GeoRef(tags=tuple(geo_tags)))


def _swap_to_le(raw: bytes, ftype: int) -> bytes:
    size = _TYPE_SIZE[ftype]
    if size == 1:
        return raw
    arr = np.frombuffer(raw, dtype=f">u{size}" if ftype != 12 else ">f8")
    return arr.astype(f"<u{size}" if ftype != 12 else "<f8").tobytes()


def write_tiff(raster: Raster, path: str | Path, compress: bool = False) -> None:
    bands, height, width = raster.data.shape
    bits, fmt = _FORMATS_INV[raster.dtype_name]
    planar = 1 if bands == 1 else 2

    le = raster.data.astype("<" + DTYPES[raster.dtype_name].str[1:])
    planes = [le[b].tobytes() for b in range(bands)]
    if compress:
        planes = [zlib.compress(p) for p in planes]

    fields: list[tuple[int, int, bytes]] = [
        (_TAG_WIDTH, 4, struct.pack("<I", width)),
        (_TAG_HEIGHT, 4, struct.pack("<I", height)),
        (_TAG_BITS, 3, struct.pack("<" + "H" * bands, *([bits] * bands))),
        (_TAG_COMPRESSION, 3, struct.pack("<H", 8 if compress else 1)),
        (_TAG_PHOTOMETRIC, 3, struct.pack("<H", 1)),
        (_TAG_SAMPLES, 3, struct.pack("<H", bands)),
        (_TAG_ROWS_PER_STRIP, 4, struct.pack("<I", height)),
        (_TAG_PLANAR, 3, struct.pack("<H", planar)),
        (_TAG_SAMPLE_FORMAT, 3, struct.pack("<" + "H" * bands, *([fmt] * bands))),
    ]
    fields.extend(raster.geo.tags)
    if raster.nodata is not None:
        text = repr(float(raster.nodata)).encode("ascii") + b"\x00"
        fields.append((_TAG_NODATA, 2, text))

    # strip offsets/counts are filled in once the layout is known
    n_entries = len(fields) + 2
    header_len = 8
    data_start = header_len
    strip_offsets = []
    pos = data_start
    for p in planes:
        strip_offsets.append(pos)
        pos += len(p)
    fields.append((_TAG_STRIP_OFFSETS, 4, struct.pack("<" + "I" * bands, *strip_offsets)))
    fields.append((_TAG_STRIP_COUNTS, 4, struct.pack("<" + "I" * bands,
                                                     *[len(p) for p in planes])))
    fields.sort(key=lambda f: f[0])

    ifd_offset = pos
    overflow_start = ifd_offset + 2 + 12 * n_entries + 4
    entry_bytes = b""
    overflow = b""
    for tag, ftype, raw in fields:
        count = len(raw) // _TYPE_SIZE[ftype]
        entry = struct.pack("<HHI", tag, ftype, count)
        if len(raw) <= 4:
            entry += raw.ljust(4, b"\x00")
        else:
            entry += struct.pack("<I", overflow_start + len(overflow))
            overflow += raw
            if len(overflow) % 2:  # out-of-line values start on word boundaries
                overflow += b"\x00"
        entry_bytes += entry

    out = bytearray()
    out += struct.pack("<2sHI", b"II", 42, ifd_offset)
    for p in planes:
        out += p
    out += struct.pack("<H", n_entries)
    out += entry_bytes
    out += struct.pack("<I", 0)
    out += overflow
    Path(path).write_bytes(bytes(out))
