"""Minimal PNG reader for 8-bit grayscale/RGB(A) benchmark imagery."""

from __future__ import annotations

import struct
import zlib
from pathlib import Path

import numpy as np

from ..errors import CorruptFileError, UnsupportedLayoutError
from .model import GeoRef, Raster

SIGNATURE = b"\x89PNG\r\n\x1a\n"

_CHANNELS = {0: 1, 2: 3, 4: 2, 6: 4}


def read_png(path: str | Path) -> Raster:
    buf = Path(path).read_bytes()
    if not buf.startswith(SIGNATURE):
        raise CorruptFileError("not a PNG file")
    pos = len(SIGNATURE)
    width = height = channels = None
    idat = b""
    while pos + 8 <= len(buf):
        (length,) = struct.unpack(">I", buf[pos:pos + 4])
        ctype = buf[pos + 4:pos + 8]
        body = buf[pos + 8:pos + 8 + length]
        if len(body) != length:
            raise CorruptFileError("truncated PNG chunk")
        if ctype == b"IHDR":
            width, height, depth, color, comp, filt, interlace = struct.unpack(
                ">IIBBBBB", body)
            if depth != 8:
                raise UnsupportedLayoutError(f"PNG bit depth {depth} not supported")
            if color not in _CHANNELS:
                raise UnsupportedLayoutError(f"PNG color type {color} not supported")
            if interlace != 0:
                raise UnsupportedLayoutError("interlaced PNG not supported")
            channels = _CHANNELS[color]
        elif ctype == b"IDAT":
            idat += body
        elif ctype == b"IEND":
            break
        pos += 12 + length
    if width is None or channels is None:
        raise CorruptFileError("PNG missing IHDR")
    try:
        raw = zlib.decompress(idat)
    except zlib.error as exc:
        raise CorruptFileError(f"bad PNG stream: {exc}") from exc

    stride = width * channels
    if len(raw) < height * (stride + 1):
        raise CorruptFileError("PNG pixel data too short")
    img = np.zeros((height, stride), dtype=np.uint8)
    prev = np.zeros(stride, dtype=np.uint8)
    for row in range(height):
        offset = row * (stride + 1)
        ftype = raw[offset]
        line = np.frombuffer(raw, dtype=np.uint8, count=stride, offset=offset + 1).copy()
        img[row] = _unfilter(ftype, line, prev, channels)
        prev = img[row]
    data = img.reshape(height, width, channels).transpose(2, 0, 1)
    return Raster(np.ascontiguousarray(data), geo=GeoRef())


def _unfilter(ftype: int, line: np.ndarray, prev: np.ndarray, bpp: int) -> np.ndarray:
    if ftype == 0:
        return line
    if ftype == 2:
        return (line.astype(np.int32) + prev).astype(np.uint8)
    out = np.zeros_like(line)
    for i in range(line.size):
        a = int(out[i - bpp]) if i >= bpp else 0
        b = int(prev[i])
        c = int(prev[i - bpp]) if i >= bpp else 0
        x = int(line[i])
        if ftype == 1:
            val = x + a
        elif ftype == 3:
            val = x + (a + b) // 2
        elif ftype == 4:
            p = a + b - c
            pa, pb, pc = abs(p - a), abs(p - b), abs(p - c)
            if pa <= pb and pa <= pc:
                val = x + a
            elif pb <= pc:
                val = x + b
            else:
                val = x + c
        else:
            raise CorruptFileError(f"unknown PNG filter type {ftype}")
        out[i] = val & 0xFF
    return out
