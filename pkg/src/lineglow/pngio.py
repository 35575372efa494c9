"""Deterministic PNG encoding and a minimal raster chart for reports.

The encoder writes fixed-layout chunks at a fixed compression level and never
embeds timestamps or ancillary metadata, so identical pixel data always
produces identical bytes.
"""

from __future__ import annotations

import struct
import zlib
from pathlib import Path

import numpy as np
from numpy.typing import NDArray

_COMPRESS_LEVEL = 6


def _chunk(tag: bytes, data: bytes) -> bytes:
    return (
        struct.pack(">I", len(data))
        + tag
        + data
        + struct.pack(">I", zlib.crc32(tag + data) & 0xFFFFFFFF)
    )


def encode_png(image: NDArray) -> bytes:
    """Encode HxW (gray, 8/16-bit) or HxWx3 (8-bit RGB) pixels as PNG bytes."""
    arr = np.asarray(image)
    if arr.ndim == 2:
        color_type = 0
        if arr.dtype == np.uint16:
            bit_depth = 16
            raw_rows = arr.astype(">u2").tobytes()
            row_len = arr.shape[1] * 2
        else:
            bit_depth = 8
            raw_rows = arr.astype(np.uint8).tobytes()
            row_len = arr.shape[1]
    elif arr.ndim == 3 and arr.shape[2] == 3:
        color_type = 2
        bit_depth = 8
        raw_rows = arr.astype(np.uint8).tobytes()
        row_len = arr.shape[1] * 3
    else:
        raise ValueError("image must be HxW or HxWx3")
    height, width = arr.shape[:2]
    raw = b"".join(
        b"\x00" + raw_rows[r * row_len : (r + 1) * row_len] for r in range(height)
    )
    out = bytearray(b"\x89PNG\r\n\x1a\n")
    out += _chunk(b"IHDR", struct.pack(">IIBBBBB", width, height, bit_depth, color_type, 0, 0, 0))
    out += _chunk(b"IDAT", zlib.compress(raw, _COMPRESS_LEVEL))
    out += _chunk(b"IEND", b"")
    return bytes(out)


def write_png(path: str | Path, image: NDArray) -> None:
    Path(path).write_bytes(encode_png(image))


def encode_normal_map(normals: NDArray[np.float64]) -> NDArray[np.uint8]:
    """Unit normals to RGB via the (n + 1) / 2 convention."""
    return np.rint(np.clip((normals + 1.0) / 2.0, 0.0, 1.0) * 255.0).astype(np.uint8)


def encode_intensity(values: NDArray[np.float64]) -> NDArray[np.uint16]:
    """Intensity in [-1, 1] to 16-bit grayscale."""
    return np.rint(np.clip((values + 1.0) / 2.0, 0.0, 1.0) * 65535.0).astype(np.uint16)


def encode_provenance(provenance: NDArray[np.int64]) -> NDArray[np.uint8]:
    """Provenance codes to an 8-bit index image.

    0 = empty, 1 = low-frequency; contributing line ids cycle through 2..255.
    """
    out = np.zeros(provenance.shape, dtype=np.uint8)
    out[provenance == -1] = 1
    high = provenance >= 0
    out[high] = (provenance[high] % 254 + 2).astype(np.uint8)
    return out


# ---------------------------------------------------------------------------
# Tiny raster chart (axes, polylines, digit labels)
# ---------------------------------------------------------------------------

# 3x5 glyphs for digits plus '.', '-', 'e'; rows top to bottom, bits left to right.
_GLYPHS = {
    "0": (0b111, 0b101, 0b101, 0b101, 0b111),
    "1": (0b010, 0b110, 0b010, 0b010, 0b111),
    "2": (0b111, 0b001, 0b111, 0b100, 0b111),
    "3": (0b111, 0b001, 0b111, 0b001, 0b111),
    "4": (0b101, 0b101, 0b111, 0b001, 0b001),
    "5": (0b111, 0b100, 0b111, 0b001, 0b111),
    "6": (0b111, 0b100, 0b111, 0b101, 0b111),
    "7": (0b111, 0b001, 0b010, 0b010, 0b010),
    "8": (0b111, 0b101, 0b111, 0b101, 0b111),
    "9": (0b111, 0b101, 0b111, 0b001, 0b111),
    ".": (0b000, 0b000, 0b000, 0b000, 0b010),
    "-": (0b000, 0b000, 0b111, 0b000, 0b000),
    "e": (0b000, 0b111, 0b110, 0b100, 0b111),
}


def _draw_text(img: NDArray[np.uint8], x: int, y: int, text: str, color) -> None:
    for ch in text:
        glyph = _GLYPHS.get(ch)
        if glyph is not None:
            for gy, bits in enumerate(glyph):
                for gx in range(3):
                    if bits & (0b100 >> gx):
                        yy, xx = y + gy, x + gx
                        if 0 <= yy < img.shape[0] and 0 <= xx < img.shape[1]:
                            img[yy, xx] = color
        x += 4


def _draw_line(img: NDArray[np.uint8], x0: float, y0: float, x1: float, y1: float, color) -> None:
    steps = int(max(abs(x1 - x0), abs(y1 - y0))) + 1
    ts = np.linspace(0.0, 1.0, steps + 1)
    xs = np.rint(x0 + ts * (x1 - x0)).astype(int)
    ys = np.rint(y0 + ts * (y1 - y0)).astype(int)
    ok = (xs >= 0) & (xs < img.shape[1]) & (ys >= 0) & (ys < img.shape[0])
    img[ys[ok], xs[ok]] = color


_SERIES_COLORS = ((31, 119, 180), (255, 127, 14), (44, 160, 44), (214, 39, 40))


def line_chart(
    xs: list[float],
    series: dict[str, list[float]],
    width: int = 480,
    height: int = 320,
) -> NDArray[np.uint8]:
    """A plain line chart as an RGB array: axes, series, numeric tick labels."""
    img = np.full((height, width, 3), 255, dtype=np.uint8)
    ml, mr, mt, mb = 46, 12, 12, 26
    x0p, x1p = ml, width - mr
    y0p, y1p = height - mb, mt
    axis = (40, 40, 40)
    _draw_line(img, x0p, y0p, x1p, y0p, axis)
    _draw_line(img, x0p, y0p, x0p, y1p, axis)

    all_y = [v for vals in series.values() for v in vals]
    x_lo, x_hi = min(xs), max(xs)
    y_lo, y_hi = 0.0, max(all_y) if all_y else 1.0
    if x_hi == x_lo:
        x_hi = x_lo + 1.0
    if y_hi == y_lo:
        y_hi = y_lo + 1.0

    def px(x: float) -> float:
        return x0p + (x - x_lo) / (x_hi - x_lo) * (x1p - x0p)

    def py(y: float) -> float:
        return y0p + (y - y_lo) / (y_hi - y_lo) * (y1p - y0p)

    for frac in (0.0, 0.5, 1.0):
        xv = x_lo + frac * (x_hi - x_lo)
        yv = y_lo + frac * (y_hi - y_lo)
        _draw_line(img, px(xv), y0p, px(xv), y0p + 3, axis)
        _draw_text(img, int(px(xv)) - 8, y0p + 6, _fmt(xv), axis)
        _draw_line(img, x0p - 3, py(yv), x0p, py(yv), axis)
        _draw_text(img, 4, int(py(yv)) - 2, _fmt(yv), axis)

    for k, (name, vals) in enumerate(sorted(series.items())):
        color = _SERIES_COLORS[k % len(_SERIES_COLORS)]
        for i in range(1, len(xs)):
            _draw_line(img, px(xs[i - 1]), py(vals[i - 1]), px(xs[i]), py(vals[i]), color)
        ly = mt + 8 * k
        _draw_line(img, x1p - 34, ly, x1p - 22, ly, color)
        _draw_text(img, x1p - 18, ly - 2, str(k), color)
    return img


def _fmt(v: float) -> str:
    if v == 0:
        return "0"
    if abs(v) >= 1000:
        return str(int(round(v)))
    if abs(v) >= 1:
        return f"{v:.1f}".rstrip("0").rstrip(".")
    return f"{v:.3f}".rstrip("0")
