"""Discretized curve density estimation.

A line's density contribution places an isotropic Gaussian (std ``h``) at the
center of every rasterized chain pixel and normalizes by the chain length.
Contributions are truncated to a square band of half-width ``band_radius``
around each chain pixel; the isotropic kernel is separable, so the per-line
field is two 1-D convolutions of the chain indicator over a local patch.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray
from scipy import ndimage

from .model import RasterizedLine, ScalarGrid, band_radius_for


def gaussian_peak(h: float) -> float:
    """Value of the isotropic 2-D Gaussian kernel at distance 0."""
    return 1.0 / (2.0 * math.pi * h * h)


@dataclass(frozen=True)
class SparseField:
    """A per-line scalar field stored as a dense patch over its bounding box.

    ``col0``/``row0`` anchor the patch in grid coordinates. Cells with value 0
    are outside the band.
    """

    line_id: int
    col0: int
    row0: int
    patch: NDArray[np.float64]

    @property
    def band_mask(self) -> NDArray[np.bool_]:
        return self.patch > 0.0

    def value_at(self, col: int, row: int) -> float:
        r = row - self.row0
        c = col - self.col0
        if 0 <= r < self.patch.shape[0] and 0 <= c < self.patch.shape[1]:
            return float(self.patch[r, c])
        return 0.0

    def band_pixels(self) -> tuple[NDArray[np.int32], NDArray[np.float64]]:
        """(m, 2) array of (col, row) band pixels and their values."""
        rows, cols = np.nonzero(self.band_mask)
        pix = np.empty((len(rows), 2), dtype=np.int32)
        pix[:, 0] = cols + self.col0
        pix[:, 1] = rows + self.row0
        return pix, self.patch[rows, cols]


@dataclass
class DensityField:
    """Aggregate density F over the grid plus per-line peak diagnostics."""

    grid: ScalarGrid
    bandwidth_h: float
    per_line_max: dict[int, float]

    @property
    def coverage(self) -> NDArray[np.bool_]:
        """Pixels covered by at least one line's band."""
        return self.grid.data > 0.0

    @property
    def f_max(self) -> float:
        return float(self.grid.data.max()) if self.grid.data.size else 0.0

    def dump_f32(self, path) -> None:
        """Row-major little-endian float32 dump, for external oracles."""
        self.grid.data.astype("<f4").tofile(path)


def _gauss_1d(h: float, radius: int) -> NDArray[np.float64]:
    xs = np.arange(-radius, radius + 1, dtype=np.float64)
    return np.exp(-(xs * xs) / (2.0 * h * h)) / (math.sqrt(2.0 * math.pi) * h)


def line_density(
    line: RasterizedLine,
    bandwidth_h: float,
    band_radius: int | None = None,
    grid_w: int | None = None,
    grid_h: int | None = None,
) -> SparseField:
    """Banded density contribution of a single rasterized line.

    The value at pixel p is (1/|P|) * sum over chain pixels q within the band
    window of N_h(|p - q|); the separable form keeps this exact for the
    square truncation window. Patch extents are clipped to the grid when grid
    dimensions are given.
    """
    if line.is_empty:
        raise ValueError("line_density requires a nonempty rasterized line")
    if bandwidth_h <= 0:
        raise ValueError("bandwidth_h must be > 0")
    if band_radius is None:
        band_radius = band_radius_for(bandwidth_h)
    if band_radius < 1:
        raise ValueError("band_radius must be >= 1")

    pix = line.pixels
    cmin, rmin = pix.min(axis=0)
    cmax, rmax = pix.max(axis=0)
    col0 = int(cmin) - band_radius
    row0 = int(rmin) - band_radius
    col1 = int(cmax) + band_radius
    row1 = int(rmax) + band_radius
    if grid_w is not None:
        col0 = max(col0, 0)
        col1 = min(col1, grid_w - 1)
    if grid_h is not None:
        row0 = max(row0, 0)
        row1 = min(row1, grid_h - 1)

    patch = np.zeros((row1 - row0 + 1, col1 - col0 + 1), dtype=np.float64)
    np.add.at(patch, (pix[:, 1] - row0, pix[:, 0] - col0), 1.0)
    kern = _gauss_1d(bandwidth_h, band_radius)
    patch = ndimage.convolve1d(patch, kern, axis=0, mode="constant", cval=0.0)
    patch = ndimage.convolve1d(patch, kern, axis=1, mode="constant", cval=0.0)
    patch /= len(pix)
    return SparseField(line_id=line.line_id, col0=col0, row0=row0, patch=patch)


def aggregate(
    lines: list[RasterizedLine],
    bandwidth_h: float,
    band_radius: int | None = None,
    grid_w: int = 512,
    grid_h: int = 512,
    fields: list[SparseField] | None = None,
) -> DensityField:
    """Sum every line's banded contribution into the dense density field F.

    Precomputed sparse fields may be passed to avoid recomputation; they must
    match ``lines`` one-to-one.
    """
    if not lines:
        raise ValueError("aggregate requires at least one line")
    dense = np.zeros((grid_h, grid_w), dtype=np.float64)
    per_line_max: dict[int, float] = {}
    if fields is None:
        fields = [line_density(ln, bandwidth_h, band_radius, grid_w, grid_h) for ln in lines]
    for f in fields:
        r0, c0 = f.row0, f.col0
        ph, pw = f.patch.shape
        rs, re = max(r0, 0), min(r0 + ph, grid_h)
        cs, ce = max(c0, 0), min(c0 + pw, grid_w)
        if rs >= re or cs >= ce:
            per_line_max[f.line_id] = 0.0
            continue
        dense[rs:re, cs:ce] += f.patch[rs - r0 : re - r0, cs - c0 : ce - c0]
        per_line_max[f.line_id] = float(f.patch.max())
    return DensityField(grid=ScalarGrid(dense), bandwidth_h=bandwidth_h, per_line_max=per_line_max)
