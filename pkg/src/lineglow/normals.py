"""Structural normal maps: density-gradient base, per-line detail, composition.

The low-frequency map is the density-gradient normal field. The
high-frequency map covers the kernel footprints of the mu/sigma-selected
lines; where footprints overlap, a single contributing line wins by smallest
(delta to mu, perpendicular distance, line id), and the pixel takes the
gradient normal of that line's own influence ridge. Composition is
prioritized replacement, never blending.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray
from scipy import ndimage

from .model import RasterizedLine, ScalarGrid
from .density import DensityField

# Provenance codes for NormalGrid; values >= 0 are contributing line ids.
PROV_EMPTY = -2
PROV_LOW = -1


@dataclass
class NormalGrid:
    """Unit normals per pixel (H, W, 3) with per-pixel provenance codes."""

    normals: NDArray[np.float64]
    provenance: NDArray[np.int64]

    @property
    def width(self) -> int:
        return self.normals.shape[1]

    @property
    def height(self) -> int:
        return self.normals.shape[0]


@dataclass(frozen=True)
class Selection:
    """The sigma-sized subset of lines closest to the focus mu in rank space."""

    mu: float
    sigma: float
    selected: tuple[int, ...]          # ascending (delta, line_id)
    delta: dict[int, float]

    def __contains__(self, line_id: int) -> bool:
        return line_id in set(self.selected)


@dataclass
class HighFreqField:
    """High-frequency normals, defined only where ``mask`` is set."""

    normals: NDArray[np.float64]        # (H, W, 3), valid under mask
    mask: NDArray[np.bool_]             # P_high
    contributor: NDArray[np.int64]      # line id per pixel, -1 outside mask
    tangents: NDArray[np.float64]       # contributor tangent, (H, W, 2)


def select_lines(index, mu: float, sigma: float) -> Selection:
    """Pick the round(sigma * n) lines with smallest |l' - mu|, ties by id."""
    mu = min(1.0, max(0.0, float(mu)))
    sigma = min(1.0, max(0.0, float(sigma)))
    ids = sorted(index.normalized)
    n = len(ids)
    k = int(np.floor(sigma * n + 0.5))
    delta = {i: abs(index.normalized[i] - mu) for i in ids}
    ordered = sorted(ids, key=lambda i: (delta[i], i))
    return Selection(mu=mu, sigma=sigma, selected=tuple(ordered[:k]), delta=delta)


def gradient_normals(field: NDArray[np.float64], eta: float) -> NDArray[np.float64]:
    """normalize(-dF/dx, -dF/dy, 1/eta) with central differences, one-sided at borders."""
    if eta <= 0:
        raise ValueError("eta must be > 0")
    gy, gx = np.gradient(field)
    out = np.empty(field.shape + (3,), dtype=np.float64)
    out[..., 0] = -gx
    out[..., 1] = -gy
    out[..., 2] = 1.0 / eta
    norm = np.sqrt(np.sum(out * out, axis=-1))
    out /= norm[..., np.newaxis]
    flat = (gx == 0.0) & (gy == 0.0)
    out[flat] = (0.0, 0.0, 1.0)
    return out


def low_freq_normals(density: DensityField | ScalarGrid, eta: float) -> NormalGrid:
    """Density-gradient normal map; flat regions yield (0, 0, 1)."""
    grid = density.grid if isinstance(density, DensityField) else density
    normals = gradient_normals(grid.data, eta)
    prov = np.full(grid.data.shape, PROV_LOW, dtype=np.int64)
    return NormalGrid(normals=normals, provenance=prov)


def _line_detail_patch(
    line: RasterizedLine,
    bandwidth_h: float,
    eta_high: float,
    grid_w: int,
    grid_h: int,
) -> tuple[int, int, NDArray[np.float64], NDArray[np.float64], NDArray[np.float64]]:
    """Distance, normals and nearest-chain tangents over the footprint bbox.

    Returns (col0, row0, dist, normals, tangents) on a patch covering the
    footprint plus a one-pixel ring (clipped to the grid) so interior
    gradients use central differences.
    """
    fp = line.footprint
    col0 = max(int(fp[:, 0].min()) - 1, 0)
    row0 = max(int(fp[:, 1].min()) - 1, 0)
    col1 = min(int(fp[:, 0].max()) + 1, grid_w - 1)
    row1 = min(int(fp[:, 1].max()) + 1, grid_h - 1)
    ph, pw = row1 - row0 + 1, col1 - col0 + 1

    occupied = np.ones((ph, pw), dtype=bool)
    rr = line.pixels[:, 1] - row0
    cc = line.pixels[:, 0] - col0
    occupied[rr, cc] = False
    dist, (near_r, near_c) = ndimage.distance_transform_edt(occupied, return_indices=True)

    # Unit-peak Gaussian ridge profile: the normal encodes the ridge shape,
    # not the line's density mass, so detail relief is dataset-independent.
    ridge = np.exp(-(dist * dist) / (2.0 * bandwidth_h * bandwidth_h))
    normals = gradient_normals(ridge, eta_high)

    tan_patch = np.zeros((ph, pw, 2), dtype=np.float64)
    flat_chain = rr.astype(np.int64) * pw + cc
    _, first_idx = np.unique(flat_chain, return_index=True)
    tan_patch[rr[first_idx], cc[first_idx]] = line.tangents[first_idx]
    tangents = tan_patch[near_r, near_c]
    return col0, row0, dist, normals, tangents


def high_freq_normals(
    selection: Selection,
    lines: list[RasterizedLine],
    bandwidth_h: float,
    eta_high: float,
    grid_w: int,
    grid_h: int,
) -> HighFreqField:
    """Per-line detail normals over the union of selected footprints.

    Overlaps resolve to the unique contributor with the smallest
    (delta, distance, id); a selected line contributes over its entire
    footprint or not at all.
    """
    normals = np.zeros((grid_h, grid_w, 3), dtype=np.float64)
    normals[..., 2] = 1.0
    mask = np.zeros((grid_h, grid_w), dtype=bool)
    contributor = np.full((grid_h, grid_w), -1, dtype=np.int64)
    tangents = np.zeros((grid_h, grid_w, 2), dtype=np.float64)
    best_delta = np.full((grid_h, grid_w), np.inf)
    best_dist = np.full((grid_h, grid_w), np.inf)
    best_id = np.full((grid_h, grid_w), np.iinfo(np.int64).max, dtype=np.int64)

    by_id = {ln.line_id: ln for ln in lines}
    for lid in selection.selected:
        line = by_id.get(lid)
        if line is None or line.is_empty:
            continue
        delta = selection.delta[lid]
        col0, row0, dist, n_patch, t_patch = _line_detail_patch(
            line, bandwidth_h, eta_high, grid_w, grid_h
        )
        fr = line.footprint[:, 1]
        fc = line.footprint[:, 0]
        pr = fr - row0
        pc = fc - col0
        d = dist[pr, pc]
        cur_delta = best_delta[fr, fc]
        cur_dist = best_dist[fr, fc]
        cur_id = best_id[fr, fc]
        win = (delta < cur_delta) | (
            (delta == cur_delta) & ((d < cur_dist) | ((d == cur_dist) & (lid < cur_id)))
        )
        fr_w, fc_w = fr[win], fc[win]
        best_delta[fr_w, fc_w] = delta
        best_dist[fr_w, fc_w] = d[win]
        best_id[fr_w, fc_w] = lid
        normals[fr_w, fc_w] = n_patch[pr[win], pc[win]]
        tangents[fr_w, fc_w] = t_patch[pr[win], pc[win]]
        contributor[fr_w, fc_w] = lid
        mask[fr, fc] = True

    return HighFreqField(normals=normals, mask=mask, contributor=contributor, tangents=tangents)


def compose(n_low: NormalGrid, n_high: HighFreqField) -> NormalGrid:
    """Prioritized replacement: detail normal where one exists, base elsewhere."""
    if n_low.normals.shape[:2] != n_high.normals.shape[:2]:
        raise ValueError("normal map dimensions do not match")
    normals = n_low.normals.copy()
    normals[n_high.mask] = n_high.normals[n_high.mask]
    prov = np.full(normals.shape[:2], PROV_LOW, dtype=np.int64)
    prov[n_high.mask] = n_high.contributor[n_high.mask]
    return NormalGrid(normals=normals, provenance=prov)


def empty_high_freq(grid_w: int, grid_h: int) -> HighFreqField:
    """The sigma = 0 case: no detail pixels at all."""
    normals = np.zeros((grid_h, grid_w, 3), dtype=np.float64)
    normals[..., 2] = 1.0
    return HighFreqField(
        normals=normals,
        mask=np.zeros((grid_h, grid_w), dtype=bool),
        contributor=np.full((grid_h, grid_w), -1, dtype=np.int64),
        tangents=np.zeros((grid_h, grid_w, 2), dtype=np.float64),
    )
