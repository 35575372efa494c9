"""Direction-modulated line similarity, outlierness scores and rank index.

similarity(l, l') walks l''s pixel chain through l's influence band, summing
band value times |dot| of the two tangents, normalized by l''s chain length.
The measure is non-commutative. outlierness(l) is one minus the mean
rescaled similarity to all band neighbors; lines without neighbors are
maximal outliers.

The all-lines path avoids O(n^2) pairwise loops: chain entries of every line
are bucketed per pixel once, then each line sweeps its own band pixels and
consumes the resident entries in a single vectorized pass, subtracting its
own contribution exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray
from scipy import ndimage

from .density import SparseField, gaussian_peak, line_density
from .model import RasterizedLine, band_radius_for


@dataclass(frozen=True)
class InfluenceField:
    """A line's banded influence values plus the owning tangent per band pixel.

    The tangent stored at a band pixel is the line's tangent at the nearest
    chain pixel (Euclidean; deterministic tie-break by the distance
    transform's feature choice, identical for every consumer).
    """

    line_id: int
    grid_w: int
    grid_h: int
    pixels: NDArray[np.int32]       # (m, 2) (col, row)
    flat: NDArray[np.int64]         # row * grid_w + col, sorted ascending
    values: NDArray[np.float64]
    tangents: NDArray[np.float64]   # (m, 2)

    def lookup(self) -> dict[int, int]:
        """Flat pixel index -> position in the band arrays."""
        return {int(f): i for i, f in enumerate(self.flat)}

    def band_dict(self) -> dict[tuple[int, int], tuple[float, tuple[float, float]]]:
        """(col, row) -> (influence value, owning tangent); for inspection."""
        out = {}
        for i in range(len(self.flat)):
            c, r = int(self.pixels[i, 0]), int(self.pixels[i, 1])
            out[(c, r)] = (float(self.values[i]), (float(self.tangents[i, 0]), float(self.tangents[i, 1])))
        return out


@dataclass(frozen=True)
class OutlierIndex:
    """Per-line outlierness scores, ranks, normalized ranks and neighbor sets."""

    scores: dict[int, float]
    ranks: dict[int, int]
    normalized: dict[int, float]
    neighbors: dict[int, frozenset[int]]

    @property
    def n(self) -> int:
        return len(self.scores)


def influence_field(
    line: RasterizedLine,
    bandwidth_h: float,
    band_radius: int | None = None,
    grid_w: int = 512,
    grid_h: int = 512,
    field: SparseField | None = None,
) -> InfluenceField:
    """Build a line's influence band: density values + nearest-pixel tangents."""
    if field is None:
        field = line_density(line, bandwidth_h, band_radius, grid_w, grid_h)
    patch = field.patch
    ph, pw = patch.shape

    # Feature transform: nearest chain pixel for every patch cell.
    occupied = np.ones((ph, pw), dtype=bool)
    rr = line.pixels[:, 1] - field.row0
    cc = line.pixels[:, 0] - field.col0
    occupied[rr, cc] = False
    _, (near_r, near_c) = ndimage.distance_transform_edt(occupied, return_indices=True)

    # Tangent per chain cell, first traversal wins on revisits.
    tan_patch = np.zeros((ph, pw, 2), dtype=np.float64)
    flat_chain = rr.astype(np.int64) * pw + cc
    _, first_idx = np.unique(flat_chain, return_index=True)
    tan_patch[rr[first_idx], cc[first_idx]] = line.tangents[first_idx]

    band_r, band_c = np.nonzero(patch > 0.0)
    tangents = tan_patch[near_r[band_r, band_c], near_c[band_r, band_c]]
    pixels = np.empty((len(band_r), 2), dtype=np.int32)
    pixels[:, 0] = band_c + field.col0
    pixels[:, 1] = band_r + field.row0
    flat = pixels[:, 1].astype(np.int64) * grid_w + pixels[:, 0]
    order = np.argsort(flat, kind="stable")
    return InfluenceField(
        line_id=line.line_id,
        grid_w=grid_w,
        grid_h=grid_h,
        pixels=pixels[order],
        flat=flat[order],
        values=patch[band_r, band_c][order],
        tangents=tangents[order],
    )


def similarity(
    field: InfluenceField,
    other: RasterizedLine,
    lookup: dict[int, int] | None = None,
) -> float:
    """Raw influence of ``field``'s line on ``other`` (not rescaled).

    Sum over other's chain pixels of |tangent dot| * band value, divided by
    other's chain length; pixels outside the band contribute 0.
    """
    if other.is_empty:
        raise ValueError("similarity requires a nonempty line")
    if lookup is None:
        lookup = field.lookup()
    flat = other.pixels[:, 1].astype(np.int64) * field.grid_w + other.pixels[:, 0]
    total = 0.0
    for k, f in enumerate(flat):
        i = lookup.get(int(f))
        if i is None:
            continue
        dot = (
            field.tangents[i, 0] * other.tangents[k, 0]
            + field.tangents[i, 1] * other.tangents[k, 1]
        )
        total += abs(dot) * field.values[i]
    return total / len(other.pixels)


def outlierness_all(
    lines: list[RasterizedLine],
    bandwidth_h: float,
    band_radius: int | None = None,
    grid_w: int = 512,
    grid_h: int = 512,
    fields: list[InfluenceField] | None = None,
) -> OutlierIndex:
    """Score, rank and normalize outlierness for every line in one sweep."""
    if len(lines) < 2:
        raise ValueError("outlierness needs at least 2 lines")
    if band_radius is None:
        band_radius = band_radius_for(bandwidth_h)
    if fields is None:
        fields = [
            influence_field(ln, bandwidth_h, band_radius, grid_w, grid_h) for ln in lines
        ]

    n = len(lines)
    ids = np.array([ln.line_id for ln in lines], dtype=np.int64)

    # Global per-pixel buckets of chain entries (pixel, owner, tangent, weight).
    e_flat = np.concatenate(
        [ln.pixels[:, 1].astype(np.int64) * grid_w + ln.pixels[:, 0] for ln in lines]
    )
    e_owner = np.concatenate(
        [np.full(len(ln.pixels), i, dtype=np.int64) for i, ln in enumerate(lines)]
    )
    e_tan = np.concatenate([ln.tangents for ln in lines])
    e_w = np.concatenate(
        [np.full(len(ln.pixels), 1.0 / len(ln.pixels)) for ln in lines]
    )
    order = np.argsort(e_flat, kind="stable")
    e_flat = e_flat[order]
    e_owner = e_owner[order]
    e_tan = e_tan[order]
    e_w = e_w[order]
    uniq, starts = np.unique(e_flat, return_index=True)
    ends = np.append(starts[1:], len(e_flat))

    inv_peak = 1.0 / gaussian_peak(bandwidth_h)
    scores = np.empty(n, dtype=np.float64)
    neighbor_sets: list[frozenset[int]] = []
    for i, f in enumerate(fields):
        pos = np.searchsorted(uniq, f.flat)
        valid = (pos < len(uniq)) & (uniq[np.minimum(pos, len(uniq) - 1)] == f.flat)
        s = starts[pos[valid]]
        e = ends[pos[valid]]
        counts = e - s
        total = int(counts.sum())
        if total == 0:
            scores[i] = 1.0
            neighbor_sets.append(frozenset())
            continue
        # Expand [s, e) ranges into one flat gather index.
        base = np.repeat(s, counts)
        step = np.arange(total) - np.repeat(np.cumsum(counts) - counts, counts)
        gidx = base + step
        owners = e_owner[gidx]
        mask = owners != i
        if not np.any(mask):
            scores[i] = 1.0
            neighbor_sets.append(frozenset())
            continue
        band_val = np.repeat(f.values[valid], counts)
        band_tan = np.repeat(f.tangents[valid], counts, axis=0)
        dots = np.abs(np.einsum("ij,ij->i", band_tan, e_tan[gidx]))
        contrib = e_w[gidx] * dots * band_val
        nb = np.unique(owners[mask])
        sim_sum = float(contrib[mask].sum()) * inv_peak
        scores[i] = min(1.0, max(0.0, 1.0 - sim_sum / len(nb)))
        neighbor_sets.append(frozenset(int(ids[j]) for j in nb))

    rank_order = np.lexsort((ids, scores))
    ranks = np.empty(n, dtype=np.int64)
    ranks[rank_order] = np.arange(n)
    denom = n - 1
    return OutlierIndex(
        scores={int(ids[i]): float(scores[i]) for i in range(n)},
        ranks={int(ids[i]): int(ranks[i]) for i in range(n)},
        normalized={int(ids[i]): float(ranks[i]) / denom for i in range(n)},
        neighbors={int(ids[i]): neighbor_sets[i] for i in range(n)},
    )


def score_histogram(index: OutlierIndex, bins: int = 20) -> list[int]:
    """Histogram of outlierness scores over [0, 1] with ``bins`` buckets."""
    vals = np.fromiter(index.scores.values(), dtype=np.float64)
    hist, _ = np.histogram(vals, bins=bins, range=(0.0, 1.0))
    return [int(v) for v in hist]


def rescale(sim_raw: float, bandwidth_h: float) -> float:
    """Rescale a raw similarity by the kernel peak so scores stay in [0, 1]."""
    return sim_raw / gaussian_peak(bandwidth_h)
