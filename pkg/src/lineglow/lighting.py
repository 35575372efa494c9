"""Per-bin light directions and Lambertian intensity.

Light strikes lines perpendicularly: each bin's light direction is the local
dominant line orientation rotated 90 degrees, lifted to a fixed 60-degree
elevation. High-frequency bins take the contributor line's tangent; elsewhere
a weighted orientation tensor over the kernel window supplies the dominant
axis, its sign resolved against the weighted mean tangent. Azimuth angles are
measured counterclockwise from +x (east) with north pointing up on screen
(decreasing row).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from .model import RasterizedLine, RenderParams, ScalarGrid
from .normals import HighFreqField, NormalGrid
from .outlierness import InfluenceField

ELEVATION_DEG = 60.0
DEFAULT_AZIMUTH_DEG = 135.0  # northwest on screen


@dataclass
class LightField:
    """Per-pixel unit light vectors plus the dominant 2-D orientation."""

    directions: NDArray[np.float64]     # (H, W, 3)
    dominant2d: NDArray[np.float64]     # (H, W, 2), zero where undefined
    defined: NDArray[np.bool_]          # dominant2d defined here
    mode: str
    empty_z: float                      # light z over empty bins


@dataclass
class IntensityMap:
    """Lambertian intensity I = n . l with the scaling anchors."""

    grid: ScalarGrid
    i_empty: float
    i_min: float


def azimuth_to_light(azimuth_deg: float, elevation_deg: float) -> NDArray[np.float64]:
    """Unit light vector for an azimuth/elevation pair (north = screen up)."""
    az = math.radians(azimuth_deg)
    el = math.radians(elevation_deg)
    return np.array(
        [math.cos(az) * math.cos(el), -math.sin(az) * math.cos(el), math.sin(el)]
    )


def perpendicular_light(dominant: NDArray[np.float64]) -> NDArray[np.float64]:
    """Lift the +90-degree rotation of a dominant 2-vector to 60 degrees."""
    cos_el = math.cos(math.radians(ELEVATION_DEG))
    sin_el = math.sin(math.radians(ELEVATION_DEG))
    out = np.empty(dominant.shape[:-1] + (3,), dtype=np.float64)
    out[..., 0] = -dominant[..., 1] * cos_el
    out[..., 1] = dominant[..., 0] * cos_el
    out[..., 2] = sin_el
    return out


def clamp_azimuth(azimuth: float, center: float, half_width: float) -> float:
    """Clamp an azimuth into [center - half_width, center + half_width]."""
    delta = (azimuth - center + 180.0) % 360.0 - 180.0
    if delta > half_width:
        delta = half_width
    elif delta < -half_width:
        delta = -half_width
    return center + delta


def dominant_orientation(
    tangents: NDArray[np.float64], weights: NDArray[np.float64]
) -> NDArray[np.float64] | None:
    """Principal axis of the weighted orientation tensor, sign-stabilized.

    Returns None when the total weight is zero. The tensor is sign-invariant;
    the returned vector's sign makes the dot with the weighted mean tangent
    non-negative (zero mean: x >= 0, then y >= 0).
    """
    t = np.asarray(tangents, dtype=np.float64).reshape(-1, 2)
    w = np.asarray(weights, dtype=np.float64).reshape(-1)
    total = float(w.sum())
    if total == 0.0:
        return None
    txx = float(np.sum(w * t[:, 0] * t[:, 0]))
    txy = float(np.sum(w * t[:, 0] * t[:, 1]))
    tyy = float(np.sum(w * t[:, 1] * t[:, 1]))
    theta = 0.5 * math.atan2(2.0 * txy, txx - tyy)
    v = np.array([math.cos(theta), math.sin(theta)])
    mean = np.array([float(np.sum(w * t[:, 0])), float(np.sum(w * t[:, 1]))])
    return _resolve_sign(v, mean)


def _resolve_sign(v: NDArray[np.float64], mean: NDArray[np.float64]) -> NDArray[np.float64]:
    d = float(v @ mean)
    if d > 0.0:
        return v
    if d < 0.0:
        return -v
    if v[0] != 0.0:
        return v if v[0] > 0.0 else -v
    return v if v[1] >= 0.0 else -v


# ---------------------------------------------------------------------------
# Grid-scale machinery
# ---------------------------------------------------------------------------


@dataclass
class OrientationAggregate:
    """Per-pixel sums of influence-weighted tangent products over all lines."""

    txx: NDArray[np.float64]
    txy: NDArray[np.float64]
    tyy: NDArray[np.float64]
    mx: NDArray[np.float64]
    my: NDArray[np.float64]
    wsum: NDArray[np.float64]


def build_orientation_aggregate(
    fields: list[InfluenceField], grid_w: int, grid_h: int
) -> OrientationAggregate:
    size = grid_w * grid_h
    flat = np.concatenate([f.flat for f in fields]) if fields else np.empty(0, np.int64)
    vals = np.concatenate([f.values for f in fields]) if fields else np.empty(0)
    tans = np.concatenate([f.tangents for f in fields]) if fields else np.empty((0, 2))
    tx, ty = tans[:, 0], tans[:, 1]

    def acc(w):
        return np.bincount(flat, weights=w, minlength=size).reshape(grid_h, grid_w)

    return OrientationAggregate(
        txx=acc(vals * tx * tx),
        txy=acc(vals * tx * ty),
        tyy=acc(vals * ty * ty),
        mx=acc(vals * tx),
        my=acc(vals * ty),
        wsum=acc(vals),
    )


def _box_sum(a: NDArray[np.float64], n: int) -> NDArray[np.float64]:
    """Sum over the n x n window around each pixel, clipped at borders.

    Summed locally (not via a summed-area table) so tiny window sums are not
    swamped by cancellation error from large running totals.
    """
    r = n // 2
    padded = np.pad(a, r, mode="constant")
    windows = np.lib.stride_tricks.sliding_window_view(padded, (n, n))
    return windows.sum(axis=(-2, -1))


def _window_orientation(
    agg: OrientationAggregate, kernel_n: int
) -> tuple[NDArray[np.float64], NDArray[np.bool_]]:
    """Dominant orientation per pixel from box-summed tensors."""
    txx = _box_sum(agg.txx, kernel_n)
    txy = _box_sum(agg.txy, kernel_n)
    tyy = _box_sum(agg.tyy, kernel_n)
    mx = _box_sum(agg.mx, kernel_n)
    my = _box_sum(agg.my, kernel_n)
    wsum = _box_sum(agg.wsum, kernel_n)

    theta = 0.5 * np.arctan2(2.0 * txy, txx - tyy)
    vx = np.cos(theta)
    vy = np.sin(theta)
    dot = vx * mx + vy * my
    flip = (dot < 0.0) | (
        (dot == 0.0) & ((vx < 0.0) | ((vx == 0.0) & (vy < 0.0)))
    )
    vx = np.where(flip, -vx, vx)
    vy = np.where(flip, -vy, vy)
    dominant = np.stack([vx, vy], axis=-1)
    defined = wsum > 0.0
    return dominant, defined


def light_field(
    high: HighFreqField,
    agg: OrientationAggregate,
    params: RenderParams,
    cluster_map: NDArray[np.int64] | None = None,
) -> LightField:
    """Per-pixel light vectors for the configured lighting mode.

    Adaptive mode: contributor tangent on high-frequency pixels, windowed
    orientation elsewhere, global default over empty bins. Fixed mode: one
    vector everywhere. Manual mode: per-cluster azimuth (sector-clamped) by
    the pixel's dominant cluster.
    """
    h, w = high.mask.shape
    default = azimuth_to_light(params.global_azimuth, ELEVATION_DEG)

    if params.lighting == "fixed_global":
        vec = azimuth_to_light(params.global_azimuth, params.global_elevation)
        directions = np.broadcast_to(vec, (h, w, 3)).copy()
        return LightField(
            directions=directions,
            dominant2d=np.zeros((h, w, 2)),
            defined=np.zeros((h, w), dtype=bool),
            mode=params.lighting,
            empty_z=float(vec[2]),
        )

    if params.lighting == "per_cluster_manual":
        directions = np.broadcast_to(default, (h, w, 3)).copy()
        if cluster_map is not None:
            for cid, cl in sorted(params.cluster_lights.items()):
                az = clamp_azimuth(cl.azimuth, cl.sector_center, cl.sector_half_width)
                vec = azimuth_to_light(az, cl.elevation)
                directions[cluster_map == cid] = vec
        return LightField(
            directions=directions,
            dominant2d=np.zeros((h, w, 2)),
            defined=np.zeros((h, w), dtype=bool),
            mode=params.lighting,
            empty_z=float(default[2]),
        )

    # Adaptive: perpendicular light per bin.
    dominant, defined = _window_orientation(agg, params.kernel_n)
    dominant = np.where(high.mask[..., None], high.tangents, dominant)
    defined = defined | high.mask
    directions = perpendicular_light(dominant)
    directions[~defined] = default
    dominant = np.where(defined[..., None], dominant, 0.0)
    return LightField(
        directions=directions,
        dominant2d=dominant,
        defined=defined,
        mode=params.lighting,
        empty_z=float(default[2]),
    )


def intensity(n_structure: NormalGrid, lights: LightField) -> IntensityMap:
    """Lambertian shading I = n . l and the empty/min anchors for scaling."""
    if n_structure.normals.shape != lights.directions.shape:
        raise ValueError("normal map and light field dimensions do not match")
    vals = np.einsum("ijk,ijk->ij", n_structure.normals, lights.directions)
    return IntensityMap(
        grid=ScalarGrid(vals),
        i_empty=float(lights.empty_z),
        i_min=float(vals.min()),
    )


def dominant_cluster_field(
    fields: list[InfluenceField],
    lines: list[RasterizedLine],
    grid_w: int,
    grid_h: int,
) -> NDArray[np.int64]:
    """Per-pixel cluster of the strongest-influence line; -1 where uncovered.

    Ties on influence value resolve to the smaller line id.
    """
    best_val = np.zeros((grid_h, grid_w), dtype=np.float64)
    best_id = np.full((grid_h, grid_w), np.iinfo(np.int64).max, dtype=np.int64)
    winner = np.full((grid_h, grid_w), -1, dtype=np.int64)
    cluster_of = {ln.line_id: (-1 if ln.cluster is None else ln.cluster) for ln in lines}
    for f in fields:
        rows = f.pixels[:, 1]
        cols = f.pixels[:, 0]
        cur_v = best_val[rows, cols]
        cur_i = best_id[rows, cols]
        win = (f.values > cur_v) | ((f.values == cur_v) & (f.line_id < cur_i))
        r, c = rows[win], cols[win]
        best_val[r, c] = f.values[win]
        best_id[r, c] = f.line_id
        winner[r, c] = cluster_of.get(f.line_id, -1)
    return winner
