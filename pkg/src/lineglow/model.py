"""Polylines, grids, render parameters, dataset ingestion and rasterization.

Grid convention: a pixel is addressed as (col, row) with col = x growing
right and row = y growing down (image order). One bin of every downstream
computation corresponds to one pixel of this grid.
"""

from __future__ import annotations

import csv
import json
import logging
import math
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np
from numpy.typing import NDArray

log = logging.getLogger("lineglow")

# Fraction of the shorter grid side kept free around the data bounding box,
# so kernels near the border do not clip dominant structures.
DEFAULT_MARGIN = 0.02

MIN_GRID_SIDE = 16

UNIT_NORM_TOL = 1e-6


class IngestError(ValueError):
    """Raised for malformed or empty input datasets."""


@dataclass(frozen=True)
class Polyline:
    """An ordered sequence of 2D vertices with an id and optional cluster label.

    Vertices are stored as an (n, 2) float array in data units. Consecutive
    duplicate vertices are dropped at construction; fewer than 2 distinct
    vertices is an error.
    """

    id: int
    vertices: NDArray[np.float64]
    cluster: int | None = None

    def __post_init__(self) -> None:
        verts = np.asarray(self.vertices, dtype=np.float64)
        if verts.ndim != 2 or verts.shape[1] != 2:
            raise ValueError(f"line {self.id}: vertices must be an (n, 2) array")
        keep = np.ones(len(verts), dtype=bool)
        keep[1:] = np.any(verts[1:] != verts[:-1], axis=1)
        verts = verts[keep]
        if len(verts) < 2:
            raise ValueError(f"line {self.id}: needs at least 2 distinct vertices")
        if not np.all(np.isfinite(verts)):
            raise ValueError(f"line {self.id}: non-finite vertex")
        object.__setattr__(self, "vertices", verts)

    def reversed(self) -> Polyline:
        return replace(self, vertices=self.vertices[::-1].copy())


@dataclass(frozen=True)
class GridTransform:
    """Affine data -> grid map: col = sx*x + tx, row = sy*y + ty.

    |sx| == |sy| always (aspect preserved by letterboxing); sy is negative so
    increasing data y points up on screen.
    """

    sx: float
    sy: float
    tx: float
    ty: float

    def apply(self, points: NDArray[np.float64]) -> NDArray[np.float64]:
        pts = np.asarray(points, dtype=np.float64)
        out = np.empty_like(pts)
        out[..., 0] = self.sx * pts[..., 0] + self.tx
        out[..., 1] = self.sy * pts[..., 1] + self.ty
        return out


@dataclass(frozen=True)
class RasterizedLine:
    """Pixel chain of a polyline plus per-pixel tangents and kernel footprint.

    ``pixels`` is the 8-connected chain in traversal order, (n, 2) int arrays
    of (col, row). ``tangents`` holds the unit direction of the segment that
    produced each chain pixel. ``footprint`` is the kernel_n x kernel_n
    Minkowski dilation of the chain, clipped to the grid, as unique (col, row)
    rows sorted lexicographically.
    """

    line_id: int
    pixels: NDArray[np.int32]
    tangents: NDArray[np.float64]
    footprint: NDArray[np.int32]
    cluster: int | None = None

    @property
    def is_empty(self) -> bool:
        return len(self.pixels) == 0

    def tangent_lookup(self) -> dict[tuple[int, int], NDArray[np.float64]]:
        """Pixel -> tangent map; first segment along the polyline wins."""
        out: dict[tuple[int, int], NDArray[np.float64]] = {}
        for (c, r), t in zip(self.pixels, self.tangents):
            out.setdefault((int(c), int(r)), t)
        return out


@dataclass
class ScalarGrid:
    """A width x height field of real values over pixel bins (row-major)."""

    data: NDArray[np.float64]

    def __post_init__(self) -> None:
        self.data = np.asarray(self.data, dtype=np.float64)
        if self.data.ndim != 2:
            raise ValueError("ScalarGrid data must be 2-D (row, col)")

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @classmethod
    def zeros(cls, width: int, height: int) -> ScalarGrid:
        return cls(np.zeros((height, width), dtype=np.float64))


@dataclass(frozen=True)
class ClusterLight:
    """Manual light for one cluster, constrained to an azimuth sector."""

    azimuth: float
    elevation: float = 60.0
    sector_center: float = 135.0
    sector_half_width: float = 180.0

    def __post_init__(self) -> None:
        if not within_sector(self.azimuth, self.sector_center, self.sector_half_width):
            raise ValueError(
                f"azimuth {self.azimuth} outside sector "
                f"[{self.sector_center - self.sector_half_width}, "
                f"{self.sector_center + self.sector_half_width}]"
            )


def within_sector(azimuth: float, center: float, half_width: float) -> bool:
    delta = (azimuth - center + 180.0) % 360.0 - 180.0
    return abs(delta) <= half_width + 1e-9


@dataclass(frozen=True)
class RenderParams:
    """Full user-steerable state of the render pipeline.

    mu/sigma are clamped to [0, 1] at construction. ``lighting`` is one of
    "adaptive", "fixed_global" (uses global_azimuth/global_elevation) or
    "per_cluster_manual" (uses cluster_lights).
    """

    mu: float = 0.5
    sigma: float = 0.5
    eta: float = 1.0
    phi: float = 0.0
    kernel_n: int = 3
    bandwidth_h: float = 1.0
    colormap: str = "multi_hue"
    lighting: str = "adaptive"
    shading_space: str = "luminance_only"
    global_azimuth: float = 135.0
    global_elevation: float = 60.0
    cluster_lights: dict[int, ClusterLight] = field(default_factory=dict)
    eta_high: float | None = None
    density_scale: str = "log"

    def __post_init__(self) -> None:
        object.__setattr__(self, "mu", min(1.0, max(0.0, float(self.mu))))
        object.__setattr__(self, "sigma", min(1.0, max(0.0, float(self.sigma))))
        if self.eta <= 0:
            raise ValueError("eta must be > 0")
        if self.phi > 0:
            raise ValueError("phi must be <= 0")
        if self.kernel_n < 1 or self.kernel_n % 2 == 0:
            raise ValueError("kernel_n must be an odd integer >= 1")
        if self.bandwidth_h <= 0:
            raise ValueError("bandwidth_h must be > 0")
        if self.colormap not in ("multi_hue", "single_hue_per_cluster"):
            raise ValueError(f"unknown colormap {self.colormap!r}")
        if self.lighting not in ("adaptive", "fixed_global", "per_cluster_manual"):
            raise ValueError(f"unknown lighting mode {self.lighting!r}")
        if self.shading_space not in ("luminance_only", "direct_rgb_baseline"):
            raise ValueError(f"unknown shading_space {self.shading_space!r}")
        if self.density_scale not in ("log", "linear"):
            raise ValueError(f"unknown density_scale {self.density_scale!r}")

    @property
    def effective_eta_high(self) -> float:
        return self.eta if self.eta_high is None else self.eta_high


def band_radius_for(bandwidth_h: float) -> int:
    """Default influence-band half width: max(5, ceil(3h)) pixels."""
    return max(5, int(math.ceil(3.0 * bandwidth_h)))


# ---------------------------------------------------------------------------
# Ingestion
# ---------------------------------------------------------------------------


def _read_csv_lines(path: Path) -> list[tuple[int, list[list[float]], int | None]]:
    groups: dict[int, list[list[float]]] = {}
    clusters: dict[int, int | None] = {}
    order: list[int] = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        for row_no, row in enumerate(reader, start=1):
            if not row or (row_no == 1 and row[0].strip().lower() == "line_id"):
                continue
            if len(row) not in (3, 4):
                raise IngestError(f"{path}: row {row_no}: expected 3 or 4 columns")
            try:
                lid = int(row[0])
                x = float(row[1])
                y = float(row[2])
                cluster = int(row[3]) if len(row) == 4 and row[3].strip() != "" else None
            except ValueError as exc:
                raise IngestError(f"{path}: row {row_no}: {exc}") from None
            if lid not in groups:
                groups[lid] = []
                clusters[lid] = cluster
                order.append(lid)
            groups[lid].append([x, y])
            if cluster is not None:
                clusters[lid] = cluster
    return [(lid, groups[lid], clusters[lid]) for lid in order]


def _read_json_lines(path: Path) -> list[tuple[int, list[list[float]], int | None]]:
    with open(path) as fh:
        try:
            payload = json.load(fh)
        except json.JSONDecodeError as exc:
            raise IngestError(f"{path}: invalid JSON at line {exc.lineno}") from None
    if not isinstance(payload, list):
        raise IngestError(f"{path}: top-level JSON value must be an array")
    out = []
    for i, entry in enumerate(payload):
        if not isinstance(entry, dict) or "id" not in entry or "points" not in entry:
            raise IngestError(f"{path}: entry {i}: expected object with id and points")
        cluster = entry.get("cluster")
        out.append((int(entry["id"]), entry["points"], None if cluster is None else int(cluster)))
    return out


def ingest(
    path: str | Path,
    format: str | None = None,
    grid_w: int = 512,
    grid_h: int = 512,
    margin: float = DEFAULT_MARGIN,
) -> tuple[list[Polyline], GridTransform]:
    """Load a polyline dataset and fit it onto the pixel grid.

    The dataset bounding box is mapped onto the grid minus the margin with a
    single uniform scale (letterboxing preserves aspect ratio). Lines with
    fewer than 2 distinct vertices are dropped with a warning; duplicate ids
    and malformed rows reject the file.
    """
    path = Path(path)
    if not path.exists():
        raise IngestError(f"input file not found: {path}")
    if grid_w < MIN_GRID_SIDE or grid_h < MIN_GRID_SIDE:
        raise IngestError(f"grid must be at least {MIN_GRID_SIDE} pixels per side")
    if not 0.0 <= margin <= 0.4:
        raise IngestError("margin must be a fraction in [0, 0.4]")
    if format is None:
        format = "json" if path.suffix.lower() == ".json" else "csv"
    if format == "csv":
        raw = _read_csv_lines(path)
    elif format == "json":
        raw = _read_json_lines(path)
    else:
        raise IngestError(f"unknown format {format!r}")

    seen: set[int] = set()
    lines: list[Polyline] = []
    for lid, points, cluster in raw:
        if lid in seen:
            raise IngestError(f"{path}: duplicate line id {lid}")
        seen.add(lid)
        try:
            lines.append(Polyline(id=lid, vertices=np.asarray(points, dtype=np.float64), cluster=cluster))
        except ValueError:
            log.warning("dropping line %d: fewer than 2 distinct vertices", lid)
    if not lines:
        raise IngestError(f"{path}: no usable polylines")

    transform = fit_transform(lines, grid_w, grid_h, margin)
    fitted = [replace(ln, vertices=transform.apply(ln.vertices)) for ln in lines]
    return fitted, transform


def fit_transform(
    lines: list[Polyline], grid_w: int, grid_h: int, margin: float
) -> GridTransform:
    """Uniform-scale letterbox fit of the dataset bounding box onto the grid."""
    allv = np.concatenate([ln.vertices for ln in lines], axis=0)
    xmin, ymin = allv.min(axis=0)
    xmax, ymax = allv.max(axis=0)
    margin_px = margin * min(grid_w, grid_h)
    usable_w = (grid_w - 1) - 2 * margin_px
    usable_h = (grid_h - 1) - 2 * margin_px
    dx = xmax - xmin
    dy = ymax - ymin
    if dx <= 0 and dy <= 0:
        scale = 1.0
    elif dx <= 0:
        scale = usable_h / dy
    elif dy <= 0:
        scale = usable_w / dx
    else:
        scale = min(usable_w / dx, usable_h / dy)
    # Center the scaled bounding box on both axes (letterbox).
    tx = margin_px + (usable_w - scale * dx) / 2.0 - scale * xmin
    ty = margin_px + (usable_h - scale * dy) / 2.0 + scale * ymax
    return GridTransform(sx=scale, sy=-scale, tx=tx, ty=ty)


# ---------------------------------------------------------------------------
# Rasterization
# ---------------------------------------------------------------------------


def _walk_segment(p0: NDArray[np.float64], p1: NDArray[np.float64]) -> NDArray[np.int64]:
    """Integer DDA walk from p0 to p1, inclusive; 8-connected by construction.

    Interpolation runs in exact integer arithmetic with round-half-even
    ties, so a walk is bitwise symmetric under reversal and commutes with
    90-degree grid rotations (odd grid sides).
    """
    c0 = np.rint(np.asarray(p0, dtype=np.float64)).astype(np.int64)
    c1 = np.rint(np.asarray(p1, dtype=np.float64)).astype(np.int64)
    d = c1 - c0
    steps = int(max(abs(d[0]), abs(d[1])))
    if steps == 0:
        return c0[np.newaxis, :]
    k = np.arange(steps + 1, dtype=np.int64)
    out = np.empty((steps + 1, 2), dtype=np.int64)
    for ax in range(2):
        num = c0[ax] * steps + k * d[ax]
        q, r = np.divmod(num, steps)
        two_r = 2 * r
        up = (two_r > steps) | ((two_r == steps) & (q % 2 != 0))
        out[:, ax] = q + up
    return out


def rasterize(line: Polyline, kernel_n: int, grid_w: int, grid_h: int) -> RasterizedLine:
    """Rasterize a polyline to its pixel chain, tangents and kernel footprint.

    Each segment contributes an 8-connected run of pixels; the tangent at a
    pixel is the unit direction of the segment that produced it. Consecutive
    duplicates (segment joints, clipping) are removed. A line entirely outside
    the grid yields an empty RasterizedLine.
    """
    if kernel_n < 1 or kernel_n % 2 == 0:
        raise ValueError("kernel_n must be an odd integer >= 1")
    chain: list[NDArray[np.int64]] = []
    tangents: list[NDArray[np.float64]] = []
    prev_t: NDArray[np.float64] | None = None
    verts = line.vertices
    for i in range(len(verts) - 1):
        seg = _walk_segment(verts[i], verts[i + 1])
        d = verts[i + 1] - verts[i]
        norm = float(np.hypot(d[0], d[1]))
        if norm == 0.0:
            continue
        t = d / norm
        if chain:
            seg = seg[1:]  # joint pixel already emitted by the previous segment
        if len(seg) == 0:
            continue
        if chain:
            # The shared joint pixel bisects the two segment directions, so
            # tangent attribution is exactly symmetric under reversal.
            bis = prev_t + t
            bn = float(np.hypot(bis[0], bis[1]))
            if bn > 1e-12:
                tangents[-1][-1] = bis / bn
        chain.append(seg)
        tangents.append(np.repeat(t[np.newaxis, :], len(seg), axis=0))
        prev_t = t
    if not chain:
        return RasterizedLine(line.id, np.empty((0, 2), np.int32),
                              np.empty((0, 2), np.float64), np.empty((0, 2), np.int32),
                              cluster=line.cluster)
    pixels = np.concatenate(chain, axis=0)
    tans = np.concatenate(tangents, axis=0)

    # Drop consecutive duplicates (can appear after rounding of short segments).
    keep = np.ones(len(pixels), dtype=bool)
    keep[1:] = np.any(pixels[1:] != pixels[:-1], axis=1)
    pixels = pixels[keep]
    tans = tans[keep]

    inside = (
        (pixels[:, 0] >= 0)
        & (pixels[:, 0] < grid_w)
        & (pixels[:, 1] >= 0)
        & (pixels[:, 1] < grid_h)
    )
    pixels = pixels[inside]
    tans = tans[inside]
    if len(pixels) == 0:
        return RasterizedLine(line.id, np.empty((0, 2), np.int32),
                              np.empty((0, 2), np.float64), np.empty((0, 2), np.int32),
                              cluster=line.cluster)
    keep = np.ones(len(pixels), dtype=bool)
    keep[1:] = np.any(pixels[1:] != pixels[:-1], axis=1)
    pixels = pixels[keep]
    tans = tans[keep]

    footprint = _dilate(pixels, kernel_n, grid_w, grid_h)
    return RasterizedLine(
        line_id=line.id,
        pixels=pixels.astype(np.int32),
        tangents=tans,
        footprint=footprint,
        cluster=line.cluster,
    )


def _dilate(pixels: NDArray[np.int64], kernel_n: int, grid_w: int, grid_h: int) -> NDArray[np.int32]:
    """Minkowski dilation by the kernel_n x kernel_n square, clipped to the grid."""
    r = kernel_n // 2
    offs = np.stack(np.meshgrid(np.arange(-r, r + 1), np.arange(-r, r + 1), indexing="ij"), axis=-1).reshape(-1, 2)
    expanded = (pixels[:, np.newaxis, :] + offs[np.newaxis, :, :]).reshape(-1, 2)
    inside = (
        (expanded[:, 0] >= 0)
        & (expanded[:, 0] < grid_w)
        & (expanded[:, 1] >= 0)
        & (expanded[:, 1] < grid_h)
    )
    expanded = expanded[inside]
    if len(expanded) == 0:
        return np.empty((0, 2), np.int32)
    flat = expanded[:, 1].astype(np.int64) * grid_w + expanded[:, 0]
    uniq = np.unique(flat)
    out = np.empty((len(uniq), 2), dtype=np.int32)
    out[:, 0] = uniq % grid_w
    out[:, 1] = uniq // grid_w
    return out


def rasterize_all(
    lines: list[Polyline], kernel_n: int, grid_w: int, grid_h: int
) -> list[RasterizedLine]:
    """Rasterize every line, skipping those entirely outside the grid."""
    out = []
    for ln in lines:
        rl = rasterize(ln, kernel_n, grid_w, grid_h)
        if not rl.is_empty:
            out.append(rl)
    return out
