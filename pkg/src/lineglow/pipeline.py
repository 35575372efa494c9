"""End-to-end render pipeline: prepare once per dataset, re-render per params.

Preparation covers everything invariant under mu/sigma/eta/phi/light changes:
rasterization, per-line influence fields, the aggregate density field, the
outlierness index, orientation aggregates and the dominant-cluster field.
Rendering consumes the prepared state plus RenderParams.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from . import colorize
from .colorize import ColorImage, Colormap
from .density import DensityField, aggregate, line_density
from .lighting import (
    IntensityMap,
    LightField,
    OrientationAggregate,
    build_orientation_aggregate,
    dominant_cluster_field,
    intensity,
    light_field,
)
from .model import Polyline, RasterizedLine, RenderParams, ScalarGrid, band_radius_for, rasterize_all
from .normals import (
    HighFreqField,
    NormalGrid,
    Selection,
    compose,
    empty_high_freq,
    high_freq_normals,
    low_freq_normals,
    select_lines,
)
from .outlierness import InfluenceField, OutlierIndex, influence_field, outlierness_all
from .util import parallel_map


@dataclass
class PreparedDataset:
    """Dataset-level caches shared by every render until geometry params change."""

    grid_w: int
    grid_h: int
    kernel_n: int
    bandwidth_h: float
    band_radius: int
    lines: list[RasterizedLine]
    fields: list[InfluenceField]
    density: DensityField
    index: OutlierIndex
    orientation: OrientationAggregate
    cluster_map: NDArray[np.int64]

    @property
    def clusters(self) -> list[int]:
        vals = sorted({ln.cluster for ln in self.lines if ln.cluster is not None})
        return [int(v) for v in vals]


@dataclass
class RenderResult:
    image: ColorImage
    base: ColorImage
    selection: Selection
    normal_map: NormalGrid
    lights: LightField
    intensity_map: IntensityMap
    i_prime: ScalarGrid


def prepare(
    polylines: list[Polyline],
    grid_w: int,
    grid_h: int,
    kernel_n: int = 3,
    bandwidth_h: float = 1.0,
    band_radius: int | None = None,
) -> PreparedDataset:
    """Rasterize and precompute the interaction-invariant stages."""
    if band_radius is None:
        band_radius = band_radius_for(bandwidth_h)
    lines = rasterize_all(polylines, kernel_n, grid_w, grid_h)
    if not lines:
        raise ValueError("no line intersects the grid")
    sparse = parallel_map(
        lambda ln: line_density(ln, bandwidth_h, band_radius, grid_w, grid_h), lines
    )
    density = aggregate(lines, bandwidth_h, band_radius, grid_w, grid_h, fields=sparse)
    fields = parallel_map(
        lambda pair: influence_field(pair[0], bandwidth_h, band_radius, grid_w, grid_h, field=pair[1]),
        zip(lines, sparse),
    )
    if len(lines) >= 2:
        index = outlierness_all(lines, bandwidth_h, band_radius, grid_w, grid_h, fields=fields)
    else:
        only = lines[0].line_id
        index = OutlierIndex(
            scores={only: 1.0}, ranks={only: 0}, normalized={only: 0.0},
            neighbors={only: frozenset()},
        )
    orientation = build_orientation_aggregate(fields, grid_w, grid_h)
    cluster_map = dominant_cluster_field(fields, lines, grid_w, grid_h)
    return PreparedDataset(
        grid_w=grid_w,
        grid_h=grid_h,
        kernel_n=kernel_n,
        bandwidth_h=bandwidth_h,
        band_radius=band_radius,
        lines=lines,
        fields=fields,
        density=density,
        index=index,
        orientation=orientation,
        cluster_map=cluster_map,
    )


def structural_normals(
    prep: PreparedDataset, params: RenderParams
) -> tuple[Selection, HighFreqField, NormalGrid]:
    """Selection, high-frequency field and the composed structural map."""
    selection = select_lines(prep.index, params.mu, params.sigma)
    n_low = low_freq_normals(prep.density, params.eta)
    if selection.selected:
        n_high = high_freq_normals(
            selection, prep.lines, prep.bandwidth_h,
            params.effective_eta_high, prep.grid_w, prep.grid_h,
        )
    else:
        n_high = empty_high_freq(prep.grid_w, prep.grid_h)
    return selection, n_high, compose(n_low, n_high)


def base_image(
    prep: PreparedDataset, params: RenderParams, cmap: Colormap | None = None
) -> ColorImage:
    """The unshaded density plot for the configured colormap."""
    coverage = prep.density.coverage
    if params.colormap == "single_hue_per_cluster":
        if cmap is None:
            cmap = Colormap(kind="single_hue", density_scale=params.density_scale)
        return colorize.map_density(prep.density.grid, coverage, cmap, clusters=prep.cluster_map)
    if cmap is None:
        cmap = Colormap(kind="multi_hue", density_scale=params.density_scale)
    return colorize.map_density(prep.density.grid, coverage, cmap)


def render(
    prep: PreparedDataset, params: RenderParams, cmap: Colormap | None = None
) -> RenderResult:
    """Run the interactive stages and compose the final image."""
    selection, n_high, n_struct = structural_normals(prep, params)
    lights = light_field(n_high, prep.orientation, params, prep.cluster_map)
    imap = intensity(n_struct, lights)
    base = base_image(prep, params, cmap)
    if params.shading_space == "direct_rgb_baseline":
        i_prime = ScalarGrid(np.zeros_like(imap.grid.data))
        image = colorize.baseline_rgb_lambert(base, imap)
    else:
        i_prime = colorize.scale_intensity(imap, params.phi)
        mode = "hcl_single_hue" if params.colormap == "single_hue_per_cluster" else "lab_multi_hue"
        image = colorize.compose_luminance(base, i_prime, mode)
    return RenderResult(
        image=image,
        base=base,
        selection=selection,
        normal_map=n_struct,
        lights=lights,
        intensity_map=imap,
        i_prime=i_prime,
    )
