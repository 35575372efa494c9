"""Structure-aware illuminated line density plots."""

from .colorize import ColorImage, Colormap, baseline_rgb_lambert, compose_luminance, map_density, scale_intensity
from .density import DensityField, aggregate, line_density
from .lighting import IntensityMap, LightField, dominant_orientation, intensity, light_field
from .metrics import FidelityReport, ScalingReport, bench_scaling, ciede2000, fidelity_sweep
from .model import (
    ClusterLight,
    GridTransform,
    Polyline,
    RasterizedLine,
    RenderParams,
    ScalarGrid,
    ingest,
    rasterize,
)
from .normals import NormalGrid, Selection, compose, high_freq_normals, low_freq_normals, select_lines
from .outlierness import InfluenceField, OutlierIndex, influence_field, outlierness_all, similarity
from .pipeline import PreparedDataset, RenderResult, prepare, render

__version__ = "0.1.0"
