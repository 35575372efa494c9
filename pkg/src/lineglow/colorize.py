"""Density-to-color mapping and luminance-only shading composition.

Multi-hue rendering interpolates a perceptually ordered stop table; single-hue
rendering walks a lightness/chroma ramp at each cluster's fixed hue. Shading
is added to the L channel of CIELAB (or lightness in LCh for single-hue) and
never touches the chromatic channels; the direct-RGB multiply is kept as the
ablation baseline.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from numpy.typing import NDArray

from . import colorspace as cs
from .lighting import IntensityMap
from .model import ScalarGrid

BACKGROUND_RGB = (255, 255, 255)

# Perceptually ordered 7-stop multi-hue default (cool purple to warm yellow).
# Lightness spans ~34..91 and per-stop chroma is capped so a +-20 luminance
# shift stays inside the sRGB gamut instead of clamping.
DEFAULT_MULTI_HUE_STOPS: tuple[tuple[float, tuple[int, int, int]], ...] = (
    (0.0, (75, 69, 153)),
    (1.0 / 6.0, (75, 104, 156)),
    (2.0 / 6.0, (79, 133, 164)),
    (0.5, (85, 162, 164)),
    (4.0 / 6.0, (94, 196, 132)),
    (5.0 / 6.0, (180, 218, 87)),
    (1.0, (247, 230, 154)),
)

# Hue slots (LCh degrees) cycled over cluster labels in single-hue mode.
CLUSTER_HUES = (25.0, 145.0, 250.0, 85.0, 310.0, 200.0, 55.0)

# Single-hue ramp endpoints: light/desaturated at t=0, dark/saturated at t=1.
_SH_L = (93.0, 28.0)
_SH_C = (12.0, 55.0)


@dataclass
class ColorImage:
    """8-bit sRGB image with the empty-bin mask and optional clamp flags."""

    pixels: NDArray[np.uint8]
    empty_mask: NDArray[np.bool_]
    clamp_mask: NDArray[np.bool_] | None = None

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]


@dataclass(frozen=True)
class Colormap:
    kind: str                                # "multi_hue" | "single_hue"
    stops: tuple[tuple[float, tuple[int, int, int]], ...] = DEFAULT_MULTI_HUE_STOPS
    density_scale: str = "log"

    def __post_init__(self) -> None:
        if self.kind not in ("multi_hue", "single_hue"):
            raise ValueError(f"unknown colormap kind {self.kind!r}")
        ts = [t for t, _ in self.stops]
        if ts[0] != 0.0 or ts[-1] != 1.0 or sorted(ts) != ts:
            raise ValueError("stops must be monotone and cover t = 0 and t = 1")


def load_colormap(path: str | Path) -> Colormap:
    """Read a colormap stop table from a JSON file."""
    with open(path) as fh:
        payload = json.load(fh)
    stops = tuple(
        (float(t), (int(c[0]), int(c[1]), int(c[2]))) for t, c in payload["stops"]
    )
    return Colormap(
        kind=payload.get("kind", "multi_hue"),
        stops=stops,
        density_scale=payload.get("density_scale", "log"),
    )


def normalize_density(
    f: NDArray[np.float64], f_max: float, scale: str = "log"
) -> NDArray[np.float64]:
    if f_max <= 0.0:
        return np.zeros_like(f)
    if scale == "log":
        return np.log1p(f) / np.log1p(f_max)
    return f / f_max


def _interp_stops(t: NDArray[np.float64], stops) -> NDArray[np.float64]:
    ts = np.array([s[0] for s in stops])
    cols = np.array([s[1] for s in stops], dtype=np.float64)
    out = np.empty(t.shape + (3,), dtype=np.float64)
    for ch in range(3):
        out[..., ch] = np.interp(t, ts, cols[:, ch])
    return out


def cluster_hue(cluster_id: int, ordered_clusters: list[int]) -> float:
    slot = ordered_clusters.index(cluster_id) if cluster_id in ordered_clusters else 0
    return CLUSTER_HUES[slot % len(CLUSTER_HUES)]


def map_density(
    density_data: NDArray[np.float64] | ScalarGrid,
    coverage: NDArray[np.bool_],
    cmap: Colormap,
    clusters: NDArray[np.int64] | None = None,
    background: tuple[int, int, int] = BACKGROUND_RGB,
) -> ColorImage:
    """Map the density field to an sRGB image; uncovered pixels get background.

    Single-hue mode requires a per-pixel cluster field and modulates
    lightness/chroma along each cluster's hue, reducing chroma only where the
    color would leave the sRGB gamut.
    """
    f = density_data.data if isinstance(density_data, ScalarGrid) else np.asarray(density_data)
    if cmap.kind == "single_hue" and clusters is None:
        raise ValueError("single_hue colormap requires a cluster field")
    f_max = float(f.max()) if f.size else 0.0
    t = normalize_density(f, f_max, cmap.density_scale)
    empty = ~coverage

    if cmap.kind == "multi_hue":
        rgb = np.rint(np.clip(_interp_stops(t, cmap.stops), 0.0, 255.0)).astype(np.uint8)
    else:
        ordered = sorted(int(c) for c in np.unique(clusters[coverage])) if coverage.any() else []
        hues = np.zeros(t.shape, dtype=np.float64)
        for cid in ordered:
            hues[clusters == cid] = cluster_hue(cid, ordered)
        lch = np.empty(t.shape + (3,), dtype=np.float64)
        lch[..., 0] = _SH_L[0] + t * (_SH_L[1] - _SH_L[0])
        lch[..., 1] = _SH_C[0] + t * (_SH_C[1] - _SH_C[0])
        lch[..., 2] = hues
        lch = cs.fit_chroma(lch)
        rgb, _ = cs.lab_to_srgb8(cs.lch_to_lab(lch))

    rgb[empty] = background
    return ColorImage(pixels=rgb, empty_mask=empty)


def scale_intensity(imap: IntensityMap, phi: float) -> ScalarGrid:
    """I' = phi * (I_empty - I) / (I_empty - I_min); zeros when I is constant."""
    denom = imap.i_empty - imap.i_min
    if denom <= 0.0:
        return ScalarGrid(np.zeros_like(imap.grid.data))
    return ScalarGrid(phi * (imap.i_empty - imap.grid.data) / denom)


def compose_luminance(
    base: ColorImage,
    i_prime: ScalarGrid,
    mode: str = "lab_multi_hue",
) -> ColorImage:
    """Add the scaled intensity to the luminance channel only.

    Pixels that are empty or receive a zero shift keep their exact input
    bytes, so phi = 0 composition is the identity. In LCh mode the shift
    preserves hue and chroma, shrinking chroma only for out-of-gamut results.
    """
    if mode not in ("lab_multi_hue", "hcl_single_hue"):
        raise ValueError(f"unknown composition mode {mode!r}")
    if base.pixels.shape[:2] != i_prime.data.shape:
        raise ValueError("image and intensity dimensions do not match")
    out = base.pixels.copy()
    clamp_mask = np.zeros(base.pixels.shape[:2], dtype=bool)
    active = (~base.empty_mask) & (i_prime.data != 0.0)
    if not np.any(active):
        return ColorImage(pixels=out, empty_mask=base.empty_mask, clamp_mask=clamp_mask)

    px = base.pixels[active]
    shift = i_prime.data[active]
    lab = cs.srgb8_to_lab(px)
    if mode == "lab_multi_hue":
        lab[:, 0] = np.clip(lab[:, 0] + shift, 0.0, 100.0)
        rgb, clamped = cs.lab_to_srgb8_chroma_safe(lab)
    else:
        lch = cs.lab_to_lch(lab)
        lch[:, 0] = np.clip(lch[:, 0] + shift, 0.0, 100.0)
        chroma_before = lch[:, 1].copy()
        lch = cs.fit_chroma(lch)
        reduced = lch[:, 1] < chroma_before
        rgb, clamped = cs.lab_to_srgb8_chroma_safe(cs.lch_to_lab(lch))
        clamped = clamped | reduced
    out[active] = rgb
    clamp_mask[active] = clamped
    return ColorImage(pixels=out, empty_mask=base.empty_mask, clamp_mask=clamp_mask)


def baseline_rgb_lambert(
    base: ColorImage, imap: IntensityMap, scale: float = 1.0
) -> ColorImage:
    """Ablation baseline: multiply sRGB channels by the clamped intensity.

    ``scale`` < 1 blends the multiplier toward 1 (the scaled-darkening
    variant); non-empty pixels only.
    """
    factor = np.clip(imap.grid.data, 0.0, 1.0)
    factor = (1.0 - scale) + scale * factor
    out = base.pixels.astype(np.float64)
    active = ~base.empty_mask
    out[active] *= factor[active, np.newaxis]
    return ColorImage(
        pixels=np.rint(np.clip(out, 0.0, 255.0)).astype(np.uint8),
        empty_mask=base.empty_mask,
    )
