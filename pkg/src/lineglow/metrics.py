"""Color-fidelity metrics (CIEDE2000) and stage-runtime benchmarks."""

from __future__ import annotations

import gc
import time
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from . import colorize, colorspace as cs
from .colorize import ColorImage
from .lighting import intensity, light_field
from .model import Polyline, RenderParams
from .normals import compose, empty_high_freq, high_freq_normals, low_freq_normals, select_lines
from .outlierness import influence_field, outlierness_all
from .pipeline import PreparedDataset, base_image, prepare, structural_normals
from .synth import bench_corpus

DELTA_E_THRESHOLD = 3.0


def ciede2000(
    c1: NDArray[np.float64] | tuple,
    c2: NDArray[np.float64] | tuple,
    srgb: bool = False,
) -> NDArray[np.float64] | float:
    """CIEDE2000 color difference, including the hue-rotation term.

    Accepts CIELAB triples by default, or 8-bit sRGB triples with
    ``srgb=True``. Broadcasts over leading dimensions.
    """
    a = np.asarray(c1, dtype=np.float64)
    b = np.asarray(c2, dtype=np.float64)
    scalar = a.ndim == 1 and b.ndim == 1
    if srgb:
        a = cs.srgb8_to_lab(a)
        b = cs.srgb8_to_lab(b)
    out = _ciede2000_lab(np.atleast_2d(a), np.atleast_2d(b))
    return float(out[0]) if scalar else out.reshape(np.broadcast(a[..., 0], b[..., 0]).shape)


def _ciede2000_lab(lab1: NDArray[np.float64], lab2: NDArray[np.float64]) -> NDArray[np.float64]:
    l1, a1, b1 = lab1[..., 0], lab1[..., 1], lab1[..., 2]
    l2, a2, b2 = lab2[..., 0], lab2[..., 1], lab2[..., 2]

    c1 = np.hypot(a1, b1)
    c2 = np.hypot(a2, b2)
    c_bar = (c1 + c2) / 2.0
    g = 0.5 * (1.0 - np.sqrt(c_bar**7 / (c_bar**7 + 25.0**7)))
    a1p = (1.0 + g) * a1
    a2p = (1.0 + g) * a2
    c1p = np.hypot(a1p, b1)
    c2p = np.hypot(a2p, b2)

    h1p = np.degrees(np.arctan2(b1, a1p)) % 360.0
    h1p = np.where((b1 == 0) & (a1p == 0), 0.0, h1p)
    h2p = np.degrees(np.arctan2(b2, a2p)) % 360.0
    h2p = np.where((b2 == 0) & (a2p == 0), 0.0, h2p)

    dl = l2 - l1
    dc = c2p - c1p
    hdiff = h2p - h1p
    dh = np.where(
        c1p * c2p == 0.0,
        0.0,
        np.where(
            np.abs(hdiff) <= 180.0,
            hdiff,
            np.where(hdiff > 180.0, hdiff - 360.0, hdiff + 360.0),
        ),
    )
    dbig_h = 2.0 * np.sqrt(c1p * c2p) * np.sin(np.radians(dh) / 2.0)

    l_bar = (l1 + l2) / 2.0
    cp_bar = (c1p + c2p) / 2.0
    hsum = h1p + h2p
    h_bar = np.where(
        c1p * c2p == 0.0,
        hsum,
        np.where(
            np.abs(h1p - h2p) <= 180.0,
            hsum / 2.0,
            np.where(hsum < 360.0, (hsum + 360.0) / 2.0, (hsum - 360.0) / 2.0),
        ),
    )

    t = (
        1.0
        - 0.17 * np.cos(np.radians(h_bar - 30.0))
        + 0.24 * np.cos(np.radians(2.0 * h_bar))
        + 0.32 * np.cos(np.radians(3.0 * h_bar + 6.0))
        - 0.20 * np.cos(np.radians(4.0 * h_bar - 63.0))
    )
    d_theta = 30.0 * np.exp(-(((h_bar - 275.0) / 25.0) ** 2))
    r_c = 2.0 * np.sqrt(cp_bar**7 / (cp_bar**7 + 25.0**7))
    s_l = 1.0 + 0.015 * (l_bar - 50.0) ** 2 / np.sqrt(20.0 + (l_bar - 50.0) ** 2)
    s_c = 1.0 + 0.045 * cp_bar
    s_h = 1.0 + 0.015 * cp_bar * t
    r_t = -np.sin(np.radians(2.0 * d_theta)) * r_c

    return np.sqrt(
        (dl / s_l) ** 2
        + (dc / s_c) ** 2
        + (dbig_h / s_h) ** 2
        + r_t * (dc / s_c) * (dbig_h / s_h)
    )


def mean_delta_e(base: ColorImage, shaded: ColorImage) -> float:
    """Average per-pixel CIEDE2000 over non-empty pixels."""
    mask = ~base.empty_mask
    if not np.any(mask):
        return 0.0
    lab_a = cs.srgb8_to_lab(base.pixels[mask])
    lab_b = cs.srgb8_to_lab(shaded.pixels[mask])
    return float(np.mean(_ciede2000_lab(lab_a, lab_b)))


# ---------------------------------------------------------------------------
# Fidelity sweep
# ---------------------------------------------------------------------------


@dataclass
class FidelityReport:
    phi_values: list[float]
    ours: list[float]
    baseline: list[float]
    threshold: float
    crossing_phi: float | None

    def rows(self) -> list[tuple[float, float, float]]:
        return list(zip(self.phi_values, self.ours, self.baseline))


def _threshold_crossing(
    phi_values: list[float], ours: list[float], threshold: float
) -> float | None:
    for i in range(1, len(phi_values)):
        lo, hi = ours[i - 1], ours[i]
        if lo <= threshold < hi or lo < threshold <= hi:
            if hi == lo:
                return phi_values[i]
            frac = (threshold - lo) / (hi - lo)
            return phi_values[i - 1] + frac * (phi_values[i] - phi_values[i - 1])
    return None


def fidelity_sweep(
    prep: PreparedDataset,
    params: RenderParams,
    phi_values: list[float],
    threshold: float = DELTA_E_THRESHOLD,
) -> FidelityReport:
    """Mean color distortion of ours vs the RGB-Lambert baseline per phi.

    Both are measured against the unshaded density plot over non-empty
    pixels; the baseline does not depend on phi and is reported as a constant
    reference per row.
    """
    _, n_high, n_struct = structural_normals(prep, params)
    lights = light_field(n_high, prep.orientation, params, prep.cluster_map)
    imap = intensity(n_struct, lights)
    base = base_image(prep, params)
    baseline_img = colorize.baseline_rgb_lambert(base, imap)
    baseline_de = mean_delta_e(base, baseline_img)
    mode = "hcl_single_hue" if params.colormap == "single_hue_per_cluster" else "lab_multi_hue"

    ours = []
    for phi in phi_values:
        i_prime = colorize.scale_intensity(imap, phi)
        shaded = colorize.compose_luminance(base, i_prime, mode)
        ours.append(mean_delta_e(base, shaded))
    return FidelityReport(
        phi_values=list(phi_values),
        ours=ours,
        baseline=[baseline_de] * len(phi_values),
        threshold=threshold,
        crossing_phi=_threshold_crossing(list(phi_values), ours, threshold),
    )


# ---------------------------------------------------------------------------
# Scaling benchmark
# ---------------------------------------------------------------------------


@dataclass
class ScalingReport:
    counts: list[int]
    times: dict[str, list[float]]            # stage -> per-count median seconds
    fits: dict[str, tuple[float, float, float]]  # stage -> (slope, intercept, r2)

    def doubling_ratios(self, stage: str) -> list[float]:
        out = []
        series = dict(zip(self.counts, self.times[stage]))
        for n, t in series.items():
            if 2 * n in series and t > 0:
                out.append(series[2 * n] / t)
        return out


def linear_fit(xs: list[float], ys: list[float]) -> tuple[float, float, float]:
    """Least-squares line fit plus R^2."""
    x = np.asarray(xs, dtype=np.float64)
    y = np.asarray(ys, dtype=np.float64)
    slope, intercept = np.polyfit(x, y, 1)
    pred = slope * x + intercept
    ss_res = float(np.sum((y - pred) ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return float(slope), float(intercept), r2


def bench_scaling(
    counts: list[int],
    repeats: int = 3,
    grid: int = 512,
    corpus: list[Polyline] | None = None,
    params: RenderParams | None = None,
    seed: int = 42,
) -> ScalingReport:
    """Median wall time of the outlierness / normal-map / lighting stages.

    Each count subsamples a common synthetic corpus; stages run sequentially
    on a monotonic clock.
    """
    if len(counts) < 2:
        raise ValueError("need at least 2 counts")
    if repeats < 3:
        raise ValueError("need at least 3 repeats")
    counts = sorted(counts)
    if corpus is None:
        corpus = bench_corpus(max(counts), grid=grid, seed=seed)
    if params is None:
        params = RenderParams(mu=0.5, sigma=0.5, eta=1.0, phi=-20.0)

    times: dict[str, list[float]] = {"outlierness": [], "normal_map": [], "lighting": []}
    for n in counts:
        subset = corpus[:n]
        prep = prepare(subset, grid, grid, params.kernel_n, params.bandwidth_h)
        t_out, t_norm, t_light = [], [], []
        for _ in range(repeats):
            gc.collect()  # keep allocator noise out of the medians
            t0 = time.perf_counter()
            fields = [
                influence_field(ln, prep.bandwidth_h, prep.band_radius, grid, grid)
                for ln in prep.lines
            ]
            outlierness_all(prep.lines, prep.bandwidth_h, prep.band_radius, grid, grid, fields=fields)
            t1 = time.perf_counter()
            selection = select_lines(prep.index, params.mu, params.sigma)
            n_low = low_freq_normals(prep.density, params.eta)
            if selection.selected:
                n_high = high_freq_normals(
                    selection, prep.lines, prep.bandwidth_h,
                    params.effective_eta_high, grid, grid,
                )
            else:
                n_high = empty_high_freq(grid, grid)
            n_struct = compose(n_low, n_high)
            t2 = time.perf_counter()
            lights = light_field(n_high, prep.orientation, params, prep.cluster_map)
            intensity(n_struct, lights)
            t3 = time.perf_counter()
            t_out.append(t1 - t0)
            t_norm.append(t2 - t1)
            t_light.append(t3 - t2)
        times["outlierness"].append(float(np.median(t_out)))
        times["normal_map"].append(float(np.median(t_norm)))
        times["lighting"].append(float(np.median(t_light)))

    fits = {
        stage: linear_fit([float(c) for c in counts], series)
        for stage, series in times.items()
    }
    return ScalingReport(counts=counts, times=times, fits=fits)
