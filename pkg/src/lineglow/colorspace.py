"""sRGB / CIELAB / LCh conversions (D65 white point, 2-degree observer)."""

from __future__ import annotations

import numpy as np
from numpy.typing import NDArray

# sRGB <-> XYZ matrices (IEC 61966-2-1, D65).
_RGB_TO_XYZ = np.array(
    [
        [0.4124564, 0.3575761, 0.1804375],
        [0.2126729, 0.7151522, 0.0721750],
        [0.0193339, 0.1191920, 0.9503041],
    ]
)
_XYZ_TO_RGB = np.linalg.inv(_RGB_TO_XYZ)

# D65 reference white.
_WHITE = np.array([0.95047, 1.0, 1.08883])

_EPS = 216.0 / 24389.0
_KAPPA = 24389.0 / 27.0


def srgb_to_linear(c: NDArray[np.float64]) -> NDArray[np.float64]:
    c = np.asarray(c, dtype=np.float64)
    return np.where(c <= 0.04045, c / 12.92, ((c + 0.055) / 1.055) ** 2.4)


def linear_to_srgb(c: NDArray[np.float64]) -> NDArray[np.float64]:
    c = np.asarray(c, dtype=np.float64)
    safe = np.maximum(c, 0.0)
    return np.where(c <= 0.0031308, 12.92 * c, 1.055 * safe ** (1.0 / 2.4) - 0.055)


def srgb8_to_lab(rgb: NDArray[np.uint8]) -> NDArray[np.float64]:
    """8-bit sRGB (..., 3) to CIELAB (..., 3)."""
    lin = srgb_to_linear(np.asarray(rgb, dtype=np.float64) / 255.0)
    xyz = lin @ _RGB_TO_XYZ.T
    return xyz_to_lab(xyz)


def lab_to_srgb8(lab: NDArray[np.float64]) -> tuple[NDArray[np.uint8], NDArray[np.bool_]]:
    """CIELAB to 8-bit sRGB with per-channel clamping.

    Also returns a mask of pixels whose unclamped value fell outside the
    representable range by more than rounding could absorb (gamut clamp).
    """
    lin = lab_to_linear_rgb(lab)
    srgb = linear_to_srgb(lin) * 255.0
    clamped = np.any((srgb < -0.501) | (srgb > 255.501), axis=-1)
    out = np.rint(np.clip(srgb, 0.0, 255.0)).astype(np.uint8)
    return out, clamped


def lab_to_srgb8_chroma_safe(
    lab: NDArray[np.float64],
) -> tuple[NDArray[np.uint8], NDArray[np.bool_]]:
    """Like lab_to_srgb8, quantizing toward the least chromatic drift.

    Plain rounding can move a/b by more than half a unit on steep parts of
    the transfer curve; picking among the eight integer neighbors keeps the
    chromatic channels tight while L absorbs the quantization.
    """
    lab = np.asarray(lab, dtype=np.float64).reshape(-1, 3)
    raw = linear_to_srgb(lab_to_linear_rgb(lab)) * 255.0
    clamped = np.any((raw < -0.501) | (raw > 255.501), axis=-1)
    srgb = np.clip(raw, 0.0, 255.0)
    lo = np.floor(srgb)
    best = None
    best_err = None
    for k in range(8):
        cand = lo + np.stack([(k >> 2) & 1, (k >> 1) & 1, k & 1], axis=0)[np.newaxis, :]
        cand = np.clip(cand, 0.0, 255.0)
        cand_lab = srgb8_to_lab(cand)
        err = np.hypot(cand_lab[:, 1] - lab[:, 1], cand_lab[:, 2] - lab[:, 2])
        # Small L penalty keeps ties deterministic and the pixel near target.
        err = err + 1e-3 * np.abs(cand_lab[:, 0] - lab[:, 0])
        if best is None:
            best, best_err = cand, err
        else:
            take = err < best_err
            best[take] = cand[take]
            best_err[take] = err[take]
    return best.astype(np.uint8), clamped


def xyz_to_lab(xyz: NDArray[np.float64]) -> NDArray[np.float64]:
    t = np.asarray(xyz, dtype=np.float64) / _WHITE
    f = np.where(t > _EPS, np.cbrt(t), (_KAPPA * t + 16.0) / 116.0)
    lab = np.empty_like(f)
    lab[..., 0] = 116.0 * f[..., 1] - 16.0
    lab[..., 1] = 500.0 * (f[..., 0] - f[..., 1])
    lab[..., 2] = 200.0 * (f[..., 1] - f[..., 2])
    return lab


def lab_to_xyz(lab: NDArray[np.float64]) -> NDArray[np.float64]:
    lab = np.asarray(lab, dtype=np.float64)
    fy = (lab[..., 0] + 16.0) / 116.0
    fx = fy + lab[..., 1] / 500.0
    fz = fy - lab[..., 2] / 200.0
    f = np.stack([fx, fy, fz], axis=-1)
    f3 = f**3
    t = np.where(f3 > _EPS, f3, (116.0 * f - 16.0) / _KAPPA)
    return t * _WHITE


def lab_to_linear_rgb(lab: NDArray[np.float64]) -> NDArray[np.float64]:
    return lab_to_xyz(lab) @ _XYZ_TO_RGB.T


def in_gamut(lab: NDArray[np.float64], tol: float = 1e-9) -> NDArray[np.bool_]:
    lin = lab_to_linear_rgb(lab)
    return np.all((lin >= -tol) & (lin <= 1.0 + tol), axis=-1)


def lab_to_lch(lab: NDArray[np.float64]) -> NDArray[np.float64]:
    """CIELAB to cylindrical LCh (hue in degrees, [0, 360))."""
    lab = np.asarray(lab, dtype=np.float64)
    out = np.empty_like(lab)
    out[..., 0] = lab[..., 0]
    out[..., 1] = np.hypot(lab[..., 1], lab[..., 2])
    out[..., 2] = np.degrees(np.arctan2(lab[..., 2], lab[..., 1])) % 360.0
    return out


def lch_to_lab(lch: NDArray[np.float64]) -> NDArray[np.float64]:
    lch = np.asarray(lch, dtype=np.float64)
    h = np.radians(lch[..., 2])
    out = np.empty_like(lch)
    out[..., 0] = lch[..., 0]
    out[..., 1] = lch[..., 1] * np.cos(h)
    out[..., 2] = lch[..., 1] * np.sin(h)
    return out


def fit_chroma(lch: NDArray[np.float64], steps: int = 20) -> NDArray[np.float64]:
    """Shrink chroma at fixed L and hue until the color is inside sRGB.

    Binary search per pixel; only out-of-gamut pixels are touched.
    """
    lch = np.asarray(lch, dtype=np.float64).copy()
    outside = ~in_gamut(lch_to_lab(lch))
    if not np.any(outside):
        return lch
    lo = np.zeros(lch.shape[:-1])
    hi = np.ones(lch.shape[:-1])
    base_c = lch[..., 1].copy()
    for _ in range(steps):
        mid = (lo + hi) / 2.0
        trial = lch.copy()
        trial[..., 1] = base_c * mid
        ok = in_gamut(lch_to_lab(trial))
        lo = np.where(outside & ok, mid, lo)
        hi = np.where(outside & ~ok, mid, hi)
    lch[..., 1] = np.where(outside, base_c * lo, base_c)
    return lch
