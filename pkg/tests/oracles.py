"""Independent reference implementations used to check the fast paths.

Everything here favors directness over speed: direct Gaussian summation for
density values, explicit O(n^2) pairwise loops for outlierness, and numpy's
eigensolver for orientation tensors.
"""

from __future__ import annotations

import math

import numpy as np

from lineglow.density import gaussian_peak
from lineglow.model import RasterizedLine
from lineglow.outlierness import InfluenceField, influence_field, similarity


def density_value_direct(line: RasterizedLine, col: int, row: int, h: float) -> float:
    """(1/|P|) sum of untruncated Gaussians over the chain pixels."""
    total = 0.0
    for qc, qr in line.pixels:
        d2 = (col - float(qc)) ** 2 + (row - float(qr)) ** 2
        total += math.exp(-d2 / (2.0 * h * h)) / (2.0 * math.pi * h * h)
    return total / len(line.pixels)


def outlierness_bruteforce(
    lines: list[RasterizedLine],
    h: float,
    band_radius: int,
    grid_w: int,
    grid_h: int,
    fields: list[InfluenceField] | None = None,
) -> dict[int, float]:
    """Pairwise-loop outlierness: same fields, independent aggregation."""
    if fields is None:
        fields = [influence_field(ln, h, band_radius, grid_w, grid_h) for ln in lines]
    by_id = {f.line_id: f for f in fields}
    peak = gaussian_peak(h)
    scores: dict[int, float] = {}
    for ln in lines:
        field = by_id[ln.line_id]
        lookup = field.lookup()
        sims = []
        for other in lines:
            if other.line_id == ln.line_id:
                continue
            flat = other.pixels[:, 1].astype(np.int64) * grid_w + other.pixels[:, 0]
            if not any(int(v) in lookup for v in flat):
                continue  # not a neighbor: no chain pixel inside the band
            sims.append(similarity(field, other, lookup) / peak)
        if not sims:
            scores[ln.line_id] = 1.0
        else:
            scores[ln.line_id] = min(1.0, max(0.0, 1.0 - sum(sims) / len(sims)))
    return scores


def principal_axis_eigh(tangents, weights) -> np.ndarray:
    """Dominant orientation via numpy's symmetric eigensolver (unsigned)."""
    t = np.asarray(tangents, dtype=float).reshape(-1, 2)
    w = np.asarray(weights, dtype=float).reshape(-1)
    tensor = np.zeros((2, 2))
    for ti, wi in zip(t, w):
        tensor += wi * np.outer(ti, ti)
    vals, vecs = np.linalg.eigh(tensor)
    return vecs[:, np.argmax(vals)]
