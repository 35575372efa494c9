"""Deterministic synthetic polyline datasets for tests and benchmarks."""

from __future__ import annotations

import numpy as np

from .model import Polyline


def corridor(
    n_lines: int = 120,
    grid: int = 256,
    n_crossers: int = 6,
    seed: int = 7,
) -> list[Polyline]:
    """A diagonal corridor of near-parallel wavy lines plus a few crossers."""
    rng = np.random.default_rng(seed)
    lines: list[Polyline] = []
    span = 0.72 * grid
    x0 = 0.14 * grid
    for i in range(n_lines):
        offset = rng.normal(0.0, 0.055 * grid)
        amp = rng.uniform(0.0, 0.02 * grid)
        phase = rng.uniform(0.0, 2.0 * np.pi)
        ts = np.linspace(0.0, 1.0, 24)
        xs = x0 + ts * span
        ys = x0 + ts * span + offset + amp * np.sin(phase + ts * 4.0 * np.pi)
        pts = np.stack([xs, np.clip(ys, 1.0, grid - 2.0)], axis=1)
        lines.append(Polyline(id=i, vertices=pts, cluster=0))
    for j in range(n_crossers):
        frac = (j + 1) / (n_crossers + 1)
        x = x0 + frac * span
        pts = np.array([[x + 0.12 * grid, x0], [x - 0.12 * grid, x0 + span]])
        lines.append(Polyline(id=n_lines + j, vertices=pts, cluster=1))
    return lines


def parallel_with_crosser(n_parallel: int = 50, grid: int = 128) -> list[Polyline]:
    """n identical horizontal lines plus one perpendicular crosser."""
    y = grid // 2
    x0, x1 = grid // 8, grid - grid // 8
    lines = [
        Polyline(id=i, vertices=np.array([[x0, y], [x1, y]], dtype=float))
        for i in range(n_parallel)
    ]
    xc = grid // 2
    lines.append(
        Polyline(id=n_parallel, vertices=np.array([[xc, grid // 8], [xc, grid - grid // 8]], dtype=float))
    )
    return lines


def random_dataset(
    n_lines: int,
    grid: int = 128,
    seed: int = 0,
    mean_length: float | None = None,
    n_vertices: int = 6,
) -> list[Polyline]:
    """Random smooth-ish walks with varied orientations and lengths."""
    rng = np.random.default_rng(seed)
    if mean_length is None:
        mean_length = 0.35 * grid
    lines = []
    for i in range(n_lines):
        start = rng.uniform(0.1 * grid, 0.9 * grid, size=2)
        angle = rng.uniform(0.0, 2.0 * np.pi)
        length = max(4.0, rng.normal(mean_length, 0.25 * mean_length))
        step = length / (n_vertices - 1)
        pts = [start]
        for _ in range(n_vertices - 1):
            angle += rng.normal(0.0, 0.35)
            nxt = pts[-1] + step * np.array([np.cos(angle), np.sin(angle)])
            pts.append(nxt)
        verts = np.clip(np.asarray(pts), 1.0, grid - 2.0)
        keep = np.ones(len(verts), dtype=bool)
        keep[1:] = np.any(verts[1:] != verts[:-1], axis=1)
        verts = verts[keep]
        if len(verts) < 2:
            verts = np.array([[1.0 + i % 3, 1.0], [grid / 4.0, grid / 4.0]])
        lines.append(Polyline(id=i, vertices=verts))
    return lines


def bench_corpus(n_lines: int, grid: int = 512, seed: int = 42) -> list[Polyline]:
    """Short random segments for wall-time scaling runs."""
    return random_dataset(n_lines, grid=grid, seed=seed, mean_length=0.12 * grid, n_vertices=4)


def clustered_dataset(
    n_per_cluster: int = 40,
    n_clusters: int = 2,
    grid: int = 192,
    seed: int = 3,
) -> list[Polyline]:
    """Disjoint horizontal bands, one cluster per band."""
    rng = np.random.default_rng(seed)
    lines = []
    lid = 0
    for c in range(n_clusters):
        band_lo = grid * (c + 0.15) / n_clusters
        band_hi = grid * (c + 0.85) / n_clusters
        for _ in range(n_per_cluster):
            y = rng.uniform(band_lo, band_hi)
            x0 = rng.uniform(0.05 * grid, 0.25 * grid)
            x1 = rng.uniform(0.75 * grid, 0.95 * grid)
            wob = rng.uniform(-2.0, 2.0)
            pts = np.array([[x0, y], [(x0 + x1) / 2.0, y + wob], [x1, y]])
            lines.append(Polyline(id=lid, vertices=pts, cluster=c))
            lid += 1
    return lines
