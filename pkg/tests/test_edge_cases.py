"""Degenerate and boundary configurations across the pipeline."""

from __future__ import annotations

import numpy as np
import pytest

from lineglow import synth
from lineglow.model import IngestError, Polyline, RenderParams, ingest, rasterize
from lineglow.pipeline import prepare, render


def test_single_line_dataset_renders():
    lines = [Polyline(id=0, vertices=np.array([[10.0, 20.0], [90.0, 60.0]]))]
    prep = prepare(lines, 128, 128)
    assert prep.index.scores == {0: 1.0}
    res = render(prep, RenderParams(mu=0.5, sigma=1.0, phi=-15.0))
    assert res.image.pixels.shape == (128, 128, 3)
    assert res.selection.selected == (0,)


def test_all_identical_lines():
    lines = [
        Polyline(id=i, vertices=np.array([[10.0, 40.0], [90.0, 40.0]])) for i in range(6)
    ]
    prep = prepare(lines, 128, 128)
    scores = set(prep.index.scores.values())
    assert len(scores) == 1
    ranks = sorted(prep.index.ranks.values())
    assert ranks == list(range(6))
    render(prep, RenderParams(sigma=0.5, phi=-10.0))


def test_kernel_one_footprint_is_chain():
    line = Polyline(id=0, vertices=np.array([[5.0, 5.0], [20.0, 11.0]]))
    r = rasterize(line, 1, 64, 64)
    assert {tuple(p) for p in r.footprint.tolist()} == {tuple(p) for p in r.pixels.tolist()}
    prep = prepare([line, Polyline(id=1, vertices=np.array([[5.0, 9.0], [20.0, 15.0]]))],
                   64, 64, kernel_n=1)
    render(prep, RenderParams(kernel_n=1, sigma=1.0, phi=-10.0))


def test_large_kernel_and_bandwidth():
    lines = synth.random_dataset(8, grid=96, seed=51)
    prep = prepare(lines, 96, 96, kernel_n=9, bandwidth_h=3.0)
    assert prep.band_radius == 9  # max(5, ceil(3 * 3))
    res = render(prep, RenderParams(kernel_n=9, bandwidth_h=3.0, sigma=0.7, phi=-20.0))
    assert np.all(np.isfinite(res.intensity_map.grid.data))


def test_non_square_grid():
    lines = synth.random_dataset(12, grid=96, seed=52)
    prep = prepare(lines, 192, 96)
    res = render(prep, RenderParams(sigma=0.5, phi=-12.0))
    assert res.image.pixels.shape == (96, 192, 3)
    assert res.normal_map.normals.shape == (96, 192, 3)


def test_line_touching_grid_border():
    lines = [
        Polyline(id=0, vertices=np.array([[0.0, 0.0], [63.0, 63.0]])),
        Polyline(id=1, vertices=np.array([[0.0, 63.0], [63.0, 0.0]])),
    ]
    prep = prepare(lines, 64, 64)
    res = render(prep, RenderParams(sigma=1.0, phi=-15.0))
    norms = np.linalg.norm(res.normal_map.normals, axis=-1)
    assert np.all(np.abs(norms - 1.0) < 1e-6)


def test_margin_out_of_range_rejected(tmp_path):
    path = tmp_path / "d.csv"
    path.write_text("0,0,0\n0,1,1\n")
    with pytest.raises(IngestError, match="margin"):
        ingest(path, grid_w=64, grid_h=64, margin=0.6)
    with pytest.raises(IngestError, match="margin"):
        ingest(path, grid_w=64, grid_h=64, margin=-0.1)


def test_mostly_offgrid_dataset():
    lines = [
        Polyline(id=0, vertices=np.array([[-50.0, 30.0], [30.0, 30.0]])),
        Polyline(id=1, vertices=np.array([[10.0, -40.0], [10.0, 200.0]])),
    ]
    prep = prepare(lines, 64, 64)
    assert len(prep.lines) == 2
    render(prep, RenderParams(sigma=1.0, phi=-10.0))


def test_sigma_rounding_boundaries():
    from lineglow.normals import select_lines
    from lineglow.outlierness import OutlierIndex

    idx = OutlierIndex(
        scores={i: i / 3 for i in range(4)},
        ranks={i: i for i in range(4)},
        normalized={i: i / 3 for i in range(4)},
        neighbors={i: frozenset() for i in range(4)},
    )
    # round(sigma * 4 + 0.5) boundary behavior
    assert len(select_lines(idx, 0.0, 0.124).selected) == 0   # floor(0.996)
    assert len(select_lines(idx, 0.0, 0.125).selected) == 1   # floor(1.0)
    assert len(select_lines(idx, 0.0, 0.874).selected) == 3
    assert len(select_lines(idx, 0.0, 0.875).selected) == 4
