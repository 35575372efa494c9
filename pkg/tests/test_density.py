from __future__ import annotations

import math

import numpy as np
import pytest

from lineglow.density import aggregate, gaussian_peak, line_density
from lineglow.model import Polyline, rasterize

from conftest import make_raster
from oracles import density_value_direct


def test_single_pixel_kernel_values():
    r = make_raster([[5, 5], [5.4, 5.0]])
    assert len(r.pixels) == 1
    field = line_density(r, 1.0, 5, 64, 64)
    assert field.value_at(5, 5) == pytest.approx(1.0 / (2.0 * math.pi), abs=1e-12)
    assert field.value_at(6, 5) == pytest.approx(math.exp(-0.5) / (2.0 * math.pi), abs=1e-12)


def test_symmetry_above_below_line():
    r = make_raster([[10, 30], [29, 30]], grid=64)
    field = line_density(r, 1.0, 5, 64, 64)
    for col in (18, 19, 20):
        for off in (1, 2, 3):
            assert field.value_at(col, 30 - off) == pytest.approx(field.value_at(col, 30 + off), rel=1e-12)


def test_probe_matches_direct_summation():
    # 5-pixel horizontal line at row 5; probe (5, 10) is band_radius away.
    r = make_raster([[3, 5], [7, 5]])
    field = line_density(r, 2.0, 5, 64, 64)
    direct = density_value_direct(r, 5, 10, 2.0)
    peak = max(density_value_direct(r, c, 5, 2.0) for c in range(3, 8))
    assert abs(field.value_at(5, 10) - direct) < 1e-3 * peak


def test_band_truncation_zero_outside():
    r = make_raster([[10, 10], [20, 10]])
    field = line_density(r, 1.0, 5, 64, 64)
    assert field.value_at(15, 16) == 0.0
    assert field.value_at(15, 15) > 0.0


def test_additivity_identical_lines():
    r1 = make_raster([[5, 9], [25, 17]], line_id=0)
    r2 = make_raster([[5, 9], [25, 17]], line_id=1)
    single = aggregate([r1], 1.0, 5, 64, 64)
    double = aggregate([r1, r2], 1.0, 5, 64, 64)
    assert np.allclose(double.grid.data, 2.0 * single.grid.data, atol=0.0)


def test_far_region_zero():
    r = make_raster([[5, 5], [10, 5]])
    field = aggregate([r], 1.0, 5, 64, 64)
    assert field.grid.data[40:, 40:].max() == 0.0


def test_partition_additivity():
    rng = np.random.default_rng(2)
    rasters = [
        rasterize(Polyline(id=i, vertices=rng.uniform(4, 60, (4, 2))), 3, 64, 64)
        for i in range(6)
    ]
    full = aggregate(rasters, 1.0, 5, 64, 64)
    part = aggregate(rasters[:3], 1.0, 5, 64, 64).grid.data + aggregate(rasters[3:], 1.0, 5, 64, 64).grid.data
    assert np.allclose(full.grid.data, part, atol=1e-15)


def test_translation_equivariance():
    base = make_raster([[10, 10], [20, 16]], grid=64)
    shifted = make_raster([[15, 13], [25, 19]], grid=64)
    fa = aggregate([base], 1.0, 5, 64, 64).grid.data
    fb = aggregate([shifted], 1.0, 5, 64, 64).grid.data
    assert np.allclose(fb[13 + 3 : 30, 15 + 3 : 40], fa[10 + 3 : 27, 10 + 3 : 35], atol=1e-15)


def test_monotone_under_added_line():
    r1 = make_raster([[5, 9], [25, 17]], line_id=0)
    r2 = make_raster([[9, 30], [30, 32]], line_id=1)
    one = aggregate([r1], 1.0, 5, 64, 64).grid.data
    two = aggregate([r1, r2], 1.0, 5, 64, 64).grid.data
    assert np.all(two >= one)


def test_per_line_max_recorded():
    r1 = make_raster([[5, 9], [25, 17]], line_id=4)
    field = aggregate([r1], 1.0, 5, 64, 64)
    assert set(field.per_line_max) == {4}
    assert field.per_line_max[4] == pytest.approx(field.grid.data.max())


def test_values_nonnegative_and_finite():
    rng = np.random.default_rng(9)
    rasters = [
        rasterize(Polyline(id=i, vertices=rng.uniform(4, 60, (5, 2))), 3, 64, 64)
        for i in range(4)
    ]
    field = aggregate(rasters, 1.5, 6, 64, 64)
    assert np.all(field.grid.data >= 0.0)
    assert np.all(np.isfinite(field.grid.data))


def test_preconditions():
    r = make_raster([[5, 9], [25, 17]])
    with pytest.raises(ValueError):
        line_density(r, 0.0, 5, 64, 64)
    with pytest.raises(ValueError):
        line_density(r, 1.0, 0, 64, 64)
    with pytest.raises(ValueError):
        aggregate([], 1.0, 5, 64, 64)


def test_gaussian_peak():
    assert gaussian_peak(1.0) == pytest.approx(1.0 / (2.0 * math.pi))
    assert gaussian_peak(2.0) == pytest.approx(1.0 / (8.0 * math.pi))
