from __future__ import annotations

import json

import numpy as np
import pytest

from lineglow import colorspace as cs
from lineglow.colorize import (
    BACKGROUND_RGB,
    Colormap,
    baseline_rgb_lambert,
    compose_luminance,
    load_colormap,
    map_density,
    scale_intensity,
)
from lineglow.lighting import IntensityMap
from lineglow.model import ScalarGrid


class TestColorspace:
    def test_roundtrip_lattice_within_one(self):
        # 4096-color lattice across the 8-bit cube
        vals = np.arange(0, 256, 17, dtype=np.uint8)  # 16 levels
        r, g, b = np.meshgrid(vals, vals, vals, indexing="ij")
        rgb = np.stack([r, g, b], axis=-1).reshape(-1, 3)
        lab = cs.srgb8_to_lab(rgb)
        back, clamped = cs.lab_to_srgb8(lab)
        assert not clamped.any()
        assert np.max(np.abs(back.astype(int) - rgb.astype(int))) <= 1

    def test_known_values(self):
        white = cs.srgb8_to_lab(np.array([255, 255, 255], dtype=np.uint8))
        assert white[0] == pytest.approx(100.0, abs=1e-3)
        assert abs(white[1]) < 1e-2 and abs(white[2]) < 1e-2
        black = cs.srgb8_to_lab(np.array([0, 0, 0], dtype=np.uint8))
        assert black[0] == pytest.approx(0.0, abs=1e-6)
        mid = cs.srgb8_to_lab(np.array([119, 119, 119], dtype=np.uint8))
        assert mid[0] == pytest.approx(50.0, abs=0.5)

    def test_lch_roundtrip(self):
        rng = np.random.default_rng(12)
        lab = np.stack(
            [rng.uniform(5, 95, 50), rng.uniform(-60, 60, 50), rng.uniform(-60, 60, 50)],
            axis=-1,
        )
        back = cs.lch_to_lab(cs.lab_to_lch(lab))
        assert np.allclose(back, lab, atol=1e-9)

    def test_fit_chroma_preserves_hue_and_l(self):
        lch = np.array([[40.0, 120.0, 200.0]])
        fitted = cs.fit_chroma(lch)
        assert fitted[0, 0] == 40.0
        assert fitted[0, 2] == 200.0
        assert fitted[0, 1] < 120.0
        assert cs.in_gamut(cs.lch_to_lab(fitted))[0]


class TestMapDensity:
    def test_all_zero_density_empty_image(self):
        img = map_density(np.zeros((8, 8)), np.zeros((8, 8), bool), Colormap(kind="multi_hue"))
        assert np.all(img.empty_mask)
        assert np.all(img.pixels == np.array(BACKGROUND_RGB, np.uint8))

    def test_peak_gets_last_stop(self):
        f = np.zeros((8, 8))
        f[3, 3] = 2.0
        cov = f > 0
        cmap = Colormap(kind="multi_hue")
        img = map_density(f, cov, cmap)
        assert tuple(img.pixels[3, 3]) == cmap.stops[-1][1]

    def test_cluster_hues_distinct(self):
        f = np.ones((8, 8))
        cov = np.ones((8, 8), bool)
        clusters = np.zeros((8, 8), np.int64)
        clusters[:, 4:] = 1
        img = map_density(f, cov, Colormap(kind="single_hue"), clusters=clusters)
        lab = cs.srgb8_to_lab(img.pixels)
        lch = cs.lab_to_lch(lab)
        h_left = lch[2, 1, 2]
        h_right = lch[2, 6, 2]
        from lineglow.colorize import CLUSTER_HUES

        assert abs((h_left - CLUSTER_HUES[0] + 180) % 360 - 180) < 3.0
        assert abs((h_right - CLUSTER_HUES[1] + 180) % 360 - 180) < 3.0

    def test_single_hue_requires_clusters(self):
        with pytest.raises(ValueError):
            map_density(np.ones((4, 4)), np.ones((4, 4), bool), Colormap(kind="single_hue"))

    def test_log_vs_linear_scale(self):
        f = np.array([[0.1, 1.0], [10.0, 100.0]])
        cov = np.ones((2, 2), bool)
        lin = map_density(f, cov, Colormap(kind="multi_hue", density_scale="linear"))
        log = map_density(f, cov, Colormap(kind="multi_hue", density_scale="log"))
        assert not np.array_equal(lin.pixels, log.pixels)

    def test_stops_validation(self):
        with pytest.raises(ValueError):
            Colormap(kind="multi_hue", stops=((0.1, (0, 0, 0)), (1.0, (255, 255, 255))))

    def test_load_colormap_json(self, tmp_path):
        path = tmp_path / "cmap.json"
        path.write_text(json.dumps({
            "kind": "multi_hue",
            "density_scale": "linear",
            "stops": [[0.0, [0, 0, 0]], [1.0, [255, 255, 255]]],
        }))
        cmap = load_colormap(path)
        assert cmap.stops == ((0.0, (0, 0, 0)), (1.0, (255, 255, 255)))
        assert cmap.density_scale == "linear"


class TestScaleIntensity:
    def _imap(self, data, i_empty=0.8660254037844386):
        arr = np.asarray(data, dtype=float)
        return IntensityMap(grid=ScalarGrid(arr), i_empty=i_empty, i_min=float(arr.min()))

    def test_empty_anchor_maps_to_zero(self):
        imap = self._imap([[0.866025403784438, 0.5], [0.2, 0.866025403784438]],
                          i_empty=0.866025403784438)
        out = scale_intensity(imap, -20.0)
        assert out.data[0, 0] == pytest.approx(0.0)

    def test_min_maps_to_phi(self):
        imap = self._imap([[0.8660254, 0.5], [0.2, 0.8660254]], i_empty=0.8660254)
        out = scale_intensity(imap, -20.0)
        assert out.data[1, 0] == pytest.approx(-20.0)

    def test_phi_zero_all_zero(self):
        imap = self._imap([[0.8660254, 0.5], [0.2, 0.8660254]], i_empty=0.8660254)
        out = scale_intensity(imap, 0.0)
        assert np.all(out.data == 0.0)

    def test_constant_field_returns_zeros(self):
        imap = self._imap(np.full((4, 4), 0.8660254), i_empty=0.8660254)
        out = scale_intensity(imap, -20.0)
        assert np.all(out.data == 0.0)

    def test_more_negative_phi_grows_shift(self):
        imap = self._imap([[0.8660254, 0.5], [0.2, 0.7]], i_empty=0.8660254)
        a = np.abs(scale_intensity(imap, -10.0).data)
        b = np.abs(scale_intensity(imap, -25.0).data)
        assert np.all(b >= a)


class TestComposeLuminance:
    def _base(self):
        f = np.linspace(0, 4, 64).reshape(8, 8)
        cov = f > 0.5
        return map_density(f, cov, Colormap(kind="multi_hue"))

    def test_zero_shift_is_identity(self):
        base = self._base()
        out = compose_luminance(base, ScalarGrid(np.zeros((8, 8))))
        assert np.array_equal(out.pixels, base.pixels)

    def test_midgray_shift_arithmetic(self):
        px = np.full((1, 1, 3), 128, dtype=np.uint8)
        base_lab = cs.srgb8_to_lab(px[0, 0])
        from lineglow.colorize import ColorImage

        base = ColorImage(pixels=px, empty_mask=np.zeros((1, 1), bool))
        out = compose_luminance(base, ScalarGrid(np.array([[-20.0]])))
        out_lab = cs.srgb8_to_lab(out.pixels[0, 0])
        assert out_lab[0] == pytest.approx(base_lab[0] - 20.0, abs=0.5)
        assert out_lab[1] == pytest.approx(base_lab[1], abs=0.5)
        assert out_lab[2] == pytest.approx(base_lab[2], abs=0.5)

    def test_empty_pixels_untouched(self):
        base = self._base()
        out = compose_luminance(base, ScalarGrid(np.full((8, 8), -15.0)))
        assert np.array_equal(out.pixels[base.empty_mask], base.pixels[base.empty_mask])

    def test_chroma_drift_bounded_where_unclamped(self):
        base = self._base()
        out = compose_luminance(base, ScalarGrid(np.full((8, 8), -18.0)))
        mask = (~base.empty_mask) & (~out.clamp_mask)
        la = cs.srgb8_to_lab(base.pixels[mask])
        lb = cs.srgb8_to_lab(out.pixels[mask])
        assert np.max(np.abs(la[:, 1] - lb[:, 1])) <= 0.5
        assert np.max(np.abs(la[:, 2] - lb[:, 2])) <= 0.5

    def test_hcl_mode_preserves_hue(self):
        f = np.ones((8, 8))
        cov = np.ones((8, 8), bool)
        clusters = np.zeros((8, 8), np.int64)
        base = map_density(f, cov, Colormap(kind="single_hue"), clusters=clusters)
        out = compose_luminance(base, ScalarGrid(np.full((8, 8), -25.0)), mode="hcl_single_hue")
        la = cs.lab_to_lch(cs.srgb8_to_lab(base.pixels))
        lb = cs.lab_to_lch(cs.srgb8_to_lab(out.pixels))
        dh = np.abs((lb[..., 2] - la[..., 2] + 180.0) % 360.0 - 180.0)
        assert np.max(dh) < 3.0

    def test_l_clamped_at_floor(self):
        px = np.full((1, 1, 3), 40, dtype=np.uint8)
        from lineglow.colorize import ColorImage

        base = ColorImage(pixels=px, empty_mask=np.zeros((1, 1), bool))
        out = compose_luminance(base, ScalarGrid(np.array([[-80.0]])))
        out_lab = cs.srgb8_to_lab(out.pixels[0, 0])
        assert out_lab[0] == pytest.approx(0.0, abs=0.5)


class TestBaseline:
    def _base(self):
        f = np.linspace(0, 4, 64).reshape(8, 8)
        cov = f > 0.5
        return map_density(f, cov, Colormap(kind="multi_hue"))

    def _imap(self, data):
        arr = np.asarray(data, dtype=float)
        return IntensityMap(grid=ScalarGrid(arr), i_empty=0.866, i_min=float(arr.min()))

    def test_unit_intensity_identity(self):
        base = self._base()
        out = baseline_rgb_lambert(base, self._imap(np.ones((8, 8))))
        assert np.array_equal(out.pixels, base.pixels)

    def test_zero_intensity_black(self):
        base = self._base()
        out = baseline_rgb_lambert(base, self._imap(np.zeros((8, 8))))
        ne = ~base.empty_mask
        assert np.all(out.pixels[ne] == 0)

    def test_scaled_darkening_variant(self):
        base = self._base()
        imap = self._imap(np.zeros((8, 8)))
        out = baseline_rgb_lambert(base, imap, scale=0.5)
        ne = ~base.empty_mask
        assert np.allclose(out.pixels[ne], np.rint(base.pixels[ne] * 0.5), atol=1.0)
