import numpy as np
import pytest
from scipy import ndimage

from bokehkit.errors import StageError
from bokehkit.image import convolve2d, disc_kernel
from bokehkit.metrics import psnr
from bokehkit.render import (
    EPS_WEIGHT,
    RenderConfig,
    composite_foreground,
    defocus_from_depth,
    layer_masks,
    layer_radii,
    radiance_weight,
    render_bokeh,
    render_layered,
)


def smooth_scene(h, w, seed=11):
    rng = np.random.default_rng(seed)
    img = ndimage.gaussian_filter(rng.random((h, w, 3)), (8, 8, 0))
    return (img - img.min()) / (img.max() - img.min())


class TestDefocusFromDepth:
    def test_in_focus_plane_is_zero(self):
        depth = np.full((4, 4), 0.6)
        np.testing.assert_array_equal(defocus_from_depth(depth, 0.6, 10.0), 0.0)

    def test_two_plane_normalization(self):
        depth = np.full((4, 4), 0.5)
        depth[:, 2:] = 1.0
        d = defocus_from_depth(depth, 0.5, 10.0)
        np.testing.assert_allclose(d[:, :2], 0.0)
        np.testing.assert_allclose(d[:, 2:], 10.0)

    def test_three_plane_hand_formula(self):
        depth = np.array([[0.25, 0.5, 1.0]])
        focus, max_r = 0.5, 8.0
        d = defocus_from_depth(depth, focus, max_r)
        spread = np.abs(1.0 / depth - 1.0 / focus)
        expected = max_r * spread / spread.max()
        np.testing.assert_allclose(d, expected)
        assert d[0, 0] == pytest.approx(8.0)  # |4-2| = 2 is the max spread
        assert d[0, 2] == pytest.approx(4.0)  # |1-2| = 1 -> half of max

    def test_nonpositive_depth_rejected(self):
        with pytest.raises(ValueError):
            defocus_from_depth(np.zeros((2, 2)), 0.5, 4.0)


class TestRadianceWeight:
    def test_gamma_one(self):
        img = np.full((2, 2, 3), 0.5)
        np.testing.assert_allclose(radiance_weight(img, 1.0), 0.5 + EPS_WEIGHT)

    def test_black_pixel(self):
        w = radiance_weight(np.zeros((2, 2, 3)), 4.0)
        np.testing.assert_allclose(w, EPS_WEIGHT**4)

    def test_bright_dominance_ratio(self):
        img = np.zeros((1, 2, 3))
        img[0, 0] = 0.25
        img[0, 1] = 1.0
        w = radiance_weight(img, 4.0)
        assert w[0, 1] / w[0, 0] == pytest.approx((1.001 / 0.251) ** 4, rel=1e-9)

    def test_gamma_below_one_rejected(self):
        with pytest.raises(ValueError):
            radiance_weight(np.zeros((2, 2, 3)), 0.5)


class TestRenderLayered:
    def test_zero_defocus_identity(self, rng):
        img = rng.random((32, 32, 3))
        out = render_layered(img, np.zeros((32, 32)), np.ones((32, 32)), 8)
        assert np.abs(out - img).max() <= 1e-6

    @pytest.mark.parametrize("num_layers", [1, 8])
    def test_constant_defocus_equals_disc_convolution(self, rng, num_layers):
        img = rng.random((48, 48, 3))
        d = 3.0
        out = render_layered(img, np.full((48, 48), d), np.ones((48, 48)), num_layers)
        direct = convolve2d(img, disc_kernel(d))
        margin = int(np.ceil(d))
        interior = np.abs(out - direct)[margin:-margin, margin:-margin]
        assert interior.max() <= 1e-4

    def test_two_plane_foreground_preserved(self, rng):
        img = rng.random((48, 48, 3))
        d = 5.0
        defocus = np.zeros((48, 48))
        defocus[:, 24:] = d
        out = render_layered(img, defocus, np.ones((48, 48)), 8)
        margin = int(np.ceil(d))
        # foreground pixels at least `margin` away from the mask boundary
        fg = slice(0, 24 - margin)
        assert np.abs(out[:, fg] - img[:, fg]).max() <= 2 / 255

    def test_layer_masks_partition_unity(self, rng):
        defocus = rng.random((32, 32)) * 7.3
        masks = layer_masks(defocus, layer_radii(defocus, 8))
        total = np.sum(masks, axis=0)
        np.testing.assert_allclose(total, 1.0, atol=1e-6)

    def test_energy_preserved_interior(self, rng):
        img = smooth_scene(64, 64, seed=3)
        defocus = ndimage.gaussian_filter(rng.random((64, 64)), 8)
        defocus = 6.0 * (defocus - defocus.min()) / (defocus.max() - defocus.min())
        out = render_layered(img, defocus, np.ones((64, 64)), 8)
        m = 8
        mean_in = img[m:-m, m:-m].mean()
        mean_out = out[m:-m, m:-m].mean()
        assert abs(mean_out - mean_in) / mean_in <= 0.01

    def test_blur_monotone_in_max_radius(self):
        img = smooth_scene(64, 64, seed=5)
        depth = np.full((64, 64), 0.4)
        depth[:, 32:] = 1.0
        variances = []
        for max_radius in (2.0, 4.0, 6.0, 8.0):
            defocus = defocus_from_depth(depth, 0.4, max_radius)
            out = render_layered(img, defocus, np.ones((64, 64)), 8)
            bg = out[10:-10, 42:-10].mean(axis=2)
            variances.append(float(np.var(ndimage.laplace(bg))))
        assert all(a >= b - 1e-12 for a, b in zip(variances, variances[1:]))

    def test_shape_mismatch_rejected(self, rng):
        with pytest.raises(ValueError):
            render_layered(rng.random((8, 8, 3)), np.zeros((9, 8)), np.ones((8, 8)), 4)


class TestCompositeForeground:
    def test_all_in_focus_returns_original(self, rng):
        orig, rend = rng.random((8, 8, 3)), rng.random((8, 8, 3))
        out = composite_foreground(orig, rend, np.zeros((8, 8)), 1.0, 1.0)
        np.testing.assert_array_equal(out, orig)

    def test_all_defocused_returns_rendered(self, rng):
        orig, rend = rng.random((8, 8, 3)), rng.random((8, 8, 3))
        out = composite_foreground(orig, rend, np.full((8, 8), 50.0), 1.0, 1.0)
        np.testing.assert_array_equal(out, rend)

    def test_threshold_midpoint(self, rng):
        orig, rend = rng.random((8, 8, 3)), rng.random((8, 8, 3))
        out = composite_foreground(orig, rend, np.full((8, 8), 2.0), 2.0, 1.0)
        np.testing.assert_allclose(out, 0.5 * orig + 0.5 * rend)

    def test_nonpositive_softness_rejected(self, rng):
        img = rng.random((4, 4, 3))
        with pytest.raises(ValueError):
            composite_foreground(img, img, np.zeros((4, 4)), 1.0, 0.0)


class TestRenderBokeh:
    def test_identity_at_focus_full_scale(self):
        img = smooth_scene(48, 48)
        out = render_bokeh(img, np.full((48, 48), 0.5),
                           RenderConfig(focus_depth=0.5, max_radius=10, work_scale=1.0))
        assert np.abs(out - img).max() <= 1e-6

    @pytest.mark.parametrize("scale", [1.0, 0.5, 0.25])
    def test_identity_at_focus_any_scale(self, scale):
        img = smooth_scene(48, 48)
        out = render_bokeh(img, np.full((48, 48), 0.7),
                           RenderConfig(focus_depth=0.7, max_radius=10, work_scale=scale))
        assert np.abs(out - img).max() <= 1e-6

    def test_half_scale_consistent_with_full(self):
        img = smooth_scene(128, 160)
        xx = np.mgrid[0:128, 0:160][1]
        depth = 0.3 + 0.7 * (xx / 159)
        cfg_full = RenderConfig(focus_depth=0.35, max_radius=6, work_scale=1.0)
        cfg_half = RenderConfig(focus_depth=0.35, max_radius=6, work_scale=0.5)
        full = render_bokeh(img, depth, cfg_full)
        half = render_bokeh(img, depth, cfg_half)
        assert psnr(full, half) >= 30.0

    def test_stage_annotation_on_failure(self):
        img = smooth_scene(48, 48)
        bad_cfg = RenderConfig(focus_depth=0.5, max_radius=-1.0, work_scale=1.0)
        with pytest.raises(ValueError):
            bad_cfg.validate()
        with pytest.raises(ValueError):
            render_bokeh(img, np.full((48, 48), 0.5), bad_cfg)

    def test_stage_error_names_stage(self):
        img = smooth_scene(48, 48)
        depth = np.full((48, 48), 0.5)
        depth[0, 0] = -0.5  # fails inside the defocus stage
        cfg = RenderConfig(focus_depth=0.5, max_radius=4.0, work_scale=1.0)
        with pytest.raises(StageError, match="defocus"):
            render_bokeh(img, depth, cfg)

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            render_bokeh(smooth_scene(16, 16), np.full((17, 16), 0.5),
                         RenderConfig(focus_depth=0.5, max_radius=2))
