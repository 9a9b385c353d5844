import math

import numpy as np
import pytest

from bokehkit.metrics import (
    MS_SSIM_WEIGHTS,
    charbonnier,
    combined_l1_ssim,
    gray_l1,
    l1,
    ms_ssim,
    psnr,
    sobel_loss,
    ssim,
)

# ---------------------------------------------------------------------------
# independent scalar references


def ssim_reference(a_gray: np.ndarray, b_gray: np.ndarray) -> float:
    """Windowed SSIM computed with explicit double loops (no convolution)."""
    size, sigma = 11, 1.5
    half = size // 2
    ax = np.arange(size) - (size - 1) / 2.0
    g1 = np.exp(-(ax**2) / (2 * sigma**2))
    win = np.outer(g1, g1)
    win /= win.sum()
    c1, c2 = 0.01**2, 0.03**2
    h, w = a_gray.shape
    scores = []
    for yc in range(half, h - half):
        for xc in range(half, w - half):
            pa = a_gray[yc - half : yc + half + 1, xc - half : xc + half + 1]
            pb = b_gray[yc - half : yc + half + 1, xc - half : xc + half + 1]
            mu_a = float((win * pa).sum())
            mu_b = float((win * pb).sum())
            va = float((win * pa * pa).sum()) - mu_a * mu_a
            vb = float((win * pb * pb).sum()) - mu_b * mu_b
            cov = float((win * pa * pb).sum()) - mu_a * mu_b
            lum = (2 * mu_a * mu_b + c1) / (mu_a**2 + mu_b**2 + c1)
            cs = (2 * cov + c2) / (va + vb + c2)
            scores.append(lum * cs)
    return float(np.mean(scores))


def sobel_magnitude_reference(gray: np.ndarray) -> np.ndarray:
    kx = np.array([[-1, 0, 1], [-2, 0, 2], [-1, 0, 1]], dtype=float)
    ky = kx.T
    h, w = gray.shape

    def reflect(i, n):
        if i < 0:
            return -i
        if i >= n:
            return 2 * (n - 1) - i
        return i

    gx = np.zeros_like(gray)
    gy = np.zeros_like(gray)
    for y in range(h):
        for x in range(w):
            sx = sy = 0.0
            for dy in (-1, 0, 1):
                for dx in (-1, 0, 1):
                    v = gray[reflect(y + dy, h), reflect(x + dx, w)]
                    sx += kx[dy + 1, dx + 1] * v
                    sy += ky[dy + 1, dx + 1] * v
            gx[y, x] = sx
            gy[y, x] = sy
    return np.sqrt(gx * gx + gy * gy)


# ---------------------------------------------------------------------------
# PSNR


class TestPsnr:
    def test_identical_is_inf(self, rng):
        img = rng.random((8, 8, 3))
        assert psnr(img, img) == math.inf

    def test_constant_error_closed_form(self):
        a = np.full((16, 16, 3), 0.5)
        b = a + 1 / 255
        assert psnr(a, b) == pytest.approx(20 * math.log10(255), abs=1e-9)

    def test_doubling_error_drops_6db(self):
        a = np.full((16, 16, 3), 0.4)
        drop = psnr(a, a + 1 / 255) - psnr(a, a + 2 / 255)
        assert drop == pytest.approx(20 * math.log10(2), abs=1e-9)

    def test_monotone_in_error(self):
        a = np.full((8, 8, 3), 0.3)
        values = [psnr(a, a + k / 255) for k in (1, 2, 3, 4, 5)]
        assert all(x > y for x, y in zip(values, values[1:]))

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            psnr(np.zeros((4, 4, 1)), np.zeros((4, 5, 1)))


# ---------------------------------------------------------------------------
# SSIM


class TestSsim:
    def test_self_similarity(self, rng):
        img = rng.random((24, 24, 3))
        assert ssim(img, img) == pytest.approx(1.0, abs=1e-9)

    def test_constant_offset_from_formula(self):
        a = np.full((16, 16, 1), 0.4)
        b = np.full((16, 16, 1), 0.6)
        c1 = 0.01**2
        expected = (2 * 0.4 * 0.6 + c1) / (0.4**2 + 0.6**2 + c1)  # structure term is 1
        assert ssim(a, b) == pytest.approx(expected, abs=1e-9)
        assert expected < 1.0

    def test_independent_noise_near_zero(self):
        local = np.random.default_rng(123)
        a = local.random((256, 256, 1))
        b = local.random((256, 256, 1))
        assert abs(ssim(a, b)) < 0.1

    def test_matches_scalar_reference(self):
        local = np.random.default_rng(7)
        for _ in range(3):
            a = local.random((32, 32, 1))
            b = np.clip(a + local.normal(0, 0.1, a.shape), 0, 1)
            ref = ssim_reference(a[:, :, 0], b[:, :, 0])
            assert ssim(a, b) == pytest.approx(ref, abs=1e-6)

    def test_constant_shift_invariance_with_equal_means(self, rng):
        # shift invariance requires identical local means (the luminance term
        # depends on the means themselves, not their difference); build the
        # difference image in the null space of the windowed-mean operator
        from scipy.linalg import null_space

        from bokehkit.metrics import _gaussian_window

        n = 16
        win = _gaussian_window()
        rows = []
        for yc in range(5, n - 5):
            for xc in range(5, n - 5):
                m = np.zeros((n, n))
                m[yc - 5 : yc + 6, xc - 5 : xc + 6] = win
                rows.append(m.ravel())
        basis = null_space(np.asarray(rows))
        v = basis[:, 0].reshape(n, n)
        a = rng.random((n, n)) * 0.5 + 0.2
        b = a + 0.05 * v / np.abs(v).max()
        s0 = ssim(a[:, :, None], b[:, :, None])
        s1 = ssim(a[:, :, None] + 0.3, b[:, :, None] + 0.3)
        assert s1 == pytest.approx(s0, abs=1e-6)

    def test_too_small_rejected(self):
        with pytest.raises(ValueError):
            ssim(np.zeros((8, 8, 1)), np.zeros((8, 8, 1)))

    def test_symmetry(self, rng):
        a, b = rng.random((16, 16, 3)), rng.random((16, 16, 3))
        assert ssim(a, b) == pytest.approx(ssim(b, a), abs=1e-9)


class TestMsSsim:
    def test_self_similarity(self, rng):
        img = rng.random((192, 192, 3))
        assert ms_ssim(img, img) == pytest.approx(1.0, abs=1e-9)

    def test_weights_sum_to_one(self):
        assert sum(MS_SSIM_WEIGHTS) == pytest.approx(1.0, abs=1e-6)

    def test_single_level_reduces_to_ssim(self, rng):
        a = rng.random((32, 32, 1))
        b = np.clip(a + rng.normal(0, 0.05, a.shape), 0, 1)
        ref = ssim_reference(a[:, :, 0], b[:, :, 0])
        assert ms_ssim(a, b, levels=1) == pytest.approx(ref, abs=1e-6)

    def test_size_precondition(self):
        with pytest.raises(ValueError):
            ms_ssim(np.zeros((64, 64, 1)), np.zeros((64, 64, 1)), levels=5)


# ---------------------------------------------------------------------------
# losses


class TestLosses:
    def test_charbonnier_identical_exact(self, rng):
        img = rng.random((64, 64, 3))
        assert charbonnier(img, img) == 1e-3

    def test_charbonnier_unit_error(self):
        a = np.zeros((8, 8, 1))
        b = np.ones((8, 8, 1))
        assert charbonnier(a, b) == pytest.approx(math.sqrt(1 + 1e-6), rel=1e-12)

    def test_charbonnier_dominates_l1(self, rng):
        a, b = rng.random((8, 8, 3)), rng.random((8, 8, 3))
        assert charbonnier(a, b) >= l1(a, b)

    def test_sobel_identical_and_constants(self, rng):
        img = rng.random((16, 16, 3))
        assert sobel_loss(img, img) == 0.0
        assert sobel_loss(np.full((8, 8, 3), 0.2), np.full((8, 8, 3), 0.9)) == 0.0

    def test_sobel_step_edge_matches_stencil(self):
        edge = np.zeros((12, 12, 1))
        edge[:, 6:] = 1.0
        flat = np.zeros((12, 12, 1))
        expected = float(np.mean(sobel_magnitude_reference(edge[:, :, 0])))
        assert sobel_loss(edge, flat) == pytest.approx(expected, abs=1e-10)

    def test_gray_l1_red_vs_green(self):
        red = np.zeros((4, 4, 3))
        red[..., 0] = 1.0
        green = np.zeros((4, 4, 3))
        green[..., 1] = 1.0
        assert gray_l1(red, green) == pytest.approx(abs(0.299 - 0.587), abs=1e-12)

    def test_gray_l1_symmetric(self, rng):
        a, b = rng.random((8, 8, 3)), rng.random((8, 8, 3))
        assert gray_l1(a, b) == pytest.approx(gray_l1(b, a), abs=1e-12)

    def test_combined_zero_for_identical(self, rng):
        img = rng.random((16, 16, 3))
        assert combined_l1_ssim(img, img) == pytest.approx(0.0, abs=1e-9)

    def test_combined_default_weights(self, rng):
        a = rng.random((16, 16, 3))
        b = np.clip(a + rng.normal(0, 0.1, a.shape), 0, 1)
        expected = 0.5 * l1(a, b) + 1.0 * (1 - ssim(a, b))
        assert combined_l1_ssim(a, b) == pytest.approx(expected, abs=1e-12)

    def test_combined_nonnegative(self, rng):
        a, b = rng.random((16, 16, 3)), rng.random((16, 16, 3))
        assert combined_l1_ssim(a, b) >= 0.0

    def test_all_losses_symmetric(self, rng):
        a, b = rng.random((16, 16, 3)), rng.random((16, 16, 3))
        for fn in (l1, charbonnier, sobel_loss, gray_l1):
            assert fn(a, b) == pytest.approx(fn(b, a), abs=1e-9)
