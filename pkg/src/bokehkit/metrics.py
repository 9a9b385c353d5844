"""Fidelity metrics and training-style losses for bokeh rendering evaluation.

PSNR and SSIM follow the usual challenge conventions: peak 1.0 for float
images, SSIM with an 11x11 Gaussian window (sigma 1.5, K1=0.01, K2=0.03)
computed on grayscale over valid window positions only.  The loss functions
(L1, Charbonnier, Sobel gradient, grayscale L1, combined L1+SSIM, MS-SSIM)
mirror the objectives commonly used to train bokeh networks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import signal

from .image import as_image, luma

SSIM_WINDOW = 11
SSIM_SIGMA = 1.5
SSIM_K1 = 0.01
SSIM_K2 = 0.03

# Published multi-scale SSIM exponents; they sum to 1.0001, so they are
# renormalized to exactly 1 here.
_MS_SSIM_WEIGHTS_RAW = (0.0448, 0.2856, 0.3001, 0.2363, 0.1333)
MS_SSIM_WEIGHTS = tuple(w / sum(_MS_SSIM_WEIGHTS_RAW) for w in _MS_SSIM_WEIGHTS_RAW)

SOBEL_X = np.array([[-1.0, 0.0, 1.0], [-2.0, 0.0, 2.0], [-1.0, 0.0, 1.0]])
SOBEL_Y = SOBEL_X.T


@dataclass
class MetricReport:
    """Per-image metric values; optional fields are None when not computed."""

    psnr: float
    ssim: float
    ms_ssim: float | None = None
    l1: float | None = None
    charbonnier: float | None = None
    sobel: float | None = None
    gray_l1: float | None = None


def _check_pair(a: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    xa, xb = as_image(a), as_image(b)
    if xa.shape != xb.shape:
        raise ValueError(f"shape mismatch: {xa.shape} vs {xb.shape}")
    return xa, xb


def psnr(a: np.ndarray, b: np.ndarray, peak: float = 1.0) -> float:
    """Peak signal-to-noise ratio in dB; +inf for identical inputs."""
    xa, xb = _check_pair(a, b)
    mse = float(np.mean((xa - xb) ** 2))
    if mse == 0.0:
        return math.inf
    return 10.0 * math.log10(peak * peak / mse)


def _gaussian_window(size: int = SSIM_WINDOW, sigma: float = SSIM_SIGMA) -> np.ndarray:
    half = (size - 1) / 2.0
    x = np.arange(size) - half
    g = np.exp(-(x * x) / (2.0 * sigma * sigma))
    window = np.outer(g, g)
    return window / window.sum()


def _ssim_maps(a: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Per-window luminance and contrast-structure maps on grayscale inputs."""
    ga = luma(a)
    gb = luma(b)
    win = _gaussian_window()

    def filt(x: np.ndarray) -> np.ndarray:
        return signal.convolve(x, win, mode="valid", method="auto")

    mu_a = filt(ga)
    mu_b = filt(gb)
    var_a = filt(ga * ga) - mu_a * mu_a
    var_b = filt(gb * gb) - mu_b * mu_b
    cov = filt(ga * gb) - mu_a * mu_b
    c1 = SSIM_K1 * SSIM_K1
    c2 = SSIM_K2 * SSIM_K2
    lum = (2.0 * mu_a * mu_b + c1) / (mu_a * mu_a + mu_b * mu_b + c1)
    cs = (2.0 * cov + c2) / (var_a + var_b + c2)
    return lum, cs


def ssim(a: np.ndarray, b: np.ndarray) -> float:
    """Single-scale structural similarity on grayscale, mean over valid windows."""
    xa, xb = _check_pair(a, b)
    if min(xa.shape[0], xa.shape[1]) < SSIM_WINDOW:
        raise ValueError(
            f"image {xa.shape[:2]} smaller than SSIM window {SSIM_WINDOW}"
        )
    lum, cs = _ssim_maps(xa, xb)
    return float(np.mean(lum * cs))


def ms_ssim(a: np.ndarray, b: np.ndarray, levels: int = 5) -> float:
    """Multi-scale SSIM with standard exponents and 2x2 mean-pool downsampling.

    Contrast-structure terms are taken at every level, the luminance term only
    at the coarsest; negative terms are clamped to 0 before exponentiation.
    """
    xa, xb = _check_pair(a, b)
    if levels < 1:
        raise ValueError(f"levels must be >= 1, got {levels}")
    if levels > len(MS_SSIM_WEIGHTS):
        raise ValueError(f"levels must be <= {len(MS_SSIM_WEIGHTS)}, got {levels}")
    need = SSIM_WINDOW * 2 ** (levels - 1)
    if min(xa.shape[0], xa.shape[1]) < need:
        raise ValueError(
            f"image {xa.shape[:2]} too small for {levels} levels (needs {need})"
        )
    weights = np.asarray(MS_SSIM_WEIGHTS[:levels])
    weights = weights / weights.sum()

    def downsample(x: np.ndarray) -> np.ndarray:
        h, w = x.shape[0] // 2 * 2, x.shape[1] // 2 * 2
        x = x[:h, :w]
        return 0.25 * (x[0::2, 0::2] + x[0::2, 1::2] + x[1::2, 0::2] + x[1::2, 1::2])

    score = 1.0
    ca, cb = xa, xb
    for level in range(levels):
        lum, cs = _ssim_maps(ca, cb)
        if level == levels - 1:
            term = float(np.mean(lum * cs))
        else:
            term = float(np.mean(cs))
            ca, cb = downsample(ca), downsample(cb)
        score *= max(term, 0.0) ** weights[level]
    return score


def l1(a: np.ndarray, b: np.ndarray) -> float:
    """Mean absolute difference over all pixels and channels."""
    xa, xb = _check_pair(a, b)
    return float(np.mean(np.abs(xa - xb)))


def charbonnier(a: np.ndarray, b: np.ndarray, eps: float = 1e-3) -> float:
    """Smooth L1 surrogate: mean of sqrt((a-b)^2 + eps^2).

    Identical inputs return exactly eps, which requires an exactly-rounded
    mean; math.fsum provides that where numpy's pairwise sum does not.
    """
    xa, xb = _check_pair(a, b)
    d = xa - xb
    values = np.sqrt(d * d + eps * eps)
    return math.fsum(values.ravel()) / values.size


def sobel_magnitude(img: np.ndarray) -> np.ndarray:
    """Gradient magnitude of the grayscale image, 3x3 Sobel, reflect border.

    Each gradient is computed as (smoothed right sum) - (smoothed left sum)
    so constant regions cancel bitwise and yield exactly zero.
    """
    g = luma(img)
    p = np.pad(g, 1, mode="reflect")
    right = p[:-2, 2:] + 2.0 * p[1:-1, 2:] + p[2:, 2:]
    left = p[:-2, :-2] + 2.0 * p[1:-1, :-2] + p[2:, :-2]
    below = p[2:, :-2] + 2.0 * p[2:, 1:-1] + p[2:, 2:]
    above = p[:-2, :-2] + 2.0 * p[:-2, 1:-1] + p[:-2, 2:]
    gx = right - left
    gy = below - above
    return np.sqrt(gx * gx + gy * gy)


def sobel_loss(a: np.ndarray, b: np.ndarray) -> float:
    """Mean L1 distance between Sobel gradient magnitudes."""
    xa, xb = _check_pair(a, b)
    return float(np.mean(np.abs(sobel_magnitude(xa) - sobel_magnitude(xb))))


def gray_l1(a: np.ndarray, b: np.ndarray) -> float:
    """Mean absolute difference between the grayscale conversions."""
    xa, xb = _check_pair(a, b)
    return float(np.mean(np.abs(luma(xa) - luma(xb))))


def combined_l1_ssim(
    a: np.ndarray, b: np.ndarray, w_l1: float = 0.5, w_ssim: float = 1.0
) -> float:
    """Weighted sum of mean-L1 and SSIM dissimilarity: w_l1*L1 + w_ssim*(1 - SSIM)."""
    return w_l1 * l1(a, b) + w_ssim * (1.0 - ssim(a, b))


def evaluate_pair(a: np.ndarray, b: np.ndarray) -> MetricReport:
    """All metrics for one prediction/ground-truth pair.

    MS-SSIM is omitted when the pair is too small for the 5-level default.
    """
    xa, xb = _check_pair(a, b)
    try:
        ms = ms_ssim(xa, xb)
    except ValueError:
        ms = None
    return MetricReport(
        psnr=psnr(xa, xb),
        ssim=ssim(xa, xb),
        ms_ssim=ms,
        l1=l1(xa, xb),
        charbonnier=charbonnier(xa, xb),
        sobel=sobel_loss(xa, xb),
        gray_l1=gray_l1(xa, xb),
    )
