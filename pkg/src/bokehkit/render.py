"""Classical defocus-guided bokeh rendering.

Pipeline: a depth map and focal plane give a per-pixel blur-radius (defocus)
map; a luminance-power weight map makes bright pixels dominate blurred
mixtures (bokeh balls); the image is split into soft defocus layers, each
blurred with its circle-of-confusion disc and composited back-to-front; the
result is optionally produced at reduced working resolution, upsampled, and
the sharp foreground is composited on top through a soft mask.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import pipeline_stage
from .image import as_image, as_map, convolve2d, disc_kernel, luma, resize_bilinear

EPS_WEIGHT = 1e-3
EPS_DIV = 1e-8

WORK_SCALES = (1.0, 0.5, 0.25)


@dataclass
class RenderConfig:
    """Stage parameters of the bokeh pipeline."""

    focus_depth: float
    max_radius: float
    num_layers: int = 8
    radiance_gamma: float = 4.0
    fg_threshold: float = 1.0
    fg_softness: float = 1.0
    work_scale: float = 0.5

    def validate(self) -> None:
        if not 0.0 < self.focus_depth <= 1.0:
            raise ValueError(f"focus_depth must be in (0, 1], got {self.focus_depth}")
        if self.max_radius < 0:
            raise ValueError(f"max_radius must be >= 0, got {self.max_radius}")
        if self.num_layers < 1:
            raise ValueError(f"num_layers must be >= 1, got {self.num_layers}")
        if self.radiance_gamma < 1:
            raise ValueError(f"radiance_gamma must be >= 1, got {self.radiance_gamma}")
        if self.fg_softness <= 0:
            raise ValueError(f"fg_softness must be > 0, got {self.fg_softness}")
        if self.work_scale not in WORK_SCALES:
            raise ValueError(
                f"work_scale must be one of {WORK_SCALES}, got {self.work_scale}"
            )


def defocus_from_depth(
    depth: np.ndarray, focus_depth: float, max_radius: float
) -> np.ndarray:
    """Blur-radius map from relative depth and a focal plane.

    Inverse-depth distance to the focal plane, normalized so the farthest
    point from focus gets max_radius:

        d(p) = max_radius * |1/depth(p) - 1/focus| / max_q |1/depth(q) - 1/focus|

    An all-in-focus scene (zero spread) yields an all-zero map.
    """
    d = as_map(depth, "depth")
    if not 0.0 < focus_depth <= 1.0:
        raise ValueError(f"focus_depth must be in (0, 1], got {focus_depth}")
    if max_radius < 0:
        raise ValueError(f"max_radius must be >= 0, got {max_radius}")
    if (d <= 0).any():
        raise ValueError("depth values must be strictly positive")
    spread = np.abs(1.0 / d - 1.0 / focus_depth)
    peak = spread.max()
    if peak <= 0.0:
        return np.zeros_like(d)
    return max_radius * spread / peak


def radiance_weight(img: np.ndarray, gamma: float) -> np.ndarray:
    """Per-pixel rendering weight (luma + eps)^gamma; bright pixels dominate."""
    if gamma < 1:
        raise ValueError(f"gamma must be >= 1, got {gamma}")
    return (luma(img) + EPS_WEIGHT) ** gamma


def layer_radii(defocus: np.ndarray, num_layers: int) -> np.ndarray:
    """Blur radii of the soft defocus layers spanning [0, defocus.max()]."""
    dmax = float(np.max(defocus))
    if num_layers == 1:
        return np.array([dmax])
    return np.linspace(0.0, dmax, num_layers)


def layer_masks(defocus: np.ndarray, radii: np.ndarray) -> list[np.ndarray]:
    """Linear-hat memberships over the layer radii; they sum to 1 per pixel."""
    if len(radii) == 1:
        return [np.ones_like(defocus)]
    spacing = radii[1] - radii[0]
    if spacing <= 0.0:
        masks = [np.zeros_like(defocus) for _ in radii]
        masks[0] = np.ones_like(defocus)
        return masks
    return [np.clip(1.0 - np.abs(defocus - r) / spacing, 0.0, 1.0) for r in radii]


def render_layered(
    img: np.ndarray,
    defocus: np.ndarray,
    weights: np.ndarray,
    num_layers: int,
) -> np.ndarray:
    """Layered circle-of-confusion rendering at the input resolution.

    Each layer's weighted premultiplied color and weighted mask are blurred
    with the layer's disc kernel; layers are "over"-composited back-to-front
    (largest radius first) with color normalized by the blurred weighted
    mask, then the accumulated coverage is normalized out.
    """
    arr = as_image(img)
    d = as_map(defocus, "defocus")
    w = as_map(weights, "weights")
    if arr.shape[:2] != d.shape or arr.shape[:2] != w.shape:
        raise ValueError(
            f"shape mismatch: image {arr.shape[:2]}, defocus {d.shape}, weights {w.shape}"
        )
    if num_layers < 1:
        raise ValueError(f"num_layers must be >= 1, got {num_layers}")
    if (d < 0).any():
        raise ValueError("defocus values must be >= 0")
    if float(d.max()) == 0.0:
        return arr.copy()

    radii = layer_radii(d, num_layers)
    masks = layer_masks(d, radii)
    acc = np.zeros_like(arr)
    coverage = np.zeros(arr.shape[:2])
    for radius, mask in sorted(zip(radii, masks), key=lambda rm: -rm[0]):
        if not mask.any():
            continue
        kern = disc_kernel(radius)
        wm = w * mask
        blurred_color = convolve2d(arr * wm[:, :, None], kern)
        blurred_wm = convolve2d(wm, kern)
        alpha = np.clip(convolve2d(mask, kern), 0.0, 1.0)
        color = blurred_color / np.maximum(blurred_wm, EPS_DIV)[:, :, None]
        acc = alpha[:, :, None] * color + (1.0 - alpha)[:, :, None] * acc
        coverage = alpha + (1.0 - alpha) * coverage
    return acc / np.maximum(coverage, EPS_DIV)[:, :, None]


def composite_foreground(
    original: np.ndarray,
    rendered: np.ndarray,
    defocus: np.ndarray,
    threshold: float,
    softness: float,
) -> np.ndarray:
    """Cover in-focus foreground from the original over the rendered result.

    alpha(p) = clamp((threshold - defocus(p)) / softness + 0.5, 0, 1)
    """
    orig = as_image(original)
    rend = as_image(rendered)
    d = as_map(defocus, "defocus")
    if orig.shape != rend.shape or orig.shape[:2] != d.shape:
        raise ValueError(
            f"shape mismatch: original {orig.shape}, rendered {rend.shape}, defocus {d.shape}"
        )
    if softness <= 0:
        raise ValueError(f"softness must be > 0, got {softness}")
    alpha = np.clip((threshold - d) / softness + 0.5, 0.0, 1.0)[:, :, None]
    return alpha * orig + (1.0 - alpha) * rend


def render_bokeh(img: np.ndarray, depth: np.ndarray, cfg: RenderConfig) -> np.ndarray:
    """Full bokeh pipeline: defocus + weights, reduced-resolution layered
    render, bilinear upsampling, soft foreground compositing."""
    arr = as_image(img)
    dep = as_map(depth, "depth")
    if arr.shape[:2] != dep.shape:
        raise ValueError(f"shape mismatch: image {arr.shape[:2]}, depth {dep.shape}")
    cfg.validate()

    with pipeline_stage("defocus"):
        defocus = defocus_from_depth(dep, cfg.focus_depth, cfg.max_radius)
    with pipeline_stage("radiance"):
        weights = radiance_weight(arr, cfg.radiance_gamma)

    h, w = arr.shape[:2]
    scale = cfg.work_scale
    with pipeline_stage("rendering"):
        if scale != 1.0:
            wh = max(1, round(h * scale))
            ww = max(1, round(w * scale))
            img_s = resize_bilinear(arr, wh, ww)
            defocus_s = resize_bilinear(defocus, wh, ww) * scale
            weights_s = resize_bilinear(weights, wh, ww)
        else:
            img_s, defocus_s, weights_s = arr, defocus, weights
        low = render_layered(img_s, defocus_s, weights_s, cfg.num_layers)
    with pipeline_stage("upsampling"):
        full = resize_bilinear(low, h, w) if scale != 1.0 else low
    with pipeline_stage("foreground"):
        return composite_foreground(arr, full, defocus, cfg.fg_threshold, cfg.fg_softness)
