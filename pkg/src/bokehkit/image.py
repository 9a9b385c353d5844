"""Planar float image container conventions and pixel primitives.

Images are numpy float64 arrays shaped (height, width, channels) with values
nominally in [0, 1]; file I/O accepts 1 or 3 channels.  Single-channel fields
such as depth, defocus and weight maps are plain (height, width) arrays.
Geometry helpers follow two fixed conventions so results are reproducible:

- bilinear resampling uses half-pixel-centered sample positions
  (align-corners = false),
- all border handling is reflect-101 (edge pixel not repeated).
"""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np
from PIL import Image
from scipy import signal

from .errors import FormatError

# BT.601 luma coefficients.
GRAY_WEIGHTS = (0.299, 0.587, 0.114)


def as_image(img: np.ndarray) -> np.ndarray:
    """Validate and return an (h, w, c) float64 image array.

    2-D input is promoted to a single channel.  Raises ValueError for wrong
    dimensionality or non-finite values.
    """
    arr = np.asarray(img, dtype=np.float64)
    if arr.ndim == 2:
        arr = arr[:, :, np.newaxis]
    if arr.ndim != 3:
        raise ValueError(f"expected a 2-D or 3-D image array, got ndim={arr.ndim}")
    if arr.shape[0] < 1 or arr.shape[1] < 1 or arr.shape[2] < 1:
        raise ValueError(f"empty image of shape {arr.shape}")
    if not np.isfinite(arr).all():
        raise ValueError("image contains NaN or Inf values")
    return arr


def as_map(field: np.ndarray, name: str = "map") -> np.ndarray:
    """Validate and return an (h, w) float64 single-channel field."""
    arr = np.asarray(field, dtype=np.float64)
    if arr.ndim == 3 and arr.shape[2] == 1:
        arr = arr[:, :, 0]
    if arr.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got shape {arr.shape}")
    if not np.isfinite(arr).all():
        raise ValueError(f"{name} contains NaN or Inf values")
    return arr


def load_image(path: str | Path) -> np.ndarray:
    """Load a PNG or JPEG file as an (h, w, c) float image in [0, 1].

    8-bit values are divided by 255, 16-bit by 65535.  Only grayscale and RGB
    data are accepted; other channel layouts raise FormatError.
    """
    path = Path(path)
    try:
        with Image.open(path) as im:
            im.load()
            mode = im.mode
            if mode == "P":
                im = im.convert("RGB")
                mode = "RGB"
            if mode in ("RGBA", "LA", "CMYK", "PA"):
                raise FormatError(
                    f"{path}: unsupported channel count {len(im.getbands())} (mode {mode})"
                )
            if mode in ("L", "RGB"):
                arr = np.asarray(im, dtype=np.float64) / 255.0
            elif mode in ("I;16", "I;16B", "I;16L", "I"):
                arr = np.asarray(im, dtype=np.float64) / 65535.0
            else:
                raise FormatError(f"{path}: unsupported image mode {mode!r}")
    except FileNotFoundError:
        raise
    except OSError as exc:
        raise OSError(f"cannot read image {path}: {exc}") from exc
    return as_image(arr)


def save_image(img: np.ndarray, path: str | Path) -> None:
    """Write an image as 8-bit PNG, clamping to [0, 1] and rounding to 255ths."""
    arr = as_image(img)
    path = Path(path)
    if path.suffix.lower() != ".png":
        raise FormatError(f"{path}: only PNG output is supported")
    if arr.shape[2] not in (1, 3):
        raise FormatError(f"cannot save image with {arr.shape[2]} channels")
    data = np.rint(np.clip(arr, 0.0, 1.0) * 255.0).astype(np.uint8)
    if data.shape[2] == 1:
        im = Image.fromarray(data[:, :, 0], mode="L")
    else:
        im = Image.fromarray(data, mode="RGB")
    try:
        im.save(path, format="PNG")
    except OSError as exc:
        raise OSError(f"cannot write image {path}: {exc}") from exc


def load_depth_map(path: str | Path) -> np.ndarray:
    """Load a single-channel PNG as a relative depth map in (0, 1].

    Pixel values are divided by the bit-depth maximum; exact zeros are
    remapped to one quantization step so depths stay strictly positive.
    """
    arr = load_image(path)
    if arr.shape[2] != 1:
        raise FormatError(f"{path}: depth map must be single-channel, got {arr.shape[2]}")
    depth = arr[:, :, 0]
    # smallest representable nonzero level of the stored bit depth
    positive = depth[depth > 0]
    step = positive.min() if positive.size else 1.0 / 255.0
    step = min(step, 1.0 / 255.0)
    return np.where(depth <= 0.0, step, depth)


def to_grayscale(img: np.ndarray) -> np.ndarray:
    """Convert an RGB image to single-channel luma (BT.601 weights).

    Single-channel input is returned unchanged.
    """
    arr = as_image(img)
    if arr.shape[2] == 1:
        return arr
    if arr.shape[2] != 3:
        raise ValueError(f"expected 1 or 3 channels, got {arr.shape[2]}")
    w = np.asarray(GRAY_WEIGHTS)
    return (arr @ w)[:, :, np.newaxis]


def luma(img: np.ndarray) -> np.ndarray:
    """Grayscale intensity of an image as an (h, w) field."""
    return to_grayscale(img)[:, :, 0]


def resize_bilinear(img: np.ndarray, out_h: int, out_w: int) -> np.ndarray:
    """Resample an image or 2-D field to (out_h, out_w) bilinearly.

    Sample positions are half-pixel centered; source coordinates outside the
    frame clamp to the edge, so outputs never overshoot the input range.
    """
    if out_h < 1 or out_w < 1:
        raise ValueError(f"target dimensions must be >= 1, got ({out_h}, {out_w})")
    squeeze = np.asarray(img).ndim == 2
    arr = as_image(img)
    h, w = arr.shape[:2]
    if (out_h, out_w) == (h, w):
        out = arr.copy()
        return out[:, :, 0] if squeeze else out

    def axis_coords(n_in: int, n_out: int):
        src = (np.arange(n_out) + 0.5) * (n_in / n_out) - 0.5
        i0 = np.floor(src).astype(np.int64)
        t = src - i0
        lo = np.clip(i0, 0, n_in - 1)
        hi = np.clip(i0 + 1, 0, n_in - 1)
        return lo, hi, t

    y0, y1, ty = axis_coords(h, out_h)
    x0, x1, tx = axis_coords(w, out_w)
    ty = ty[:, None, None]
    tx = tx[None, :, None]
    top = (1.0 - tx) * arr[np.ix_(y0, x0)] + tx * arr[np.ix_(y0, x1)]
    bot = (1.0 - tx) * arr[np.ix_(y1, x0)] + tx * arr[np.ix_(y1, x1)]
    out = (1.0 - ty) * top + ty * bot
    return out[:, :, 0] if squeeze else out


def convolve2d(img: np.ndarray, kernel: np.ndarray) -> np.ndarray:
    """Dense 2-D correlation with reflect-101 borders, applied per channel.

    The kernel must be odd-sized in both dimensions and no larger than
    2*extent - 1 along each image axis (the reflect-101 validity bound).
    """
    squeeze = np.asarray(img).ndim == 2
    arr = as_image(img)
    k = np.asarray(kernel, dtype=np.float64)
    if k.ndim != 2:
        raise ValueError(f"kernel must be 2-D, got shape {k.shape}")
    kh, kw = k.shape
    if kh % 2 == 0 or kw % 2 == 0:
        raise ValueError(f"kernel dimensions must be odd, got {k.shape}")
    h, w = arr.shape[:2]
    if kh > 2 * h - 1 or kw > 2 * w - 1:
        raise ValueError(
            f"kernel {k.shape} exceeds twice the image extent ({h}, {w})"
        )
    if k.shape == (1, 1):
        out = arr * k[0, 0]
        return out[:, :, 0] if squeeze else out

    ph, pw = kh // 2, kw // 2
    padded = np.pad(arr, ((ph, ph), (pw, pw), (0, 0)), mode="reflect")
    flipped = k[::-1, ::-1]
    out = np.empty_like(arr)
    for c in range(arr.shape[2]):
        out[:, :, c] = signal.convolve(padded[:, :, c], flipped, mode="valid", method="auto")
    return out[:, :, 0] if squeeze else out


def disc_kernel(radius: float) -> np.ndarray:
    """Antialiased circle-of-confusion disc, normalized to unit sum.

    Each cell's weight is the fraction of a 3x3 subgrid of sample points
    lying within `radius` of the kernel center; radius 0 yields the 1x1
    identity kernel.
    """
    if not math.isfinite(radius) or radius < 0:
        raise ValueError(f"disc radius must be >= 0, got {radius}")
    if radius == 0:
        return np.ones((1, 1))
    half = math.ceil(radius)
    coords = np.arange(-half, half + 1, dtype=np.float64)
    sub = np.array([-1.0 / 3.0, 0.0, 1.0 / 3.0])
    yy = coords[:, None, None, None] + sub[None, None, :, None]
    xx = coords[None, :, None, None] + sub[None, None, None, :]
    inside = (yy * yy + xx * xx) <= radius * radius
    weights = inside.mean(axis=(2, 3))
    return weights / weights.sum()


def space_to_depth(img: np.ndarray, block: int) -> np.ndarray:
    """Rearrange (h, w, c) into (h/b, w/b, c*b*b) by moving b x b blocks into channels.

    Pure data movement: out[y, x, c*b*b + by*b + bx] == in[y*b + by, x*b + bx, c].
    """
    arr = as_image(img)
    if block < 1:
        raise ValueError(f"block must be >= 1, got {block}")
    h, w, c = arr.shape
    if h % block != 0:
        raise ValueError(f"height {h} not divisible by block {block}")
    if w % block != 0:
        raise ValueError(f"width {w} not divisible by block {block}")
    if block == 1:
        return arr.copy()
    out = arr.reshape(h // block, block, w // block, block, c)
    out = out.transpose(0, 2, 4, 1, 3)
    return np.ascontiguousarray(out.reshape(h // block, w // block, c * block * block))


def depth_to_space(img: np.ndarray, block: int) -> np.ndarray:
    """Exact inverse of :func:`space_to_depth`."""
    arr = as_image(img)
    if block < 1:
        raise ValueError(f"block must be >= 1, got {block}")
    h, w, c = arr.shape
    if c % (block * block) != 0:
        raise ValueError(f"channel count {c} not divisible by block^2 = {block * block}")
    if block == 1:
        return arr.copy()
    c_out = c // (block * block)
    out = arr.reshape(h, w, c_out, block, block)
    out = out.transpose(0, 3, 1, 4, 2)
    return np.ascontiguousarray(out.reshape(h * block, w * block, c_out))
