"""Orthonormal 2-D Haar wavelet transform.

Information-preserving down/upsampling: one analysis step maps an even-sized
image to four half-resolution subbands (ll, lh, hl, hh) with an exact inverse
and conserved energy.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .image import as_image


@dataclass
class Subbands:
    """One decomposition level; all four bands share the same shape."""

    ll: np.ndarray
    lh: np.ndarray
    hl: np.ndarray
    hh: np.ndarray

    def __post_init__(self) -> None:
        shapes = {b.shape for b in (self.ll, self.lh, self.hl, self.hh)}
        if len(shapes) != 1:
            raise ValueError(f"subband shapes differ: {sorted(shapes)}")


def dwt2_haar(img: np.ndarray) -> Subbands:
    """One level of the orthonormal Haar transform.

    For each 2x2 block [a b; c d]:
        ll = (a+b+c+d)/2, lh = (a+b-c-d)/2, hl = (a-b+c-d)/2, hh = (a-b-c+d)/2.
    Requires even height and width.
    """
    arr = as_image(img)
    h, w = arr.shape[:2]
    if h % 2 != 0 or w % 2 != 0:
        raise ValueError(f"image dimensions must be even, got ({h}, {w})")
    a = arr[0::2, 0::2]
    b = arr[0::2, 1::2]
    c = arr[1::2, 0::2]
    d = arr[1::2, 1::2]
    return Subbands(
        ll=(a + b + c + d) / 2.0,
        lh=(a + b - c - d) / 2.0,
        hl=(a - b + c - d) / 2.0,
        hh=(a - b - c + d) / 2.0,
    )


def idwt2_haar(s: Subbands) -> np.ndarray:
    """Exact inverse of :func:`dwt2_haar`."""
    ll, lh, hl, hh = (np.asarray(b, dtype=np.float64) for b in (s.ll, s.lh, s.hl, s.hh))
    if not (ll.shape == lh.shape == hl.shape == hh.shape):
        raise ValueError("subband shapes differ")
    a = (ll + lh + hl + hh) / 2.0
    b = (ll + lh - hl - hh) / 2.0
    c = (ll - lh + hl - hh) / 2.0
    d = (ll - lh - hl + hh) / 2.0
    h2, w2 = ll.shape[:2]
    out = np.empty((h2 * 2, w2 * 2) + ll.shape[2:], dtype=np.float64)
    out[0::2, 0::2] = a
    out[0::2, 1::2] = b
    out[1::2, 0::2] = c
    out[1::2, 1::2] = d
    return out


def wavelet_pyramid(img: np.ndarray, levels: int) -> list[Subbands]:
    """Multi-level decomposition recursing on the ll band.

    Element k holds level k's subbands; only the last element's ll carries
    the residual approximation used for reconstruction.
    """
    if levels < 1:
        raise ValueError(f"levels must be >= 1, got {levels}")
    arr = as_image(img)
    pyramid: list[Subbands] = []
    current = arr
    for level in range(levels):
        h, w = current.shape[:2]
        if h % 2 != 0 or w % 2 != 0:
            raise ValueError(
                f"level {level}: dimensions ({h}, {w}) not divisible by 2"
            )
        bands = dwt2_haar(current)
        pyramid.append(bands)
        current = bands.ll
    return pyramid


def wavelet_reconstruct(pyramid: list[Subbands]) -> np.ndarray:
    """Invert :func:`wavelet_pyramid` by synthesizing levels deepest-first."""
    if not pyramid:
        raise ValueError("empty pyramid")
    current = pyramid[-1].ll
    for bands in reversed(pyramid):
        current = idwt2_haar(Subbands(ll=current, lh=bands.lh, hl=bands.hl, hh=bands.hh))
    return current
