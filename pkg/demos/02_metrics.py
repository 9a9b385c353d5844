#!/usr/bin/env python3
"""Compare degraded renders against a reference with the full metric suite."""

import numpy as np
from scipy import ndimage

from bokehkit import charbonnier, combined_l1_ssim, evaluate_pair, gray_l1, ms_ssim

rng = np.random.default_rng(1)
reference = ndimage.gaussian_filter(rng.random((256, 256, 3)), (4, 4, 0))
reference = (reference - reference.min()) / (reference.max() - reference.min())

variants = {
    "identical": reference.copy(),
    "noise 1%": np.clip(reference + rng.normal(0, 0.01, reference.shape), 0, 1),
    "noise 5%": np.clip(reference + rng.normal(0, 0.05, reference.shape), 0, 1),
    "blurred": ndimage.gaussian_filter(reference, (2, 2, 0)),
    "shifted +0.1": np.clip(reference + 0.1, 0, 1),
}

header = f"{'variant':<14} {'psnr':>8} {'ssim':>8} {'msssim':>8} {'charb':>9} {'grayL1':>8} {'l1+ssim':>8}"
print(header)
print("-" * len(header))
for name, candidate in variants.items():
    r = evaluate_pair(candidate, reference)
    ms = ms_ssim(candidate, reference)
    combo = combined_l1_ssim(candidate, reference)
    psnr_txt = "inf" if r.psnr == float("inf") else f"{r.psnr:.2f}"
    print(
        f"{name:<14} {psnr_txt:>8} {r.ssim:>8.4f} {ms:>8.4f} "
        f"{charbonnier(candidate, reference):>9.5f} "
        f"{gray_l1(candidate, reference):>8.5f} {combo:>8.4f}"
    )
