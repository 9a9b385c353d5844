"""Shared synthetic test patterns."""

import numpy as np
import pytest


def dead_leaves(h: int, w: int, seed: int, n: int = 300) -> np.ndarray:
    """Overlapping random disks: a feature-rich pattern for detector tests."""
    rng = np.random.default_rng(seed)
    img = np.full((h, w), 0.5)
    yy, xx = np.mgrid[0:h, 0:w]
    for _ in range(n):
        cy, cx = rng.uniform(0, h), rng.uniform(0, w)
        r = rng.uniform(4, 30)
        img[(yy - cy) ** 2 + (xx - cx) ** 2 <= r * r] = rng.uniform(0, 1)
    return np.stack([img, img, img], axis=2)


def checkerboard(n: int, cell: int) -> np.ndarray:
    idx = np.arange(n)
    pattern = ((idx[:, None] // cell + idx[None, :] // cell) % 2).astype(float)
    return pattern[:, :, None].repeat(3, axis=2) * 0.8 + 0.1


@pytest.fixture
def rng():
    return np.random.default_rng(0)


# Historical CPU-track challenge results (team, framework, avg runtime s,
# PSNR, SSIM, MOS); rows without runtime/MOS were excluded from final
# ranking.  Used as a leaderboard-ordering fixture.
CPU_TRACK_ROWS = [
    ("Airia-bokeh", "TensorFlow", 5.52, 23.58, 0.8770, 4.2),
    ("AIA-Smart", "PyTorch", 1.71, 23.56, 0.8829, 3.8),
    ("CET_SP", "TensorFlow", 1.17, 21.91, 0.8201, 3.3),
    ("CET_CVLab", "TensorFlow", 1.17, 23.05, 0.8591, 3.2),
    ("Team Horizon", "PyTorch", 19.27, 23.27, 0.8818, 3.2),
    ("IPCV_IITM", "PyTorch", 27.24, 23.77, 0.8866, 2.5),
    ("CET21_CV", "TensorFlow", 0.74, 22.80, 0.8628, 1.3),
    ("CET_ECE", "TensorFlow", 0.74, 22.85, 0.8629, 1.2),
    ("xuehuapiaopiao-team", "TensorFlow", None, 22.98, 0.8758, None),
    ("Terminator", "TensorFlow", None, 23.04, 0.8756, None),
]
