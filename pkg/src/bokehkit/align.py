"""Photo-pair alignment: keypoints, matching, robust homography, warp, crop.

Reproduces the classic preparation pipeline for paired wide/shallow
depth-of-field captures: difference-of-Gaussians keypoints with upright
gradient-histogram descriptors are matched under a ratio test, a homography
is fit with seeded RANSAC (normalized DLT), the shallow frame is warped onto
the wide frame, both are cropped to the valid intersection and rescaled to a
fixed output height.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy import ndimage
from scipy.spatial import distance

from .errors import EstimationError, pipeline_stage
from .image import as_image, load_image, luma, resize_bilinear, save_image
from .jsonio import canonical_json

# Detector configuration: 3 octaves x 3 scales, DoG contrast threshold 0.03,
# Lowe-style edge rejection, 2x initial upsampling for fine structure.
N_OCTAVES = 3
SCALES_PER_OCTAVE = 3
CONTRAST_THRESHOLD = 0.03
EDGE_RATIO = 10.0
BASE_SIGMA = 1.6
ASSUMED_BLUR = 0.5
DESCRIPTOR_CELLS = 4
DESCRIPTOR_BINS = 8
PATCH_HALF = 8


@dataclass
class Keypoint:
    """Scale-space feature with an L2-normalized 128-dim descriptor."""

    x: float
    y: float
    scale: float
    response: float
    descriptor: np.ndarray


@dataclass
class Match:
    index_a: int
    index_b: int
    distance: float


@dataclass
class CropRect:
    top: int
    left: int
    height: int
    width: int


@dataclass
class PrepareConfig:
    """Parameters of the pair-preparation pipeline."""

    max_keypoints: int = 2000
    match_ratio: float = 0.75
    ransac_iterations: int = 2000
    inlier_px: float = 3.0
    seed: int = 0
    target_height: int = 1024


@dataclass
class PreparedPair:
    wide: np.ndarray
    shallow: np.ndarray
    homography: np.ndarray
    inlier_count: int
    crop: CropRect


# ---------------------------------------------------------------------------
# keypoint detection


def _gaussian_pyramid(gray: np.ndarray):
    """Per-octave Gaussian stacks and DoG stacks, upsampled 2x at the base."""
    base = resize_bilinear(gray, gray.shape[0] * 2, gray.shape[1] * 2)
    # bring the assumed capture blur (doubled by upsampling) up to BASE_SIGMA
    boost = math.sqrt(max(BASE_SIGMA**2 - (2.0 * ASSUMED_BLUR) ** 2, 0.01))
    base = ndimage.gaussian_filter(base.astype(np.float32), boost)
    k = 2.0 ** (1.0 / SCALES_PER_OCTAVE)
    octaves = []
    for _ in range(N_OCTAVES):
        gauss = [base]
        for i in range(1, SCALES_PER_OCTAVE + 3):
            # incremental blur from level i-1 to level i
            prev_sigma = BASE_SIGMA * k ** (i - 1)
            delta = prev_sigma * math.sqrt(k * k - 1.0)
            gauss.append(ndimage.gaussian_filter(gauss[-1], delta))
        dogs = np.stack([gauss[i + 1] - gauss[i] for i in range(len(gauss) - 1)])
        octaves.append((gauss, dogs))
        base = gauss[SCALES_PER_OCTAVE][::2, ::2]
        if min(base.shape) < 16:
            break
    return octaves


def _scale_space_candidates(dogs: np.ndarray):
    """Indices (level, y, x) of 26-neighborhood extrema above the contrast floor."""
    maxf = ndimage.maximum_filter(dogs, size=3, mode="nearest")
    minf = ndimage.minimum_filter(dogs, size=3, mode="nearest")
    extremum = ((dogs >= maxf) | (dogs <= minf)) & (np.abs(dogs) >= 0.8 * CONTRAST_THRESHOLD)
    extremum[0] = extremum[-1] = False
    extremum[:, :1, :] = extremum[:, -1:, :] = False
    extremum[:, :, :1] = extremum[:, :, -1:] = False
    return np.argwhere(extremum)


def _refine_candidate(dog: np.ndarray, y: int, x: int):
    """2-D quadratic refinement; returns (dy, dx, refined_value) or None."""
    gx = 0.5 * (dog[y, x + 1] - dog[y, x - 1])
    gy = 0.5 * (dog[y + 1, x] - dog[y - 1, x])
    dxx = dog[y, x + 1] - 2.0 * dog[y, x] + dog[y, x - 1]
    dyy = dog[y + 1, x] - 2.0 * dog[y, x] + dog[y - 1, x]
    dxy = 0.25 * (
        dog[y + 1, x + 1] - dog[y + 1, x - 1] - dog[y - 1, x + 1] + dog[y - 1, x - 1]
    )
    tr = dxx + dyy
    det = dxx * dyy - dxy * dxy
    if det <= 0 or tr * tr / det >= (EDGE_RATIO + 1.0) ** 2 / EDGE_RATIO:
        return None
    ox = -(dyy * gx - dxy * gy) / det
    oy = -(dxx * gy - dxy * gx) / det
    ox = float(np.clip(ox, -0.5, 0.5))
    oy = float(np.clip(oy, -0.5, 0.5))
    value = dog[y, x] + 0.5 * (gx * ox + gy * oy)
    if abs(value) < CONTRAST_THRESHOLD:
        return None
    return oy, ox, float(value)


def _descriptor(grad_mag: np.ndarray, grad_ori: np.ndarray, y: int, x: int):
    """Upright 4x4-cell x 8-orientation histogram over a 16x16 patch."""
    h, w = grad_mag.shape
    if y - PATCH_HALF < 0 or y + PATCH_HALF > h or x - PATCH_HALF < 0 or x + PATCH_HALF > w:
        return None
    mag = grad_mag[y - PATCH_HALF : y + PATCH_HALF, x - PATCH_HALF : x + PATCH_HALF]
    ori = grad_ori[y - PATCH_HALF : y + PATCH_HALF, x - PATCH_HALF : x + PATCH_HALF]
    rel = np.arange(-PATCH_HALF, PATCH_HALF) + 0.5
    ry, rx = np.meshgrid(rel, rel, indexing="ij")
    weight = mag * np.exp(-(rx * rx + ry * ry) / (2.0 * PATCH_HALF**2))

    cell = DESCRIPTOR_CELLS
    cy = (ry + PATCH_HALF) / (2.0 * PATCH_HALF / cell) - 0.5
    cx = (rx + PATCH_HALF) / (2.0 * PATCH_HALF / cell) - 0.5
    ob = ori / (2.0 * math.pi / DESCRIPTOR_BINS)

    hist = np.zeros((cell, cell, DESCRIPTOR_BINS))
    cy0 = np.floor(cy).astype(int)
    cx0 = np.floor(cx).astype(int)
    ob0 = np.floor(ob).astype(int)
    fy = cy - cy0
    fx = cx - cx0
    fo = ob - ob0
    for dy_bin, wy in ((0, 1.0 - fy), (1, fy)):
        yy = cy0 + dy_bin
        for dx_bin, wx in ((0, 1.0 - fx), (1, fx)):
            xx = cx0 + dx_bin
            for do_bin, wo in ((0, 1.0 - fo), (1, fo)):
                oo = (ob0 + do_bin) % DESCRIPTOR_BINS
                ok = (yy >= 0) & (yy < cell) & (xx >= 0) & (xx < cell)
                np.add.at(
                    hist,
                    (yy[ok], xx[ok], oo[ok]),
                    (weight * wy * wx * wo)[ok],
                )
    vec = hist.ravel()
    norm = np.linalg.norm(vec)
    if norm < 1e-12:
        return None
    vec = np.minimum(vec / norm, 0.2)
    return vec / np.linalg.norm(vec)


def detect_keypoints(img: np.ndarray, max_count: int = 2000) -> list[Keypoint]:
    """Difference-of-Gaussians keypoints, strongest response first.

    Deterministic for identical input; at most `max_count` keypoints.
    """
    arr = as_image(img)
    if min(arr.shape[0], arr.shape[1]) < 32:
        raise ValueError(f"image {arr.shape[:2]} too small for detection (min 32)")
    if max_count < 1:
        raise ValueError(f"max_count must be >= 1, got {max_count}")
    gray = luma(arr)
    h, w = gray.shape
    k = 2.0 ** (1.0 / SCALES_PER_OCTAVE)
    pyramid = _gaussian_pyramid(gray)

    raw = []
    for octave, (_, dogs) in enumerate(pyramid):
        # octave 0 is the 2x-upsampled base
        to_input = 2.0**octave / 2.0
        for level, y, x in _scale_space_candidates(dogs):
            if not 1 <= level <= SCALES_PER_OCTAVE:
                continue
            refined = _refine_candidate(dogs[level], int(y), int(x))
            if refined is None:
                continue
            oy, ox, value = refined
            raw.append(
                (
                    abs(value),
                    octave,
                    int(level),
                    int(y),
                    int(x),
                    (x + ox) * to_input,
                    (y + oy) * to_input,
                    BASE_SIGMA * k ** int(level) * to_input,
                )
            )

    raw.sort(key=lambda r: (-r[0], r[6], r[5], r[1]))
    gradients: dict[tuple[int, int], tuple[np.ndarray, np.ndarray]] = {}
    keypoints: list[Keypoint] = []
    for response, octave, level, y, x, x_in, y_in, sigma in raw:
        if len(keypoints) >= max_count:
            break
        if not (0.0 <= x_in <= w - 1 and 0.0 <= y_in <= h - 1):
            continue
        key = (octave, level)
        if key not in gradients:
            img_level = pyramid[octave][0][level].astype(np.float64)
            gx = np.zeros_like(img_level)
            gy = np.zeros_like(img_level)
            gx[:, 1:-1] = 0.5 * (img_level[:, 2:] - img_level[:, :-2])
            gy[1:-1, :] = 0.5 * (img_level[2:, :] - img_level[:-2, :])
            gradients[key] = (np.hypot(gx, gy), np.arctan2(gy, gx))
        mag, ori = gradients[key]
        desc = _descriptor(mag, ori, y, x)
        if desc is None:
            continue
        keypoints.append(
            Keypoint(x=float(x_in), y=float(y_in), scale=float(sigma),
                     response=float(response), descriptor=desc)
        )
    return keypoints


# ---------------------------------------------------------------------------
# matching


def match_descriptors(a: list[Keypoint], b: list[Keypoint], ratio: float) -> list[Match]:
    """Nearest-neighbor matches passing the ratio test, mutual-best filtered."""
    if not 0.0 < ratio <= 1.0:
        raise ValueError(f"ratio must be in (0, 1], got {ratio}")
    if not a or not b:
        return []
    da = np.stack([kp.descriptor for kp in a])
    db = np.stack([kp.descriptor for kp in b])
    dist = distance.cdist(da, db, metric="euclidean")
    best_b_for_a = np.argmin(dist, axis=1)
    best_a_for_b = np.argmin(dist, axis=0)
    matches = []
    for i, j in enumerate(best_b_for_a):
        if best_a_for_b[j] != i:
            continue
        d1 = dist[i, j]
        if dist.shape[1] >= 2:
            row = dist[i].copy()
            row[j] = np.inf
            d2nd = row.min()
            if not d1 < ratio * d2nd:
                continue
        matches.append(Match(index_a=int(i), index_b=int(j), distance=float(d1)))
    return matches


# ---------------------------------------------------------------------------
# homography estimation


def _hartley_normalization(pts: np.ndarray) -> np.ndarray:
    centroid = pts.mean(axis=0)
    dists = np.linalg.norm(pts - centroid, axis=1)
    mean_dist = dists.mean()
    s = math.sqrt(2.0) / mean_dist if mean_dist > 1e-12 else 1.0
    return np.array(
        [[s, 0.0, -s * centroid[0]], [0.0, s, -s * centroid[1]], [0.0, 0.0, 1.0]]
    )


def _dlt(src: np.ndarray, dst: np.ndarray) -> np.ndarray | None:
    """Direct linear transform with Hartley normalization; None if degenerate."""
    ts = _hartley_normalization(src)
    td = _hartley_normalization(dst)
    ones = np.ones((len(src), 1))
    sn = (np.hstack([src, ones]) @ ts.T)[:, :2]
    dn = (np.hstack([dst, ones]) @ td.T)[:, :2]
    rows = []
    for (x, y), (u, v) in zip(sn, dn):
        rows.append([-x, -y, -1.0, 0.0, 0.0, 0.0, u * x, u * y, u])
        rows.append([0.0, 0.0, 0.0, -x, -y, -1.0, v * x, v * y, v])
    a = np.asarray(rows)
    try:
        _, _, vt = np.linalg.svd(a)
    except np.linalg.LinAlgError:
        return None
    hn = vt[-1].reshape(3, 3)
    h = np.linalg.inv(td) @ hn @ ts
    if abs(h[2, 2]) < 1e-12 or abs(np.linalg.det(h)) < 1e-12:
        return None
    return h / h[2, 2]


def _project(h: np.ndarray, pts: np.ndarray) -> np.ndarray:
    hom = np.hstack([pts, np.ones((len(pts), 1))]) @ h.T
    denom = hom[:, 2]
    safe = np.where(np.abs(denom) < 1e-12, np.nan, denom)
    return hom[:, :2] / safe[:, None]


def _reprojection_errors(h: np.ndarray, src: np.ndarray, dst: np.ndarray) -> np.ndarray:
    proj = _project(h, src)
    err = np.linalg.norm(proj - dst, axis=1)
    return np.where(np.isfinite(err), err, np.inf)


def _sample_degenerate(pts: np.ndarray) -> bool:
    # any 3 of the 4 points collinear
    for skip in range(4):
        p = np.delete(pts, skip, axis=0)
        u, v = p[1] - p[0], p[2] - p[0]
        if abs(u[0] * v[1] - u[1] * v[0]) < 1e-8:
            return True
    return False


def estimate_homography_ransac(
    matches: np.ndarray,
    iterations: int = 2000,
    inlier_px: float = 3.0,
    seed: int = 0,
) -> tuple[np.ndarray, np.ndarray]:
    """Robust homography from (xa, ya, xb, yb) correspondences.

    Minimal 4-point models solved by normalized DLT, scored by inlier count
    at `inlier_px` reprojection error, refit on the best consensus set.
    Deterministic for a fixed seed.  Returns (3x3 homography, inlier mask).
    """
    pts = np.asarray(matches, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[1] != 4:
        raise ValueError(f"matches must be (n, 4) (xa, ya, xb, yb), got {pts.shape}")
    n = len(pts)
    if n < 4:
        raise ValueError(f"need at least 4 correspondences, got {n}")
    if inlier_px <= 0:
        raise ValueError(f"inlier_px must be > 0, got {inlier_px}")
    if iterations < 1:
        raise ValueError(f"iterations must be >= 1, got {iterations}")
    src, dst = pts[:, :2], pts[:, 2:]
    rng = np.random.default_rng(seed)

    best_h = None
    best_mask = None
    best_count = 3
    for _ in range(iterations):
        idx = rng.choice(n, size=4, replace=False)
        if _sample_degenerate(src[idx]) or _sample_degenerate(dst[idx]):
            continue
        h = _dlt(src[idx], dst[idx])
        if h is None:
            continue
        mask = _reprojection_errors(h, src, dst) <= inlier_px
        count = int(mask.sum())
        if count > best_count:
            best_h, best_mask, best_count = h, mask, count
    if best_h is None:
        raise EstimationError("no homography with at least 4 inliers found")

    refit = _dlt(src[best_mask], dst[best_mask])
    if refit is not None:
        refit_mask = _reprojection_errors(refit, src, dst) <= inlier_px
        if int(refit_mask.sum()) >= 4:
            best_h, best_mask = refit, refit_mask
    return best_h, best_mask


# ---------------------------------------------------------------------------
# warping and cropping


def _check_invertible(h: np.ndarray) -> np.ndarray:
    h = np.asarray(h, dtype=np.float64)
    if h.shape != (3, 3):
        raise ValueError(f"homography must be 3x3, got {h.shape}")
    if abs(np.linalg.det(h)) < 1e-12:
        raise ValueError("homography is singular")
    return h


def _inverse_map(h: np.ndarray, out_h: int, out_w: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Source coordinates (sx, sy) and denominator-validity for each output pixel."""
    hinv = np.linalg.inv(h)
    xs = np.arange(out_w, dtype=np.float64)
    ys = np.arange(out_h, dtype=np.float64)
    xg, yg = np.meshgrid(xs, ys)
    denom = hinv[2, 0] * xg + hinv[2, 1] * yg + hinv[2, 2]
    ok = np.abs(denom) > 1e-12
    safe = np.where(ok, denom, 1.0)
    sx = (hinv[0, 0] * xg + hinv[0, 1] * yg + hinv[0, 2]) / safe
    sy = (hinv[1, 0] * xg + hinv[1, 1] * yg + hinv[1, 2]) / safe
    return sx, sy, ok


def warp_perspective(
    img: np.ndarray, h: np.ndarray, out_h: int, out_w: int
) -> tuple[np.ndarray, np.ndarray]:
    """Warp `img` by the source-to-output homography `h` (inverse mapping,
    bilinear sampling).  Returns (warped, validity mask); invalid pixels are 0."""
    arr = as_image(img)
    hmat = _check_invertible(h)
    if out_h < 1 or out_w < 1:
        raise ValueError(f"output dimensions must be >= 1, got ({out_h}, {out_w})")
    src_h, src_w = arr.shape[:2]
    sx, sy, ok = _inverse_map(hmat, out_h, out_w)
    valid = ok & (sx >= 0.0) & (sx <= src_w - 1.0) & (sy >= 0.0) & (sy <= src_h - 1.0)

    x0 = np.clip(np.floor(sx).astype(np.int64), 0, src_w - 1)
    y0 = np.clip(np.floor(sy).astype(np.int64), 0, src_h - 1)
    x1 = np.clip(x0 + 1, 0, src_w - 1)
    y1 = np.clip(y0 + 1, 0, src_h - 1)
    tx = np.clip(sx - x0, 0.0, 1.0)[:, :, None]
    ty = np.clip(sy - y0, 0.0, 1.0)[:, :, None]
    top = (1.0 - tx) * arr[y0, x0] + tx * arr[y0, x1]
    bot = (1.0 - tx) * arr[y1, x0] + tx * arr[y1, x1]
    out = (1.0 - ty) * top + ty * bot
    out[~valid] = 0.0
    return out, valid


def _largest_true_rectangle(mask: np.ndarray) -> CropRect | None:
    """Maximal-area all-true rectangle; ties broken by topmost then leftmost."""
    h, w = mask.shape
    heights = np.zeros(w, dtype=np.int64)
    best = None  # (area, top, left, height, width)
    for row in range(h):
        heights = np.where(mask[row], heights + 1, 0)
        stack: list[tuple[int, int]] = []  # (bar height, leftmost column)
        for col in range(w + 1):
            cur = int(heights[col]) if col < w else 0
            start = col
            while stack and stack[-1][0] >= cur:
                bar_h, bar_left = stack.pop()
                area = bar_h * (col - bar_left)
                cand = (area, -(row - bar_h + 1), -bar_left)
                if area > 0 and (best is None or cand > (best[0], -best[1], -best[2])):
                    best = (area, row - bar_h + 1, bar_left, bar_h, col - bar_left)
                start = bar_left
            if cur > 0:
                stack.append((cur, start))
    if best is None:
        return None
    return CropRect(top=best[1], left=best[2], height=best[3], width=best[4])


def crop_to_intersection(
    shape_a: tuple[int, int], shape_b: tuple[int, int], h: np.ndarray
) -> CropRect:
    """Largest axis-aligned rectangle inside frame A covered by the h-warp of
    frame B, found by scanning the warp validity mask."""
    hmat = _check_invertible(h)
    ah, aw = int(shape_a[0]), int(shape_a[1])
    bh, bw = int(shape_b[0]), int(shape_b[1])
    if min(ah, aw, bh, bw) < 1:
        raise ValueError("frame shapes must be positive")
    sx, sy, ok = _inverse_map(hmat, ah, aw)
    mask = ok & (sx >= 0.0) & (sx <= bw - 1.0) & (sy >= 0.0) & (sy <= bh - 1.0)
    rect = _largest_true_rectangle(mask)
    if rect is None or rect.height < 1 or rect.width < 1:
        raise EstimationError("frames do not intersect under the homography")
    return rect


# ---------------------------------------------------------------------------
# pair preparation


def _nearest_even(x: float) -> int:
    return max(2, 2 * round(x / 2.0))


def prepare_pair(
    wide: np.ndarray, shallow: np.ndarray, config: PrepareConfig | None = None
) -> PreparedPair:
    """Align a wide/shallow pair and rescale both to the target height.

    The shallow frame is warped onto the wide frame, both are cropped to the
    intersection rectangle and resized to height `config.target_height` with
    the width rounded to the nearest even integer.
    """
    cfg = config or PrepareConfig()
    wide_arr = as_image(wide)
    shallow_arr = as_image(shallow)
    for name, arr in (("wide", wide_arr), ("shallow", shallow_arr)):
        if min(arr.shape[0], arr.shape[1]) < 256:
            raise ValueError(f"{name} image {arr.shape[:2]} too small (min 256x256)")

    with pipeline_stage("detect"):
        kp_shallow = detect_keypoints(shallow_arr, cfg.max_keypoints)
        kp_wide = detect_keypoints(wide_arr, cfg.max_keypoints)
    with pipeline_stage("match"):
        matches = match_descriptors(kp_shallow, kp_wide, cfg.match_ratio)
        if len(matches) < 4:
            raise EstimationError(f"only {len(matches)} descriptor matches")
        corr = np.array(
            [
                (kp_shallow[m.index_a].x, kp_shallow[m.index_a].y,
                 kp_wide[m.index_b].x, kp_wide[m.index_b].y)
                for m in matches
            ]
        )
    with pipeline_stage("ransac"):
        hom, inliers = estimate_homography_ransac(
            corr, cfg.ransac_iterations, cfg.inlier_px, cfg.seed
        )
    with pipeline_stage("warp"):
        warped, _ = warp_perspective(
            shallow_arr, hom, wide_arr.shape[0], wide_arr.shape[1]
        )
    with pipeline_stage("crop"):
        rect = crop_to_intersection(wide_arr.shape[:2], shallow_arr.shape[:2], hom)
        wide_c = wide_arr[rect.top : rect.top + rect.height, rect.left : rect.left + rect.width]
        shallow_c = warped[rect.top : rect.top + rect.height, rect.left : rect.left + rect.width]
    with pipeline_stage("resize"):
        out_h = cfg.target_height
        out_w = _nearest_even(rect.width * out_h / rect.height)
        wide_out = resize_bilinear(wide_c, out_h, out_w)
        shallow_out = resize_bilinear(shallow_c, out_h, out_w)
    return PreparedPair(
        wide=wide_out,
        shallow=shallow_out,
        homography=hom,
        inlier_count=int(np.sum(inliers)),
        crop=rect,
    )


def prepare_directory(
    root: str | Path, config: PrepareConfig | None = None, jobs: int = 1
) -> list[str]:
    """Align every pair under `<root>/wide` and `<root>/shallow`.

    Writes `<root>/aligned/{wide,shallow}/<id>.png` and a JSON sidecar
    `<root>/aligned/<id>.json` with the homography, inlier count and crop
    rectangle.  Returns the processed pair ids.
    """
    root = Path(root)
    wide_dir = root / "wide"
    shallow_dir = root / "shallow"
    if not wide_dir.is_dir() or not shallow_dir.is_dir():
        raise FileNotFoundError(f"{root} must contain wide/ and shallow/ directories")
    wide_ids = {p.stem for p in wide_dir.glob("*.png")}
    shallow_ids = {p.stem for p in shallow_dir.glob("*.png")}
    ids = sorted(wide_ids & shallow_ids)
    if not ids:
        raise FileNotFoundError(f"no common pair ids under {root}")

    out_wide = root / "aligned" / "wide"
    out_shallow = root / "aligned" / "shallow"
    out_wide.mkdir(parents=True, exist_ok=True)
    out_shallow.mkdir(parents=True, exist_ok=True)

    def run(pair_id: str) -> str:
        wide = load_image(wide_dir / f"{pair_id}.png")
        shallow = load_image(shallow_dir / f"{pair_id}.png")
        pair = prepare_pair(wide, shallow, config)
        save_image(pair.wide, out_wide / f"{pair_id}.png")
        save_image(pair.shallow, out_shallow / f"{pair_id}.png")
        sidecar = {
            "homography": pair.homography.tolist(),
            "inlier_count": pair.inlier_count,
            "crop_rect": {
                "top": pair.crop.top,
                "left": pair.crop.left,
                "height": pair.crop.height,
                "width": pair.crop.width,
            },
        }
        (root / "aligned" / f"{pair_id}.json").write_text(canonical_json(sidecar))
        return pair_id

    if jobs <= 1:
        return [run(pair_id) for pair_id in ids]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(run, ids))
