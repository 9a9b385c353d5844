"""bokehkit: synthetic depth-of-field rendering, evaluation and user studies."""

from .align import (
    CropRect,
    Keypoint,
    Match,
    PrepareConfig,
    PreparedPair,
    crop_to_intersection,
    detect_keypoints,
    estimate_homography_ransac,
    match_descriptors,
    prepare_pair,
    warp_perspective,
)
from .bench import BenchmarkEntry, RunnerSpec, make_leaderboard, time_runner, write_report
from .image import (
    convolve2d,
    depth_to_space,
    disc_kernel,
    load_depth_map,
    load_image,
    resize_bilinear,
    save_image,
    space_to_depth,
    to_grayscale,
)
from .metrics import (
    MetricReport,
    charbonnier,
    combined_l1_ssim,
    evaluate_pair,
    gray_l1,
    l1,
    ms_ssim,
    psnr,
    sobel_loss,
    ssim,
)
from .render import (
    RenderConfig,
    composite_foreground,
    defocus_from_depth,
    radiance_weight,
    render_bokeh,
    render_layered,
)
from .wavelet import Subbands, dwt2_haar, idwt2_haar, wavelet_pyramid, wavelet_reconstruct

__version__ = "0.1.0"

__all__ = [
    "BenchmarkEntry",
    "CropRect",
    "Keypoint",
    "Match",
    "MetricReport",
    "PrepareConfig",
    "PreparedPair",
    "RenderConfig",
    "RunnerSpec",
    "Subbands",
    "charbonnier",
    "combined_l1_ssim",
    "composite_foreground",
    "convolve2d",
    "crop_to_intersection",
    "defocus_from_depth",
    "depth_to_space",
    "detect_keypoints",
    "disc_kernel",
    "dwt2_haar",
    "estimate_homography_ransac",
    "evaluate_pair",
    "gray_l1",
    "idwt2_haar",
    "l1",
    "load_depth_map",
    "load_image",
    "make_leaderboard",
    "match_descriptors",
    "ms_ssim",
    "prepare_pair",
    "psnr",
    "radiance_weight",
    "render_bokeh",
    "render_layered",
    "resize_bilinear",
    "save_image",
    "sobel_loss",
    "space_to_depth",
    "ssim",
    "time_runner",
    "to_grayscale",
    "warp_perspective",
    "wavelet_pyramid",
    "wavelet_reconstruct",
    "write_report",
]
