"""Per-leaf damage analysis of plant footage."""

from ._core import (
    BackendError,
    InvalidArgument,
    MediaError,
    analyze,
    analyze_frames,
    compare_annotations,
    config_keys,
    dice,
    downsample_indices,
    laplacian_variance,
    mask_iou,
    render_scene,
    score_entry,
    solve_assignment,
    ssim,
    summary_line,
    write_scene,
)

__all__ = [
    "BackendError",
    "InvalidArgument",
    "MediaError",
    "analyze",
    "analyze_frames",
    "compare_annotations",
    "config_keys",
    "dice",
    "downsample_indices",
    "laplacian_variance",
    "mask_iou",
    "render_scene",
    "score_entry",
    "solve_assignment",
    "ssim",
    "summary_line",
    "write_scene",
]
