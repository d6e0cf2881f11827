"""Synthetic piecewise-constant RGB-D scenes for download-free evaluation.

The generated scene has flat depth regions separated by sharp discontinuities,
with color edges exactly co-located with the depth edges — the structure the
denoiser is designed to preserve. Useful when real stereo datasets (which the
user must obtain separately) are unavailable.
"""

from __future__ import annotations

import numpy as np

from .errors import InputDomainError
from .imaging import RgbdImage

# (depth level, rgb color) per region; background first.
_BACKGROUND = (160.0, (170, 180, 200))
_RECT1 = (60.0, (200, 60, 50))
_RECT2 = (110.0, (60, 170, 70))
_DISK = (210.0, (240, 200, 60))


def make_synthetic_scene(
    width: int = 448, height: int = 376, seed: int | None = None
) -> RgbdImage:
    """Build the canonical piecewise-constant test scene.

    With ``seed=None`` the layout is fixed; a seed jitters region placement
    for variety while keeping the piecewise-constant structure.
    """
    if width < 16 or height < 16:
        raise InputDomainError("synthetic scene needs at least 16x16 pixels")
    if seed is None:
        jitter = np.zeros(6)
    else:
        jitter = np.random.default_rng(seed).uniform(-0.03, 0.03, 6)

    depth = np.full((height, width), _BACKGROUND[0])
    rgb = np.zeros((height, width, 3), np.uint8)
    rgb[:, :] = _BACKGROUND[1]

    def frac(base: float, j: float) -> float:
        return min(max(base + j, 0.02), 0.95)

    r0, r1 = int(frac(0.16, jitter[0]) * height), int(frac(0.58, jitter[1]) * height)
    c0, c1 = int(frac(0.11, jitter[2]) * width), int(frac(0.45, jitter[2]) * width)
    depth[r0:r1, c0:c1] = _RECT1[0]
    rgb[r0:r1, c0:c1] = _RECT1[1]

    r0, r1 = int(frac(0.40, jitter[3]) * height), int(frac(0.88, jitter[4]) * height)
    c0, c1 = int(frac(0.54, jitter[3]) * width), int(frac(0.89, jitter[4]) * width)
    depth[r0:r1, c0:c1] = _RECT2[0]
    rgb[r0:r1, c0:c1] = _RECT2[1]

    cy = frac(0.32, jitter[5]) * height
    cx = frac(0.74, jitter[5]) * width
    radius = 0.185 * min(width, height)
    yy, xx = np.mgrid[0:height, 0:width]
    disk = (yy - cy) ** 2 + (xx - cx) ** 2 < radius**2
    depth[disk] = _DISK[0]
    rgb[disk] = _DISK[1]

    return RgbdImage.from_rgb_depth(rgb, depth)


def discontinuity_mask(depth: np.ndarray) -> np.ndarray:
    """Boolean plane marking pixels adjacent to a depth discontinuity
    (any 4-neighbor with a different depth value)."""
    depth = np.asarray(depth)
    edge = np.zeros(depth.shape, dtype=bool)
    vdiff = depth[:-1, :] != depth[1:, :]
    hdiff = depth[:, :-1] != depth[:, 1:]
    edge[:-1, :] |= vdiff
    edge[1:, :] |= vdiff
    edge[:, :-1] |= hdiff
    edge[:, 1:] |= hdiff
    return edge


def interior_mask(depth: np.ndarray, min_distance: int = 3) -> np.ndarray:
    """Pixels whose Chebyshev distance to every discontinuity-adjacent pixel
    is at least ``min_distance`` (edge pixels themselves are at distance 0).
    """
    from scipy.ndimage import binary_dilation

    if min_distance <= 0:
        return np.ones(np.asarray(depth).shape, dtype=bool)
    edge = discontinuity_mask(depth)
    if min_distance > 1:
        edge = binary_dilation(edge, iterations=min_distance - 1)
    return ~edge
