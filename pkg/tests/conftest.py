import numpy as np
import pytest

from depthgf.graph import WeightParams
from depthgf.imaging import RgbdImage


def random_rgbd(seed: int = 0, rows: int = 8, cols: int = 6) -> RgbdImage:
    rng = np.random.default_rng(seed)
    rgb = rng.integers(0, 256, (rows, cols, 3)).astype(np.uint8)
    depth = rng.uniform(0.0, 255.0, (rows, cols))
    return RgbdImage.from_rgb_depth(rgb, depth)


def random_params(seed: int = 0) -> WeightParams:
    rng = np.random.default_rng(seed)
    return WeightParams(
        delta_th=rng.uniform(5.0, 200.0),
        sigma_d=rng.uniform(5.0, 100.0),
        sigma_a=rng.uniform(2.0, 30.0),
        sigma_b=rng.uniform(2.0, 30.0),
    )


@pytest.fixture
def make_image():
    return random_rgbd


@pytest.fixture
def make_params():
    return random_params
