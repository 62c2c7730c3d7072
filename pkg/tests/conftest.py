import sys
from pathlib import Path

import numpy as np
import pytest
from PIL import Image

sys.path.insert(0, str(Path(__file__).parent))  # make oracles importable


def synthetic_portrait(size: int = 96) -> np.ndarray:
    """Dark head-and-features blob on white, as an (H, W, 3) uint8 array."""
    yy, xx = np.mgrid[0:size, 0:size]
    gray = np.full((size, size), 255, dtype=np.uint8)
    cx = cy = size / 2.0
    head = ((xx - cx) / (size * 0.30)) ** 2 + ((yy - cy) / (size * 0.38)) ** 2 <= 1.0
    gray[head] = 175
    features = [
        (cx - size * 0.13, cy - size * 0.10, size * 0.06, size * 0.035, 40),
        (cx + size * 0.13, cy - size * 0.10, size * 0.06, size * 0.035, 40),
        (cx, cy + size * 0.05, size * 0.025, size * 0.09, 90),
        (cx, cy + size * 0.22, size * 0.11, size * 0.04, 30),
    ]
    for fx, fy, rx, ry, value in features:
        blob = ((xx - fx) / rx) ** 2 + ((yy - fy) / ry) ** 2 <= 1.0
        gray[blob] = value
    return np.stack([gray] * 3, axis=-1)


@pytest.fixture
def portrait_array() -> np.ndarray:
    return synthetic_portrait(96)


@pytest.fixture
def portrait_file(tmp_path) -> Path:
    path = tmp_path / "portrait.png"
    Image.fromarray(synthetic_portrait(96)).save(path)
    return path


@pytest.fixture
def portrait_file_512(tmp_path) -> Path:
    path = tmp_path / "portrait512.png"
    Image.fromarray(synthetic_portrait(512)).save(path)
    return path


def random_distinct_points(rng: np.random.Generator, n: int, lim: int = 1000) -> np.ndarray:
    """n distinct integer points in [0, lim)^2."""
    while True:
        pts = rng.integers(0, lim, size=(n, 2))
        if len(np.unique(pts, axis=0)) == n:
            return pts
