"""Convert a grayscale image into a stipple point set.

Darkness drives density: darker pixels are more likely to receive a dot.
Two modes are provided. Threshold mode deterministically keeps every
pixel darker than a cutoff. Probabilistic mode (the pipeline default)
draws an exact budget of distinct pixels by weighted sampling without
replacement, so the point count — which drives draw time — is always
hit exactly.

Points are ``(x, y)`` integer pixel coordinates (x = column, y = row).
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image

from .images import validate_gray


class NoStippleMassError(ValueError):
    """The image has no dark pixels at all: nothing can be sampled."""


@dataclass(frozen=True)
class StippleConfig:
    """Stippling settings.

    mode
        ``"probabilistic"`` (weighted sampling) or ``"threshold"``.
    threshold
        Intensity cutoff in [0, 1] for threshold mode; pixels strictly
        darker than this are kept.
    target_points
        Exact point budget for probabilistic mode; at least 3, since a
        closed curve needs three vertices.
    gamma
        Darkness exponent: sampling weight is ``(1 - intensity) ** gamma``.
    seed
        Seed for the sampling generator; fixed seed means fixed output.
    """

    mode: str = "probabilistic"
    threshold: float = 0.5
    target_points: int = 2000
    gamma: float = 1.0
    seed: int = 0

    def __post_init__(self) -> None:
        if self.mode not in ("probabilistic", "threshold"):
            raise ValueError(f"unknown stipple mode: {self.mode!r}")
        if not 0.0 <= self.threshold <= 1.0:
            raise ValueError(f"threshold must lie in [0, 1], got {self.threshold}")
        if self.target_points < 3:
            raise ValueError(f"target_points must be >= 3, got {self.target_points}")
        if self.gamma <= 0:
            raise ValueError(f"gamma must be > 0, got {self.gamma}")


def stipple_threshold(img: np.ndarray, threshold: float) -> np.ndarray:
    """Keep every pixel with intensity strictly below the threshold.

    Returns a ``(k, 2)`` int array of (x, y) points in row-major scan
    order; deterministic for a fixed image.
    """
    img = validate_gray(img)
    if not 0.0 <= threshold <= 1.0:
        raise ValueError(f"threshold must lie in [0, 1], got {threshold}")
    rows, cols = np.nonzero(img < threshold)
    return np.column_stack([cols, rows]).astype(np.int64)


def stipple_probabilistic(img: np.ndarray, cfg: StippleConfig) -> np.ndarray:
    """Draw ``min(target_points, #pixels with positive weight)`` distinct pixels.

    Each pixel is weighted ``(1 - intensity) ** gamma`` and the set is
    drawn without replacement with a generator seeded from ``cfg.seed``,
    so the result is a deterministic function of (image, config). Points
    come back sorted lexicographically by (x, y).

    Raises
    ------
    NoStippleMassError
        If every pixel is pure white (zero total weight).
    """
    img = validate_gray(img)
    h, w = img.shape
    weights = (1.0 - img.ravel()) ** cfg.gamma
    positive = np.nonzero(weights > 0.0)[0]
    if positive.size == 0:
        raise NoStippleMassError("image is all white: no pixel has stipple weight")

    k = min(cfg.target_points, positive.size)
    pool_weights = weights[positive]
    rng = np.random.default_rng(cfg.seed)
    chosen = rng.choice(positive, size=k, replace=False, p=pool_weights / pool_weights.sum())

    ys, xs = np.divmod(chosen, w)
    points = np.column_stack([xs, ys]).astype(np.int64)
    order = np.lexsort((points[:, 1], points[:, 0]))
    return points[order]


def stipple(img: np.ndarray, cfg: StippleConfig) -> np.ndarray:
    """Dispatch on ``cfg.mode``."""
    if cfg.mode == "threshold":
        return stipple_threshold(img, cfg.threshold)
    return stipple_probabilistic(img, cfg)


def validate_points(points: np.ndarray) -> np.ndarray:
    """Check a stipple point array: (k, 2) integers, no duplicates."""
    pts = np.asarray(points)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ValueError(f"expected (k, 2) point array, got shape {pts.shape}")
    if len(np.unique(pts, axis=0)) != len(pts):
        raise ValueError("duplicate stipple points")
    return pts


def save_points_text(points: np.ndarray, path: str | Path) -> None:
    """Write points as a two-column decimal text file, one "x y" per line."""
    np.savetxt(path, np.asarray(points), fmt="%d")


def save_points_png(points: np.ndarray, dims: tuple[int, int], path: str | Path) -> None:
    """Render a stipple preview: black dots on white at source resolution."""
    w, h = dims
    canvas = np.full((h, w), 255, dtype=np.uint8)
    pts = np.asarray(points)
    if len(pts):
        canvas[pts[:, 1], pts[:, 0]] = 0
    Image.fromarray(canvas, mode="L").save(path)
