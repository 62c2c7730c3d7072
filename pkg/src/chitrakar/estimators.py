"""Estimator-style wrappers so the chain composes as a sklearn Pipeline.

Every stage is a stateless transformer: ``fit`` is a no-op that returns
``self`` and ``transform`` maps one artifact to the next. The data
moving through the chain is always a numpy array — a gray image, then a
``(k, 2)`` point set, then the same points reordered into a tour, then
reordered again into a crossing-free closed polyline:

    Pipeline([
        ("enhance", ImageEnhancer(sigma=1.0)),
        ("stipple", Stippler(target_points=500, seed=7)),
        ("tour", TourBuilder()),
        ("uncross", IntersectionRemover()),
    ]).fit_transform(gray_image)

Parameters follow the sklearn convention (constructor args mirrored as
attributes, ``get_params``/``set_params`` inherited), and quantities
computed during ``transform`` land in trailing-underscore attributes.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from .images import FilterParams, enhance, to_grayscale, validate_gray
from .stippling import StippleConfig, stipple
from .tours import nearest_neighbor_tour, tour_length, two_opt_improve
from .uncross import JordanCurve, remove_intersections


class ImageEnhancer(BaseEstimator, TransformerMixin):
    """Grayscale + Laplacian-of-Gaussian feature enhancement.

    Accepts an ``(H, W, 3)`` RGB array or an ``(H, W)`` gray array and
    returns the enhanced gray image in [0, 1].
    """

    def __init__(self, sigma: float = 1.0, radius: int = 1, mode: str = "multiply"):
        self.sigma = sigma
        self.radius = radius
        self.mode = mode

    def fit(self, X, y=None):
        return self

    def transform(self, X) -> np.ndarray:
        arr = np.asarray(X)
        gray = to_grayscale(arr) if arr.ndim == 3 else validate_gray(arr)
        return enhance(gray, FilterParams(sigma=self.sigma, radius=self.radius), self.mode)


class Stippler(BaseEstimator, TransformerMixin):
    """Gray image to ``(k, 2)`` integer stipple points."""

    def __init__(
        self,
        mode: str = "probabilistic",
        threshold: float = 0.5,
        target_points: int = 2000,
        gamma: float = 1.0,
        seed: int = 0,
    ):
        self.mode = mode
        self.threshold = threshold
        self.target_points = target_points
        self.gamma = gamma
        self.seed = seed

    def fit(self, X, y=None):
        return self

    def transform(self, X) -> np.ndarray:
        cfg = StippleConfig(
            mode=self.mode,
            threshold=self.threshold,
            target_points=self.target_points,
            gamma=self.gamma,
            seed=self.seed,
        )
        return stipple(validate_gray(X), cfg)


class TourBuilder(BaseEstimator, TransformerMixin):
    """Point set to the same points reordered along a short closed tour."""

    def __init__(self, start: int = 0, max_passes: int = 50):
        self.start = start
        self.max_passes = max_passes

    def fit(self, X, y=None):
        return self

    def transform(self, X) -> np.ndarray:
        points = np.asarray(X)
        order = nearest_neighbor_tour(points, self.start)
        order = two_opt_improve(order, points, self.max_passes)
        self.tour_length_ = tour_length(order, points)
        return points[order]


class IntersectionRemover(BaseEstimator, TransformerMixin):
    """Ordered points to a crossing-free closed polyline (same vertex set)."""

    def __init__(self, grid_scale: int = 2):
        self.grid_scale = grid_scale

    def fit(self, X, y=None):
        return self

    def transform(self, X) -> np.ndarray:
        points = np.asarray(X)
        moves: list = []
        curve = remove_intersections(
            np.arange(len(points)), points, scale=self.grid_scale, move_log=moves
        )
        self.moves_ = moves
        self.curve_ = curve
        self.tour_length_ = curve.length()
        return curve.walk

    def as_curve(self, X) -> JordanCurve:
        """Transform and return the certified curve object itself."""
        self.transform(X)
        return self.curve_
