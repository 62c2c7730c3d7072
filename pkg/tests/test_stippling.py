import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chitrakar.stippling import (
    NoStippleMassError,
    StippleConfig,
    stipple_probabilistic,
    stipple_threshold,
)


def brute_threshold_set(img: np.ndarray, threshold: float) -> set[tuple[int, int]]:
    return {
        (x, y)
        for y in range(img.shape[0])
        for x in range(img.shape[1])
        if img[y, x] < threshold
    }


class TestThreshold:
    def test_all_white_empty(self):
        assert len(stipple_threshold(np.ones((4, 4)), 0.5)) == 0

    def test_all_black_everything(self):
        pts = stipple_threshold(np.zeros((3, 5)), 0.5)
        assert len(pts) == 15
        assert len(np.unique(pts, axis=0)) == 15

    def test_two_pixel_predicate(self):
        img = np.array([[0.2, 0.8]])
        pts = stipple_threshold(img, 0.5)
        assert pts.tolist() == [[0, 0]]

    def test_out_of_range_threshold(self):
        with pytest.raises(ValueError):
            stipple_threshold(np.zeros((2, 2)), 1.5)

    @given(st.integers(0, 2**32 - 1), st.floats(0.0, 1.0))
    @settings(max_examples=40, deadline=None)
    def test_matches_brute_force_predicate(self, seed, threshold):
        rng = np.random.default_rng(seed)
        img = rng.random((5, 7))
        pts = stipple_threshold(img, threshold)
        assert {(int(x), int(y)) for x, y in pts} == brute_threshold_set(img, threshold)


class TestProbabilistic:
    def test_all_black_exact_budget(self):
        img = np.zeros((10, 10))
        cfg = StippleConfig(target_points=25, seed=1)
        pts = stipple_probabilistic(img, cfg)
        assert len(pts) == 25
        assert len(np.unique(pts, axis=0)) == 25

    def test_all_black_uniform_in_expectation(self):
        # All weights equal: per-pixel selection frequency is flat by symmetry.
        img = np.zeros((6, 6))
        counts = np.zeros((6, 6))
        runs = 1500
        for seed in range(runs):
            pts = stipple_probabilistic(img, StippleConfig(target_points=6, seed=seed))
            counts[pts[:, 1], pts[:, 0]] += 1
        expected = runs * 6 / 36.0
        assert abs(counts.mean() - expected) < 1e-9  # budget is exact
        assert counts.std() / expected < 0.2

    def test_white_half_never_selected(self):
        img = np.ones((10, 10))
        img[:, :5] = 0.0
        pts = stipple_probabilistic(img, StippleConfig(target_points=50, seed=3, gamma=1.0))
        assert len(pts) == 50
        assert (pts[:, 0] < 5).all()

    def test_budget_capped_by_positive_weight_pool(self):
        img = np.ones((4, 4))
        img[0, :2] = 0.5
        pts = stipple_probabilistic(img, StippleConfig(target_points=10, seed=0))
        assert len(pts) == 2

    def test_all_white_raises(self):
        with pytest.raises(NoStippleMassError):
            stipple_probabilistic(np.ones((4, 4)), StippleConfig(target_points=3, seed=0))

    def test_deterministic_for_fixed_inputs(self, portrait_array):
        from chitrakar.images import to_grayscale

        img = to_grayscale(portrait_array)
        cfg = StippleConfig(target_points=200, seed=42)
        a = stipple_probabilistic(img, cfg)
        b = stipple_probabilistic(img, cfg)
        assert (a == b).all()

    def test_different_seeds_differ(self):
        rng = np.random.default_rng(0)
        img = rng.random((20, 20))
        a = stipple_probabilistic(img, StippleConfig(target_points=30, seed=1))
        b = stipple_probabilistic(img, StippleConfig(target_points=30, seed=2))
        assert a.shape == b.shape == (30, 2)
        assert not (a == b).all()

    def test_points_inside_source_dims(self):
        rng = np.random.default_rng(1)
        img = rng.random((9, 13))
        pts = stipple_probabilistic(img, StippleConfig(target_points=40, seed=5))
        assert (pts[:, 0] >= 0).all() and (pts[:, 0] < 13).all()
        assert (pts[:, 1] >= 0).all() and (pts[:, 1] < 9).all()

    def test_selection_frequency_tracks_darkness(self):
        # Two-level image: darkness 0.8 vs 0.2 should select 4x as often
        # (gamma 1, budget small next to the pool).
        img = np.full((20, 50), 0.8)  # intensity 0.8 -> darkness 0.2
        img[:10] = 0.2  # darkness 0.8
        dark_rows = np.arange(10)
        counts_dark = 0
        counts_light = 0
        for seed in range(1200):
            pts = stipple_probabilistic(
                img, StippleConfig(target_points=20, gamma=1.0, seed=seed)
            )
            in_dark = np.isin(pts[:, 1], dark_rows)
            counts_dark += int(in_dark.sum())
            counts_light += int(len(pts) - in_dark.sum())
        ratio = counts_dark / counts_light
        assert 3.6 <= ratio <= 4.4

    def test_monotone_in_darkness(self):
        # Empirical selection frequency never decreases with darkness.
        levels = [0.9, 0.6, 0.3, 0.0]  # intensities, one per column band
        img = np.empty((8, 32))
        for band, level in enumerate(levels):
            img[:, band * 8 : (band + 1) * 8] = level
        counts = np.zeros(len(levels))
        for seed in range(800):
            pts = stipple_probabilistic(img, StippleConfig(target_points=12, seed=seed))
            for band in range(len(levels)):
                counts[band] += int(((pts[:, 0] // 8) == band).sum())
        assert (np.diff(counts) > 0).all()

    def test_gamma_sharpens_contrast(self):
        img = np.full((10, 20), 0.5)
        img[:, :10] = 0.1  # darker half
        def dark_share(gamma):
            total_dark = 0
            total = 0
            for seed in range(300):
                pts = stipple_probabilistic(
                    img, StippleConfig(target_points=20, gamma=gamma, seed=seed)
                )
                total_dark += int((pts[:, 0] < 10).sum())
                total += len(pts)
            return total_dark / total

        assert dark_share(3.0) > dark_share(1.0)


class TestConfig:
    def test_minimum_points(self):
        with pytest.raises(ValueError):
            StippleConfig(target_points=2)

    def test_mode_names(self):
        with pytest.raises(ValueError):
            StippleConfig(mode="dither")

    def test_threshold_range(self):
        with pytest.raises(ValueError):
            StippleConfig(threshold=-0.1)
