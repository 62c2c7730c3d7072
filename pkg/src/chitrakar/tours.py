"""Closed-tour construction and improvement over stipple points.

A tour is a permutation of point indices; the edge from the last index
back to the first is implied. Construction is greedy nearest-neighbor,
improvement is 2-opt: per sweep the single best segment reversal is
applied, repeating while the tour keeps getting shorter.
"""

from __future__ import annotations

import numpy as np


def _as_points(points: np.ndarray) -> np.ndarray:
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ValueError(f"expected (n, 2) point array, got shape {pts.shape}")
    if len(pts) < 3:
        raise ValueError(f"a closed tour needs at least 3 points, got {len(pts)}")
    return pts


def validate_tour(order: np.ndarray, n_points: int) -> np.ndarray:
    """Check that ``order`` is a permutation of 0..n_points-1."""
    order = np.asarray(order, dtype=np.int64)
    if order.ndim != 1 or len(order) != n_points:
        raise ValueError(f"tour must index all {n_points} points, got shape {order.shape}")
    if not np.array_equal(np.sort(order), np.arange(n_points)):
        raise ValueError("tour is not a permutation of the point indices")
    return order


def nearest_neighbor_tour(points: np.ndarray, start: int = 0) -> np.ndarray:
    """Greedy chain: repeatedly hop to the closest unvisited point.

    Ties are broken toward the lowest point index, decided on exact
    squared integer distances when the input is integral.
    """
    pts = _as_points(points)
    n = len(pts)
    if not 0 <= start < n:
        raise ValueError(f"start index {start} out of range for {n} points")

    # Squared distances stay exact for integer pixel coordinates, which
    # makes the lowest-index tie-break deterministic.
    coords = np.asarray(points)
    if np.issubdtype(coords.dtype, np.integer):
        coords = coords.astype(np.int64)
    else:
        coords = coords.astype(np.float64)

    order = np.empty(n, dtype=np.int64)
    order[0] = start
    remaining = np.ones(n, dtype=bool)
    remaining[start] = False
    current = start
    for i in range(1, n):
        diff = coords[remaining] - coords[current]
        d2 = diff[:, 0] ** 2 + diff[:, 1] ** 2
        candidates = np.nonzero(remaining)[0]
        current = candidates[np.argmin(d2)]
        order[i] = current
        remaining[current] = False
    return order


def tour_length(order: np.ndarray, points: np.ndarray) -> float:
    """Euclidean length of the closed tour, including the closing edge."""
    pts = _as_points(points)
    order = validate_tour(order, len(pts))
    walk = pts[order]
    diffs = np.diff(np.vstack([walk, walk[:1]]), axis=0)
    return float(np.hypot(diffs[:, 0], diffs[:, 1]).sum())


def _best_move_chunked(walk: np.ndarray) -> tuple[float, int, int]:
    """Best 2-opt move, recomputing distances in row blocks (large tours).

    Returns ``(delta, i, j)`` for the most negative length change from
    reversing positions ``i+1..j``; delta >= 0 means nothing improves.
    Scan order (row-major over the delta matrix) settles ties.
    """
    n = len(walk)
    nxt = np.roll(np.arange(n), -1)
    edge_len = np.hypot(*(walk[nxt] - walk).T)

    best_delta = 0.0
    best = (0.0, -1, -1)
    block = max(1, (2048 * 2048) // n)
    for lo in range(0, n, block):
        hi = min(lo + block, n)
        d_head = np.hypot(
            walk[lo:hi, 0, None] - walk[None, :, 0],
            walk[lo:hi, 1, None] - walk[None, :, 1],
        )
        d_tail = np.hypot(
            walk[nxt[lo:hi], 0, None] - walk[nxt, 0][None, :],
            walk[nxt[lo:hi], 1, None] - walk[nxt, 1][None, :],
        )
        delta = d_head + d_tail - edge_len[lo:hi, None] - edge_len[None, :]
        # Only i < j is a valid reversal; mask the rest.
        cols = np.arange(n)[None, :]
        rows = np.arange(lo, hi)[:, None]
        delta[cols <= rows] = np.inf
        flat = np.argmin(delta)
        r, c = divmod(int(flat), n)
        if delta[r, c] < best_delta:
            best_delta = float(delta[r, c])
            best = (best_delta, lo + r, c)
    return best


_FULL_MATRIX_LIMIT = 2600  # ~54 MB of float64 pairwise distances


def two_opt_improve(order: np.ndarray, points: np.ndarray, max_passes: int = 50) -> np.ndarray:
    """Apply best-improvement 2-opt moves until no move shortens the tour.

    Each sweep evaluates every segment reversal and applies the single
    best strictly improving one; at most ``max_passes`` sweeps run. The
    result is never longer than the input tour.
    """
    pts = _as_points(points)
    order = validate_tour(order, len(pts)).copy()
    n = len(order)

    if n > _FULL_MATRIX_LIMIT:
        for _ in range(max_passes):
            delta, i, j = _best_move_chunked(pts[order])
            if delta >= 0.0 or i < 0:
                break
            order[i + 1 : j + 1] = order[i + 1 : j + 1][::-1]
        return order

    # Maintain pairwise distances in tour order; a reversal only permutes
    # rows and columns, so each sweep is pure array arithmetic.
    walk = pts[order]
    dmat = np.hypot(walk[:, 0, None] - walk[None, :, 0], walk[:, 1, None] - walk[None, :, 1])
    idx = np.arange(n)
    lower = idx[None, :] <= idx[:, None]  # keep i < j only
    nxt = np.roll(idx, -1)
    for _ in range(max_passes):
        edge_len = dmat[idx, nxt]
        delta = dmat + np.roll(np.roll(dmat, -1, axis=0), -1, axis=1)
        delta -= edge_len[:, None]
        delta -= edge_len[None, :]
        delta[lower] = np.inf
        i, j = divmod(int(np.argmin(delta)), n)
        if not delta[i, j] < 0.0:
            break
        order[i + 1 : j + 1] = order[i + 1 : j + 1][::-1]
        dmat[i + 1 : j + 1, :] = dmat[i + 1 : j + 1, :][::-1, :]
        dmat[:, i + 1 : j + 1] = dmat[:, i + 1 : j + 1][:, ::-1]
    return order


def save_tour_text(order: np.ndarray, points: np.ndarray, path) -> None:
    """Write the tour as ordered "x y" lines (closing edge implied)."""
    np.savetxt(path, np.asarray(points)[np.asarray(order)], fmt="%d")
