"""Workspace mapping, trapezoidal trajectories, draw-time estimates, emitters.

The certified curve lives in pixel coordinates (y down). This module
maps it into a physical workspace (meters, y up), plans one trapezoidal
velocity profile per segment, estimates total draw time from the fitted
models, and renders SVG / G-code / robot-script text.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .uncross import JordanCurve


@dataclass(frozen=True)
class Workspace:
    """Drawable area: origin (lower-left, meters), size, pen heights."""

    origin: tuple[float, float] = (0.0, 0.0)
    width: float = 0.5
    height: float = 1.0
    z_draw: float = 0.0
    z_travel: float = 0.02

    def __post_init__(self) -> None:
        if self.width <= 0 or self.height <= 0:
            raise ValueError("workspace width and height must be positive")
        if self.z_travel <= self.z_draw:
            raise ValueError("z_travel must be above z_draw")


@dataclass(frozen=True)
class PhysicalPath:
    """Closed waypoint chain in meters; first waypoint repeated at the end."""

    waypoints: np.ndarray
    stroke_length: float

    def __len__(self) -> int:
        return len(self.waypoints)


@dataclass(frozen=True)
class TrapezoidalProfile:
    """Rest-to-rest profile for one straight segment."""

    distance: float
    v_max: float
    a_max: float
    peak_v: float
    t_accel: float
    t_cruise: float
    t_total: float

    def velocity(self, t: float) -> float:
        """Speed at time t; piecewise linear, 0 at both ends."""
        if t <= 0.0 or t >= self.t_total:
            return 0.0
        if t < self.t_accel:
            return self.a_max * t
        if t < self.t_accel + self.t_cruise:
            return self.peak_v
        return self.a_max * (self.t_total - t)


@dataclass(frozen=True)
class Trajectory:
    """Per-segment profiles plus blend radii for the script emitter."""

    path: PhysicalPath
    profiles: tuple[TrapezoidalProfile, ...]
    blend_radii: tuple[float, ...]
    v_max: float
    a_max: float

    @property
    def total_time(self) -> float:
        """Conservative total: blends only shorten the real motion."""
        return sum(p.t_total for p in self.profiles)


def scale_to_workspace(curve: JordanCurve, ws: Workspace, margin: float = 0.0) -> PhysicalPath:
    """Uniformly scale and center the curve inside the margin-inset workspace.

    Aspect ratio is preserved; the image y axis (down) flips to the
    workspace y axis (up). The curve's bounding box may be degenerate in
    one dimension (collinear points) but not both.
    """
    if margin < 0:
        raise ValueError("margin must be >= 0")
    avail_w = ws.width - 2.0 * margin
    avail_h = ws.height - 2.0 * margin
    if avail_w <= 0 or avail_h <= 0:
        raise ValueError("margin leaves no drawable area")

    walk = curve.walk.astype(np.float64)
    lo = walk.min(axis=0)
    hi = walk.max(axis=0)
    span = hi - lo
    if span[0] == 0.0 and span[1] == 0.0:
        raise ValueError("curve bounding box is a single point")

    scales = [avail_w / span[0] if span[0] > 0 else math.inf,
              avail_h / span[1] if span[1] > 0 else math.inf]
    s = min(scales)

    scaled = (walk - lo) * s
    scaled_span = span * s
    offx = ws.origin[0] + margin + (avail_w - scaled_span[0]) / 2.0
    offy = ws.origin[1] + margin + (avail_h - scaled_span[1]) / 2.0

    xs = offx + scaled[:, 0]
    ys = offy + (scaled_span[1] - scaled[:, 1])  # flip y: image down -> bench up
    open_path = np.column_stack([xs, ys])
    closed = np.vstack([open_path, open_path[:1]])
    stroke = float(np.hypot(*np.diff(closed, axis=0).T).max())
    return PhysicalPath(waypoints=closed, stroke_length=stroke)


def plan_trapezoid(distance: float, v_max: float, a_max: float) -> TrapezoidalProfile:
    """Rest-to-rest trapezoidal profile over a straight segment.

    A segment long enough to reach ``v_max`` (``distance >= v_max^2 /
    a_max``) gets the full trapezoid; shorter segments degenerate to a
    triangular profile peaking at ``sqrt(distance * a_max)``.
    """
    if distance < 0:
        raise ValueError("distance must be >= 0")
    if v_max <= 0 or a_max <= 0:
        raise ValueError("v_max and a_max must be positive")

    if distance > v_max * v_max / a_max:
        t_accel = v_max / a_max
        t_cruise = max(0.0, distance / v_max - t_accel)
        return TrapezoidalProfile(
            distance=distance,
            v_max=v_max,
            a_max=a_max,
            peak_v=v_max,
            t_accel=t_accel,
            t_cruise=t_cruise,
            t_total=2.0 * t_accel + t_cruise,
        )
    # Triangular limit; at distance == v_max^2 / a_max this coincides with
    # the trapezoid and keeps t_cruise at an exact zero.
    peak = min(v_max, math.sqrt(distance * a_max))
    t_accel = math.sqrt(distance / a_max) if distance > 0 else 0.0
    return TrapezoidalProfile(
        distance=distance,
        v_max=v_max,
        a_max=a_max,
        peak_v=peak,
        t_accel=t_accel,
        t_cruise=0.0,
        t_total=2.0 * t_accel,
    )


def plan_trajectory(
    path: PhysicalPath, v_max: float = 0.1, a_max: float = 0.5, blend_radius: float = 0.001
) -> Trajectory:
    """One trapezoidal profile per segment; blend radii clamped per waypoint.

    A waypoint's blend radius may not exceed half of its shorter
    adjacent segment, otherwise consecutive blends would overlap.
    """
    if blend_radius < 0:
        raise ValueError("blend_radius must be >= 0")
    wp = path.waypoints
    seg_len = np.hypot(*np.diff(wp, axis=0).T)
    profiles = tuple(plan_trapezoid(float(d), v_max, a_max) for d in seg_len)

    blends = []
    n_seg = len(seg_len)
    for k in range(n_seg):
        prev_len = seg_len[k - 1] if k > 0 else seg_len[-1]
        limit = 0.5 * min(float(prev_len), float(seg_len[k]))
        blends.append(min(blend_radius, limit))
    return Trajectory(
        path=path,
        profiles=profiles,
        blend_radii=tuple(blends),
        v_max=v_max,
        a_max=a_max,
    )


@dataclass(frozen=True)
class TimeModel:
    """Fitted draw-time models.

    ``minutes_for_stroke`` follows the power-law fit ``b * x**a + c``
    (x = stroke length in mm, 10 points). ``minutes_for_points`` follows
    the linear fit in the point count (10 mm stroke), slope 0.00243
    min/point and intercept 3.875 min.
    """

    family: str
    a: float
    b: float
    c: float
    linear_m: float = 0.00243
    linear_c: float = 3.875

    _PRESETS = {
        "decagon": (0.715, 0.654, 0.396),
        "random": (0.626, 1.36, -0.044),
        "straight": (0.643, 0.945, 0.195),
    }

    @classmethod
    def preset(cls, family: str) -> "TimeModel":
        try:
            a, b, c = cls._PRESETS[family]
        except KeyError:
            raise ValueError(
                f"unknown time-model family {family!r}; choose from {sorted(cls._PRESETS)}"
            ) from None
        return cls(family=family, a=a, b=b, c=c)

    def minutes_for_points(self, n_points: int) -> float:
        return self.linear_m * n_points + self.linear_c

    def minutes_for_stroke(self, stroke_mm: float) -> float:
        return self.b * stroke_mm**self.a + self.c


@dataclass(frozen=True)
class TimeEstimate:
    """Both draw-time readings, in minutes."""

    by_point_count: float
    by_stroke_length: float


def estimate_time(n_points: int, stroke_mm: float, model: TimeModel) -> TimeEstimate:
    """Evaluate both fitted models for a drawing job.

    The point-count model assumes the 10 mm reference stroke; the
    stroke-length model assumes the 10-point reference object.
    """
    if n_points < 3:
        raise ValueError("n_points must be >= 3")
    if stroke_mm <= 0:
        raise ValueError("stroke_mm must be positive")
    return TimeEstimate(
        by_point_count=model.minutes_for_points(n_points),
        by_stroke_length=model.minutes_for_stroke(stroke_mm),
    )


def emit_svg(curve: JordanCurve, dims: tuple[int, int] | None = None) -> str:
    """Render the curve as one closed SVG path over the source pixel grid.

    ``dims`` (width, height) pins the viewBox to the source image;
    without it the curve's own bounding box is used.
    """
    if dims is not None:
        w, h = dims
    else:
        w = int(curve.points[:, 0].max()) + 1
        h = int(curve.points[:, 1].max()) + 1
    coords = " L ".join(f"{int(x)} {int(y)}" for x, y in curve.walk)
    return (
        '<?xml version="1.0" encoding="UTF-8"?>\n'
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {w} {h}">\n'
        f'<path d="M {coords} Z" fill="none" stroke="black" stroke-width="1"/>\n'
        "</svg>\n"
    )


GCODE_PREAMBLE_LINES = 4   # G21, G90, travel, plunge
GCODE_POSTAMBLE_LINES = 2  # retract, M2


def emit_gcode(path: PhysicalPath, feed_mm_min: float = 1500.0, lift_mm: float = 2.0) -> str:
    """Single-stroke G-code: travel to start, plunge, draw the chain, retract.

    Coordinates are millimeters (path waypoints are meters); the pen is
    modeled as a Z move between 0 (drawing) and ``lift_mm`` (travel).
    """
    if feed_mm_min <= 0:
        raise ValueError("feed must be positive")
    wp_mm = path.waypoints * 1000.0
    lines = [
        "G21",
        "G90",
        f"G0 X{wp_mm[0, 0]:.3f} Y{wp_mm[0, 1]:.3f} Z{lift_mm:.3f}",
        f"G1 Z0.000 F{feed_mm_min:.1f}",
    ]
    for x, y in wp_mm[1:]:
        lines.append(f"G1 X{x:.3f} Y{y:.3f} F{feed_mm_min:.1f}")
    lines.append(f"G0 Z{lift_mm:.3f}")
    lines.append("M2")
    return "\n".join(lines) + "\n"


def emit_robot_script(
    traj: Trajectory,
    ws: Workspace,
    orientation: tuple[float, float, float] = (math.pi, 0.0, 0.0),
) -> str:
    """One linear-move command per waypoint, plus pen-down approach and retract.

    Every line carries the pose (x, y, z, fixed axis-angle orientation),
    the commanded acceleration and velocity, and the waypoint's blend
    radius, formatted as fixed 6-decimal meters with LF line endings.
    """
    rx, ry, rz = orientation
    wp = traj.path.waypoints

    def movel(x: float, y: float, z: float, r: float) -> str:
        return (
            f"movel(p[{x:.6f},{y:.6f},{z:.6f},{rx:.6f},{ry:.6f},{rz:.6f}],"
            f" a={traj.a_max:.6f}, v={traj.v_max:.6f}, r={r:.6f})"
        )

    lines = [
        movel(wp[0, 0], wp[0, 1], ws.z_travel, 0.0),
        movel(wp[0, 0], wp[0, 1], ws.z_draw, 0.0),
    ]
    for k, (x, y) in enumerate(wp[1:], start=1):
        blend = traj.blend_radii[k] if k < len(traj.blend_radii) else 0.0
        lines.append(movel(x, y, ws.z_draw, blend))
    lines.append(movel(wp[-1, 0], wp[-1, 1], ws.z_travel, 0.0))
    return "\n".join(lines) + "\n"
