"""Portrait to single-loop plotter art.

A photograph becomes a set of stipple points, the points become a short
closed tour, the tour is repaired into a Jordan curve (no
self-intersections), and the curve becomes plotter-ready motion scripts
with draw-time estimates. A human picks the final curve from n
stochastic candidates through a small web gallery.
"""

from .estimators import ImageEnhancer, IntersectionRemover, Stippler, TourBuilder
from .images import (
    FilterParams,
    apply_mask,
    enhance,
    gaussian_filter,
    laplacian_of_gaussian,
    load_image,
    load_mask,
    to_grayscale,
)
from .motion import (
    PhysicalPath,
    TimeEstimate,
    TimeModel,
    Trajectory,
    TrapezoidalProfile,
    Workspace,
    emit_gcode,
    emit_robot_script,
    emit_svg,
    estimate_time,
    plan_trajectory,
    plan_trapezoid,
    scale_to_workspace,
)
from .pipeline import (
    CandidateRecord,
    PipelineConfig,
    generate_candidates,
    pick_candidate,
    run_headless,
)
from .server import serve_selection
from .stippling import StippleConfig, stipple, stipple_probabilistic, stipple_threshold
from .tours import nearest_neighbor_tour, tour_length, two_opt_improve
from .uncross import (
    JordanCurve,
    bresenham,
    edges_conflict,
    remove_intersections,
    segments_properly_intersect,
    supercover,
    verify_jordan,
)

__version__ = "0.1.0"

__all__ = [
    "CandidateRecord",
    "FilterParams",
    "ImageEnhancer",
    "IntersectionRemover",
    "JordanCurve",
    "PhysicalPath",
    "PipelineConfig",
    "StippleConfig",
    "Stippler",
    "TimeEstimate",
    "TimeModel",
    "TourBuilder",
    "Trajectory",
    "TrapezoidalProfile",
    "Workspace",
    "apply_mask",
    "bresenham",
    "edges_conflict",
    "emit_gcode",
    "emit_robot_script",
    "emit_svg",
    "enhance",
    "estimate_time",
    "gaussian_filter",
    "generate_candidates",
    "laplacian_of_gaussian",
    "load_image",
    "load_mask",
    "nearest_neighbor_tour",
    "pick_candidate",
    "plan_trajectory",
    "plan_trapezoid",
    "remove_intersections",
    "run_headless",
    "scale_to_workspace",
    "segments_properly_intersect",
    "serve_selection",
    "stipple",
    "stipple_probabilistic",
    "stipple_threshold",
    "supercover",
    "to_grayscale",
    "tour_length",
    "two_opt_improve",
    "verify_jordan",
]
