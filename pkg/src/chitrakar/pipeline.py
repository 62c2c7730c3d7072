"""End-to-end orchestration: image in, n candidate curves out, one chosen.

Each candidate runs the full chain — mask, enhance, stipple, tour,
uncross — with its own seed (``base seed + candidate id``), so the
stippling randomness is the only thing that differs between candidates.
A fixed config therefore always reproduces the same candidate set,
byte for byte.
"""

from __future__ import annotations

import json
import logging
import math
import sys
import time
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .images import FilterParams, apply_mask, enhance, load_image, load_mask, save_gray_png, to_grayscale
from .motion import (
    TimeModel,
    Workspace,
    emit_gcode,
    emit_robot_script,
    emit_svg,
    estimate_time,
    plan_trajectory,
    scale_to_workspace,
)
from .stippling import StippleConfig, save_points_png, save_points_text, stipple
from .tours import nearest_neighbor_tour, save_tour_text, tour_length, two_opt_improve
from .uncross import JordanCurve, remove_intersections

logger = logging.getLogger("chitrakar")

REFERENCE_STROKE_MM = 10.0
STAGE_BUDGET_S = 60.0  # soft per-candidate target, logged only


class StageError(RuntimeError):
    """A pipeline stage failed; carries the stage name for diagnosis."""

    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"stage '{stage}' failed: {cause}")
        self.stage = stage
        self.cause = cause


@dataclass(frozen=True)
class PipelineConfig:
    """Everything needed to turn one image into chosen plotter outputs."""

    input_path: str
    mask_path: str | None = None
    filter: FilterParams = field(default_factory=FilterParams)
    enhance_mode: str = "multiply"
    stipple: StippleConfig = field(default_factory=StippleConfig)
    n_candidates: int = 6
    tsp_passes: int = 50
    grid_scale: int = 2
    workspace: Workspace = field(default_factory=Workspace)
    margin: float = 0.01
    v_max: float = 0.1
    a_max: float = 0.5
    blend_radius: float = 0.001
    feed_mm_min: float = 1500.0
    orientation: tuple[float, float, float] = (math.pi, 0.0, 0.0)
    time_model: str = "random"
    output_dir: str = "out"
    serve_port: int = 8008

    def __post_init__(self) -> None:
        if self.n_candidates < 1:
            raise ValueError("n_candidates must be >= 1")
        if self.tsp_passes < 0:
            raise ValueError("tsp_passes must be >= 0")

    @classmethod
    def from_dict(cls, tree: dict) -> "PipelineConfig":
        """Build a config from a nested key-value tree (the TOML layout)."""
        filt = tree.get("filter", {})
        stip = tree.get("stipple", {})
        tour = tree.get("tour", {})
        unc = tree.get("uncross", {})
        mot = tree.get("motion", {})
        srv = tree.get("serve", {})
        ws_size = mot.get("workspace", [0.5, 1.0])
        workspace = Workspace(
            origin=tuple(mot.get("origin", (0.0, 0.0))),
            width=float(ws_size[0]),
            height=float(ws_size[1]),
            z_draw=float(mot.get("z_draw", 0.0)),
            z_travel=float(mot.get("z_travel", 0.02)),
        )
        return cls(
            input_path=tree["input"],
            mask_path=tree.get("mask"),
            filter=FilterParams(
                sigma=float(filt.get("sigma", 1.0)),
                radius=int(filt.get("radius", 1)),
            ),
            enhance_mode=filt.get("mode", "multiply"),
            stipple=StippleConfig(
                mode=stip.get("mode", "probabilistic"),
                threshold=float(stip.get("threshold", 0.5)),
                target_points=int(stip.get("points", 2000)),
                gamma=float(stip.get("gamma", 1.0)),
                seed=int(tree.get("seed", 0)),
            ),
            n_candidates=int(tree.get("n_candidates", 6)),
            tsp_passes=int(tour.get("passes", 50)),
            grid_scale=int(unc.get("grid_scale", 2)),
            workspace=workspace,
            margin=float(mot.get("margin", 0.01)),
            v_max=float(mot.get("v_max", 0.1)),
            a_max=float(mot.get("a_max", 0.5)),
            blend_radius=float(mot.get("blend", 0.001)),
            feed_mm_min=float(mot.get("feed", 1500.0)),
            orientation=tuple(mot.get("orientation", (math.pi, 0.0, 0.0))),
            time_model=mot.get("time_model", "random"),
            output_dir=tree.get("output_dir", "out"),
            serve_port=int(srv.get("port", 8008)),
        )

    @classmethod
    def from_toml(cls, path: str | Path) -> "PipelineConfig":
        if sys.version_info >= (3, 11):
            import tomllib
        else:
            import tomli as tomllib
        with open(path, "rb") as fh:
            return cls.from_dict(tomllib.load(fh))


@dataclass(frozen=True)
class CandidateRecord:
    """One generated curve plus the metadata the gallery shows."""

    id: int
    seed: int
    curve: JordanCurve
    tour_length_px: float
    est_time_min: float
    svg: str

    @property
    def n_points(self) -> int:
        return len(self.curve.order)

    def metadata(self) -> dict:
        return {
            "id": self.id,
            "seed": self.seed,
            "points": self.n_points,
            "tour_length_px": self.tour_length_px,
            "est_time_min": self.est_time_min,
        }


def _timed(stage: str, fn, *args, **kwargs):
    t0 = time.perf_counter()
    try:
        result = fn(*args, **kwargs)
    except Exception as exc:
        raise StageError(stage, exc) from exc
    elapsed = time.perf_counter() - t0
    logger.info("stage %-10s %6.2f s", stage, elapsed)
    if elapsed > STAGE_BUDGET_S:
        logger.warning("stage %s exceeded the %gs soft budget", stage, STAGE_BUDGET_S)
    return result


def prepare_image(cfg: PipelineConfig, dump_dir: str | Path | None = None) -> np.ndarray:
    """Load, mask, grayscale, and enhance the input image."""
    rgb = _timed("load", load_image, cfg.input_path)
    if cfg.mask_path:
        mask = _timed("mask", load_mask, cfg.mask_path, rgb.shape[:2])
        rgb = apply_mask(rgb, mask)
    gray = _timed("grayscale", to_grayscale, rgb)
    enhanced = _timed("enhance", enhance, gray, cfg.filter, cfg.enhance_mode)
    if dump_dir is not None:
        dump = Path(dump_dir)
        dump.mkdir(parents=True, exist_ok=True)
        save_gray_png(gray, dump / "01_gray.png")
        save_gray_png(enhanced, dump / "02_enhanced.png")
    return enhanced


def generate_candidates(
    cfg: PipelineConfig, dump_dir: str | Path | None = None
) -> list[CandidateRecord]:
    """Run the full chain once per candidate seed; every curve is certified."""
    enhanced = prepare_image(cfg, dump_dir)
    h, w = enhanced.shape
    model = TimeModel.preset(cfg.time_model)

    records = []
    for cand_id in range(cfg.n_candidates):
        seed = cfg.stipple.seed + cand_id
        stip_cfg = replace(cfg.stipple, seed=seed)
        points = _timed("stipple", stipple, enhanced, stip_cfg)
        order = _timed("tour", nearest_neighbor_tour, points)
        order = _timed("two-opt", two_opt_improve, order, points, cfg.tsp_passes)
        curve = _timed("uncross", remove_intersections, order, points, cfg.grid_scale)
        svg = emit_svg(curve, dims=(w, h))
        est = estimate_time(len(points), REFERENCE_STROKE_MM, model)
        records.append(
            CandidateRecord(
                id=cand_id,
                seed=seed,
                curve=curve,
                tour_length_px=curve.length(),
                est_time_min=est.by_point_count,
                svg=svg,
            )
        )
        logger.info(
            "candidate %d: %d points, tour %.1f px, est %.2f min",
            cand_id,
            len(points),
            records[-1].tour_length_px,
            records[-1].est_time_min,
        )
        if dump_dir is not None:
            dump = Path(dump_dir)
            save_points_text(points, dump / f"points_{cand_id}.txt")
            save_points_png(points, (w, h), dump / f"points_{cand_id}.png")
            save_tour_text(curve.order, points, dump / f"tour_{cand_id}.txt")
            (dump / f"candidate_{cand_id}.svg").write_text(svg, newline="\n")
    return records


def finalize(record: CandidateRecord, cfg: PipelineConfig) -> dict[str, Path]:
    """Emit .svg / .gcode / .script for the chosen candidate only."""
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)

    path = scale_to_workspace(record.curve, cfg.workspace, cfg.margin)
    traj = plan_trajectory(path, cfg.v_max, cfg.a_max, cfg.blend_radius)

    outputs = {
        "svg": out / "portrait.svg",
        "gcode": out / "portrait.gcode",
        "script": out / "portrait.script",
        "selection": out / "selection.json",
    }
    outputs["svg"].write_text(record.svg, newline="\n")
    outputs["gcode"].write_text(emit_gcode(path, cfg.feed_mm_min), newline="\n")
    outputs["script"].write_text(
        emit_robot_script(traj, cfg.workspace, cfg.orientation), newline="\n"
    )
    meta = record.metadata() | {
        "stroke_length_m": path.stroke_length,
        "trajectory_time_s": traj.total_time,
    }
    outputs["selection"].write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
    logger.info("finalized candidate %d into %s", record.id, out)
    return outputs


def pick_candidate(records: list[CandidateRecord], pick: int | str) -> CandidateRecord:
    """Resolve a selection: an explicit id, or "shortest" tour length.

    Length ties go to the lowest id.
    """
    if not records:
        raise ValueError("no candidates to pick from")
    if pick == "shortest":
        lengths = [r.tour_length_px for r in records]
        return records[int(np.argmin(lengths))]
    idx = int(pick)
    for rec in records:
        if rec.id == idx:
            return rec
    raise ValueError(f"candidate id {idx} not in 0..{len(records) - 1}")


def run_headless(
    cfg: PipelineConfig, pick: int | str = "shortest", dump_dir: str | Path | None = None
) -> dict[str, Path]:
    """CI-friendly path: generate, select without a human, emit outputs."""
    records = generate_candidates(cfg, dump_dir)
    chosen = pick_candidate(records, pick)
    return finalize(chosen, cfg)
