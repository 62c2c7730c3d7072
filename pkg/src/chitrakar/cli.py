"""Command-line entry point.

``chitrakar run --config cfg.toml`` generates the candidate curves and
either serves the selection gallery (default) or, with ``--headless``,
picks a candidate itself and writes the final outputs.
"""

from __future__ import annotations

import argparse
import logging
import sys

from .pipeline import PipelineConfig, finalize, generate_candidates, pick_candidate, run_headless
from .server import serve_selection


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="chitrakar")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="generate candidate curves and emit outputs")
    run.add_argument("--config", help="TOML config file")
    run.add_argument("--input", help="input image (overrides config)")
    run.add_argument("--mask", help="subject mask PNG, nonzero = subject")
    run.add_argument("--out", help="output directory")
    run.add_argument("--headless", action="store_true", help="skip the gallery UI")
    run.add_argument(
        "--pick",
        default="shortest",
        help='headless selection: a candidate id or "shortest" (default)',
    )
    run.add_argument("--candidates", type=int, help="number of candidates to generate")
    run.add_argument("--dump-stages", metavar="DIR", help="write intermediate images/points")

    stip = run.add_argument_group("stippling")
    stip.add_argument("--points", type=int, help="stipple point budget")
    stip.add_argument("--gamma", type=float, help="darkness exponent")
    stip.add_argument("--seed", type=int, help="base random seed")
    stip.add_argument("--mode", choices=["prob", "threshold"], help="stipple mode")
    stip.add_argument("--threshold", type=float, help="threshold-mode cutoff in [0,1]")
    stip.add_argument("--sigma", type=float, help="Gaussian sigma for enhancement")

    geom = run.add_argument_group("tour and repair")
    geom.add_argument("--tsp-passes", type=int, help="2-opt improvement sweeps")
    geom.add_argument("--grid-scale", type=int, help="occupancy grid supersampling")

    mot = run.add_argument_group("motion")
    mot.add_argument("--vmax", type=float, help="max velocity, m/s")
    mot.add_argument("--amax", type=float, help="max acceleration, m/s^2")
    mot.add_argument("--blend", type=float, help="blend radius, m")
    mot.add_argument("--workspace", help="drawable size WxH in meters, e.g. 0.5x1.0")
    mot.add_argument("--margin", type=float, help="workspace margin, m")

    run.add_argument("--port", type=int, help="gallery port")
    return parser


def _config_from_args(args: argparse.Namespace) -> PipelineConfig:
    tree: dict = {}
    if args.config:
        if sys.version_info >= (3, 11):
            import tomllib
        else:
            import tomli as tomllib
        with open(args.config, "rb") as fh:
            tree = tomllib.load(fh)

    def setdeep(section: str, key: str, value) -> None:
        if value is not None:
            tree.setdefault(section, {})[key] = value

    if args.input:
        tree["input"] = args.input
    if args.mask:
        tree["mask"] = args.mask
    if args.out:
        tree["output_dir"] = args.out
    if args.candidates is not None:
        tree["n_candidates"] = args.candidates
    if args.seed is not None:
        tree["seed"] = args.seed
    setdeep("filter", "sigma", args.sigma)
    setdeep("stipple", "points", args.points)
    setdeep("stipple", "gamma", args.gamma)
    setdeep("stipple", "threshold", args.threshold)
    if args.mode:
        tree.setdefault("stipple", {})["mode"] = (
            "probabilistic" if args.mode == "prob" else "threshold"
        )
    setdeep("tour", "passes", args.tsp_passes)
    setdeep("uncross", "grid_scale", args.grid_scale)
    setdeep("motion", "v_max", args.vmax)
    setdeep("motion", "a_max", args.amax)
    setdeep("motion", "blend", args.blend)
    setdeep("motion", "margin", args.margin)
    if args.workspace:
        w, _, h = args.workspace.partition("x")
        tree.setdefault("motion", {})["workspace"] = [float(w), float(h)]
    if args.port is not None:
        tree.setdefault("serve", {})["port"] = args.port

    if "input" not in tree:
        raise SystemExit("error: an input image is required (--input or config file)")
    return PipelineConfig.from_dict(tree)


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(message)s",
    )

    cfg = _config_from_args(args)
    if args.headless:
        outputs = run_headless(cfg, args.pick, dump_dir=args.dump_stages)
    else:
        records = generate_candidates(cfg, dump_dir=args.dump_stages)
        chosen = serve_selection(records, cfg.serve_port)
        outputs = finalize(pick_candidate(records, chosen), cfg)
    for kind, path in outputs.items():
        print(f"{kind}: {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
