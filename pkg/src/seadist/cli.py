"""Command-line interface.

Exit status: 0 on success, 1 for user errors (bad flags, bad input files),
2 for internal errors.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path
from typing import List, Optional, Sequence

from . import io as sio
from .baselines.chart import chart_gt_distance
from .distnorm import DEFAULT_D_MAX
from .errors import SeadistError
from .matching import DEFAULT_IOU_THRESHOLD
from .metrics import DEFAULT_BIN_EDGES, DEFAULT_OUTLIER_REL
from .model import GeoPoint
from .pipeline import EvalConfig, run_eval, run_track, run_triangulate
from .report import FORMATS, dumps_structured, loads_report, render
from .simulator import generate_scenario, corrupt_detections
from .tracking.sort import (
    DEFAULT_IOU_GATE,
    DEFAULT_MAX_AGE,
    DEFAULT_MIN_HITS,
    DEFAULT_REJECT_REL,
    DEFAULT_SMOOTHING_MODE,
    DEFAULT_SMOOTHING_WINDOW,
    SmoothingMode,
    TrackerConfig,
)

EXIT_OK, EXIT_USER, EXIT_INTERNAL = 0, 1, 2
DEFAULT_SEED = 0
DEFAULT_CONE_DEG = 30.0


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on usage errors; 2 is reserved for internal errors here
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _edges(text: str) -> List[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad bin edge list {text!r}") from None


def _fmt_edges(edges: Sequence[float]) -> str:
    return ",".join("inf" if math.isinf(e) else f"{e:g}" for e in edges)


def _add_eval_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--iou", type=float, default=DEFAULT_IOU_THRESHOLD,
                   help="IoU threshold for matching and mAP")
    p.add_argument("--outlier-rel", type=float, default=DEFAULT_OUTLIER_REL,
                   help="relative error above which a match is an outlier")
    p.add_argument("--bins", type=_edges, default=_fmt_edges(DEFAULT_BIN_EDGES),
                   help="comma-separated distance bin edges in meters ('inf' allowed last)")
    p.add_argument("--class-agnostic", action="store_true",
                   help="let detections match ground truth of another class")
    p.add_argument("--out", type=Path, default=None,
                   help="write the structured report here instead of stdout")


def _eval_config(args) -> EvalConfig:
    bins = args.bins if isinstance(args.bins, list) else _edges(args.bins)
    return EvalConfig(iou_threshold=args.iou, outlier_rel_threshold=args.outlier_rel,
                      bin_edges=tuple(bins), class_aware=not args.class_agnostic)


def build_parser() -> argparse.ArgumentParser:
    fmt = argparse.ArgumentDefaultsHelpFormatter
    parser = _Parser(prog="seadist", formatter_class=fmt,
                     description="Distance-estimation evaluation, tracking and baselines.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("eval", formatter_class=fmt, help="detection and distance metrics")
    p.add_argument("sequence", type=Path)
    _add_eval_flags(p)

    p = sub.add_parser("track", formatter_class=fmt,
                       help="SORT tracking with distance smoothing; raw vs smoothed report")
    p.add_argument("sequence", type=Path)
    p.add_argument("--window", type=int, default=DEFAULT_SMOOTHING_WINDOW,
                   help="running-average window in frames")
    p.add_argument("--max-age", type=int, default=DEFAULT_MAX_AGE,
                   help="frames a track may go unmatched before it is dropped")
    p.add_argument("--min-hits", type=int, default=DEFAULT_MIN_HITS,
                   help="consecutive hits before a track is reported")
    p.add_argument("--iou-gate", type=float, default=DEFAULT_IOU_GATE,
                   help="minimum IoU for track/detection association")
    p.add_argument("--smoothing", choices=[m.value for m in SmoothingMode],
                   default=DEFAULT_SMOOTHING_MODE.value,
                   help="plain window mean, or mean after dropping samples far from the median")
    p.add_argument("--reject-rel", type=float, default=DEFAULT_REJECT_REL,
                   help="robust smoothing: drop samples this far (relative) from the window median")
    p.add_argument("--out-seq", type=Path, default=None, help="write the tracked sequence here")
    _add_eval_flags(p)

    p = sub.add_parser("triangulate", formatter_class=fmt,
                       help="range detections by intersecting waterline rays with the sea")
    p.add_argument("sequence", type=Path)
    p.add_argument("--pose", type=Path, default=None,
                   help="camera pose config (defaults to the sequence header camera)")
    p.add_argument("--pitch-roll-noise-deg", type=float, default=0.0,
                   help="std-dev of per-frame pitch and roll error")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED, help="seed for the pose noise")
    p.add_argument("--d-max", type=float, default=DEFAULT_D_MAX,
                   help="ranges are clipped here; rays above the horizon count as this")
    p.add_argument("--out-seq", type=Path, default=None, help="write the ranged sequence here")
    _add_eval_flags(p)

    p = sub.add_parser("simulate", formatter_class=fmt, help="synthetic sequence generation")
    p.add_argument("--scenario", type=Path, required=True, help="scenario config (YAML/JSON)")
    p.add_argument("--noise", type=Path, required=True, help="noise config (YAML/JSON)")
    p.add_argument("--seed", type=int, default=None,
                   help="corruption seed (defaults to the scenario's seed)")
    p.add_argument("--sequence-id", default="sim", help="id written to the sequence header")
    p.add_argument("--out", type=Path, required=True, help="output sequence file")

    p = sub.add_parser("report", formatter_class=fmt, help="render a structured report")
    p.add_argument("report", type=Path)
    p.add_argument("--format", choices=FORMATS, default="table", help="output format")

    p = sub.add_parser("chart", formatter_class=fmt,
                       help="propose chart-based ground-truth distances")
    p.add_argument("chart", type=Path)
    p.add_argument("--lat", type=float, required=True)
    p.add_argument("--lon", type=float, required=True)
    p.add_argument("--heading-deg", type=float, required=True)
    p.add_argument("--cone-deg", type=float, default=DEFAULT_CONE_DEG,
                   help="half-angle of the forward association cone")
    return parser


def _emit(text: str, out: Optional[Path]) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_text(text, encoding="utf-8")


def _cmd_eval(args) -> None:
    report = run_eval(sio.load_sequence(args.sequence), _eval_config(args))
    _emit(dumps_structured(report.to_dict()), args.out)


def _cmd_track(args) -> None:
    tcfg = TrackerConfig(iou_gate=args.iou_gate, max_age=args.max_age, min_hits=args.min_hits,
                         smoothing_window=args.window, smoothing_mode=args.smoothing,
                         reject_rel=args.reject_rel)
    tracked, report = run_track(sio.load_sequence(args.sequence), tcfg, _eval_config(args))
    if args.out_seq:
        sio.save_sequence(tracked, args.out_seq)
    _emit(dumps_structured(report.to_dict()), args.out)


def _cmd_triangulate(args) -> None:
    seq = sio.load_sequence(args.sequence)
    pose = sio.camera_from_dict(sio.load_config(args.pose)) if args.pose else None
    tri, report = run_triangulate(seq, pose, _eval_config(args),
                                  math.radians(args.pitch_roll_noise_deg), args.seed, args.d_max)
    if args.out_seq:
        sio.save_sequence(tri, args.out_seq)
    _emit(dumps_structured(report.to_dict()), args.out)


def _cmd_simulate(args) -> None:
    scenario = sio.scenario_from_dict(sio.load_config(args.scenario))
    noise = sio.noise_from_dict(sio.load_config(args.noise))
    seed = scenario.seed if args.seed is None else args.seed
    frames = corrupt_detections(generate_scenario(scenario), noise, seed)
    seq = sio.SequenceFile(args.sequence_id, tuple(frames), camera=scenario.camera)
    sio.save_sequence(seq, args.out)


def _cmd_report(args) -> None:
    report = loads_report(args.report.read_text(encoding="utf-8"))
    sys.stdout.write(render(report, args.format))


def _cmd_chart(args) -> None:
    chart = sio.load_chart(args.chart)
    hits = chart_gt_distance(GeoPoint(args.lat, args.lon), math.radians(args.heading_deg),
                             chart, math.radians(args.cone_deg))
    for h in hits:
        sys.stdout.write(f"{h.obj.id},{h.obj.kind.label},{h.distance_m:.1f},"
                         f"{math.degrees(h.relative_bearing_rad):.2f}\n")


COMMANDS = {
    "eval": _cmd_eval, "track": _cmd_track, "triangulate": _cmd_triangulate,
    "simulate": _cmd_simulate, "report": _cmd_report, "chart": _cmd_chart,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        COMMANDS[args.command](args)
    except UsageError as e:
        print(e, file=sys.stderr)
        return EXIT_USER
    except SystemExit as e:  # --help
        return EXIT_OK if e.code in (0, None) else EXIT_USER
    except (SeadistError, OSError) as e:
        print(f"seadist: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_USER
    except Exception as e:  # noqa: BLE001
        print(f"seadist: internal error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_INTERNAL
    return EXIT_OK


cli_main = main

if __name__ == "__main__":
    sys.exit(main())
