"""Evaluation, tracking and triangulation pipelines over sequence files."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, replace
from typing import Any, Dict, List, Optional, Sequence, Tuple

from .baselines.camera import CameraPose, triangulate_distance
from .distnorm import DEFAULT_D_MAX, denormalize
from .errors import AboveHorizon, InvalidConfig, NoGroundTruth, ZeroTotalConfidence
from .io import SequenceFile, normalization_to_dict
from .matching import DEFAULT_IOU_THRESHOLD, MatchSet, match_detections
from .metrics import (
    COCO_THRESHOLDS,
    DEFAULT_BIN_EDGES,
    DEFAULT_OUTLIER_REL,
    BinnedStats,
    check_bin_edges,
    binned_distance_errors,
    detection_counts,
    distance_error_summary,
    matched_pairs,
    per_class_ap,
    weighted_distance_error,
)
from .model import Frame
from .simulator import NoiseConfig, noisy_poses
from .tracking import SortTracker, TrackerConfig


@dataclass(frozen=True)
class EvalConfig:
    iou_threshold: float = DEFAULT_IOU_THRESHOLD
    outlier_rel_threshold: float = DEFAULT_OUTLIER_REL
    bin_edges: Tuple[float, ...] = DEFAULT_BIN_EDGES
    class_aware: bool = True

    def __post_init__(self):
        if not 0.0 < self.iou_threshold <= 1.0:
            raise InvalidConfig(f"iou threshold must be in (0, 1], got {self.iou_threshold}")
        if not (math.isfinite(self.outlier_rel_threshold) and self.outlier_rel_threshold >= 0):
            raise InvalidConfig("outlier threshold must be >= 0")
        object.__setattr__(self, "bin_edges", check_bin_edges(self.bin_edges))


def _edge(e: float):
    return "inf" if math.isinf(e) else e


def _summary_dict(pairs, outlier_rel: float) -> Optional[Dict[str, Any]]:
    if not pairs:
        return None
    try:
        e = weighted_distance_error(pairs)
    except ZeroTotalConfidence:
        e = None
    s = distance_error_summary(pairs, outlier_rel)
    return {"weighted_error_m": e, **asdict(s)}


def _binned_dict(b: BinnedStats) -> Dict[str, Any]:
    return {
        "edges": [_edge(e) for e in b.edges],
        "unbinned": b.unbinned,
        "bins": [
            {"lo": _edge(x.lo), "hi": _edge(x.hi), "count": x.count,
             "weighted_error_m": x.weighted_error_m,
             **({k: v for k, v in asdict(x.summary).items() if k != "count"}
                if x.summary else {"mde_m": None, "outlier_rate": None,
                                   "mae_m": None, "mape": None})}
            for x in b.bins
        ],
    }


@dataclass
class EvalReport:
    """Every number here comes straight from the metrics module."""

    sequence_id: str
    method: str
    config: Dict[str, Any]
    ap: Dict[str, Optional[float]]
    ap_50_95: Dict[str, Optional[float]]
    map_at_iou: float
    map_50_95: float
    precision: Optional[float]
    recall: Optional[float]
    counts: Dict[str, int]
    distance: Optional[Dict[str, Any]]
    distance_by_class: Dict[str, Optional[Dict[str, Any]]]
    binned: Dict[str, Any]
    binned_by_class: Dict[str, Dict[str, Any]]

    def to_dict(self) -> Dict[str, Any]:
        return {"kind": "eval", **asdict(self)}


def denormalize_frames(frames: Sequence[Frame], seq: SequenceFile) -> List[Frame]:
    """Fill ``distance_m`` from ``distance_raw`` using the header's normalization."""
    cfg = seq.normalization
    if cfg is None:
        return list(frames)
    out = []
    for f in frames:
        dets = tuple(
            replace(d, distance_m=denormalize(d.distance_raw, cfg))
            if d.distance_m is None and d.distance_raw is not None else d
            for d in f.detections
        )
        out.append(replace(f, detections=dets))
    return out


def run_eval(seq: SequenceFile, cfg: EvalConfig = EvalConfig(), method: str = "detector") -> EvalReport:
    if not seq.has_ground_truth:
        raise NoGroundTruth(f"sequence {seq.sequence_id!r} has no ground truth")
    frames = denormalize_frames(seq.frames, seq)
    matchsets: List[MatchSet] = [
        match_detections(f.detections, f.ground_truth, cfg.iou_threshold, cfg.class_aware)
        for f in frames
    ]
    ap = per_class_ap(frames, thresholds=(cfg.iou_threshold,))
    ap_coco = per_class_ap(frames, thresholds=COCO_THRESHOLDS)
    counts = detection_counts(frames, cfg.iou_threshold, cfg.class_aware)

    pairs = matched_pairs(matchsets)
    labels = sorted({p.cls for p in pairs} | set(ap))
    by_class = {c: [p for p in pairs if p.cls == c] for c in labels}

    def binned(ps):
        return _binned_dict(binned_distance_errors(ps, cfg.bin_edges, cfg.outlier_rel_threshold))

    return EvalReport(
        sequence_id=seq.sequence_id,
        method=method,
        config={
            "iou_threshold": cfg.iou_threshold,
            "map_50_95_thresholds": list(COCO_THRESHOLDS),
            "class_aware": cfg.class_aware,
            "outlier_definition": f"relative error |d - d_hat| / d > {cfg.outlier_rel_threshold}",
            "outlier_rel_threshold": cfg.outlier_rel_threshold,
            "bin_edges": [_edge(e) for e in cfg.bin_edges],
            "normalization": normalization_to_dict(seq.normalization) if seq.normalization else None,
        },
        ap=ap,
        ap_50_95=ap_coco,
        map_at_iou=_mean_present(ap),
        map_50_95=_mean_present(ap_coco),
        precision=counts.precision,
        recall=counts.recall,
        counts={"true_positives": counts.true_positives,
                "false_positives": counts.false_positives,
                "ground_truth": counts.num_ground_truth,
                "distance_pairs": len(pairs)},
        distance=_summary_dict(pairs, cfg.outlier_rel_threshold),
        distance_by_class={c: _summary_dict(ps, cfg.outlier_rel_threshold)
                           for c, ps in by_class.items()},
        binned=binned(pairs),
        binned_by_class={c: binned(ps) for c, ps in by_class.items()},
    )


def _mean_present(values: Dict[str, Optional[float]]) -> float:
    present = [v for v in values.values() if v is not None]
    if not present:
        raise NoGroundTruth("no class has ground truth")
    return sum(present) / len(present)


@dataclass
class TrackReport:
    raw: EvalReport
    smoothed: EvalReport
    tracker: Dict[str, Any]
    num_tracks: int

    def to_dict(self) -> Dict[str, Any]:
        return {"kind": "track", "tracker": self.tracker, "num_tracks": self.num_tracks,
                "raw": self.raw.to_dict(), "smoothed": self.smoothed.to_dict()}


def track_sequence(seq: SequenceFile, tracker_cfg: TrackerConfig = TrackerConfig()
                   ) -> Tuple[SequenceFile, int]:
    """Run SORT over the sequence; each detection takes its track's id and smoothed distance."""
    frames = denormalize_frames(seq.frames, seq)
    tracker = SortTracker(tracker_cfg)
    out = []
    prev_id = None
    for f in frames:
        dt = 1 if prev_id is None else f.frame_id - prev_id
        prev_id = f.frame_id
        tracker.step(f.detections, dt)
        dets = []
        for i, d in enumerate(f.detections):
            t = tracker.assignments[i]
            dist = t.smoothed_distance_m if d.distance_m is not None else None
            dets.append(replace(d, distance_m=dist, track_id=t.track_id))
        out.append(replace(f, detections=tuple(dets)))
    return replace(seq, frames=tuple(out)), tracker.tracks_created


def run_track(seq: SequenceFile, tracker_cfg: TrackerConfig = TrackerConfig(),
              cfg: EvalConfig = EvalConfig()) -> Tuple[SequenceFile, TrackReport]:
    raw = run_eval(seq, cfg, method="detector")
    tracked, n_tracks = track_sequence(seq, tracker_cfg)
    smoothed = run_eval(tracked, cfg, method="tracked+smoothed")
    tracker_echo = asdict(tracker_cfg)
    tracker_echo["smoothing_mode"] = tracker_cfg.smoothing_mode.value
    return tracked, TrackReport(raw, smoothed, tracker_echo, n_tracks)


def triangulate_sequence(seq: SequenceFile, pose: CameraPose, pitch_roll_noise_rad: float = 0.0,
                         seed: int = 0, d_max: float = DEFAULT_D_MAX) -> SequenceFile:
    """Replace every detection distance with the triangulated waterline range.

    Ranges are clipped to ``d_max``; rays at or above the horizon count as ``d_max``.
    Pitch and roll get fresh Gaussian error per frame when ``pitch_roll_noise_rad > 0``.
    """
    poses = noisy_poses(pose, len(seq.frames),
                        NoiseConfig(pitch_roll_noise_rad=pitch_roll_noise_rad), seed)
    out = []
    for f, p in zip(seq.frames, poses):
        dets = []
        for d in f.detections:
            try:
                rng = min(triangulate_distance(p, d.bbox.bottom_center), d_max)
            except AboveHorizon:
                rng = d_max
            dets.append(replace(d, distance_m=rng, distance_raw=None))
        out.append(replace(f, detections=tuple(dets)))
    return replace(seq, frames=tuple(out))


def run_triangulate(seq: SequenceFile, pose: Optional[CameraPose] = None,
                    cfg: EvalConfig = EvalConfig(), pitch_roll_noise_rad: float = 0.0,
                    seed: int = 0, d_max: float = DEFAULT_D_MAX) -> Tuple[SequenceFile, EvalReport]:
    pose = pose or seq.camera
    if pose is None:
        raise InvalidConfig("triangulation needs a camera pose (header or --pose)")
    tri = triangulate_sequence(seq, pose, pitch_roll_noise_rad, seed, d_max)
    report = run_eval(tri, cfg, method="triangulation")
    report.config["pitch_roll_noise_rad"] = pitch_roll_noise_rad
    report.config["triangulation_seed"] = seed
    report.config["d_max"] = d_max
    return tri, report
