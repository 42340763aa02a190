"""SORT tracking-by-detection with per-track distance smoothing."""

from __future__ import annotations

import enum
import math
import statistics
from collections import deque
from dataclasses import dataclass
from typing import Deque, Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..errors import InvalidConfig, NegativeDistance
from ..matching import iou
from ..model import BBox, Detection, ObjectClass
from .assignment import hungarian
from .kalman import KalmanState, kalman_init, kalman_predict, kalman_update

DEFAULT_IOU_GATE = 0.3
DEFAULT_MAX_AGE = 3
DEFAULT_MIN_HITS = 3
DEFAULT_SMOOTHING_WINDOW = 10
DEFAULT_REJECT_REL = 0.5


class SmoothingMode(str, enum.Enum):
    MEAN = "mean"
    # mean of the window after dropping samples far from the window median
    ROBUST = "robust"


DEFAULT_SMOOTHING_MODE = SmoothingMode.ROBUST


@dataclass(frozen=True)
class TrackerConfig:
    iou_gate: float = DEFAULT_IOU_GATE
    max_age: int = DEFAULT_MAX_AGE
    min_hits: int = DEFAULT_MIN_HITS
    smoothing_window: int = DEFAULT_SMOOTHING_WINDOW
    smoothing_mode: SmoothingMode = DEFAULT_SMOOTHING_MODE
    reject_rel: float = DEFAULT_REJECT_REL

    def __post_init__(self):
        if not 0.0 < self.iou_gate < 1.0:
            raise InvalidConfig(f"iou_gate must be in (0, 1), got {self.iou_gate}")
        if self.max_age < 1 or self.min_hits < 1 or self.smoothing_window < 1:
            raise InvalidConfig("max_age, min_hits and smoothing_window must be >= 1")
        try:
            object.__setattr__(self, "smoothing_mode", SmoothingMode(self.smoothing_mode))
        except ValueError:
            raise InvalidConfig(f"unknown smoothing mode {self.smoothing_mode!r}") from None
        if not (math.isfinite(self.reject_rel) and self.reject_rel > 0):
            raise InvalidConfig("reject_rel must be positive")


class RunningDistance:
    """Bounded window of distance estimates and their running average.

    In ``robust`` mode, samples deviating from the window median by more than
    ``reject_rel`` times the median are left out of the average (they stay in
    the window and can become the majority if the object really moved).
    """

    def __init__(self, window: int = DEFAULT_SMOOTHING_WINDOW,
                 mode: SmoothingMode = DEFAULT_SMOOTHING_MODE,
                 reject_rel: float = DEFAULT_REJECT_REL):
        self.history: Deque[float] = deque(maxlen=window)
        self.mode = SmoothingMode(mode)
        self.reject_rel = reject_rel
        self.value: Optional[float] = None

    def push(self, estimate_m: float) -> float:
        if not math.isfinite(estimate_m) or estimate_m < 0:
            raise NegativeDistance(f"distance estimate {estimate_m!r} must be finite and >= 0")
        self.history.append(float(estimate_m))
        samples = list(self.history)
        if self.mode is SmoothingMode.ROBUST and len(samples) > 2:
            med = statistics.median(samples)
            kept = [x for x in samples if abs(x - med) <= self.reject_rel * med]
            samples = kept or samples
        # clamp guards the [min, max] invariant against rounding in the mean
        self.value = min(max(statistics.fmean(samples), min(samples)), max(samples))
        return self.value


@dataclass
class Track:
    track_id: int
    kalman: KalmanState
    cls: ObjectClass
    distance: RunningDistance
    hits: int = 1
    hit_streak: int = 1
    age: int = 0  # frames since last update
    confirmed: bool = False
    raw_distance_m: Optional[float] = None

    @property
    def distance_history(self) -> Tuple[float, ...]:
        return tuple(self.distance.history)

    @property
    def smoothed_distance_m(self) -> Optional[float]:
        return self.distance.value

    @property
    def bbox(self) -> BBox:
        return self.kalman.to_bbox()


def smooth_distance(track: Track, new_estimate_m: float) -> float:
    track.raw_distance_m = new_estimate_m
    return track.distance.push(new_estimate_m)


@dataclass(frozen=True)
class TrackSnapshot:
    track_id: int
    bbox: BBox
    cls: ObjectClass
    hits: int
    raw_distance_m: Optional[float]
    smoothed_distance_m: Optional[float]
    det_index: Optional[int]


class SortTracker:
    """One tracker per video sequence; call :meth:`step` once per frame, in order."""

    def __init__(self, config: TrackerConfig = TrackerConfig()):
        self.config = config
        self.tracks: List[Track] = []
        self.frame_count = 0
        self._next_id = 1
        # detection index -> track for the most recent step
        self.assignments: Dict[int, Track] = {}

    @property
    def tracks_created(self) -> int:
        return self._next_id - 1

    def _new_track(self, det: Detection) -> Track:
        cfg = self.config
        track = Track(
            track_id=self._next_id,
            kalman=kalman_init(det.bbox),
            cls=det.cls,
            distance=RunningDistance(cfg.smoothing_window, cfg.smoothing_mode, cfg.reject_rel),
            confirmed=cfg.min_hits <= 1,
        )
        self._next_id += 1
        if det.distance_m is not None:
            smooth_distance(track, det.distance_m)
        return track

    def step(self, detections: Sequence[Detection], dt: int = 1) -> List[TrackSnapshot]:
        """Advance one frame. Returns confirmed tracks updated in this frame."""
        if dt < 1:
            raise InvalidConfig("dt must be >= 1 frame")
        cfg = self.config
        self.frame_count += dt
        for t in self.tracks:
            for _ in range(dt):
                t.kalman = kalman_predict(t.kalman)
            if t.age > 0:
                t.hit_streak = 0
            t.age += dt
        # a dt-frame step is dt - 1 empty frames plus this one; tracks that
        # would have expired during the empty frames cannot associate now
        self.tracks = [t for t in self.tracks if t.age - 1 <= cfg.max_age]

        predicted = [t.bbox for t in self.tracks]
        matched: List[Tuple[int, int]] = []
        if predicted and detections:
            overlaps = np.array([[iou(p, d.bbox) for d in detections] for p in predicted])
            for ti, di in hungarian(1.0 - overlaps):
                if overlaps[ti, di] >= cfg.iou_gate:
                    matched.append((ti, di))

        self.assignments = {}
        for ti, di in matched:
            t, det = self.tracks[ti], detections[di]
            t.kalman = kalman_update(t.kalman, det.bbox)
            t.age = 0
            t.hits += 1
            t.hit_streak += 1
            t.cls = det.cls
            if t.hit_streak >= cfg.min_hits:
                t.confirmed = True
            if det.distance_m is not None:
                smooth_distance(t, det.distance_m)
            self.assignments[di] = t

        matched_dets = {di for _, di in matched}
        for di, det in enumerate(detections):
            if di not in matched_dets:
                t = self._new_track(det)
                self.tracks.append(t)
                self.assignments[di] = t

        self.tracks = [t for t in self.tracks if t.age <= cfg.max_age]

        det_of = {id(t): di for di, t in self.assignments.items()}
        return [
            TrackSnapshot(
                track_id=t.track_id, bbox=t.bbox, cls=t.cls, hits=t.hits,
                raw_distance_m=t.raw_distance_m,
                smoothed_distance_m=t.smoothed_distance_m,
                det_index=det_of.get(id(t)),
            )
            for t in self.tracks
            if t.confirmed and t.age == 0
        ]


def sort_step(tracker: SortTracker, detections: Sequence[Detection], dt: int = 1):
    """Functional form of :meth:`SortTracker.step`: returns ``(snapshot, tracker)``."""
    return tracker.step(detections, dt), tracker
