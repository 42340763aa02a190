"""IoU and IoU-gated detection to ground-truth matching."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple

from .errors import InvalidConfig
from .model import BBox, Detection, GroundTruthObject

DEFAULT_IOU_THRESHOLD = 0.5


def iou(a: BBox, b: BBox) -> float:
    iw = min(a.x2, b.x2) - max(a.x1, b.x1)
    ih = min(a.y2, b.y2) - max(a.y1, b.y1)
    if iw <= 0 or ih <= 0:
        return 0.0
    inter = iw * ih
    union = a.area + b.area - inter
    return min(1.0, inter / union)


@dataclass(frozen=True)
class MatchPair:
    det_index: int
    gt_index: int
    iou: float
    confidence: float
    gt_distance_m: float
    # None when the detection carries no metric distance
    error_m: Optional[float]
    det_distance_m: Optional[float] = None
    cls: Optional[str] = None


@dataclass(frozen=True)
class MatchSet:
    pairs: Tuple[MatchPair, ...]
    unmatched_detections: Tuple[int, ...]
    unmatched_gt: Tuple[int, ...]
    iou_threshold: float = DEFAULT_IOU_THRESHOLD
    matched_flags: Tuple[bool, ...] = field(default=(), repr=False)

    def is_true_positive(self, det_index: int) -> bool:
        return self.matched_flags[det_index]


def match_detections(
    detections: Sequence[Detection],
    ground_truth: Sequence[GroundTruthObject],
    iou_threshold: float = DEFAULT_IOU_THRESHOLD,
    class_aware: bool = True,
) -> MatchSet:
    """Greedy matching in descending confidence order.

    Each detection claims the still-unmatched ground truth (of the same class
    when ``class_aware``) with the highest IoU at or above the threshold.
    Equal confidences keep input order; equal IoUs go to the lower GT index.
    """
    if not 0.0 < iou_threshold <= 1.0:
        raise InvalidConfig(f"iou_threshold must be in (0, 1], got {iou_threshold}")
    order = sorted(range(len(detections)), key=lambda i: -detections[i].confidence)
    taken = [False] * len(ground_truth)
    flags = [False] * len(detections)
    pairs = []
    for di in order:
        det = detections[di]
        best, best_iou = -1, -1.0
        for gi, gt in enumerate(ground_truth):
            if taken[gi] or (class_aware and gt.cls != det.cls):
                continue
            o = iou(det.bbox, gt.bbox)
            if o >= iou_threshold and o > best_iou:
                best, best_iou = gi, o
        if best < 0:
            continue
        taken[best] = True
        flags[di] = True
        gt = ground_truth[best]
        err = None if det.distance_m is None else abs(gt.distance_m - det.distance_m)
        pairs.append(MatchPair(
            det_index=di, gt_index=best, iou=best_iou, confidence=det.confidence,
            gt_distance_m=gt.distance_m, error_m=err, det_distance_m=det.distance_m,
            cls=gt.cls.label,
        ))
    return MatchSet(
        pairs=tuple(pairs),
        unmatched_detections=tuple(i for i, f in enumerate(flags) if not f),
        unmatched_gt=tuple(i for i, t in enumerate(taken) if not t),
        iou_threshold=iou_threshold,
        matched_flags=tuple(flags),
    )
