"""Detection and distance-error metrics.

Distance metrics consume matched pairs only; unmatched detections never
contribute. Averages are accumulated in exact rational arithmetic and rounded
once, so identities such as "equal confidences give the plain mean" hold
bit-for-bit rather than to within rounding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .errors import (
    InvalidConfig,
    NoGroundTruth,
    NoGroundTruthAnywhere,
    NoMatches,
    ZeroGroundTruthDistance,
    ZeroTotalConfidence,
)
from .matching import DEFAULT_IOU_THRESHOLD, MatchPair, MatchSet, match_detections
from .model import ObjectClass

DEFAULT_OUTLIER_REL = 0.25
DEFAULT_BIN_EDGES = (0.0, 100.0, 200.0, 300.0, 400.0, 500.0)
HUMAN_EVAL_BIN_EDGES = (0.0, 100.0, 300.0, math.inf)
COCO_THRESHOLDS = tuple(round(0.5 + 0.05 * i, 2) for i in range(10))


@dataclass(frozen=True)
class PRPoint:
    confidence: float
    precision: float
    recall: float


def _class_records(frames, cls: ObjectClass, iou_threshold: float):
    records: List[Tuple[float, bool]] = []
    n_gt = 0
    for frame in frames:
        dets = [d for d in frame.detections if d.cls == cls]
        gts = [g for g in frame.ground_truth if g.cls == cls]
        n_gt += len(gts)
        if not dets:
            continue
        ms = match_detections(dets, gts, iou_threshold, class_aware=False)
        records.extend((d.confidence, ms.is_true_positive(i)) for i, d in enumerate(dets))
    return records, n_gt


def pr_curve(frames, cls: ObjectClass,
             iou_threshold: float = DEFAULT_IOU_THRESHOLD) -> List[PRPoint]:
    """Operating points at every distinct confidence cutoff, highest first.

    Tied confidences form one cutoff: a threshold cannot separate them.
    """
    records, n_gt = _class_records(frames, cls, iou_threshold)
    if n_gt == 0:
        raise NoGroundTruth(f"no ground truth for class {cls}")
    records.sort(key=lambda r: -r[0])
    points = []
    tp = fp = 0
    for k, (conf, hit) in enumerate(records):
        tp += hit
        fp += not hit
        if k + 1 < len(records) and records[k + 1][0] == conf:
            continue
        points.append(PRPoint(conf, tp / (tp + fp), tp / n_gt))
    return points


def average_precision(frames, cls: ObjectClass,
                      iou_threshold: float = DEFAULT_IOU_THRESHOLD) -> float:
    """All-point interpolated AP for one class.

    Precision is replaced by its running maximum from the right, then
    integrated over recall. Raises NoGroundTruth when the class never appears
    in the ground truth.
    """
    points = pr_curve(frames, cls, iou_threshold)
    if not points:
        return 0.0
    recall = [0.0] + [p.recall for p in points]
    precision = [p.precision for p in points]
    for k in range(len(precision) - 2, -1, -1):
        precision[k] = max(precision[k], precision[k + 1])
    ap = 0.0
    for k, p in enumerate(precision):
        ap += (recall[k + 1] - recall[k]) * p
    return min(1.0, ap)


def classes_in(frames) -> List[ObjectClass]:
    seen = {}
    for f in frames:
        for g in f.ground_truth:
            seen.setdefault(g.cls.label, g.cls)
        for d in f.detections:
            seen.setdefault(d.cls.label, d.cls)
    return [seen[k] for k in sorted(seen)]


def per_class_ap(frames, classes: Optional[Sequence[ObjectClass]] = None,
                 thresholds: Sequence[float] = (DEFAULT_IOU_THRESHOLD,)
                 ) -> Dict[str, Optional[float]]:
    """AP averaged over thresholds for each class; ``None`` for classes without GT."""
    if not thresholds:
        raise InvalidConfig("need at least one IoU threshold")
    for t in thresholds:
        if not 0.0 < t <= 1.0:
            raise InvalidConfig(f"IoU threshold {t} outside (0, 1]")
    frames = list(frames)
    if classes is None:
        classes = classes_in(frames)
    out: Dict[str, Optional[float]] = {}
    for cls in classes:
        try:
            aps = [average_precision(frames, cls, t) for t in thresholds]
        except NoGroundTruth:
            out[cls.label] = None
            continue
        out[cls.label] = sum(aps) / len(aps)
    return out


def mean_ap(frames, classes: Optional[Sequence[ObjectClass]] = None,
            thresholds: Sequence[float] = (DEFAULT_IOU_THRESHOLD,)) -> float:
    scores = [v for v in per_class_ap(frames, classes, thresholds).values() if v is not None]
    if not scores:
        raise NoGroundTruthAnywhere("no class has ground truth")
    return sum(scores) / len(scores)


@dataclass(frozen=True)
class DetectionCounts:
    true_positives: int
    false_positives: int
    num_ground_truth: int

    @property
    def precision(self) -> Optional[float]:
        n = self.true_positives + self.false_positives
        return self.true_positives / n if n else None

    @property
    def recall(self) -> Optional[float]:
        return self.true_positives / self.num_ground_truth if self.num_ground_truth else None


def detection_counts(frames, iou_threshold: float = DEFAULT_IOU_THRESHOLD,
                     class_aware: bool = True) -> DetectionCounts:
    tp = fp = n_gt = 0
    for f in frames:
        ms = match_detections(f.detections, f.ground_truth, iou_threshold, class_aware)
        tp += len(ms.pairs)
        fp += len(ms.unmatched_detections)
        n_gt += len(f.ground_truth)
    return DetectionCounts(tp, fp, n_gt)


# -- distance errors --------------------------------------------------------

def matched_pairs(matches) -> List[MatchPair]:
    """Flatten a MatchSet, a MatchPair, or an iterable of either, keeping pairs with a distance."""
    if isinstance(matches, MatchPair):
        return [matches] if matches.error_m is not None else []
    if isinstance(matches, MatchSet):
        return [p for p in matches.pairs if p.error_m is not None]
    out: List[MatchPair] = []
    for m in matches:
        out.extend(matched_pairs(m))
    return out


def _float(x: Fraction) -> float:
    try:
        return float(x)
    except OverflowError:
        return math.inf


def _mean(values: Iterable) -> float:
    values = list(values)
    return _float(sum(map(Fraction, values), Fraction(0)) / len(values))


def weighted_distance_error(matches) -> float:
    """Confidence-weighted mean absolute distance error over matched pairs."""
    pairs = matched_pairs(matches)
    if not pairs:
        raise NoMatches("no matched detections with distances")
    num = sum((Fraction(p.confidence) * Fraction(p.error_m) for p in pairs), Fraction(0))
    den = sum((Fraction(p.confidence) for p in pairs), Fraction(0))
    if den == 0:
        raise ZeroTotalConfidence("all matched detections have zero confidence")
    return float(num / den)


def mean_distance_error(matches) -> float:
    pairs = matched_pairs(matches)
    if not pairs:
        raise NoMatches("no matched detections with distances")
    return _mean(p.error_m for p in pairs)


def mean_absolute_percentage_error(matches) -> float:
    """Mean of per-pair relative errors (a ratio, not percent)."""
    pairs = matched_pairs(matches)
    if not pairs:
        raise NoMatches("no matched detections with distances")
    if any(p.gt_distance_m == 0 for p in pairs):
        raise ZeroGroundTruthDistance("relative error undefined at zero ground-truth distance")
    return _mean(Fraction(p.error_m) / Fraction(p.gt_distance_m) for p in pairs)


def _is_outlier(p: MatchPair, threshold: float) -> bool:
    if p.gt_distance_m == 0:
        return p.error_m > 0
    return Fraction(p.error_m) > Fraction(threshold) * Fraction(p.gt_distance_m)


def outlier_rate(matches, outlier_rel_threshold: float = DEFAULT_OUTLIER_REL) -> float:
    pairs = matched_pairs(matches)
    if not pairs:
        raise NoMatches("no matched detections with distances")
    return sum(_is_outlier(p, outlier_rel_threshold) for p in pairs) / len(pairs)


@dataclass(frozen=True)
class DistanceErrorSummary:
    mde_m: float
    outlier_rate: float
    mae_m: float
    # None when a ground-truth distance is zero
    mape: Optional[float]
    count: int


def distance_error_summary(matches, outlier_rel_threshold: float = DEFAULT_OUTLIER_REL
                           ) -> DistanceErrorSummary:
    pairs = matched_pairs(matches)
    mde = mean_distance_error(pairs)
    try:
        mape = mean_absolute_percentage_error(pairs)
    except ZeroGroundTruthDistance:
        mape = None
    return DistanceErrorSummary(
        mde_m=mde,
        outlier_rate=outlier_rate(pairs, outlier_rel_threshold),
        mae_m=mde,
        mape=mape,
        count=len(pairs),
    )


@dataclass(frozen=True)
class BinStats:
    lo: float
    hi: float
    count: int
    weighted_error_m: Optional[float]
    summary: Optional[DistanceErrorSummary]


@dataclass(frozen=True)
class BinnedStats:
    edges: Tuple[float, ...]
    bins: Tuple[BinStats, ...]
    # pairs whose ground-truth distance falls outside every bin
    unbinned: int = 0


def check_bin_edges(edges: Sequence[float]) -> Tuple[float, ...]:
    edges = tuple(float(e) for e in edges)
    if len(edges) < 2:
        raise InvalidConfig("need at least two bin edges")
    if any(math.isnan(e) for e in edges) or any(math.isinf(e) for e in edges[:-1]):
        raise InvalidConfig("only the last bin edge may be infinite")
    if any(b <= a for a, b in zip(edges, edges[1:])):
        raise InvalidConfig(f"bin edges must be strictly ascending: {edges}")
    return edges


def binned_distance_errors(matches, bin_edges: Sequence[float] = DEFAULT_BIN_EDGES,
                           outlier_rel_threshold: float = DEFAULT_OUTLIER_REL) -> BinnedStats:
    """Group matched pairs by ground-truth distance.

    Bins are ``[lo, hi)`` except the last, which also includes its upper edge
    (so ``d_max`` lands in the final bin). Empty bins report ``None``.
    """
    edges = check_bin_edges(bin_edges)
    pairs = matched_pairs(matches)
    n_bins = len(edges) - 1
    buckets: List[List[MatchPair]] = [[] for _ in range(n_bins)]
    unbinned = 0
    for p in pairs:
        d = p.gt_distance_m
        for k in range(n_bins):
            lo, hi = edges[k], edges[k + 1]
            last = k == n_bins - 1
            if lo <= d < hi or (last and d == hi):
                buckets[k].append(p)
                break
        else:
            unbinned += 1
    bins = []
    for k, bucket in enumerate(buckets):
        if bucket:
            try:
                e = weighted_distance_error(bucket)
            except ZeroTotalConfidence:
                e = None
            s = distance_error_summary(bucket, outlier_rel_threshold)
        else:
            e, s = None, None
        bins.append(BinStats(edges[k], edges[k + 1], len(bucket), e, s))
    return BinnedStats(edges, tuple(bins), unbinned)
