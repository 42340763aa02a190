"""Evaluation, tracking and baselines for detector-based distance estimation on surface vessels."""

from .distnorm import NormalizationConfig, Strategy, denormalize, normalize
from .errors import SeadistError
from .matching import MatchSet, iou, match_detections
from .model import (
    BOAT,
    BUOY,
    BBox,
    Detection,
    Frame,
    GeoPoint,
    GroundTruthObject,
    GTSource,
    ObjectClass,
    validate_bbox,
)

__version__ = "0.1.0"

__all__ = [
    "NormalizationConfig", "Strategy", "denormalize", "normalize", "SeadistError",
    "MatchSet", "iou", "match_detections", "BOAT", "BUOY", "BBox", "Detection", "Frame",
    "GeoPoint", "GroundTruthObject", "GTSource", "ObjectClass", "validate_bbox",
]
