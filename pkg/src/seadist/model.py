"""Domain value types shared across the package.

All types are frozen dataclasses that validate in ``__post_init__``, so an
instance that exists is a valid one (``dataclasses.replace`` re-validates too).
Boxes are corner-form pixels, origin top-left, y pointing down. Distances are
meters.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional, Tuple

from .errors import DegenerateBox, InvalidValue


def _finite(*values: float) -> bool:
    return all(isinstance(v, (int, float)) and math.isfinite(v) for v in values)


@dataclass(frozen=True)
class BBox:
    x1: float
    y1: float
    x2: float
    y2: float

    def __post_init__(self):
        if not _finite(self.x1, self.y1, self.x2, self.y2):
            raise DegenerateBox(f"non-finite box coordinates {self.as_tuple()}")
        if self.x1 >= self.x2 or self.y1 >= self.y2:
            raise DegenerateBox(f"box has no area: {self.as_tuple()}")

    @property
    def width(self) -> float:
        return self.x2 - self.x1

    @property
    def height(self) -> float:
        return self.y2 - self.y1

    @property
    def area(self) -> float:
        return self.width * self.height

    @property
    def center(self) -> Tuple[float, float]:
        return (0.5 * (self.x1 + self.x2), 0.5 * (self.y1 + self.y2))

    @property
    def bottom_center(self) -> Tuple[float, float]:
        """Waterline point: the only box point assumed to lie on the sea plane."""
        return (0.5 * (self.x1 + self.x2), self.y2)

    def as_tuple(self) -> Tuple[float, float, float, float]:
        return (self.x1, self.y1, self.x2, self.y2)


def validate_bbox(x1: float, y1: float, x2: float, y2: float) -> BBox:
    return BBox(x1, y1, x2, y2)


@dataclass(frozen=True)
class ObjectClass:
    """Object category. ``boat`` and ``buoy`` are canonical, anything else is "other"."""

    label: str

    def __post_init__(self):
        if not isinstance(self.label, str) or not self.label.strip():
            raise InvalidValue("object class label must be a nonempty string")
        label = self.label.strip()
        if label.lower() in _CANONICAL:
            label = label.lower()
        object.__setattr__(self, "label", label)

    @property
    def is_other(self) -> bool:
        return self.label not in _CANONICAL

    @classmethod
    def other(cls, label: str) -> "ObjectClass":
        return cls(label)

    def __str__(self) -> str:
        return self.label


_CANONICAL = ("boat", "buoy")
BOAT = ObjectClass("boat")
BUOY = ObjectClass("buoy")


class GTSource(str, enum.Enum):
    CHART = "chart"
    HUMAN_LABEL = "human"


@dataclass(frozen=True)
class Detection:
    """One detector output.

    ``distance_raw`` is the network's normalized distance output, ``distance_m``
    the metric estimate once denormalized (or produced by a baseline).
    """

    bbox: BBox
    cls: ObjectClass
    confidence: float
    distance_raw: Optional[float] = None
    distance_m: Optional[float] = None
    track_id: Optional[int] = None

    def __post_init__(self):
        if not isinstance(self.bbox, BBox):
            raise InvalidValue("detection bbox must be a BBox")
        if not isinstance(self.cls, ObjectClass):
            raise InvalidValue("detection class must be an ObjectClass")
        if not _finite(self.confidence) or not 0.0 <= self.confidence <= 1.0:
            raise InvalidValue(f"confidence {self.confidence!r} outside [0, 1]")
        if self.distance_raw is not None and not _finite(self.distance_raw):
            raise InvalidValue("distance_raw must be finite")
        if self.distance_m is not None and (
            not _finite(self.distance_m) or self.distance_m < 0
        ):
            raise InvalidValue(f"distance_m {self.distance_m!r} must be finite and >= 0")


@dataclass(frozen=True)
class GroundTruthObject:
    bbox: BBox
    cls: ObjectClass
    distance_m: float
    source: GTSource = GTSource.CHART
    object_id: Optional[int] = None

    def __post_init__(self):
        if not isinstance(self.bbox, BBox):
            raise InvalidValue("ground truth bbox must be a BBox")
        if not isinstance(self.cls, ObjectClass):
            raise InvalidValue("ground truth class must be an ObjectClass")
        if not _finite(self.distance_m) or self.distance_m < 0:
            raise InvalidValue(f"ground truth distance {self.distance_m!r} must be finite and >= 0")
        object.__setattr__(self, "source", GTSource(self.source))


@dataclass(frozen=True)
class Frame:
    frame_id: int
    timestamp_s: float
    detections: Tuple[Detection, ...] = ()
    ground_truth: Tuple[GroundTruthObject, ...] = ()

    def __post_init__(self):
        if isinstance(self.frame_id, bool) or not isinstance(self.frame_id, int):
            raise InvalidValue("frame_id must be an integer")
        if not _finite(self.timestamp_s):
            raise InvalidValue("timestamp must be finite")
        object.__setattr__(self, "detections", tuple(self.detections))
        object.__setattr__(self, "ground_truth", tuple(self.ground_truth))
        for d in self.detections:
            if not isinstance(d, Detection):
                raise InvalidValue("frame detections must be Detection values")
        for g in self.ground_truth:
            if not isinstance(g, GroundTruthObject):
                raise InvalidValue("frame ground truth must be GroundTruthObject values")


@dataclass(frozen=True)
class GeoPoint:
    lat: float
    lon: float

    def __post_init__(self):
        if not _finite(self.lat, self.lon):
            raise InvalidValue("coordinates must be finite")
        if not -90.0 <= self.lat <= 90.0:
            raise InvalidValue(f"latitude {self.lat} outside [-90, 90]")
        if not -180.0 <= self.lon <= 180.0:
            raise InvalidValue(f"longitude {self.lon} outside [-180, 180]")


def check_frame_order(frames) -> None:
    """Raise InvalidValue unless frame ids strictly increase and timestamps never decrease."""
    prev = None
    for f in frames:
        if prev is not None:
            if f.frame_id <= prev.frame_id:
                raise InvalidValue(
                    f"frame id {f.frame_id} does not follow {prev.frame_id}"
                )
            if f.timestamp_s < prev.timestamp_s:
                raise InvalidValue(f"timestamp decreases at frame {f.frame_id}")
        prev = f
