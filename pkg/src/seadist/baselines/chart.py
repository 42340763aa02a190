"""Ground-truth distances from GPS position, heading and charted objects."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Sequence

from ..errors import InvalidValue
from ..model import GeoPoint, ObjectClass

EARTH_RADIUS_M = 6371008.8


@dataclass(frozen=True)
class ChartObject:
    id: str
    position: GeoPoint
    kind: ObjectClass

    def __post_init__(self):
        if not isinstance(self.position, GeoPoint):
            raise InvalidValue("chart object position must be a GeoPoint")
        if not isinstance(self.kind, ObjectClass):
            raise InvalidValue("chart object kind must be an ObjectClass")


@dataclass(frozen=True)
class ChartAssociation:
    obj: ChartObject
    distance_m: float
    relative_bearing_rad: float


def haversine_m(a: GeoPoint, b: GeoPoint) -> float:
    lat1, lat2 = math.radians(a.lat), math.radians(b.lat)
    dlat = lat2 - lat1
    dlon = math.radians(b.lon - a.lon)
    h = math.sin(dlat / 2) ** 2 + math.cos(lat1) * math.cos(lat2) * math.sin(dlon / 2) ** 2
    return 2.0 * EARTH_RADIUS_M * math.asin(min(1.0, math.sqrt(h)))


def initial_bearing_rad(a: GeoPoint, b: GeoPoint) -> float:
    """Great-circle bearing from ``a`` to ``b``, clockwise from true north, in [0, 2*pi)."""
    lat1, lat2 = math.radians(a.lat), math.radians(b.lat)
    dlon = math.radians(b.lon - a.lon)
    y = math.sin(dlon) * math.cos(lat2)
    x = math.cos(lat1) * math.sin(lat2) - math.sin(lat1) * math.cos(lat2) * math.cos(dlon)
    return math.atan2(y, x) % (2 * math.pi)


def wrap_angle(a: float) -> float:
    """Wrap to (-pi, pi]."""
    w = math.remainder(a, 2 * math.pi)
    return math.pi if w == -math.pi else w


def chart_gt_distance(usv: GeoPoint, heading_rad: float, chart: Sequence[ChartObject],
                      bearing_tolerance_rad: float) -> List[ChartAssociation]:
    """Charted objects inside the forward cone, nearest first.

    This proposes associations only; the caller confirms them.
    """
    if not 0.0 < bearing_tolerance_rad <= math.pi:
        raise InvalidValue("bearing tolerance must be in (0, pi]")
    out = []
    for obj in chart:
        dist = haversine_m(usv, obj.position)
        rel = wrap_angle(initial_bearing_rad(usv, obj.position) - heading_rad)
        if abs(rel) <= bearing_tolerance_rad:
            out.append(ChartAssociation(obj, dist, rel))
    out.sort(key=lambda c: c.distance_m)
    return out
