"""Reduce an externally produced dense depth map to one distance per box."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import InvalidValue, NoValidDepth
from ..model import BBox

INVALID_DEPTH = -1.0


@dataclass(frozen=True, eq=False)
class DepthMap:
    """Per-pixel metric depth, indexed ``values[row, col]``.

    Negative or non-finite entries (``INVALID_DEPTH`` by convention) are invalid.
    """

    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.ndim != 2 or v.size == 0:
            raise InvalidValue("depth map must be a nonempty 2-D grid")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def width(self) -> int:
        return self.values.shape[1]

    @property
    def height(self) -> int:
        return self.values.shape[0]


def depth_median_in_box(depth: DepthMap, box: BBox) -> float:
    """Median of valid depths whose pixel centers lie inside ``box`` (edges inclusive)."""
    c0 = max(0, math.ceil(box.x1 - 0.5))
    c1 = min(depth.width - 1, math.floor(box.x2 - 0.5))
    r0 = max(0, math.ceil(box.y1 - 0.5))
    r1 = min(depth.height - 1, math.floor(box.y2 - 0.5))
    if c0 > c1 or r0 > r1:
        raise NoValidDepth("box does not cover any pixel center of the depth map")
    patch = depth.values[r0:r1 + 1, c0:c1 + 1]
    valid = patch[np.isfinite(patch) & (patch >= 0)]
    if valid.size == 0:
        raise NoValidDepth("no valid depth pixels inside the box")
    return float(np.median(valid))
