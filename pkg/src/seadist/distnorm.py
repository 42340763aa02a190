"""Distance normalization for the detector's distance head, and loss arithmetic.

The head predicts a bounded, well-behaved number ``y``; these maps convert
metric distance to that space for training targets and back to meters at
inference. All four maps are strictly increasing on ``[0, d_max]`` and have
exact inverses on their image.

Functions accept a scalar or an array-like and return the same kind.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (
    EmptyInput,
    InvalidConfig,
    LengthMismatch,
    NegativeComponent,
    NegativeDistance,
)

DEFAULT_D_MAX = 500.0
DEFAULT_EPSILON = 1.0


class Strategy(str, enum.Enum):
    LINEAR = "linear"
    LOG = "log"
    LINEAR_NEG = "linear_neg"
    LOG_NEG = "log_neg"

    @property
    def is_log(self) -> bool:
        return self in (Strategy.LOG, Strategy.LOG_NEG)

    @property
    def is_signed(self) -> bool:
        return self in (Strategy.LINEAR_NEG, Strategy.LOG_NEG)


@dataclass(frozen=True)
class NormalizationConfig:
    strategy: Strategy = Strategy.LINEAR
    d_max: float = DEFAULT_D_MAX
    epsilon: float = DEFAULT_EPSILON

    def __post_init__(self):
        try:
            object.__setattr__(self, "strategy", Strategy(self.strategy))
        except ValueError:
            raise InvalidConfig(f"unknown normalization strategy {self.strategy!r}") from None
        if not (math.isfinite(self.d_max) and self.d_max > 0):
            raise InvalidConfig(f"d_max must be positive, got {self.d_max}")
        if not (math.isfinite(self.epsilon) and self.epsilon >= 0):
            raise InvalidConfig(f"epsilon must be >= 0, got {self.epsilon}")
        if self.strategy.is_log:
            if self.epsilon <= 0:
                raise InvalidConfig("logarithmic strategies need epsilon > 0")
            if self.d_max + self.epsilon <= 1:
                raise InvalidConfig("logarithmic strategies need d_max + epsilon > 1")

    @property
    def log_scale(self) -> float:
        return math.log(self.d_max + self.epsilon)


def _unit(d, cfg: NormalizationConfig):
    # map [0, d_max] onto the unsigned image
    if cfg.strategy.is_log:
        return np.log(d + cfg.epsilon) / cfg.log_scale
    return d / cfg.d_max


def _unit_inverse(u, cfg: NormalizationConfig):
    if cfg.strategy.is_log:
        return np.exp(u * cfg.log_scale) - cfg.epsilon
    return u * cfg.d_max


def output_range(cfg: NormalizationConfig) -> tuple[float, float]:
    """Image of ``[0, d_max]`` under ``normalize``.

    ``[0, 1]`` (or ``[-1, 1]`` for the signed variants) except for the log maps
    with ``epsilon < 1``, whose lower end ``log(eps)/log(d_max+eps)`` is negative.
    """
    lo = math.log(cfg.epsilon) / cfg.log_scale if cfg.strategy.is_log else 0.0
    if cfg.strategy.is_signed:
        return (2.0 * lo - 1.0, 1.0)
    return (lo, 1.0)


def _is_scalar(x) -> bool:
    return isinstance(x, (int, float)) and not isinstance(x, bool)


def normalize(d, cfg: NormalizationConfig = NormalizationConfig()):
    """Metric distance to network space. Distances beyond ``d_max`` are clamped."""
    if _is_scalar(d):
        if math.isnan(d) or d < 0:
            raise NegativeDistance(f"distance must be >= 0, got {d!r}")
        d = min(float(d), cfg.d_max)
        y = math.log(d + cfg.epsilon) / cfg.log_scale if cfg.strategy.is_log else d / cfg.d_max
        return 2.0 * y - 1.0 if cfg.strategy.is_signed else y
    arr = np.asarray(d, dtype=float)
    if np.any(np.isnan(arr)):
        raise NegativeDistance("distance is NaN")
    if np.any(arr < 0):
        raise NegativeDistance("distance must be >= 0")
    arr = np.minimum(arr, cfg.d_max)
    y = _unit(arr, cfg)
    if cfg.strategy.is_signed:
        y = 2.0 * y - 1.0
    return float(y) if np.ndim(y) == 0 else y


def denormalize(y, cfg: NormalizationConfig = NormalizationConfig()):
    """Network output to meters; out-of-range outputs are clamped first."""
    lo, hi = output_range(cfg)
    if _is_scalar(y):
        u = min(max(float(y), lo), hi)
        if cfg.strategy.is_signed:
            u = (u + 1.0) / 2.0
        d = math.exp(u * cfg.log_scale) - cfg.epsilon if cfg.strategy.is_log else u * cfg.d_max
        return min(max(d, 0.0), cfg.d_max)
    arr = np.clip(np.asarray(y, dtype=float), lo, hi)
    if cfg.strategy.is_signed:
        arr = (arr + 1.0) / 2.0
    d = np.clip(_unit_inverse(arr, cfg), 0.0, cfg.d_max)
    return float(d) if np.ndim(d) == 0 else d


def distance_loss(pred_y: Sequence[float], gt_y: Sequence[float]) -> float:
    """Mean L1 between predicted and target normalized distances."""
    if len(pred_y) != len(gt_y):
        raise LengthMismatch(f"{len(pred_y)} predictions vs {len(gt_y)} targets")
    if len(pred_y) == 0:
        raise EmptyInput("distance_loss needs at least one pair")
    return math.fsum(abs(p - g) for p, g in zip(pred_y, gt_y)) / len(pred_y)


@dataclass(frozen=True)
class LossGains:
    box_gain: float = 0.05
    cls_gain: float = 0.3
    obj_gain: float = 0.7
    dist_gain: float = 0.01

    def __post_init__(self):
        for name in ("box_gain", "cls_gain", "obj_gain", "dist_gain"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v >= 0):
                raise InvalidConfig(f"{name} must be finite and >= 0, got {v}")


def composite_loss(box: float, cls: float, obj: float, dist: float,
                   gains: LossGains = LossGains()) -> float:
    parts = (box, cls, obj, dist)
    for v in parts:
        if not (math.isfinite(v) and v >= 0):
            raise NegativeComponent(f"loss component {v!r} must be finite and >= 0")
    weights = (gains.box_gain, gains.cls_gain, gains.obj_gain, gains.dist_gain)
    return math.fsum(w * v for w, v in zip(weights, parts))
