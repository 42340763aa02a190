"""Constant-velocity Kalman filter over box center, area and aspect ratio.

State is ``(u, v, s, r, du, dv, ds)``: box center in pixels, area ``s``,
aspect ratio ``r = w/h`` and rates for the first three. The aspect ratio is
modelled as constant. Noise constants follow the original SORT tracker.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..model import BBox

DIM_X = 7
DIM_Z = 4
MIN_SCALE = 1e-6
MIN_ASPECT = 1e-6

F = np.eye(DIM_X)
F[0, 4] = F[1, 5] = F[2, 6] = 1.0
H = np.eye(DIM_Z, DIM_X)

# SORT: R[2:,2:] *= 10; P[4:,4:] *= 1000; P *= 10; Q[-1,-1] *= .01; Q[4:,4:] *= .01
MEASUREMENT_NOISE = np.diag([1.0, 1.0, 10.0, 10.0])
INITIAL_COVARIANCE = np.diag([10.0, 10.0, 10.0, 10.0, 1e4, 1e4, 1e4])
PROCESS_NOISE = np.diag([1.0, 1.0, 1.0, 1.0, 1e-2, 1e-2, 1e-4])


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class KalmanState:
    mean: np.ndarray
    covariance: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "mean", _frozen(self.mean).reshape(DIM_X))
        object.__setattr__(self, "covariance", _frozen(self.covariance).reshape(DIM_X, DIM_X))

    def __eq__(self, other):
        if not isinstance(other, KalmanState):
            return NotImplemented
        return (np.array_equal(self.mean, other.mean)
                and np.array_equal(self.covariance, other.covariance))

    def to_bbox(self) -> BBox:
        return z_to_bbox(self.mean[:DIM_Z])


def bbox_to_z(box: BBox) -> np.ndarray:
    u, v = box.center
    return np.array([u, v, box.area, box.width / box.height])


def z_to_bbox(z) -> BBox:
    u, v, s, r = (float(x) for x in z[:4])
    s = max(s, MIN_SCALE)
    r = max(r, MIN_ASPECT)
    w = np.sqrt(s * r)
    h = s / w
    return BBox(u - w / 2, v - h / 2, u + w / 2, v + h / 2)


def _symmetrize(p: np.ndarray) -> np.ndarray:
    return 0.5 * (p + p.T)


def kalman_init(box: BBox, initial_covariance: np.ndarray = INITIAL_COVARIANCE) -> KalmanState:
    mean = np.zeros(DIM_X)
    mean[:DIM_Z] = bbox_to_z(box)
    return KalmanState(mean, initial_covariance.copy())


def kalman_predict(state: KalmanState, process_noise: np.ndarray = PROCESS_NOISE) -> KalmanState:
    x = state.mean.copy()
    # area may not be driven through zero
    if x[2] + x[6] <= 0:
        x[6] = 0.0
    x = F @ x
    x[2] = max(x[2], MIN_SCALE)
    p = _symmetrize(F @ state.covariance @ F.T + process_noise)
    return KalmanState(x, p)


def kalman_update(state: KalmanState, observed: BBox,
                  measurement_noise: np.ndarray = MEASUREMENT_NOISE) -> KalmanState:
    """Linear measurement update on ``(u, v, s, r)``.

    Uses the Joseph form so the covariance stays symmetric positive
    semi-definite under rounding.
    """
    x, p = state.mean, state.covariance
    innovation = bbox_to_z(observed) - H @ x
    s = H @ p @ H.T + measurement_noise
    k = np.linalg.solve(s, H @ p).T
    x = x + k @ innovation
    x[2] = max(x[2], MIN_SCALE)
    x[3] = max(x[3], MIN_ASPECT)
    i_kh = np.eye(DIM_X) - k @ H
    p = i_kh @ p @ i_kh.T + k @ measurement_noise @ k.T
    return KalmanState(x, _symmetrize(p))
