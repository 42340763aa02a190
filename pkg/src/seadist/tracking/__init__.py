from .assignment import hungarian
from .kalman import KalmanState, kalman_init, kalman_predict, kalman_update
from .sort import (
    RunningDistance,
    SmoothingMode,
    SortTracker,
    Track,
    TrackerConfig,
    TrackSnapshot,
    smooth_distance,
    sort_step,
)

__all__ = [
    "hungarian", "KalmanState", "kalman_init", "kalman_predict", "kalman_update",
    "RunningDistance", "SmoothingMode", "SortTracker", "Track", "TrackerConfig",
    "TrackSnapshot", "smooth_distance", "sort_step",
]
