from .camera import (
    CameraPose,
    horizon_row,
    intrinsics_from_fov,
    project_ground_point,
    triangulate_distance,
)
from .chart import ChartAssociation, ChartObject, chart_gt_distance, haversine_m
from .depth import INVALID_DEPTH, DepthMap, depth_median_in_box

__all__ = [
    "CameraPose", "horizon_row", "intrinsics_from_fov", "project_ground_point", "triangulate_distance",
    "ChartAssociation", "ChartObject", "chart_gt_distance", "haversine_m",
    "INVALID_DEPTH", "DepthMap", "depth_median_in_box",
]
