"""Pinhole sensing, stereo ranging, ground resolution and navigation-function
path planning."""

from .camera import (
    CameraModel,
    back_project,
    measure_obstacle,
    pixel_ray,
    project_point,
    range_for_resolution,
    resolution_at_depth,
    stereo_pair,
    triangulate,
)
from .navfunc import (
    Obstacle,
    PathResult,
    SphereWorld,
    multi_start,
    navigation_potential,
    plan_path,
    potential_gradient,
    potential_grid,
    random_free_points,
)

__all__ = [
    "CameraModel",
    "Obstacle",
    "PathResult",
    "SphereWorld",
    "back_project",
    "measure_obstacle",
    "multi_start",
    "navigation_potential",
    "pixel_ray",
    "plan_path",
    "potential_gradient",
    "potential_grid",
    "project_point",
    "random_free_points",
    "range_for_resolution",
    "resolution_at_depth",
    "stereo_pair",
    "triangulate",
]
