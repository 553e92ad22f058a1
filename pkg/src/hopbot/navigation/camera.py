"""Pinhole camera model, stereo triangulation and ground-resolution sizing.

Camera frame: x right, y down, z along the optical axis. A world point M
maps to camera coordinates ``R @ M + T``. Sensor dimensions and focal
length are in millimetres; poses and ranges are in metres.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .._validation import check_matrix, check_positive, check_vector, raise_if
from ..errors import DomainError, InfiniteRangeError, ValidationError


@dataclass
class CameraModel:
    """Intrinsics and pose of one camera."""

    n_h: int
    n_v: int
    focal_length: float  # mm
    sensor_width: float  # mm
    sensor_height: float  # mm
    rotation: np.ndarray = field(default_factory=lambda: np.eye(3))
    translation: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        raise_if(self.problems())
        self.rotation = np.asarray(self.rotation, dtype=float)
        self.translation = np.asarray(self.translation, dtype=float)

    def problems(self):
        out = []
        for name in ("n_h", "n_v"):
            value = getattr(self, name)
            if not (isinstance(value, (int, np.integer)) and value > 0):
                out.append(f"{name} must be a positive integer, got {value!r}")
        for name in ("focal_length", "sensor_width", "sensor_height"):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
                out.append(f"{name} must be > 0, got {value!r}")
        try:
            R = check_matrix(self.rotation, "rotation", (3, 3))
            if not np.allclose(R @ R.T, np.eye(3), atol=1e-9) or np.linalg.det(R) < 0:
                out.append("rotation must be a proper orthonormal matrix")
        except ValidationError as exc:
            out.extend(exc.problems)
        try:
            check_vector(self.translation, "translation", 3)
        except ValidationError as exc:
            out.extend(exc.problems)
        return out

    @classmethod
    def from_fov(cls, n_h, n_v, focal_length, hfov_deg, vfov_deg, **pose):
        """Derive the sensor size that yields the given fields of view."""
        width = 2.0 * focal_length * math.tan(math.radians(hfov_deg) / 2.0)
        height = 2.0 * focal_length * math.tan(math.radians(vfov_deg) / 2.0)
        return cls(n_h, n_v, focal_length, width, height, **pose)

    @classmethod
    def reference(cls, **pose):
        """1280x800 pixels, 2.5 mm lens, 75 x 47 degree field of view."""
        return cls.from_fov(1280, 800, 2.5, 75.0, 47.0, **pose)

    @property
    def pixel_pitch(self):
        """(horizontal, vertical) pixel size in mm."""
        return self.sensor_width / self.n_h, self.sensor_height / self.n_v

    @property
    def principal_point(self):
        return np.array([self.n_h / 2.0, self.n_v / 2.0])

    @property
    def intrinsic_matrix(self):
        px, py = self.pixel_pitch
        cx, cy = self.principal_point
        return np.array([
            [self.focal_length / px, 0.0, cx],
            [0.0, self.focal_length / py, cy],
            [0.0, 0.0, 1.0],
        ])

    @property
    def hfov(self):
        return 2.0 * math.atan(self.sensor_width / (2.0 * self.focal_length))

    @property
    def vfov(self):
        return 2.0 * math.atan(self.sensor_height / (2.0 * self.focal_length))

    @property
    def center(self):
        """Camera centre in world coordinates."""
        return -self.rotation.T @ self.translation

    def with_pose(self, rotation, translation):
        return CameraModel(self.n_h, self.n_v, self.focal_length, self.sensor_width,
                           self.sensor_height, rotation, translation)


def stereo_pair(camera, baseline=0.08):
    """Rectified left/right cameras; the right centre sits ``baseline`` m
    along the left camera's +x axis."""
    baseline = check_positive(baseline, "baseline")
    R, T = camera.rotation, camera.translation
    right_center = camera.center + R.T @ np.array([baseline, 0.0, 0.0])
    return camera, camera.with_pose(R, -R @ right_center)


def project_point(camera, point):
    """Project a world point to pixel coordinates.

    Returns:
        ``(pixel, s)`` where ``s`` is the depth along the optical axis, so
        that ``s * [u, v, 1] = A @ (R @ M + T)``.

    Raises:
        DomainError: if the point is not in front of the camera.
    """
    M = check_vector(point, "point", 3)
    cam = camera.rotation @ M + camera.translation
    if cam[2] <= 0:
        raise DomainError(f"point {M.tolist()} is behind the camera (depth {cam[2]:.6g} m)")
    homog = camera.intrinsic_matrix @ cam
    return homog[:2] / homog[2], float(homog[2])


def back_project(camera, pixel, depth):
    """World point at optical-axis ``depth`` m that images to ``pixel``."""
    pixel = check_vector(pixel, "pixel", 2)
    depth = check_positive(depth, "depth")
    cam = depth * np.linalg.solve(camera.intrinsic_matrix, np.array([pixel[0], pixel[1], 1.0]))
    return camera.rotation.T @ (cam - camera.translation)


def pixel_ray(camera, pixel):
    """Camera centre and unit world-frame direction of the ray through ``pixel``."""
    pixel = check_vector(pixel, "pixel", 2)
    d_cam = np.linalg.solve(camera.intrinsic_matrix, np.array([pixel[0], pixel[1], 1.0]))
    d = camera.rotation.T @ d_cam
    return camera.center, d / np.linalg.norm(d)


def triangulate(left, right, pixel_left, pixel_right):
    """Point closest to both back-projected rays.

    Returns:
        ``(point, range)``: the midpoint of the common perpendicular and its
        distance from the left camera centre.

    Raises:
        ValidationError: if both cameras share a centre.
        InfiniteRangeError: if the rays are parallel (zero disparity).
        DomainError: if the rays meet behind either camera.
    """
    o1, d1 = pixel_ray(left, pixel_left)
    o2, d2 = pixel_ray(right, pixel_right)
    if np.allclose(o1, o2, rtol=0, atol=1e-12):
        raise ValidationError("stereo cameras must have distinct centres")
    cross = np.cross(d1, d2)
    if np.linalg.norm(cross) < 1e-12:
        raise InfiniteRangeError("rays are parallel (zero disparity); range is unbounded")
    # minimise |o1 + s d1 - (o2 + t d2)|
    w = o1 - o2
    b = d1 @ d2
    denom = 1.0 - b * b
    s = (b * (d2 @ w) - (d1 @ w)) / denom
    t = ((d2 @ w) - b * (d1 @ w)) / denom
    if s <= 0 or t <= 0:
        raise DomainError("rays intersect behind the cameras (negative disparity)")
    point = 0.5 * ((o1 + s * d1) + (o2 + t * d2))
    return point, float(np.linalg.norm(point - o1))


def measure_obstacle(camera, bbox, distance):
    """Width and height (m) of an object whose image spans ``bbox``.

    ``bbox`` is ``(u_min, v_min, u_max, v_max)`` in pixels and ``distance``
    the object's depth along the optical axis, typically from
    :func:`triangulate`. The box edges are back-projected onto the plane at
    that depth, so wide-angle extents are handled without small-angle error.
    """
    u0, v0, u1, v1 = check_vector(bbox, "bbox", 4)
    distance = check_positive(distance, "distance")
    if u1 < u0 or v1 < v0:
        raise ValidationError(f"bbox must have u_max >= u_min and v_max >= v_min, got {[u0, v0, u1, v1]}")
    cu, cv = (u0 + u1) / 2.0, (v0 + v1) / 2.0
    width = np.linalg.norm(back_project(camera, (u1, cv), distance)
                           - back_project(camera, (u0, cv), distance))
    height = np.linalg.norm(back_project(camera, (cu, v1), distance)
                            - back_project(camera, (cu, v0), distance))
    return {"width": float(width), "height": float(height)}


def resolution_at_depth(camera, depth):
    """Observed area per pixel at ``depth`` m.

    ``l_H * l_V * D**2 / (N_H * N_V * f**2)`` with sensor sizes, focal
    length and depth all in millimetres. The result is an area per pixel
    (mm^2) even though it is conventionally quoted as "mm/pixel".
    """
    depth = check_positive(depth, "depth", allow_zero=True)
    d_mm = depth * 1000.0
    return (camera.sensor_width * camera.sensor_height * d_mm ** 2
            / (camera.n_h * camera.n_v * camera.focal_length ** 2))


def range_for_resolution(camera, resolution):
    """Depth (m) at which :func:`resolution_at_depth` equals ``resolution``."""
    resolution = check_positive(resolution, "resolution")
    d_mm = camera.focal_length * math.sqrt(
        resolution * camera.n_h * camera.n_v / (camera.sensor_width * camera.sensor_height))
    return d_mm / 1000.0
