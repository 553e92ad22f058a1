import math

import numpy as np
import pytest

import oracles
from hopbot.errors import DomainError, InfiniteRangeError, ValidationError
from hopbot.navigation import (
    CameraModel,
    Obstacle,
    SphereWorld,
    back_project,
    measure_obstacle,
    navigation_potential,
    plan_path,
    potential_grid,
    potential_gradient,
    project_point,
    random_free_points,
    range_for_resolution,
    resolution_at_depth,
    stereo_pair,
    triangulate,
)

# Sensor size and pitch for 1280x800, 2.5 mm, 75 x 47 degrees.
FROZEN_SENSOR_MM = (3.836637, 2.174062)


def test_reference_camera_sensor_size():
    cam = CameraModel.reference()
    assert cam.sensor_width == pytest.approx(FROZEN_SENSOR_MM[0], rel=1e-6)
    assert cam.sensor_height == pytest.approx(FROZEN_SENSOR_MM[1], rel=1e-6)
    assert math.degrees(cam.hfov) == pytest.approx(75.0)
    assert math.degrees(cam.vfov) == pytest.approx(47.0)
    assert cam.pixel_pitch[0] * 1000 == pytest.approx(2.99737, rel=1e-5)


def test_intrinsic_matrix_layout():
    cam = CameraModel.reference()
    A = cam.intrinsic_matrix
    px, py = cam.pixel_pitch
    np.testing.assert_allclose(A, [[2.5 / px, 0, 640], [0, 2.5 / py, 400], [0, 0, 1]])


def test_project_and_back_project_round_trip():
    cam = CameraModel.reference()
    point = np.array([0.3, -0.2, 2.5])
    pixel, s = project_point(cam, point)
    assert s == pytest.approx(2.5)
    np.testing.assert_allclose(back_project(cam, pixel, s), point, atol=1e-12)


def test_point_behind_camera_is_rejected():
    with pytest.raises(DomainError):
        project_point(CameraModel.reference(), [0.0, 0.0, -1.0])


def test_stereo_triangulation_recovers_point():
    left, right = stereo_pair(CameraModel.reference(), 0.08)
    point = np.array([0.4, 0.1, 3.0])
    pl, _ = project_point(left, point)
    pr, _ = project_point(right, point)
    got, rng = triangulate(left, right, pl, pr)
    np.testing.assert_allclose(got, point, atol=1e-9)
    assert rng == pytest.approx(np.linalg.norm(point), rel=1e-9)


def test_zero_disparity_is_infinite_range():
    left, right = stereo_pair(CameraModel.reference(), 0.08)
    with pytest.raises(InfiniteRangeError):
        triangulate(left, right, (640.0, 400.0), (640.0, 400.0))


def test_shared_centre_is_rejected():
    cam = CameraModel.reference()
    with pytest.raises(ValidationError):
        triangulate(cam, cam, (600.0, 400.0), (640.0, 400.0))


def test_negative_disparity_is_behind():
    left, right = stereo_pair(CameraModel.reference(), 0.08)
    with pytest.raises(DomainError):
        triangulate(left, right, (600.0, 400.0), (640.0, 400.0))


def test_measure_obstacle_recovers_box():
    cam = CameraModel.reference()
    corners = [np.array([x, y, 4.0]) for x in (-0.5, 0.7) for y in (-0.3, 0.2)]
    pix = np.array([project_point(cam, c)[0] for c in corners])
    bbox = (pix[:, 0].min(), pix[:, 1].min(), pix[:, 0].max(), pix[:, 1].max())
    size = measure_obstacle(cam, bbox, 4.0)
    assert size["width"] == pytest.approx(1.2, rel=1e-9)
    assert size["height"] == pytest.approx(0.5, rel=1e-9)


@pytest.mark.parametrize("res", [5, 10, 20, 30, 50, 80])
def test_range_for_resolution_matches_oracle(res):
    cam = CameraModel.reference()
    want = oracles.camera_range(res, 1280, 800, 2.5, 75.0, 47.0)
    assert range_for_resolution(cam, res) == pytest.approx(want, rel=1e-12)
    assert resolution_at_depth(cam, want) == pytest.approx(res, rel=1e-12)


def test_resolution_is_zero_at_zero_depth():
    assert resolution_at_depth(CameraModel.reference(), 0.0) == 0.0


def test_bad_camera_reports_every_problem():
    with pytest.raises(ValidationError) as info:
        CameraModel(0, 800, -1.0, 3.0, 2.0)
    assert len(info.value.problems) == 2


# --- navigation function ----------------------------------------------------

def test_potential_is_zero_at_goal_and_one_on_boundary():
    world = SphereWorld.reference()
    assert navigation_potential(world.goal, world) == 0.0
    ob = world.obstacles[0]
    edge = np.array(ob.center) + np.array([ob.radius, 0.0])
    assert navigation_potential(edge, world) == pytest.approx(1.0, abs=1e-9)


def test_potential_inside_obstacle_raises():
    world = SphereWorld.reference()
    with pytest.raises(DomainError):
        navigation_potential(world.obstacles[1].center, world)


def test_gradient_matches_finite_differences():
    world = SphereWorld.reference()
    for q in [(0.6, 0.73), (0.0, 0.0), (-0.1, 0.5), (0.8, 0.0), (-0.7, -0.3)]:
        fd = oracles.fd_gradient(lambda p: navigation_potential(p, world), q)
        np.testing.assert_allclose(potential_gradient(q, world), fd, rtol=1e-6, atol=1e-9)


def test_overlapping_obstacles_named():
    with pytest.raises(ValidationError, match=r"obstacles\[0\] and obstacles\[1\] overlap"):
        SphereWorld([Obstacle((0, 0), 0.3), Obstacle((0.4, 0), 0.2)], np.array([-0.6, 0.0]))


def test_goal_inside_obstacle_rejected():
    with pytest.raises(ValidationError, match="goal"):
        SphereWorld([Obstacle((0, 0), 0.3)], np.array([0.1, 0.0]))


def test_reference_path_converges_with_clearance():
    world = SphereWorld.reference()
    path = plan_path((0.6, 0.73), world)
    assert path.converged
    assert np.all(path.clearances > 0)
    assert np.all(np.diff(path.potentials) < 0)
    assert np.linalg.norm(path.waypoints[-1] - world.goal) < 0.01


def test_start_inside_obstacle_rejected():
    world = SphereWorld.reference()
    with pytest.raises(DomainError):
        plan_path(world.obstacles[0].center, world)


def test_small_kappa_can_trap_descent():
    # kappa = 2 leaves spurious minima behind obstacles for some starts
    world = SphereWorld.reference(kappa=2.0)
    rng = np.random.default_rng(0)
    starts = random_free_points(world, 30, rng)
    results = [plan_path(s, world, max_iters=3000) for s in starts]
    assert not all(r.converged for r in results)


def test_potential_grid_marks_obstacles_nan():
    world = SphereWorld.reference()
    xs = np.linspace(-1, 1, 21)
    grid = potential_grid(world, xs, xs)
    assert grid.shape == (21, 21)
    assert np.isnan(grid).any()
    finite = grid[~np.isnan(grid)]
    assert finite.min() >= 0 and finite.max() <= 1.0 + 1e-12
