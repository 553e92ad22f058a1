import math

import numpy as np
from hypothesis import assume, given, settings
from hypothesis import strategies as st

import oracles
from hopbot.dynamics import RobotState, VehicleParams, euler_to_quat, quat_to_euler, thruster_allocation
from hopbot.mission import RelayChain, mapping_time, robots_required, simulate_relay
from hopbot.navigation import (
    CameraModel,
    SphereWorld,
    navigation_potential,
    potential_gradient,
    range_for_resolution,
    resolution_at_depth,
)
from hopbot.propulsion import (
    PropellantSpec,
    SolidMotorSpec,
    expansion_ratio,
    exit_pressure_ratio,
    hover_flight_time,
    ideal_isp,
    simulate_solid_burn,
)

gammas = st.floats(1.1, 1.67)
WORLD = SphereWorld.reference()


@given(gamma=gammas, eps=st.floats(1.01, 500.0))
def test_area_ratio_round_trip(gamma, eps):
    pr = exit_pressure_ratio(gamma, eps)
    assert math.isclose(expansion_ratio(gamma, pr), eps, rel_tol=1e-8)


@given(m=st.floats(2.0, 40.0), t=st.floats(500.0, 4000.0), gamma=gammas,
       pe=st.floats(1.0, 1e5))
def test_isp_positive_and_grows_with_expansion(m, t, gamma, pe):
    prop = PropellantSpec("p", m, t, gamma)
    isp = ideal_isp(prop, 2e6, pe)
    assert isp > 0
    assert ideal_isp(prop, 2e6, pe / 2) > isp


@given(isp=st.floats(50, 500), mp=st.floats(0.01, 2.9))
def test_hover_time_increases_with_propellant(isp, mp):
    assert hover_flight_time(isp, 3.0, mp) < hover_flight_time(isp, 3.0, min(mp * 1.01, 2.99))


@settings(max_examples=25, deadline=None)
@given(ri=st.floats(0.002, 0.015), web=st.floats(0.002, 0.02), n=st.floats(0.1, 0.7))
def test_solid_burn_monotone_and_mass_conserving(ri, web, n):
    motor = SolidMotorSpec.reference_pellet(grain_inner_radius=ri, grain_outer_radius=ri + web,
                                            burn_rate_exponent=n)
    peak = motor.burn_rate(motor.chamber_pressure(motor.grain_outer_radius))
    prof = simulate_solid_burn(motor, 2e-3 * web / peak)
    assert np.all(np.diff(prof.chamber_pressure[:-1]) > 0)
    defect = abs(prof.integrated_mass_flow() - motor.propellant_mass) / motor.propellant_mass
    assert defect < 5e-3


@given(depth=st.floats(0.01, 100.0), k=st.floats(0.1, 10.0))
def test_resolution_is_quadratic_in_depth(depth, k):
    cam = CameraModel.reference()
    assert math.isclose(resolution_at_depth(cam, k * depth), k * k * resolution_at_depth(cam, depth),
                        rel_tol=1e-12)


@given(res=st.floats(1e-3, 1e4))
def test_resolution_round_trip(res):
    cam = CameraModel.reference()
    assert math.isclose(resolution_at_depth(cam, range_for_resolution(cam, res)), res, rel_tol=1e-9)


free_points = st.tuples(st.floats(-0.99, 0.99), st.floats(-0.99, 0.99)).filter(
    lambda q: math.hypot(*q) < 1.0 and min(WORLD.obstacle_factors(q)) > 1e-3)


@given(q=free_points)
def test_potential_bounded(q):
    assert 0.0 <= navigation_potential(q, WORLD) <= 1.0


@given(q=free_points)
def test_gradient_matches_finite_differences(q):
    assume(math.dist(q, WORLD.goal) > 1e-3)
    fd = oracles.fd_gradient(lambda p: navigation_potential(p, WORLD), q, h=1e-7)
    g = potential_gradient(q, WORLD)
    assert np.linalg.norm(g - fd) <= 1e-6 * max(np.linalg.norm(fd), 1e-3)


@given(a=st.floats(0.0, 5000.0), b=st.floats(0.0, 5000.0))
def test_robot_count_monotone(a, b):
    lo, hi = sorted((a, b))
    assert robots_required(lo) <= robots_required(hi)


@given(length=st.floats(10.0, 5000.0), r=st.floats(0.5, 20.0))
def test_mapping_time_falls_with_camera_range(length, r):
    assert mapping_time(length, r * 1.1) < mapping_time(length, r)


@given(n=st.integers(2, 60), bits=st.floats(1.0, 1e7))
def test_relay_latency_linear_in_hops(n, bits):
    chain = RelayChain.evenly_spaced(n, 25.0 * (n - 1))
    got = simulate_relay(chain, bits).end_to_end_latency
    assert math.isclose(got, oracles.relay_latency(n - 1, bits, 1e6, 5e-3), rel_tol=1e-12)


@given(roll=st.floats(-3.1, 3.1), pitch=st.floats(-1.5, 1.5), yaw=st.floats(-3.1, 3.1))
def test_euler_round_trip(roll, pitch, yaw):
    q = euler_to_quat((roll, pitch, yaw))
    assert math.isclose(np.linalg.norm(q), 1.0, rel_tol=1e-14)
    assert q[0] >= 0
    np.testing.assert_allclose(quat_to_euler(q), (roll, pitch, yaw), atol=1e-9)


@given(total=st.floats(0.0, 25.0), tx=st.floats(-1.0, 1.0), ty=st.floats(-1.0, 1.0))
def test_allocation_respects_bounds(total, tx, ty):
    params = VehicleParams()
    alloc = thruster_allocation(total, (tx, ty), params.thruster_positions, params.thruster_max_thrust)
    assert np.all(alloc.throttles >= -1e-12) and np.all(alloc.throttles <= 1 + 1e-12)
    if not alloc.saturated:
        np.testing.assert_allclose(alloc.achieved, [total, tx, ty], atol=1e-9)


@given(v=st.lists(st.floats(-100, 100), min_size=13, max_size=13), m=st.floats(0.1, 10))
def test_state_vector_round_trip(v, m):
    q = np.array(v[6:10])
    assume(np.linalg.norm(q) > 1e-3)
    s = RobotState(position=v[0:3], velocity=v[3:6], attitude=q / np.linalg.norm(q),
                   body_rates=v[10:13], mass=m)
    assert s.attitude[0] >= 0
    back = RobotState.from_vector(s.to_vector())
    np.testing.assert_allclose(back.to_vector(), s.to_vector(), atol=1e-12)
