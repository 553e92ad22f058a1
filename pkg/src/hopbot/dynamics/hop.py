"""Thrust-then-coast hop simulation with reaction-wheel attitude control."""

import csv
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Union

import numpy as np

from .._validation import check_vector
from ..errors import ValidationError
from ..propulsion.nozzle import G0
from .control import _pd, limit_wheel_torque, thrust_torque, thruster_allocation
from .model import Controls, RobotState, step_rk4
from .rotations import normalize

CSV_HEADER = ("t,x,y,z,vx,vy,vz,roll,pitch,yaw,wx,wy,wz,ww1,ww2,ww3,"
              "mass,thrust,tau_x,tau_y,tau_z").split(",")

_EPS_T = 1e-12


def flat_terrain(x, y):
    return 0.0


@dataclass
class HopPlan:
    """What the robot should do on one hop.

    The robot first slews toward ``target_attitude`` for ``slew_duration``
    seconds with thrusters off, then burns for ``burn_duration`` seconds
    with throttle ``throttle_profile(t_since_ignition)``, then coasts until
    its altitude above terrain drops through ``coast_termination``.

    ``throttle_profile`` may be a constant, a callable, or a sequence of
    ``(t, throttle)`` breakpoints interpolated linearly.
    """

    burn_duration: float
    target_attitude: np.ndarray = field(default_factory=lambda: np.zeros(3))
    throttle_profile: Union[float, Callable, list] = 1.0
    coast_termination: float = 0.0
    slew_duration: float = 0.0
    target_rates: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        self.target_attitude = check_vector(self.target_attitude, "target_attitude", 3)
        self.target_rates = check_vector(self.target_rates, "target_rates", 3)
        problems = []
        for name in ("burn_duration", "slew_duration", "coast_termination"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value >= 0):
                problems.append(f"{name} must be >= 0, got {value!r}")
        if not callable(self.throttle_profile):
            if np.isscalar(self.throttle_profile):
                if not 0.0 <= float(self.throttle_profile) <= 1.0:
                    problems.append(f"throttle_profile must lie in [0, 1], got {self.throttle_profile!r}")
            else:
                pts = np.asarray(self.throttle_profile, dtype=float)
                if pts.ndim != 2 or pts.shape[1] != 2 or len(pts) == 0:
                    problems.append("throttle_profile breakpoints must be a list of [t, throttle] pairs")
                elif np.any(np.diff(pts[:, 0]) <= 0):
                    problems.append("throttle_profile breakpoint times must increase")
                elif np.any(pts[:, 1] < 0) or np.any(pts[:, 1] > 1):
                    problems.append("throttle_profile values must lie in [0, 1]")
        if problems:
            raise ValidationError(problems)

    def throttle(self, t):
        prof = self.throttle_profile
        if callable(prof):
            u = float(prof(t))
        elif np.isscalar(prof):
            u = float(prof)
        else:
            pts = np.asarray(prof, dtype=float)
            u = float(np.interp(t, pts[:, 0], pts[:, 1]))
        if not 0.0 <= u <= 1.0:
            raise ValidationError(f"throttle {u!r} at t={t!r} s is outside [0, 1]")
        return u


@dataclass
class Trajectory:
    """Time series of states plus the actuator log of a simulation."""

    t: list = field(default_factory=list)
    states: list = field(default_factory=list)
    thrust: list = field(default_factory=list)
    wheel_torque: list = field(default_factory=list)
    throttles: list = field(default_factory=list)
    events: list = field(default_factory=list)
    propellant_exhausted: bool = False
    touchdown_time: Optional[float] = None
    liftoff_time: Optional[float] = None

    def append(self, t, state, thrust=0.0, wheel_torque=None, throttles=None):
        self.t.append(float(t))
        self.states.append(state)
        self.thrust.append(float(thrust))
        self.wheel_torque.append(np.zeros(3) if wheel_torque is None else np.asarray(wheel_torque))
        self.throttles.append(np.zeros(4) if throttles is None else np.asarray(throttles))

    def __len__(self):
        return len(self.t)

    @property
    def final(self):
        return self.states[-1]

    def array(self, name):
        """Stack one state field over time, e.g. ``traj.array("position")``."""
        if name == "euler":
            return np.array([s.euler for s in self.states])
        return np.array([getattr(s, name) for s in self.states])

    def rows(self):
        for t, s, f, tau in zip(self.t, self.states, self.thrust, self.wheel_torque):
            yield [t, *s.position, *s.velocity, *s.euler, *s.body_rates,
                   *s.wheel_speeds, s.mass, f, *tau]

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(CSV_HEADER)
            for row in self.rows():
                writer.writerow([repr(float(v)) for v in row])


def _lerp_state(a, b, frac):
    y = a.to_vector() + frac * (b.to_vector() - a.to_vector())
    y[6:10] = normalize(y[6:10])
    return RobotState.from_vector(y)


def simulate_hop(initial, plan, params, dt=1e-3, coast_dt=1e-2, terrain=None, max_time=600.0):
    """Simulate slew, burn and ballistic coast until touchdown.

    The PD wheel law runs in every phase. While the robot rests on the
    terrain, any step that would push it below the surface is cancelled
    (position held, velocity zeroed), so it lifts off only once thrust
    beats weight. Touchdown is the first downward crossing of
    ``plan.coast_termination`` above terrain after liftoff; the final sample
    is linearly interpolated to the crossing instant.

    If propellant would drop below ``params.dry_mass`` the burn is cut at
    that step, ``propellant_exhausted`` is set and an event is logged.
    A robot that never leaves the ground stops once the burn ends.
    """
    if not (dt > 0 and coast_dt > 0):
        raise ValidationError(f"dt and coast_dt must be > 0, got {dt!r}, {coast_dt!r}")
    if initial.mass <= params.dry_mass and plan.burn_duration > 0:
        raise ValidationError(
            f"initial mass {initial.mass!r} kg leaves no propellant above dry mass {params.dry_mass!r} kg")
    ground = terrain or flat_terrain

    def altitude(s):
        return s.position[2] - ground(s.position[0], s.position[1])

    state = initial
    traj = Trajectory()
    traj.append(0.0, state)
    grounded = altitude(state) <= 1e-12 and state.velocity[2] <= 0.0
    if grounded and plan.burn_duration == 0 and plan.slew_duration == 0:
        return traj

    t_ignite = plan.slew_duration
    t_cutoff = t_ignite + plan.burn_duration
    n_thrusters = len(params.thruster_positions)
    cutoff_logged = False
    t = 0.0
    while t < max_time:
        if t < t_ignite - _EPS_T:
            phase, h = "slew", min(dt, t_ignite - t)
        elif t < t_cutoff - _EPS_T and not traj.propellant_exhausted:
            phase, h = "burn", min(dt, t_cutoff - t)
        else:
            if grounded:
                break
            if not cutoff_logged and plan.burn_duration > 0:
                traj.events.append(f"t={t:.6f}: coast")
                cutoff_logged = True
            phase, h = "coast", coast_dt

        tau = _pd(plan.target_attitude, state.euler, plan.target_rates,
                  state.body_rates, params.kp, params.kd, params.wheel_max_torque)
        tau = limit_wheel_torque(tau, state.wheel_speeds, params.wheel_max_speed)

        throttles = np.zeros(n_thrusters)
        if phase == "burn":
            u = plan.throttle(t - t_ignite)
            alloc = thruster_allocation(n_thrusters * u * params.thruster_max_thrust, (0.0, 0.0),
                                        params.thruster_positions, params.thruster_max_thrust)
            throttles = alloc.throttles
            total = float(alloc.achieved[0])
            if state.mass - total * h / (params.isp * G0) < params.dry_mass:
                traj.propellant_exhausted = True
                traj.events.append(f"t={t:.6f}: propellant exhausted, burn truncated")
                continue
        total = float(throttles.sum() * params.thruster_max_thrust)
        controls = Controls(
            wheel_torque=tau,
            thrust_body=np.array([0.0, 0.0, total]),
            thrust_torque=(thrust_torque(throttles, params.thruster_positions, params.thruster_max_thrust)
                           if total > 0 else np.zeros(3)),
        )
        new = step_rk4(state, controls, params, h)

        if grounded:
            if altitude(new) <= 0.0:
                new = new.copy(position=state.position.copy(), velocity=np.zeros(3))
            else:
                grounded = False
                traj.liftoff_time = t + h
                traj.events.append(f"t={t + h:.6f}: liftoff")
        elif altitude(new) <= plan.coast_termination and new.velocity[2] < 0:
            above = altitude(state) - plan.coast_termination
            below = altitude(new) - plan.coast_termination
            frac = above / (above - below) if above > below else 1.0
            t_hit = t + frac * h
            traj.append(t_hit, _lerp_state(state, new, frac), total, tau, throttles)
            traj.touchdown_time = t_hit
            traj.events.append(f"t={t_hit:.6f}: touchdown")
            return traj

        t += h
        state = new
        traj.append(t, state, total, tau, throttles)
    return traj


def simulate_attitude(initial, target_attitude, params, duration, dt=1e-3, target_rates=None):
    """Run the PD wheel loop alone (thrusters off) for ``duration`` seconds."""
    plan = HopPlan(burn_duration=0.0, target_attitude=target_attitude,
                   slew_duration=duration,
                   target_rates=np.zeros(3) if target_rates is None else target_rates)
    return simulate_hop(initial, plan, params, dt=dt)
