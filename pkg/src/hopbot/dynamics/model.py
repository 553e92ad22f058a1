"""Robot state, vehicle parameters and the coupled equations of motion."""

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .._validation import check_matrix, check_vector, raise_if
from ..errors import NumericalError, ValidationError
from ..propulsion.nozzle import G0
from .rotations import normalize, quat_to_dcm, quat_to_euler

STATE_SIZE = 17
_SLICES = {
    "position": slice(0, 3),
    "velocity": slice(3, 6),
    "attitude": slice(6, 10),
    "body_rates": slice(10, 13),
    "wheel_speeds": slice(13, 16),
    "mass": slice(16, 17),
}


@dataclass
class RobotState:
    """Kinematic and dynamic state of one robot.

    ``attitude`` is a unit quaternion ``[w, x, y, z]`` (body to inertial),
    ``body_rates`` are in the body frame and ``wheel_speeds`` are the spin
    rates of the three orthogonal wheels relative to the body.
    """

    position: np.ndarray = field(default_factory=lambda: np.zeros(3))
    velocity: np.ndarray = field(default_factory=lambda: np.zeros(3))
    attitude: np.ndarray = field(default_factory=lambda: np.array([1.0, 0.0, 0.0, 0.0]))
    body_rates: np.ndarray = field(default_factory=lambda: np.zeros(3))
    wheel_speeds: np.ndarray = field(default_factory=lambda: np.zeros(3))
    mass: float = 3.0

    def __post_init__(self):
        self.position = check_vector(self.position, "position", 3)
        self.velocity = check_vector(self.velocity, "velocity", 3)
        self.body_rates = check_vector(self.body_rates, "body_rates", 3)
        self.wheel_speeds = check_vector(self.wheel_speeds, "wheel_speeds", 3)
        q = check_vector(self.attitude, "attitude", 4)
        if abs(np.linalg.norm(q) - 1.0) > 1e-6:
            raise ValidationError(f"attitude must be a unit quaternion, |q| = {np.linalg.norm(q)!r}")
        self.attitude = normalize(q)
        self.mass = float(self.mass)
        if not self.mass > 0:
            raise ValidationError(f"mass must be > 0, got {self.mass!r}")

    @property
    def euler(self):
        return quat_to_euler(self.attitude)

    def to_vector(self):
        return np.concatenate([self.position, self.velocity, self.attitude,
                               self.body_rates, self.wheel_speeds, [self.mass]])

    @classmethod
    def from_vector(cls, y):
        y = np.asarray(y, dtype=float)
        if not np.isfinite(y).all():
            bad = next(name for name, sl in _SLICES.items() if not np.isfinite(y[sl]).all())
            raise NumericalError(bad)
        # fields are already checked; skip __post_init__ on this hot path
        state = object.__new__(cls)
        state.position = y[0:3].copy()
        state.velocity = y[3:6].copy()
        state.attitude = normalize(y[6:10])
        state.body_rates = y[10:13].copy()
        state.wheel_speeds = y[13:16].copy()
        state.mass = float(y[16])
        if not state.mass > 0:
            raise NumericalError("mass", f"mass became non-positive ({state.mass!r} kg)")
        return state

    def copy(self, **changes):
        return replace(self, **changes)


def _default_thrusters():
    r, z = 0.1, -0.1
    return np.array([[r, 0.0, z], [-r, 0.0, z], [0.0, r, z], [0.0, -r, z]])


@dataclass
class VehicleParams:
    """Mass properties, actuator limits and controller gains.

    Defaults describe a 3 kg, 0.15 m radius sphere with four 5 N thrusters
    and three small reaction wheels. The wheel spin inertia is counted
    inside ``body_inertia``; ``wheel_axial_inertia`` sets how relative wheel
    speed maps to stored momentum.
    """

    body_inertia: np.ndarray = field(default_factory=lambda: np.diag([0.027, 0.027, 0.027]))
    wheel_axial_inertia: float = 2e-5  # kg m^2
    wheel_max_torque: float = 5e-3  # N m
    wheel_max_speed: float = 1000.0  # rad/s
    thruster_positions: np.ndarray = field(default_factory=_default_thrusters)
    thruster_max_thrust: float = 5.0  # N, each
    gravity: float = 3.71  # m/s^2
    kp: np.ndarray = field(default_factory=lambda: np.full(3, 0.05))
    kd: np.ndarray = field(default_factory=lambda: np.full(3, 0.1))
    isp: float = 333.0  # s
    dry_mass: float = 1.905  # kg

    def __post_init__(self):
        raise_if(self.problems())
        self.body_inertia = np.asarray(self.body_inertia, dtype=float)
        self.thruster_positions = np.asarray(self.thruster_positions, dtype=float)
        self.kp = np.broadcast_to(np.asarray(self.kp, dtype=float), (3,)).copy()
        self.kd = np.broadcast_to(np.asarray(self.kd, dtype=float), (3,)).copy()
        self._inertia_inv = np.linalg.inv(self.body_inertia)
        self._inertia_list = self.body_inertia.tolist()
        self._inertia_inv_list = self._inertia_inv.tolist()

    def problems(self):
        out = []
        try:
            J = check_matrix(self.body_inertia, "body_inertia", (3, 3))
            if not np.allclose(J, J.T):
                out.append("body_inertia must be symmetric")
            elif np.linalg.eigvalsh(J).min() <= 0:
                out.append("body_inertia must be positive definite")
        except ValidationError as exc:
            out.extend(exc.problems)
        try:
            check_matrix(self.thruster_positions, "thruster_positions", (4, 3))
        except ValidationError as exc:
            out.extend(exc.problems)
        for name in ("wheel_axial_inertia", "wheel_max_torque", "wheel_max_speed",
                     "thruster_max_thrust", "gravity", "isp", "dry_mass"):
            value = getattr(self, name)
            if not (np.isfinite(value) and value > 0):
                out.append(f"{name} must be > 0, got {value!r}")
        for name in ("kp", "kd"):
            gains = np.broadcast_to(np.asarray(getattr(self, name), dtype=float), (3,))
            if not (np.all(np.isfinite(gains)) and np.all(gains > 0)):
                out.append(f"{name} gains must be > 0, got {gains.tolist()}")
        return out

    def total_angular_momentum(self, state):
        """Inertial-frame angular momentum of body plus wheels."""
        h_body = self.body_inertia @ state.body_rates + self.wheel_axial_inertia * state.wheel_speeds
        return quat_to_dcm(state.attitude) @ h_body

    def mechanical_energy(self, state):
        """Translational kinetic plus gravitational potential energy."""
        v = state.velocity
        return 0.5 * state.mass * float(v @ v) + state.mass * self.gravity * state.position[2]


def state_derivative(state, wheel_torque, thrust_body, params, thrust_torque=None):
    """Time derivative of ``state`` under constant actuator inputs.

    Args:
        state: Current :class:`RobotState`.
        wheel_torque: Motor torque applied to the wheels (body axes), N m.
            The body feels the opposite torque.
        thrust_body: Net thruster force in body axes, N.
        params: :class:`VehicleParams`.
        thrust_torque: Body torque from differential throttling, N m.

    Returns:
        A :class:`RobotState`-shaped derivative packed as a length-17 vector.
    """
    return _derivative(state.to_vector(), np.asarray(wheel_torque, dtype=float),
                       np.asarray(thrust_body, dtype=float),
                       np.zeros(3) if thrust_torque is None else np.asarray(thrust_torque, dtype=float),
                       params)


def _derivative(y, wheel_torque, thrust_body, thrust_torque, params):
    # scalar arithmetic: this runs four times per RK4 step
    vx, vy, vz, qw, qx, qy, qz, wx, wy, wz, s1, s2, s3, m = y[3:17].tolist()
    fx, fy, fz = thrust_body.tolist()
    t1, t2, t3 = wheel_torque.tolist()
    J = params._inertia_list
    Ji = params._inertia_inv_list
    iw = params.wheel_axial_inertia

    # body -> inertial rotation of the thrust vector
    ax = ((1 - 2 * (qy * qy + qz * qz)) * fx + 2 * (qx * qy - qw * qz) * fy
          + 2 * (qx * qz + qw * qy) * fz) / m
    ay = (2 * (qx * qy + qw * qz) * fx + (1 - 2 * (qx * qx + qz * qz)) * fy
          + 2 * (qy * qz - qw * qx) * fz) / m
    az = (2 * (qx * qz - qw * qy) * fx + 2 * (qy * qz + qw * qx) * fy
          + (1 - 2 * (qx * qx + qy * qy)) * fz) / m - params.gravity

    hx = J[0][0] * wx + J[0][1] * wy + J[0][2] * wz + iw * s1
    hy = J[1][0] * wx + J[1][1] * wy + J[1][2] * wz + iw * s2
    hz = J[2][0] * wx + J[2][1] * wy + J[2][2] * wz + iw * s3
    mx = thrust_torque[0] - t1 - (wy * hz - wz * hy)
    my = thrust_torque[1] - t2 - (wz * hx - wx * hz)
    mz = thrust_torque[2] - t3 - (wx * hy - wy * hx)

    m_dot = -math.sqrt(fx * fx + fy * fy + fz * fz) / (params.isp * G0)
    return np.array([
        vx, vy, vz, ax, ay, az,
        0.5 * (-qx * wx - qy * wy - qz * wz),
        0.5 * (qw * wx + qy * wz - qz * wy),
        0.5 * (qw * wy - qx * wz + qz * wx),
        0.5 * (qw * wz + qx * wy - qy * wx),
        Ji[0][0] * mx + Ji[0][1] * my + Ji[0][2] * mz,
        Ji[1][0] * mx + Ji[1][1] * my + Ji[1][2] * mz,
        Ji[2][0] * mx + Ji[2][1] * my + Ji[2][2] * mz,
        t1 / iw, t2 / iw, t3 / iw,
        m_dot,
    ])


@dataclass
class Controls:
    """Actuator inputs held constant over one integration step."""

    wheel_torque: np.ndarray = field(default_factory=lambda: np.zeros(3))
    thrust_body: np.ndarray = field(default_factory=lambda: np.zeros(3))
    thrust_torque: np.ndarray = field(default_factory=lambda: np.zeros(3))


def step_rk4(state, controls, params, dt):
    """Advance ``state`` by one classical RK4 step of length ``dt``.

    The quaternion is renormalized afterwards and wheel speeds are clipped
    to ``params.wheel_max_speed``.

    Raises:
        ValidationError: if ``dt`` is not positive.
        NumericalError: if any field becomes NaN or infinite; the message
            names the field.
    """
    if not dt > 0:
        raise ValidationError(f"dt must be > 0, got {dt!r}")
    y = state.to_vector()
    tau = np.asarray(controls.wheel_torque, dtype=float)
    thrust = np.asarray(controls.thrust_body, dtype=float)
    torque = np.asarray(controls.thrust_torque, dtype=float)

    k1 = _derivative(y, tau, thrust, torque, params)
    k2 = _derivative(y + 0.5 * dt * k1, tau, thrust, torque, params)
    k3 = _derivative(y + 0.5 * dt * k2, tau, thrust, torque, params)
    k4 = _derivative(y + dt * k3, tau, thrust, torque, params)
    y_next = y + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)

    limit = params.wheel_max_speed
    np.clip(y_next[13:16], -limit, limit, out=y_next[13:16])
    return RobotState.from_vector(y_next)
