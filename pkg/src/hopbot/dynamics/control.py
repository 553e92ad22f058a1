"""Attitude PD law and thruster allocation."""

from dataclasses import dataclass

import numpy as np
from scipy.optimize import lsq_linear

from .._validation import check_finite, check_vector
from ..errors import ValidationError
from .rotations import wrap_angle


def pd_attitude_torque(e_des, e_act, w_des, w_act, kp, kd, max_torque=None):
    """Reaction-wheel torque command from attitude and rate errors.

    ``tau = -kp * (e_des - e_act) - kd * (w_des - w_act)``, per axis. This is
    the torque the motors apply to the wheels; the body receives ``-tau``,
    which drives ``e_act`` toward ``e_des`` for positive gains. Angle errors
    are wrapped to [-pi, pi). With ``max_torque`` the result is clipped
    per axis.
    """
    e_des = check_vector(e_des, "e_des", 3)
    e_act = check_vector(e_act, "e_act", 3)
    w_des = check_vector(w_des, "w_des", 3)
    w_act = check_vector(w_act, "w_act", 3)
    kp = np.broadcast_to(np.asarray(kp, dtype=float), (3,))
    kd = np.broadcast_to(np.asarray(kd, dtype=float), (3,))
    if np.any(kp <= 0) or np.any(kd <= 0):
        raise ValidationError("PD gains must be > 0")
    return _pd(e_des, e_act, w_des, w_act, kp, kd, max_torque)


def _pd(e_des, e_act, w_des, w_act, kp, kd, max_torque=None):
    tau = -kp * wrap_angle(e_des - e_act) - kd * (w_des - w_act)
    if max_torque is not None:
        tau = np.clip(tau, -max_torque, max_torque)
    return tau


def limit_wheel_torque(tau, wheel_speeds, max_speed):
    """Zero the torque on any wheel already at its speed limit and being
    pushed further."""
    tau = np.array(tau, dtype=float)
    at_limit = np.abs(wheel_speeds) >= max_speed
    pushing = np.sign(tau) == np.sign(wheel_speeds)
    tau[at_limit & pushing] = 0.0
    return tau


@dataclass
class Allocation:
    """Thruster throttles plus the wrench they actually produce.

    ``achieved`` is ``(total thrust, torque x, torque y)``. ``saturated`` is
    set when the request could not be met inside [0, 1] throttle bounds, in
    which case ``achieved`` is the closest feasible wrench.
    """

    throttles: np.ndarray
    achieved: np.ndarray
    requested: np.ndarray
    saturated: bool


def allocation_matrix(thruster_positions, max_thrust):
    """Map from four throttles to (thrust, torque x, torque y).

    Every thruster pushes along body +z, so thruster ``i`` at ``(x, y, z)``
    contributes torque ``(y F, -x F, 0)``.
    """
    pos = np.asarray(thruster_positions, dtype=float)
    return max_thrust * np.vstack([np.ones(len(pos)), pos[:, 1], -pos[:, 0]])


def thruster_allocation(total_thrust, body_torque, thruster_positions, max_thrust):
    """Throttle levels that realize a thrust and an (x, y) body torque.

    The minimum-norm solution of the 3x4 allocation is used when it lies
    inside [0, 1]; otherwise a bounded least-squares solve returns the
    closest achievable wrench and the result is flagged ``saturated``.
    """
    total_thrust = check_finite(total_thrust, "total_thrust")
    body_torque = check_vector(body_torque, "body_torque", 2)
    B = allocation_matrix(thruster_positions, max_thrust)
    wrench = np.array([total_thrust, body_torque[0], body_torque[1]])
    if total_thrust == 0.0 and not body_torque.any():
        u = np.zeros(B.shape[1])
        return Allocation(u, B @ u, wrench, False)

    u = np.linalg.pinv(B) @ wrench
    tol = 1e-12
    if np.all(u >= -tol) and np.all(u <= 1 + tol):
        u = np.clip(u, 0.0, 1.0)
        return Allocation(u, B @ u, wrench, not np.allclose(B @ u, wrench, rtol=0, atol=1e-9))

    u = lsq_linear(B, wrench, bounds=(0.0, 1.0), method="bvls", tol=1e-14).x
    return Allocation(u, B @ u, wrench, True)


def thrust_torque(throttles, thruster_positions, max_thrust):
    """Body torque (3-vector) produced by the given throttles."""
    _, tx, ty = allocation_matrix(thruster_positions, max_thrust) @ np.asarray(throttles, dtype=float)
    return np.array([tx, ty, 0.0])
