"""Six-degree-of-freedom hop dynamics with reaction-wheel PD attitude control."""

from .control import (
    Allocation,
    allocation_matrix,
    limit_wheel_torque,
    pd_attitude_torque,
    thrust_torque,
    thruster_allocation,
)
from .hop import CSV_HEADER, HopPlan, Trajectory, flat_terrain, simulate_attitude, simulate_hop
from .model import Controls, RobotState, VehicleParams, state_derivative, step_rk4
from .rotations import euler_to_quat, quat_to_dcm, quat_to_euler

__all__ = [
    "CSV_HEADER",
    "Allocation",
    "Controls",
    "HopPlan",
    "RobotState",
    "Trajectory",
    "VehicleParams",
    "allocation_matrix",
    "euler_to_quat",
    "flat_terrain",
    "limit_wheel_torque",
    "pd_attitude_torque",
    "quat_to_dcm",
    "quat_to_euler",
    "simulate_attitude",
    "simulate_hop",
    "state_derivative",
    "step_rk4",
    "thrust_torque",
    "thruster_allocation",
]
