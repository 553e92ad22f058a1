"""Rocket performance: ideal Isp, nozzle thrust coefficient, solid-grain
internal ballistics and delta-v / hover budgets."""

from .budget import MARS_GRAVITY, delta_v, hover_flight_time, propellant_for_hover
from .nozzle import (
    G0,
    R_UNIVERSAL,
    characteristic_velocity,
    critical_pressure_ratio,
    exit_pressure_ratio,
    expansion_ratio,
    ideal_isp,
    thrust_coefficient,
    vandenkerckhove,
)
from .propellants import PropellantSpec, get_propellant, load_propellants
from .solid import BurnProfile, SolidMotorSpec, simulate_solid_burn

__all__ = [
    "G0",
    "MARS_GRAVITY",
    "R_UNIVERSAL",
    "BurnProfile",
    "PropellantSpec",
    "SolidMotorSpec",
    "characteristic_velocity",
    "critical_pressure_ratio",
    "delta_v",
    "exit_pressure_ratio",
    "expansion_ratio",
    "get_propellant",
    "hover_flight_time",
    "ideal_isp",
    "load_propellants",
    "propellant_for_hover",
    "simulate_solid_burn",
    "thrust_coefficient",
    "vandenkerckhove",
]
