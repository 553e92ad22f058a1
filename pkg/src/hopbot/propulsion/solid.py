"""Quasi-steady internal ballistics of an internal-burning cylindrical grain."""

import csv
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .._validation import check_positive, raise_if
from ..errors import StepSizeError
from .nozzle import G0, exit_pressure_ratio, thrust_coefficient

# AP/PU composite defaults, see SolidMotorSpec.reference_pellet
DEFAULT_DENSITY = 1750.0  # kg/m^3
DEFAULT_BURN_EXPONENT = 0.3
DEFAULT_CSTAR = 1500.0  # m/s
DEFAULT_AMBIENT = 600.0  # Pa
DEFAULT_START_PRESSURE = 2.0e6  # Pa

# largest fraction of the web allowed to burn in one step
MAX_WEB_FRACTION_PER_STEP = 0.01


@dataclass(frozen=True)
class SolidMotorSpec:
    """Grain, nozzle and propellant parameters of a solid pellet.

    The outer surface and both end faces are inhibited, so only the bore
    burns and the burning area ``2 pi r L`` grows as the bore opens up.
    ``burn_rate_coefficient`` is ``a`` in ``rdot = a * p_c**n`` (SI units).
    """

    grain_inner_radius: float
    grain_outer_radius: float
    grain_length: float
    throat_radius: float
    nozzle_exit_radius: float
    propellant_density: float = DEFAULT_DENSITY
    burn_rate_coefficient: float = 1.0e-4
    burn_rate_exponent: float = DEFAULT_BURN_EXPONENT
    characteristic_velocity: float = DEFAULT_CSTAR
    ambient_pressure: float = DEFAULT_AMBIENT
    gamma: float = 1.2

    def __post_init__(self):
        self.validate()

    def problems(self):
        out = []
        for name, value in asdict(self).items():
            if not (isinstance(value, (int, float)) and math.isfinite(value)):
                out.append(f"{name} must be a finite number, got {value!r}")
        if out:
            return out
        for name in ("grain_length", "throat_radius", "nozzle_exit_radius",
                     "propellant_density", "burn_rate_coefficient",
                     "characteristic_velocity", "grain_inner_radius"):
            if getattr(self, name) <= 0:
                out.append(f"{name} must be > 0, got {getattr(self, name)!r}")
        if self.ambient_pressure < 0:
            out.append(f"ambient_pressure must be >= 0, got {self.ambient_pressure!r}")
        # r_i == r_o is tolerated as an already-burnt-out grain
        if self.grain_inner_radius > self.grain_outer_radius:
            out.append(
                f"grain_inner_radius ({self.grain_inner_radius!r}) must not exceed "
                f"grain_outer_radius ({self.grain_outer_radius!r})"
            )
        if self.throat_radius >= self.nozzle_exit_radius:
            out.append(
                f"throat_radius ({self.throat_radius!r}) must be smaller than "
                f"nozzle_exit_radius ({self.nozzle_exit_radius!r})"
            )
        if not 0.0 < self.burn_rate_exponent < 1.0:
            out.append(f"burn_rate_exponent must lie in (0, 1), got {self.burn_rate_exponent!r}")
        if not 1.0 < self.gamma < 2.0:
            out.append(f"gamma must lie in (1, 2), got {self.gamma!r}")
        return out

    def validate(self):
        raise_if(self.problems())

    @property
    def throat_area(self):
        return math.pi * self.throat_radius ** 2

    @property
    def expansion_ratio(self):
        return (self.nozzle_exit_radius / self.throat_radius) ** 2

    @property
    def web_thickness(self):
        return self.grain_outer_radius - self.grain_inner_radius

    @property
    def propellant_mass(self):
        return (self.propellant_density * math.pi * self.grain_length
                * (self.grain_outer_radius ** 2 - self.grain_inner_radius ** 2))

    def burn_area(self, bore_radius):
        return 2.0 * math.pi * bore_radius * self.grain_length

    def chamber_pressure(self, bore_radius):
        """Equilibrium chamber pressure for the given bore radius, floored at ambient."""
        n = self.burn_rate_exponent
        kn = self.burn_area(bore_radius) / self.throat_area
        pc = (self.propellant_density * self.burn_rate_coefficient
              * self.characteristic_velocity * kn) ** (1.0 / (1.0 - n))
        return max(pc, self.ambient_pressure)

    def burn_rate(self, pressure):
        return self.burn_rate_coefficient * pressure ** self.burn_rate_exponent

    @classmethod
    def calibrated(cls, start_pressure=DEFAULT_START_PRESSURE, **kwargs):
        """Build a motor whose burn-rate coefficient gives ``start_pressure``
        at ignition. All other fields are passed through."""
        kwargs.pop("burn_rate_coefficient", None)
        probe = cls(**kwargs, burn_rate_coefficient=1.0)
        n = probe.burn_rate_exponent
        kn = probe.burn_area(probe.grain_inner_radius) / probe.throat_area
        a = start_pressure ** (1.0 - n) / (
            probe.propellant_density * probe.characteristic_velocity * kn)
        return cls(**kwargs, burn_rate_coefficient=a)

    @classmethod
    def reference_pellet(cls, **overrides):
        """8/18 mm bore/outer radius, 15 mm long, 2 mm throat, 600 Pa ambient.

        Exit radius (6 mm), density, exponent and c* are assumed values for
        an 80/20 AP/PU composite; ``a`` is calibrated to 2 MPa at ignition.
        """
        params = dict(
            grain_inner_radius=0.008,
            grain_outer_radius=0.018,
            grain_length=0.015,
            throat_radius=0.002,
            nozzle_exit_radius=0.006,
            propellant_density=DEFAULT_DENSITY,
            burn_rate_exponent=DEFAULT_BURN_EXPONENT,
            characteristic_velocity=DEFAULT_CSTAR,
            ambient_pressure=DEFAULT_AMBIENT,
        )
        start_pressure = overrides.pop("start_pressure", DEFAULT_START_PRESSURE)
        params.update(overrides)
        return cls.calibrated(start_pressure=start_pressure, **params)


@dataclass
class BurnProfile:
    """Sampled burn history. All arrays share one time base."""

    t: np.ndarray
    chamber_pressure: np.ndarray
    thrust: np.ndarray
    isp: np.ndarray
    web_burned: np.ndarray
    propellant_mass_remaining: np.ndarray
    mass_flow: np.ndarray
    burnout_time: float = 0.0
    columns: tuple = field(default=("t", "chamber_pressure", "thrust", "isp", "web_burned",
                                    "propellant_mass_remaining", "mass_flow"), repr=False)

    def __len__(self):
        return len(self.t)

    def integrated_mass_flow(self):
        """Propellant consumed according to the mass-flow history (trapezoid rule)."""
        return float(np.trapezoid(self.mass_flow, self.t))

    def total_impulse(self):
        return float(np.trapezoid(self.thrust, self.t))

    def rows(self):
        return zip(*(getattr(self, c) for c in self.columns))

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(self.columns)
            for row in self.rows():
                writer.writerow([repr(float(v)) for v in row])


def _sample(motor, bore_radius, pe_ratio):
    pc = motor.chamber_pressure(bore_radius)
    pa = motor.ambient_pressure
    if pc <= pa:
        return pc, 0.0, 0.0, 0.0
    cf = thrust_coefficient(motor.gamma, pe_ratio, pa / pc, motor.expansion_ratio)
    thrust = max(cf, 0.0) * pc * motor.throat_area
    mdot = motor.propellant_density * motor.burn_area(bore_radius) * motor.burn_rate(pc)
    isp = thrust / (mdot * G0) if mdot > 0 else 0.0
    return pc, thrust, isp, mdot


def simulate_solid_burn(motor, dt):
    """Integrate bore regression from ignition to web burnout.

    The bore radius is advanced with classical RK4 on ``dr/dt = a p_c(r)^n``.
    The final step is shortened so the last burning sample sits exactly at
    the outer radius; a second sample at the same instant records the drop
    to ambient pressure and zero thrust.

    Raises:
        StepSizeError: if ``dt`` would burn 1% of the web or more in a
            single step at the peak burn rate.
    """
    motor.validate()
    dt = check_positive(dt, "dt")
    r0, r_out = motor.grain_inner_radius, motor.grain_outer_radius
    rho, length = motor.propellant_density, motor.grain_length
    pe_ratio = exit_pressure_ratio(motor.gamma, motor.expansion_ratio)
    web = motor.web_thickness

    def remaining(r):
        return rho * math.pi * length * (r_out ** 2 - r ** 2)

    samples = []

    def record(t, r, burning=True):
        if burning:
            pc, thrust, isp, mdot = _sample(motor, r, pe_ratio)
        else:
            pc, thrust, isp, mdot = motor.ambient_pressure, 0.0, 0.0, 0.0
        samples.append((t, pc, thrust, isp, r - r0, max(remaining(r), 0.0), mdot))

    if web <= 0.0:
        record(0.0, r0, burning=False)
        return _profile(samples, 0.0)

    peak_rate = motor.burn_rate(motor.chamber_pressure(r_out))
    if peak_rate * dt >= MAX_WEB_FRACTION_PER_STEP * web:
        raise StepSizeError(
            f"dt={dt!r} s burns {peak_rate * dt / web:.2%} of the web per step at peak "
            f"burn rate; need < {MAX_WEB_FRACTION_PER_STEP:.0%} "
            f"(dt < {MAX_WEB_FRACTION_PER_STEP * web / peak_rate:.3g} s)"
        )

    def rate(r):
        return motor.burn_rate(motor.chamber_pressure(min(r, r_out)))

    t, r = 0.0, r0
    record(t, r)
    while True:
        k1 = rate(r)
        k2 = rate(r + 0.5 * dt * k1)
        k3 = rate(r + 0.5 * dt * k2)
        k4 = rate(r + dt * k3)
        r_next = r + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
        if r_next >= r_out:
            frac = (r_out - r) / (r_next - r)
            t += frac * dt
            record(t, r_out)
            record(t, r_out, burning=False)
            return _profile(samples, t)
        t += dt
        r = r_next
        record(t, r)


def _profile(samples, burnout_time):
    cols = np.array(samples, dtype=float).T
    return BurnProfile(*cols, burnout_time=burnout_time)
