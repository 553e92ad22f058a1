"""Ideal-rocket nozzle relations.

Frozen, isentropic, one-dimensional flow of a calorically perfect gas. These
are the textbook closed forms; no chemistry and no loss factors.
"""

import math

from scipy.optimize import brentq

from .._validation import check_finite, check_positive, raise_if
from ..errors import ValidationError

G0 = 9.80665  # m/s^2
R_UNIVERSAL = 8314.0  # J/(kmol K)


def _check_gamma(gamma):
    gamma = check_finite(gamma, "gamma")
    if not 1.0 < gamma < 2.0:
        raise ValidationError(f"gamma must lie in (1, 2), got {gamma!r}")
    return gamma


def vandenkerckhove(gamma):
    """Return the flow function Gamma(gamma) used in choked mass flow."""
    gamma = _check_gamma(gamma)
    return math.sqrt(gamma) * (2.0 / (gamma + 1.0)) ** ((gamma + 1.0) / (2.0 * (gamma - 1.0)))


def critical_pressure_ratio(gamma):
    """Static-to-chamber pressure ratio at a sonic throat."""
    gamma = _check_gamma(gamma)
    return (2.0 / (gamma + 1.0)) ** (gamma / (gamma - 1.0))


def characteristic_velocity(molecular_weight, combustion_temperature, gamma):
    """Ideal c* in m/s from the gas constant, chamber temperature and gamma."""
    molecular_weight = check_positive(molecular_weight, "molecular_weight")
    combustion_temperature = check_positive(combustion_temperature, "combustion_temperature")
    r_specific = R_UNIVERSAL / molecular_weight
    return math.sqrt(r_specific * combustion_temperature) / vandenkerckhove(gamma)


def ideal_isp(prop, chamber_pressure, exit_pressure):
    """Specific impulse of an ideally expanded nozzle.

    Args:
        prop: A :class:`~hopbot.propulsion.PropellantSpec`.
        chamber_pressure: Stagnation pressure in Pa.
        exit_pressure: Nozzle exit static pressure in Pa.

    Returns:
        Isp in seconds (exhaust velocity over standard gravity).

    Raises:
        ValidationError: if ``0 < exit_pressure < chamber_pressure`` fails or
            the propellant is non-physical.
    """
    prop.validate()
    pc = check_positive(chamber_pressure, "chamber_pressure")
    pe = check_positive(exit_pressure, "exit_pressure")
    if pe >= pc:
        raise ValidationError(
            f"exit_pressure ({pe!r} Pa) must be below chamber_pressure ({pc!r} Pa)"
        )
    g = prop.gamma
    expansion_work = 1.0 - (pe / pc) ** ((g - 1.0) / g)
    v_exit_sq = (2.0 * g / (g - 1.0)) * (R_UNIVERSAL * prop.combustion_temperature
                                         / prop.molecular_weight) * expansion_work
    return math.sqrt(v_exit_sq) / G0


def expansion_ratio(gamma, pressure_ratio):
    """Area ratio A_e/A_t that expands the flow to ``pressure_ratio`` = p_e/p_c."""
    gamma = _check_gamma(gamma)
    pr = check_positive(pressure_ratio, "pressure_ratio")
    crit = critical_pressure_ratio(gamma)
    if pr > crit * (1.0 + 1e-12):
        raise ValidationError(
            f"pressure_ratio {pr!r} exceeds the critical ratio {crit:.6f}; exit would be subsonic"
        )
    pr = min(pr, crit)
    denom = pr ** (1.0 / gamma) * math.sqrt(
        2.0 * gamma / (gamma - 1.0) * (1.0 - pr ** ((gamma - 1.0) / gamma))
    )
    return vandenkerckhove(gamma) / denom


def exit_pressure_ratio(gamma, area_ratio):
    """Supersonic-branch p_e/p_c for a nozzle of area ratio ``area_ratio``."""
    gamma = _check_gamma(gamma)
    area_ratio = check_finite(area_ratio, "expansion_ratio")
    if area_ratio < 1.0:
        raise ValidationError(f"expansion_ratio must be >= 1, got {area_ratio!r}")
    crit = critical_pressure_ratio(gamma)
    if area_ratio == 1.0:
        return crit
    # area ratio falls monotonically as p_e/p_c rises to the critical value;
    # solve in log space so tiny exit pressures keep full relative precision
    lo = math.log(1e-15)
    if expansion_ratio(gamma, math.exp(lo)) < area_ratio:
        raise ValidationError(f"expansion_ratio {area_ratio!r} is beyond the supported range")
    log_p = brentq(lambda lp: expansion_ratio(gamma, math.exp(lp)) - area_ratio,
                   lo, math.log(crit), xtol=1e-14, rtol=1e-14, maxiter=500)
    return math.exp(log_p)


def thrust_coefficient(gamma, pressure_ratio, ambient_ratio, expansion_ratio):
    """Nozzle thrust coefficient C_F, so that F = C_F * p_c * A_t.

    The first term is the momentum thrust, the second the pressure thrust
    ``(p_e - p_a) / p_c * A_e / A_t``.

    Raises:
        ValidationError: for gamma outside (1, 2), a subsonic exit pressure
            ratio, an ambient ratio outside [0, 1) or an area ratio below 1.
    """
    gamma = _check_gamma(gamma)
    pr = check_finite(pressure_ratio, "pressure_ratio")
    ar = check_finite(ambient_ratio, "ambient_ratio")
    eps = check_finite(expansion_ratio, "expansion_ratio")
    crit = critical_pressure_ratio(gamma)
    problems = []
    if not 0.0 < pr <= crit * (1.0 + 1e-12):
        problems.append(
            f"pressure_ratio must lie in (0, {crit:.6f}] for a choked, "
            f"supersonic nozzle, got {pr!r}"
        )
    if not 0.0 <= ar < 1.0:
        problems.append(f"ambient_ratio must lie in [0, 1), got {ar!r}")
    if eps < 1.0:
        problems.append(f"expansion_ratio must be >= 1, got {eps!r}")
    raise_if(problems)

    pr = min(pr, crit)
    momentum = math.sqrt(
        2.0 * gamma ** 2 / (gamma - 1.0)
        * (2.0 / (gamma + 1.0)) ** ((gamma + 1.0) / (gamma - 1.0))
        * (1.0 - pr ** ((gamma - 1.0) / gamma))
    )
    return momentum + (pr - ar) * eps
