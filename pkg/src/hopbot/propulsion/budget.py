"""Rocket-equation budgets: delta-v and continuous-hover endurance."""

import math

from .._validation import check_positive
from ..errors import ValidationError
from .nozzle import G0

MARS_GRAVITY = 3.71  # m/s^2


def delta_v(isp, initial_mass, final_mass):
    """Ideal velocity change ``Isp * g0 * ln(m0 / mf)`` in m/s."""
    isp = check_positive(isp, "isp", allow_zero=True)
    m0 = check_positive(initial_mass, "initial_mass")
    mf = check_positive(final_mass, "final_mass")
    if mf > m0:
        raise ValidationError(
            f"final_mass ({mf!r} kg) must not exceed initial_mass ({m0!r} kg)")
    return isp * G0 * math.log(m0 / mf)


def hover_flight_time(isp, initial_mass, propellant_mass, local_gravity=MARS_GRAVITY):
    """Time a vehicle can hover with thrust equal to its weight.

    Thrust tracks ``m(t) * g`` while mass decays, so the burn lasts
    ``Isp * g0 / g * ln(m0 / (m0 - mp))`` seconds, i.e. the delta-v
    divided by the local gravity.
    """
    m0 = check_positive(initial_mass, "initial_mass")
    mp = check_positive(propellant_mass, "propellant_mass", allow_zero=True)
    g = check_positive(local_gravity, "local_gravity")
    if mp >= m0:
        raise ValidationError(
            f"propellant_mass ({mp!r} kg) must be below initial_mass ({m0!r} kg)")
    return delta_v(isp, m0, m0 - mp) / g


def propellant_for_hover(isp, initial_mass, duration, local_gravity=MARS_GRAVITY):
    """Inverse of :func:`hover_flight_time`: propellant needed to hover ``duration`` s."""
    isp = check_positive(isp, "isp")
    m0 = check_positive(initial_mass, "initial_mass")
    duration = check_positive(duration, "duration", allow_zero=True)
    g = check_positive(local_gravity, "local_gravity")
    return m0 * (1.0 - math.exp(-duration * g / (isp * G0)))
