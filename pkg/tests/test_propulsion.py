import math

import numpy as np
import pytest

import oracles
from hopbot.errors import StepSizeError, ValidationError
from hopbot.propulsion import (
    G0,
    PropellantSpec,
    SolidMotorSpec,
    critical_pressure_ratio,
    delta_v,
    exit_pressure_ratio,
    expansion_ratio,
    get_propellant,
    hover_flight_time,
    ideal_isp,
    load_propellants,
    propellant_for_hover,
    simulate_solid_burn,
    thrust_coefficient,
)

# Frozen from tests/oracles.py (enthalpy-drop route and closed-form grain regression).
FROZEN_CF_1P2_3EM4 = 1.93423176412681
FROZEN_EPS_1P2_3EM4 = 187.5363616067737
FROZEN_BURN_RATE_COEFF = 1.63470894418441e-4
FROZEN_BURNOUT_TIME = 0.6498697649856319


def test_database_has_expected_rows():
    props = load_propellants()
    cats = [p.category for p in props]
    assert cats.count("solid") == 4
    assert cats.count("bipropellant") == 3
    assert cats.count("monopropellant") == 3
    assert all(p.gamma == 1.2 for p in props)


@pytest.mark.parametrize("prop", load_propellants(), ids=lambda p: p.name)
def test_ideal_isp_matches_enthalpy_oracle(prop):
    got = ideal_isp(prop, 2e6, 600.0)
    want = oracles.isp_via_enthalpy(prop.molecular_weight, prop.combustion_temperature,
                                    prop.gamma, 2e6, 600.0)
    assert got == pytest.approx(want, rel=1e-12)


def test_kerosene_peroxide_isp_near_published():
    prop = get_propellant("Kerosene/H2O2")
    assert ideal_isp(prop, 2e6, 600.0) == pytest.approx(333.0, rel=0.10)


def test_isp_rejects_exit_pressure_at_or_above_chamber():
    prop = get_propellant("H2O2")
    with pytest.raises(ValidationError):
        ideal_isp(prop, 2e6, 2e6)
    with pytest.raises(ValidationError):
        ideal_isp(prop, 2e6, 3e6)


def test_isp_increases_with_temperature_and_falls_with_molar_mass():
    base = PropellantSpec("x", 22.0, 3000.0)
    hotter = PropellantSpec("x", 22.0, 3300.0)
    heavier = PropellantSpec("x", 25.0, 3000.0)
    isp = ideal_isp(base, 2e6, 600.0)
    assert ideal_isp(hotter, 2e6, 600.0) > isp
    assert ideal_isp(heavier, 2e6, 600.0) < isp


def test_non_physical_propellant_is_rejected():
    with pytest.raises(ValidationError):
        PropellantSpec("bad", -1.0, 3000.0)
    with pytest.raises(ValidationError):
        PropellantSpec("bad", 20.0, 3000.0, gamma=1.0)


def test_thrust_coefficient_against_momentum_oracle():
    cf = thrust_coefficient(1.2, 3e-4, 3e-4, FROZEN_EPS_1P2_3EM4)
    assert cf == pytest.approx(FROZEN_CF_1P2_3EM4, rel=1e-9)
    assert expansion_ratio(1.2, 3e-4) == pytest.approx(FROZEN_EPS_1P2_3EM4, rel=1e-9)


@pytest.mark.parametrize("gamma", [1.15, 1.2, 1.3, 1.4])
@pytest.mark.parametrize("pr", [1e-4, 1e-3, 0.01, 0.1])
def test_thrust_coefficient_matches_oracle_over_range(gamma, pr):
    want, eps = oracles.thrust_coefficient_via_momentum(gamma, pr, 0.5 * pr)
    assert thrust_coefficient(gamma, pr, 0.5 * pr, eps) == pytest.approx(want, rel=1e-9)


def test_exit_pressure_ratio_inverts_area_ratio():
    for eps in (1.5, 4.0, 9.0, 50.0, 200.0):
        pr = exit_pressure_ratio(1.2, eps)
        assert expansion_ratio(1.2, pr) == pytest.approx(eps, rel=1e-9)


def test_unit_area_ratio_is_sonic_throat():
    g = 1.2
    assert exit_pressure_ratio(g, 1.0) == pytest.approx(critical_pressure_ratio(g))
    gamma_fn = math.sqrt(g) * (2 / (g + 1)) ** ((g + 1) / (2 * (g - 1)))
    cf = thrust_coefficient(g, critical_pressure_ratio(g), 0.0, 1.0)
    # sonic exit: momentum term plus the exit pressure term
    want = gamma_fn * math.sqrt(2 * g / (g + 1)) + critical_pressure_ratio(g)
    assert cf == pytest.approx(want, rel=1e-12)


def test_thrust_coefficient_validation_lists_all_problems():
    with pytest.raises(ValidationError) as info:
        thrust_coefficient(1.2, 0.9, 1.5, 0.5)
    assert len(info.value.problems) == 3


def test_delta_v_and_hover_time():
    assert delta_v(300.0, 3.0, 3.0) == 0.0
    dv = delta_v(300.0, 3.0, 2.0)
    assert dv == pytest.approx(300.0 * G0 * math.log(1.5))
    assert hover_flight_time(300.0, 3.0, 1.0) == pytest.approx(dv / 3.71)
    assert hover_flight_time(300.0, 3.0, 0.0) == 0.0


def test_hover_time_round_trip():
    t = hover_flight_time(333.0, 3.0, 1.095)
    assert propellant_for_hover(333.0, 3.0, t) == pytest.approx(1.095, rel=1e-12)


def test_hover_time_rejects_all_propellant():
    with pytest.raises(ValidationError):
        hover_flight_time(300.0, 3.0, 3.0)
    with pytest.raises(ValidationError):
        delta_v(300.0, 2.0, 3.0)


def test_reference_pellet_calibration():
    motor = SolidMotorSpec.reference_pellet()
    assert motor.burn_rate_coefficient == pytest.approx(FROZEN_BURN_RATE_COEFF, rel=1e-12)
    assert motor.chamber_pressure(motor.grain_inner_radius) == pytest.approx(2e6, rel=1e-12)
    assert motor.expansion_ratio == pytest.approx(9.0)


def test_solid_burn_against_closed_form():
    motor = SolidMotorSpec.reference_pellet()
    prof = simulate_solid_burn(motor, 1e-4)
    assert prof.burnout_time == pytest.approx(FROZEN_BURNOUT_TIME, rel=1e-8)
    args = (motor.grain_length, motor.throat_radius, motor.propellant_density,
            motor.burn_rate_coefficient, motor.burn_rate_exponent, motor.characteristic_velocity)
    r = prof.web_burned[:-1] + motor.grain_inner_radius
    want = np.array([oracles.solid_pressure(x, *args) for x in r])
    np.testing.assert_allclose(prof.chamber_pressure[:-1], want, rtol=1e-12)


def test_solid_burn_mass_balance_and_shape():
    motor = SolidMotorSpec.reference_pellet()
    prof = simulate_solid_burn(motor, 1e-4)
    assert abs(prof.integrated_mass_flow() - motor.propellant_mass) / motor.propellant_mass < 5e-3
    assert np.all(np.diff(prof.chamber_pressure[:-1]) > 0)
    assert prof.chamber_pressure[-1] == motor.ambient_pressure
    assert prof.thrust[-1] == 0.0
    assert prof.t[-1] == prof.t[-2] == prof.burnout_time
    assert prof.propellant_mass_remaining[-1] == pytest.approx(0.0, abs=1e-15)


def test_solid_burn_rejects_coarse_step():
    with pytest.raises(StepSizeError):
        simulate_solid_burn(SolidMotorSpec.reference_pellet(), 0.05)


def test_degenerate_grain_gives_single_sample():
    motor = SolidMotorSpec.reference_pellet(grain_inner_radius=0.018)
    prof = simulate_solid_burn(motor, 1e-4)
    assert len(prof) == 1
    assert prof.burnout_time == 0.0
    assert prof.integrated_mass_flow() == 0.0


def test_inverted_grain_is_rejected():
    with pytest.raises(ValidationError, match="grain_inner_radius"):
        SolidMotorSpec.reference_pellet(grain_inner_radius=0.02)


def test_burn_csv(tmp_path):
    prof = simulate_solid_burn(SolidMotorSpec.reference_pellet(), 1e-3)
    path = tmp_path / "burn.csv"
    prof.to_csv(path)
    lines = path.read_text().splitlines()
    assert lines[0] == "t,chamber_pressure,thrust,isp,web_burned,propellant_mass_remaining,mass_flow"
    assert len(lines) == len(prof) + 1
