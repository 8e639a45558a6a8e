"""Emission conversion formulas and coefficient handling."""

import pytest
from hypothesis import given
from hypothesis import strategies as st

from rdemon.emissions import (
    EmissionCoefficients,
    SensorFrame,
    co2_mass_flow,
    exhaust_mass_flow,
    load_coefficients,
    nox_mass_flow,
    per_km,
)


def test_exhaust_from_air_only():
    assert exhaust_mass_flow(5.0, 0.0) == pytest.approx(0.005)


def test_exhaust_from_fuel_only():
    assert exhaust_mass_flow(0.0, 3.6) == pytest.approx(3.6 * 0.832 / 3600)
    assert exhaust_mass_flow(0.0, 3.6) == pytest.approx(0.000832)


def test_exhaust_combined():
    assert exhaust_mass_flow(20.0, 7.2) == pytest.approx(0.021664)


def test_nox_flow_examples():
    assert nox_mass_flow(100.0, 0.02) == pytest.approx(3.174)
    assert nox_mass_flow(0.0, 0.05) == 0.0
    assert nox_mass_flow(250.0, 0.05) == pytest.approx(19.8375)


def test_co2_flow_examples():
    assert co2_mass_flow(3.6) == pytest.approx(3.6 * 0.832 * 3.17 * 1000 / 3600)
    assert co2_mass_flow(0.0) == 0.0
    assert co2_mass_flow(7.2) == pytest.approx(2 * co2_mass_flow(3.6))


def test_per_km_reproduces_drive_average():
    # 35.45*137 + 22.33*305 + 26.10*241 distributed over 83.88 km
    assert per_km(17950.8, 83.88) == pytest.approx(214.0, abs=0.01)
    assert per_km(0.0, 10.0) == 0.0
    assert per_km(1000.0, 0.0) is None


@given(
    st.floats(0, 1e4, allow_nan=False),
    st.floats(0, 1e3, allow_nan=False),
    st.floats(0.1, 10, allow_nan=False),
)
def test_flows_are_homogeneous_of_degree_one(ppm, fuel, k):
    c = EmissionCoefficients()
    assert nox_mass_flow(k * ppm, 0.02, c) == pytest.approx(
        k * nox_mass_flow(ppm, 0.02, c), rel=1e-12
    )
    assert nox_mass_flow(ppm, k * 0.02, c) == pytest.approx(
        k * nox_mass_flow(ppm, 0.02, c), rel=1e-12
    )
    assert co2_mass_flow(k * fuel, c) == pytest.approx(
        k * co2_mass_flow(fuel, c), rel=1e-12
    )


def test_coefficients_must_be_positive():
    with pytest.raises(ValueError):
        EmissionCoefficients(u_nox=0.0)
    with pytest.raises(ValueError):
        EmissionCoefficients(fuel_density_kg_per_L=-1.0)


def test_sensor_frame_rejects_negative_quantities():
    with pytest.raises(ValueError):
        SensorFrame(0.0, maf_gps=-1.0, fuel_rate_Lph=0, nox_ppm_upstream=0,
                    nox_ppm_downstream=0, velocity_kmph=0)


def test_load_coefficients(tmp_path):
    path = tmp_path / "emissions.conf"
    path.write_text(
        "# tuned values\n"
        "u_nox = 0.0016\n"
        "fuel_density_kg_per_L = 0.84  # winter diesel\n"
    )
    c = load_coefficients(path)
    assert c.u_nox == 0.0016
    assert c.fuel_density_kg_per_L == 0.84
    assert c.co2_per_fuel_kg == 3.17  # untouched default


def test_load_coefficients_rejects_unknown_keys(tmp_path):
    path = tmp_path / "emissions.conf"
    path.write_text("u_knox = 1.0\n")
    with pytest.raises(ValueError, match="unknown coefficient"):
        load_coefficients(path)
