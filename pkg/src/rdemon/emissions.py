"""Converts raw sensor streams into exhaust mass flow and emission rates.

Exhaust mass flow combines intake air (MAF) with burned fuel; NOx mass
flow scales the tailpipe concentration (wet basis) by the exhaust flow;
CO2 follows stoichiometrically from the fuel burned.  The coefficients
are industry-standard diesel constants and live in one configurable
record so recalibration never touches code.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from pathlib import Path


@dataclass(frozen=True)
class EmissionCoefficients:
    # g/s of NOx per ppm per kg/s of exhaust, wet basis
    u_nox: float = 0.001587
    fuel_density_kg_per_L: float = 0.832
    co2_per_fuel_kg: float = 3.17

    def __post_init__(self) -> None:
        for name in ("u_nox", "fuel_density_kg_per_L", "co2_per_fuel_kg"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be strictly positive")


@dataclass(frozen=True)
class SensorFrame:
    """One decoded instant of the emission-relevant sensors."""

    time_s: float
    maf_gps: float
    fuel_rate_Lph: float
    nox_ppm_upstream: float
    nox_ppm_downstream: float
    velocity_kmph: float

    def __post_init__(self) -> None:
        for name in (
            "maf_gps",
            "fuel_rate_Lph",
            "nox_ppm_upstream",
            "nox_ppm_downstream",
            "velocity_kmph",
        ):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")


def exhaust_mass_flow(
    maf_gps: float, fuel_rate_Lph: float, c: EmissionCoefficients | None = None
) -> float:
    """Exhaust mass flow in kg/s from intake air and fuel burn."""
    c = c or EmissionCoefficients()
    return maf_gps / 1000.0 + fuel_rate_Lph * c.fuel_density_kg_per_L / 3600.0


def nox_mass_flow(
    nox_ppm_downstream: float,
    exhaust_kgps: float,
    c: EmissionCoefficients | None = None,
) -> float:
    """NOx mass flow in mg/s from tailpipe concentration and exhaust flow."""
    c = c or EmissionCoefficients()
    return c.u_nox * nox_ppm_downstream * exhaust_kgps * 1000.0


def co2_mass_flow(fuel_rate_Lph: float, c: EmissionCoefficients | None = None) -> float:
    """CO2 mass flow in g/s from the fuel burn rate."""
    c = c or EmissionCoefficients()
    return fuel_rate_Lph * c.fuel_density_kg_per_L * c.co2_per_fuel_kg * 1000.0 / 3600.0


def per_km(total_mass: float, distance_km: float) -> float | None:
    """Distance-normalized total; absent (None) until distance is positive."""
    if distance_km <= 0:
        return None
    return total_mass / distance_km


_COEFFICIENT_KEYS = {
    "u_nox",
    "fuel_density_kg_per_L",
    "co2_per_fuel_kg",
}


def load_coefficients(path: str | Path) -> EmissionCoefficients:
    """Read coefficients from a ``key = value`` file; missing keys keep defaults.

    Lines starting with ``#`` are comments.  Unknown keys are rejected so
    typos do not silently fall back to defaults.
    """
    coeffs = EmissionCoefficients()
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected 'key = value'")
        key, _, value = line.partition("=")
        key = key.strip()
        if key not in _COEFFICIENT_KEYS:
            raise ValueError(f"{path}:{lineno}: unknown coefficient {key!r}")
        try:
            coeffs = replace(coeffs, **{key: float(value.strip())})
        except ValueError as err:
            raise ValueError(f"{path}:{lineno}: {err}") from None
    return coeffs
