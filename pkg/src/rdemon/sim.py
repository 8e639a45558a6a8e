"""Deterministic vehicle simulator emitting CDP events.

First-order speed tracking toward a target with the acceleration bounded
by ``3 * aggressiveness`` m/s²; one tick per second to match the
monitoring grid.  The emission model is deliberately simple and affine
(tailpipe NOx concentration grows with positive driving dynamics, fuel
rate with speed and acceleration) — it exists to exercise monitor paths,
not to model a real engine.  Given the same profile and seed the emitted
trip is byte-identical.

``synthetic_segment_trip`` builds piecewise-constant trips whose
per-segment distances and emission rates are exact by construction; the
aggregation tables of real reference drives are reproduced with it.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, replace

from .emissions import EmissionCoefficients
from .obd.cdp import CdpEvent, CdpTrip, Vehicle
from .obd.pids import (
    PID_AMBIENT_TEMP,
    PID_FUEL_RATE,
    PID_MAF,
    PID_NOX_PAIR,
    PID_VEHICLE_SPEED,
    encode_pid,
)
from .obd.profiles import PROFILE_SCALING

MAX_ACCEL_MPS2 = 3.0
DEFAULT_START_EPOCH = 1_700_000_000.0


@dataclass(frozen=True)
class Phase:
    duration_s: float
    target_speed_kmph: float
    aggressiveness: float = 0.5

    def __post_init__(self) -> None:
        if self.duration_s <= 0:
            raise ValueError("phase duration must be positive")
        if self.target_speed_kmph < 0:
            raise ValueError("target speed must be non-negative")
        if not 0.0 <= self.aggressiveness <= 1.0:
            raise ValueError("aggressiveness must lie in [0, 1]")


@dataclass(frozen=True)
class EmissionModel:
    nox_base_ppm: float = 40.0
    nox_per_dyn_ppm: float = 6.0
    maf_idle_gps: float = 3.0
    maf_per_kmph: float = 0.25
    fuel_idle_Lph: float = 0.8
    fuel_per_kmph: float = 0.055
    fuel_per_dyn_Lph: float = 0.12


@dataclass(frozen=True)
class DriveProfile:
    phases: tuple[Phase, ...]
    ambient_K: float = 293.15
    emission: EmissionModel = EmissionModel()
    jitter: float = 0.0  # relative sensor noise, 0 disables the RNG entirely
    seed: int = 0

    @property
    def duration_s(self) -> float:
        return sum(p.duration_s for p in self.phases)


@dataclass(frozen=True)
class Control:
    target_speed_kmph: float
    aggressiveness: float = 0.5


@dataclass
class SimState:
    t: float = 0.0
    v_kmph: float = 0.0
    odometer_km: float = 0.0
    lat: float = 49.2354
    lon: float = 6.9968


def step(
    state: SimState,
    dt_s: float,
    control: Control,
    profile: DriveProfile,
    rng: random.Random | None = None,
) -> tuple[SimState, list[CdpEvent]]:
    """Advance one tick and emit the sensor events observed at its end."""
    if dt_s <= 0:
        raise ValueError("dt must be positive")
    v0 = state.v_kmph / 3.6
    target = control.target_speed_kmph / 3.6
    a_max = MAX_ACCEL_MPS2 * control.aggressiveness
    dv = max(-a_max * dt_s, min(a_max * dt_s, target - v0))
    v1 = v0 + dv
    accel = dv / dt_s
    t1 = state.t + dt_s
    dist_km = (v0 + v1) / 2.0 * dt_s / 1000.0
    # straight east heading keeps the fix arithmetic trivial
    lon1 = state.lon + (v0 + v1) / 2.0 * dt_s / (
        111_320.0 * math.cos(math.radians(state.lat))
    )
    new_state = SimState(
        t=t1,
        v_kmph=v1 * 3.6,
        odometer_km=state.odometer_km + dist_km,
        lat=state.lat,
        lon=lon1,
    )

    m = profile.emission
    dyn_pos = max(0.0, new_state.v_kmph * accel / 3.6)
    maf = m.maf_idle_gps + m.maf_per_kmph * new_state.v_kmph
    fuel = m.fuel_idle_Lph + m.fuel_per_kmph * new_state.v_kmph + m.fuel_per_dyn_Lph * dyn_pos
    nox_down = m.nox_base_ppm + m.nox_per_dyn_ppm * dyn_pos
    if profile.jitter > 0 and rng is not None:
        maf *= 1.0 + rng.gauss(0.0, profile.jitter)
        fuel *= 1.0 + rng.gauss(0.0, profile.jitter)
        nox_down *= 1.0 + rng.gauss(0.0, profile.jitter)
    maf = max(0.0, maf)
    fuel = max(0.0, fuel)
    nox_down = max(0.0, nox_down)

    events = emit_tick(
        t1,
        new_state,
        ambient_K=profile.ambient_K,
        maf_gps=maf,
        fuel_Lph=fuel,
        nox_ppm_down=nox_down,
    )
    return new_state, events


def emit_tick(
    t: float,
    state: SimState,
    ambient_K: float,
    maf_gps: float,
    fuel_Lph: float,
    nox_ppm_down: float,
    scaling=None,
) -> list[CdpEvent]:
    """One tick worth of raw sensor events (OBD responses plus a GPS fix)."""
    nox_up = nox_ppm_down * 3.0  # upstream sensor, diagnostics only
    return [
        CdpEvent.obd(t, PID_AMBIENT_TEMP, encode_pid(PID_AMBIENT_TEMP, (ambient_K - 273.15,), scaling)),
        CdpEvent.obd(t, PID_MAF, encode_pid(PID_MAF, (maf_gps,), scaling)),
        CdpEvent.obd(t, PID_FUEL_RATE, encode_pid(PID_FUEL_RATE, (fuel_Lph,), scaling)),
        CdpEvent.obd(t, PID_NOX_PAIR, encode_pid(PID_NOX_PAIR, (nox_up, nox_ppm_down), scaling)),
        CdpEvent.obd(t, PID_VEHICLE_SPEED, encode_pid(PID_VEHICLE_SPEED, (state.v_kmph,), scaling)),
        CdpEvent.fix(t, state.lat, state.lon, alt_m=280.0, speed_mps=state.v_kmph / 3.6),
    ]


def run_profile(
    profile: DriveProfile,
    model: str = "simulated car",
    start_epoch: float = DEFAULT_START_EPOCH,
) -> CdpTrip:
    """Run the scripted phases at 1 Hz into a well-formed trip."""
    rng = random.Random(profile.seed) if profile.jitter > 0 else None
    state = SimState()
    events: list[CdpEvent] = emit_tick(
        0.0, state, profile.ambient_K, maf_gps=profile.emission.maf_idle_gps,
        fuel_Lph=profile.emission.fuel_idle_Lph, nox_ppm_down=profile.emission.nox_base_ppm,
    )
    for phase in profile.phases:
        control = Control(phase.target_speed_kmph, phase.aggressiveness)
        ticks = int(round(phase.duration_s))
        for _ in range(ticks):
            state, tick_events = step(state, 1.0, control, profile, rng)
            events.extend(tick_events)
    rebased = [replace(ev, t=ev.t + start_epoch) for ev in events]
    return CdpTrip(vehicle=Vehicle(model=model, profile_id="standard"), events=tuple(rebased))


# ---------------------------------------------------------------------------
# synthetic piecewise-constant trips (exact per-segment aggregates)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SegmentLeg:
    """One constant-speed leg: exact distance at exact emission rates."""

    distance_km: float
    speed_kmph: float  # integer-valued: the speed PID quantizes to 1 km/h
    nox_mg_per_km: float
    co2_g_per_km: float


# matches the transition epsilon below; legs join 1 ms apart so slices
# between legs carry (essentially) no distance or mass
LEG_EPSILON_S = 0.001


def synthetic_segment_trip(
    legs: list[SegmentLeg],
    ambient_K: float = 293.15,
    start_epoch: float = DEFAULT_START_EPOCH,
    model: str = "synthetic rig",
    coefficients: EmissionCoefficients | None = None,
) -> CdpTrip:
    """Piecewise-constant trip whose legs hit their targets exactly.

    Sensor values are pre-quantized to the PID grids (the high-resolution
    fuel-rate profile keeps CO2 rates faithful), so decoding reproduces
    each leg's NOx and CO2 mg-per-km up to the NOx sensor's 0.1 ppm step.
    """
    c = coefficients or EmissionCoefficients()
    scaling = PROFILE_SCALING["synthetic-hires"]
    events: list[CdpEvent] = []
    cursor = 0.0
    lat, lon = 49.2354, 6.9968

    for leg in legs:
        if leg.speed_kmph != int(leg.speed_kmph):
            raise ValueError("leg speeds must be whole km/h (speed PID resolution)")
        duration = leg.distance_km / leg.speed_kmph * 3600.0
        v_kms = leg.speed_kmph / 3600.0  # km per second

        # quantize through the PID grids first, then derive the NOx
        # concentration from the quantized flows so the decoded mg/s
        # lands on target
        co2_gps = leg.co2_g_per_km * v_kms
        fuel = co2_gps * 3600.0 / (c.fuel_density_kg_per_L * c.co2_per_fuel_kg * 1000.0)
        fuel_q = round(fuel / 0.005) * 0.005
        maf = 4.0 + 0.3 * leg.speed_kmph
        maf_q = round(maf / 0.01) * 0.01
        exhaust_q = maf_q / 1000.0 + fuel_q * c.fuel_density_kg_per_L / 3600.0
        nox_mgps = leg.nox_mg_per_km * v_kms
        nox_ppm = nox_mgps / (c.u_nox * exhaust_q * 1000.0)

        local = [float(k) for k in range(int(duration) + 1)]
        if local[-1] < duration:
            local.append(duration)
        for lt in local:
            t = cursor + lt
            state = SimState(t=t, v_kmph=leg.speed_kmph, lat=lat, lon=lon + 1e-5 * t)
            events.extend(
                emit_tick(
                    t, state, ambient_K,
                    maf_gps=maf_q, fuel_Lph=fuel_q, nox_ppm_down=nox_ppm,
                    scaling=scaling,
                )
            )
        cursor += duration + LEG_EPSILON_S

    rebased = [replace(ev, t=ev.t + start_epoch) for ev in events]
    return CdpTrip(
        vehicle=Vehicle(model=model, profile_id="synthetic-hires"),
        events=tuple(rebased),
    )


# ---------------------------------------------------------------------------
# scripted reference profiles
# ---------------------------------------------------------------------------


def _stop_and_go(cycles: int, top_kmph: float, cruise_s: float, idle_s: float,
                 aggressiveness: float) -> list[Phase]:
    out: list[Phase] = []
    ramp = top_kmph / 3.6 / (MAX_ACCEL_MPS2 * aggressiveness) + 1.0
    for _ in range(cycles):
        out.append(Phase(ramp, top_kmph, aggressiveness))
        out.append(Phase(cruise_s, top_kmph, aggressiveness))
        out.append(Phase(ramp, 0.0, aggressiveness))
        out.append(Phase(idle_s, 0.0, aggressiveness))
    return out


def _oscillate(total_s: float, lo_kmph: float, hi_kmph: float, period_s: float,
               aggressiveness: float) -> list[Phase]:
    out: list[Phase] = []
    elapsed = 0.0
    half = period_s / 2.0
    while elapsed < total_s:
        out.append(Phase(half, hi_kmph, aggressiveness))
        out.append(Phase(half, lo_kmph, aggressiveness))
        elapsed += period_s
    return out


def golden_valid_profile() -> DriveProfile:
    """A ~95 minute drive that satisfies every trip-validity constraint.

    Urban stop-and-go (average around 26 km/h), a lightly oscillating
    rural stretch around 79 km/h, and a motorway stretch around 115 km/h
    with enough speed variation to clear the acceleration minimum.
    """
    phases: list[Phase] = []
    phases += _stop_and_go(cycles=72, top_kmph=45.0, cruise_s=20.0, idle_s=8.0,
                           aggressiveness=0.40)
    phases += _oscillate(total_s=1100.0, lo_kmph=72.0, hi_kmph=86.0, period_s=74.0,
                         aggressiveness=0.30)
    phases += _oscillate(total_s=950.0, lo_kmph=105.0, hi_kmph=125.0, period_s=190.0,
                         aggressiveness=0.40)
    return DriveProfile(phases=tuple(phases))


def speeding_profile() -> DriveProfile:
    """A short drive that transgresses the 160 km/h limit around t=600 s."""
    return DriveProfile(
        phases=(
            Phase(120.0, 50.0, 0.5),
            Phase(300.0, 110.0, 0.5),
            Phase(180.0, 165.0, 0.6),
            Phase(240.0, 100.0, 0.5),
        )
    )


def alternating_profile() -> DriveProfile:
    """Valid shortly after the 90 minute mark, then invalid again as the
    continuing motorway stretch pushes the urban distance share under its
    lower bound."""
    base = golden_valid_profile()
    extra = _oscillate(total_s=900.0, lo_kmph=110.0, hi_kmph=125.0, period_s=180.0,
                       aggressiveness=0.35)
    return DriveProfile(phases=base.phases + tuple(extra))


BUILTIN_PROFILES = {
    "valid": golden_valid_profile,
    "speeding": speeding_profile,
    "alternating": alternating_profile,
}


# ---------------------------------------------------------------------------
# profile files (same structured-text family as the trip format)
# ---------------------------------------------------------------------------


def profile_to_document(profile: DriveProfile) -> dict:
    return {
        "ambient_K": profile.ambient_K,
        "seed": profile.seed,
        "jitter": profile.jitter,
        "emission": {
            "nox_base_ppm": profile.emission.nox_base_ppm,
            "nox_per_dyn_ppm": profile.emission.nox_per_dyn_ppm,
            "maf_idle_gps": profile.emission.maf_idle_gps,
            "maf_per_kmph": profile.emission.maf_per_kmph,
            "fuel_idle_Lph": profile.emission.fuel_idle_Lph,
            "fuel_per_kmph": profile.emission.fuel_per_kmph,
            "fuel_per_dyn_Lph": profile.emission.fuel_per_dyn_Lph,
        },
        "phases": [
            {
                "duration_s": p.duration_s,
                "target_speed_kmph": p.target_speed_kmph,
                "aggressiveness": p.aggressiveness,
            }
            for p in profile.phases
        ],
    }


def profile_from_document(doc: dict) -> DriveProfile:
    emission = EmissionModel(**doc.get("emission", {}))
    phases = tuple(Phase(**p) for p in doc["phases"])
    return DriveProfile(
        phases=phases,
        ambient_K=doc.get("ambient_K", 293.15),
        emission=emission,
        jitter=doc.get("jitter", 0.0),
        seed=doc.get("seed", 0),
    )
