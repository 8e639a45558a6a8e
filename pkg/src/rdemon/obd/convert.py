"""Turns decoded trips into engine event streams.

Event times are re-based to seconds since trip start.  Besides the
directly decoded channels, three derived streams are appended:
``accel_mpss`` (finite differences over the velocity samples) and the
emission rates ``nox_mgps``/``co2_gps`` (from MAF, fuel rate, and the
downstream NOx sensor), which the monitored specification declares as
inputs.  Within one timestamp, derived and held channels sort before the
velocity sample so downstream integrators see a consistent instant.
"""

from __future__ import annotations

from ..emissions import EmissionCoefficients, co2_mass_flow, exhaust_mass_flow, nox_mass_flow
from ..engine.monitor import Event
from .cdp import CdpTrip
from .pids import decode_pid
from .profiles import SensorProfile

# stable ordering of simultaneous events: velocity last, so trackers
# integrating on the velocity grid read same-instant registers
_STREAM_PRIORITY = {
    "ambient_K": 0,
    "rpm": 1,
    "maf_gps": 2,
    "fuel_Lph": 3,
    "nox_ppm_up": 4,
    "nox_ppm_down": 5,
    "nox_mgps": 6,
    "co2_gps": 7,
    "lat": 8,
    "lon": 9,
    "alt_m": 10,
    "gps_speed_mps": 11,
    "accel_mpss": 12,
    "velo_kmph": 13,
}


class TripDecodeError(Exception):
    def __init__(self, index: int, message: str):
        super().__init__(f"event {index}: {message}")
        self.index = index


def to_engine_events(
    trip: CdpTrip,
    profile: SensorProfile,
    coefficients: EmissionCoefficients | None = None,
    smooth_accel: bool = True,
) -> list[Event]:
    """Decode every trip event into named engine input events, time-sorted."""
    coefficients = coefficients or EmissionCoefficients()
    t0 = trip.start_time
    raw: list[Event] = []
    velocity: list[tuple[float, float]] = []  # (t, m/s)
    maf = fuel = nox_down = None

    for i, ev in enumerate(trip.events):
        t = ev.t - t0
        if ev.kind == "gps":
            raw.append(Event(t, "lat", ev.gps.lat))
            raw.append(Event(t, "lon", ev.gps.lon))
            if ev.gps.alt_m is not None:
                raw.append(Event(t, "alt_m", ev.gps.alt_m))
            if ev.gps.speed_mps is not None:
                raw.append(Event(t, "gps_speed_mps", ev.gps.speed_mps))
            continue
        try:
            channels = decode_pid(ev.pid, ev.payload, profile.pid_scaling)
        except Exception as err:
            raise TripDecodeError(i, str(err)) from err
        emission_sensor_updated = False
        for ch in channels:
            if ch.name == "ambient_C":
                raw.append(Event(t, "ambient_K", ch.value + 273.15))
            else:
                raw.append(Event(t, ch.name, ch.value))
            if ch.name == "velo_kmph":
                velocity.append((t, ch.value / 3.6))
            elif ch.name == "maf_gps":
                maf, emission_sensor_updated = ch.value, True
            elif ch.name == "fuel_Lph":
                fuel, emission_sensor_updated = ch.value, True
            elif ch.name == "nox_ppm_down":
                nox_down, emission_sensor_updated = ch.value, True
        if emission_sensor_updated and None not in (maf, fuel, nox_down):
            exhaust = exhaust_mass_flow(maf, fuel, coefficients)
            raw.append(Event(t, "nox_mgps", nox_mass_flow(nox_down, exhaust, coefficients)))
            raw.append(Event(t, "co2_gps", co2_mass_flow(fuel, coefficients)))

    for t, a in derive_acceleration(velocity, smooth=smooth_accel):
        raw.append(Event(t, "accel_mpss", a))

    raw.sort(key=lambda e: (e.time, _STREAM_PRIORITY.get(e.stream, 99)))
    return raw


def derive_acceleration(
    velocity_mps: list[tuple[float, float]], smooth: bool = True
) -> list[tuple[float, float]]:
    """Acceleration samples (m/s²) from ``(t, velocity m/s)`` samples.

    Central differences at interior samples, one-sided at the endpoints;
    duplicate timestamps collapse to their last value first.  With
    ``smooth`` a centered moving average (window 3) is applied.
    Fewer than two distinct timestamps yield no samples.
    """
    dedup: dict[float, float] = {}
    for t, v in velocity_mps:
        dedup[t] = v
    pts = sorted(dedup.items())
    n = len(pts)
    if n < 2:
        return []

    accel: list[float] = []
    for i in range(n):
        lo = max(i - 1, 0)
        hi = min(i + 1, n - 1)
        dt = pts[hi][0] - pts[lo][0]
        accel.append((pts[hi][1] - pts[lo][1]) / dt if dt > 0 else 0.0)

    if smooth:
        smoothed = []
        for i in range(n):
            window = accel[max(i - 1, 0) : i + 2]
            smoothed.append(sum(window) / len(window))
        accel = smoothed
    return [(pts[i][0], accel[i]) for i in range(n)]
