"""Accumulates per-segment statistics and the live verdict from decoded
engine events.

The tracker is the direct-logic route to the verdict; the generated
specification running on the engine is the stream route.  Both consume
the same event list.  Velocity samples define the integration grid: each
new sample closes a slice attributed to the segment of the slice's mean
velocity, and trapezoids distance, emissions, and time into it.
"""

from __future__ import annotations

from bisect import bisect_left, insort
from collections import deque
from dataclasses import dataclass

from ..engine.monitor import Event
from ..engine.windows import percentile
from .params import SEGMENTS, RdeParameters, SegmentClass
from .rules import classify_segment, dynamics
from .verdict import RdeVerdict, SegmentStats, update_verdict

TRACKED_STREAMS = ("velo_kmph", "accel_mpss", "ambient_K", "nox_mgps", "co2_gps")


@dataclass
class _SegmentAccumulator:
    distance_km: float = 0.0
    duration_s: float = 0.0
    v_dt: float = 0.0          # integral of velocity over time, km/h * s
    rpa_num: float = 0.0       # sum of v*a*dt over accelerating slices, m²/s²
    nox_mg: float = 0.0
    co2_g: float = 0.0


class _DynWindow:
    """Trailing window of dynamics samples with order statistics."""

    def __init__(self, duration_s: float):
        self.duration_s = duration_s
        self.samples: deque[tuple[float, float]] = deque()
        self.sorted_values: list[float] = []

    def add(self, t: float, value: float) -> None:
        self.samples.append((t, value))
        insort(self.sorted_values, value)
        cutoff = t - self.duration_s
        while self.samples and self.samples[0][0] <= cutoff:
            _, old = self.samples.popleft()
            self.sorted_values.pop(bisect_left(self.sorted_values, old))

    def p(self, q: float, method: str) -> float | None:
        if not self.sorted_values:
            return None
        return percentile(self.sorted_values, q, method)


class TripTracker:
    """Single-owner accumulator; feed events in non-decreasing time order."""

    def __init__(
        self,
        params: RdeParameters | None = None,
        percentile_method: str = "nearest-rank",
    ):
        self.params = params or RdeParameters()
        self.percentile_method = percentile_method
        self.elapsed_s = 0.0
        self.max_speed_kmph = 0.0
        self.ambient_min_K: float | None = None
        self.ambient_max_K: float | None = None
        self._velo: float | None = None
        self._velo_t: float | None = None
        self._accel: float | None = None
        self._nox: float | None = None
        self._co2: float | None = None
        self._nox_at_slice: float | None = None
        self._co2_at_slice: float | None = None
        self._seg = {seg: _SegmentAccumulator() for seg in SEGMENTS}
        self._dyn = {
            seg: _DynWindow(self.params.dynamics_window_s) for seg in SEGMENTS
        }

    # -- ingestion -------------------------------------------------------

    def observe(self, event: Event) -> None:
        self.elapsed_s = max(self.elapsed_s, event.time)
        stream, value = event.stream, event.value
        if stream == "ambient_K":
            v = float(value)
            self.ambient_min_K = v if self.ambient_min_K is None else min(self.ambient_min_K, v)
            self.ambient_max_K = v if self.ambient_max_K is None else max(self.ambient_max_K, v)
        elif stream == "accel_mpss":
            self._accel = float(value)
        elif stream == "nox_mgps":
            self._nox = float(value)
        elif stream == "co2_gps":
            self._co2 = float(value)
        elif stream == "velo_kmph":
            self._observe_velocity(event.time, float(value))

    def observe_all(self, events) -> None:
        for event in events:
            self.observe(event)

    def _observe_velocity(self, t: float, v: float) -> None:
        self.max_speed_kmph = max(self.max_speed_kmph, v)
        if self._velo is not None and self._velo_t is not None:
            dt = t - self._velo_t
            if dt > 0:
                self._close_slice(t, v, dt)
        self._velo, self._velo_t = v, t
        self._nox_at_slice, self._co2_at_slice = self._nox, self._co2
        seg = classify_segment(v, self.params)
        if self._accel is not None:
            self._dyn[seg].add(t, dynamics(v, self._accel))

    def _close_slice(self, t: float, v: float, dt: float) -> None:
        v_mid = (self._velo + v) / 2.0
        seg = self._seg[classify_segment(v_mid, self.params)]
        seg.duration_s += dt
        seg.v_dt += v_mid * dt
        seg.distance_km += v_mid * dt / 3600.0
        seg.nox_mg += _trapezoid(self._nox_at_slice, self._nox, dt)
        seg.co2_g += _trapezoid(self._co2_at_slice, self._co2, dt)
        if self._accel is not None and self._accel > self.params.rpa_accel_cutoff_mps2:
            seg.rpa_num += (v_mid / 3.6) * self._accel * dt

    # -- snapshots ---------------------------------------------------------

    def segment_stats(self) -> dict[SegmentClass, SegmentStats]:
        out: dict[SegmentClass, SegmentStats] = {}
        for seg in SEGMENTS:
            acc = self._seg[seg]
            avg = acc.v_dt / acc.duration_s if acc.duration_s > 0 else None
            rpa = (
                acc.rpa_num / (acc.distance_km * 1000.0)
                if acc.distance_km > 0
                else None
            )
            out[seg] = SegmentStats(
                segment=seg,
                distance_km=acc.distance_km,
                duration_s=acc.duration_s,
                avg_velocity_kmph=avg,
                dynamics_p95=self._dyn[seg].p(
                    self.params.dynamics_percentile, self.percentile_method
                ),
                rpa_mps2=rpa,
                nox_mg=acc.nox_mg,
                co2_g=acc.co2_g,
            )
        return out

    @property
    def ambient_range_K(self) -> tuple[float, float] | None:
        if self.ambient_min_K is None:
            return None
        return (self.ambient_min_K, self.ambient_max_K)

    @property
    def total_distance_km(self) -> float:
        return sum(acc.distance_km for acc in self._seg.values())

    @property
    def total_nox_mg(self) -> float:
        return sum(acc.nox_mg for acc in self._seg.values())

    @property
    def total_co2_g(self) -> float:
        return sum(acc.co2_g for acc in self._seg.values())

    @property
    def nox_mg_per_km(self) -> float | None:
        d = self.total_distance_km
        return self.total_nox_mg / d if d > 0 else None

    @property
    def current_velocity_kmph(self) -> float:
        return self._velo if self._velo is not None else 0.0

    def verdict(self) -> RdeVerdict:
        return update_verdict(
            self.segment_stats(),
            self.elapsed_s,
            self.ambient_range_K,
            self.max_speed_kmph,
            self.params,
        )


def _trapezoid(v0: float | None, v1: float | None, dt: float) -> float:
    if v0 is None and v1 is None:
        return 0.0
    if v0 is None:
        v0 = v1
    if v1 is None:
        v1 = v0
    return (v0 + v1) * 0.5 * dt
