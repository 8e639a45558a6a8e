"""Regulatory thresholds for a valid emissions test drive.

All numbers are configurable; the defaults follow the EU regulation the
test procedure is based on.  Segment classification: urban up to
60 km/h (inclusive), rural up to 90 km/h, motorway above.  Stops count
toward the urban segment.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass


class SegmentClass(enum.Enum):
    URBAN = "urban"
    RURAL = "rural"
    MOTORWAY = "motorway"

    def __str__(self) -> str:
        return self.value


SEGMENTS = (SegmentClass.URBAN, SegmentClass.RURAL, SegmentClass.MOTORWAY)


class DomainError(ValueError):
    """Input outside the physical domain (e.g. negative velocity)."""


@dataclass(frozen=True)
class RdeParameters:
    # universal conditions
    temp_min_K: float = 273.0
    temp_max_K: float = 303.0
    duration_min_s: float = 5400.0
    duration_max_s: float = 7200.0
    speed_limit_kmph: float = 160.0
    nox_limit_mg_per_km: float = 168.0
    expected_trip_km: float = 83.0

    # segment classification cutoffs (km/h)
    urban_max_kmph: float = 60.0
    rural_max_kmph: float = 90.0

    # urban average velocity band (km/h)
    urban_avg_v_min_kmph: float = 15.0
    urban_avg_v_max_kmph: float = 40.0

    # distance shares of the total, per segment, and per-segment minimum
    urban_share: tuple[float, float] = (0.29, 0.44)
    rural_share: tuple[float, float] = (0.23, 0.43)
    motorway_share: tuple[float, float] = (0.23, 0.43)
    min_segment_km: float = 16.0

    # driving dynamics: 95th percentile of v*a must stay below an affine
    # bound in the segment's average velocity; low branch up to the
    # cutoff, high branch beyond it
    dynamics_window_s: float = 7200.0
    dynamics_percentile: float = 95.0
    dyn_low_slope: float = 0.136
    dyn_low_intercept: float = 14.44
    dyn_v_cutoff_kmph: float = 74.6
    dyn_high_slope: float = 0.0742
    dyn_high_intercept: float = 18.966

    # relative positive acceleration must stay above an affine bound
    rpa_slope: float = -0.0016
    rpa_intercept: float = 0.1755
    rpa_v_cutoff_kmph: float = 94.05
    rpa_high_min: float = 0.025
    rpa_accel_cutoff_mps2: float = 0.1

    def __post_init__(self) -> None:
        positive = {
            "temp_min_K": self.temp_min_K,
            "temp_max_K": self.temp_max_K,
            "duration_min_s": self.duration_min_s,
            "duration_max_s": self.duration_max_s,
            "speed_limit_kmph": self.speed_limit_kmph,
            "nox_limit_mg_per_km": self.nox_limit_mg_per_km,
            "expected_trip_km": self.expected_trip_km,
            "urban_max_kmph": self.urban_max_kmph,
            "rural_max_kmph": self.rural_max_kmph,
            "min_segment_km": self.min_segment_km,
            "dynamics_window_s": self.dynamics_window_s,
        }
        for name, value in positive.items():
            if value <= 0:
                raise ValueError(f"{name} must be positive, got {value}")
        pairs = {
            "temperature": (self.temp_min_K, self.temp_max_K),
            "duration": (self.duration_min_s, self.duration_max_s),
            "urban average velocity": (
                self.urban_avg_v_min_kmph,
                self.urban_avg_v_max_kmph,
            ),
            "urban share": self.urban_share,
            "rural share": self.rural_share,
            "motorway share": self.motorway_share,
            "classification cutoffs": (self.urban_max_kmph, self.rural_max_kmph),
        }
        for name, (lo, hi) in pairs.items():
            if not lo < hi:
                raise ValueError(f"{name} bounds must satisfy min < max: {lo} .. {hi}")
        if not 0.0 < self.dynamics_percentile < 100.0:
            raise ValueError("dynamics_percentile must lie strictly in (0, 100)")

    def share_bounds(self, segment: SegmentClass) -> tuple[float, float]:
        return {
            SegmentClass.URBAN: self.urban_share,
            SegmentClass.RURAL: self.rural_share,
            SegmentClass.MOTORWAY: self.motorway_share,
        }[segment]
