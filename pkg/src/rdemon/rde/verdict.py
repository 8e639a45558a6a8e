"""Tri-state drive verdict with per-constraint detail.

The verdict is a pure function of the aggregates passed in.  While the
trip is shorter than the minimum duration it stays inconclusive unless an
irrecoverable violation occurred (overspeed, or overrunning the maximum
duration); those latch the verdict invalid because their inputs only ever
grow.  Everything else (shares, averages, dynamics) is re-evaluated on
each update and may flip between ok and violated as the drive evolves.
Emission totals are reported alongside but do not enter trip validity.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .params import SEGMENTS, RdeParameters, SegmentClass
from .rules import dynamics_threshold, rpa_bound


class Overall(enum.Enum):
    VALID = "valid"
    INVALID = "invalid"
    INCONCLUSIVE = "?"


class Status(enum.Enum):
    OK = "ok"
    VIOLATED = "violated"
    PENDING = "pending"


@dataclass
class SegmentStats:
    """Aggregates of one segment class (possibly interrupted)."""

    segment: SegmentClass
    distance_km: float = 0.0
    duration_s: float = 0.0
    avg_velocity_kmph: float | None = None
    dynamics_p95: float | None = None
    rpa_mps2: float | None = None
    nox_mg: float = 0.0
    co2_g: float = 0.0


@dataclass(frozen=True)
class Constraint:
    id: str
    description: str
    status: Status
    current: float | None
    bound: str


@dataclass(frozen=True)
class RdeVerdict:
    overall: Overall
    irrecoverable: bool
    constraints: tuple[Constraint, ...]

    def by_id(self, cid: str) -> Constraint:
        for c in self.constraints:
            if c.id == cid:
                return c
        raise KeyError(cid)


def update_verdict(
    stats: dict[SegmentClass, SegmentStats],
    elapsed_s: float,
    ambient_range_K: tuple[float, float] | None,
    max_speed_kmph: float,
    p: RdeParameters | None = None,
) -> RdeVerdict:
    """Evaluate every trip-validity constraint against current aggregates."""
    p = p or RdeParameters()
    out: list[Constraint] = []

    if elapsed_s < p.duration_min_s:
        dur_status = Status.PENDING
    elif elapsed_s <= p.duration_max_s:
        dur_status = Status.OK
    else:
        dur_status = Status.VIOLATED
    out.append(
        Constraint(
            "duration",
            "total test duration",
            dur_status,
            elapsed_s,
            f"{p.duration_min_s:.0f}..{p.duration_max_s:.0f} s",
        )
    )

    if ambient_range_K is None:
        amb_status, amb_current = Status.PENDING, None
    else:
        lo, hi = ambient_range_K
        inside = p.temp_min_K <= lo and hi <= p.temp_max_K
        amb_status = Status.OK if inside else Status.VIOLATED
        amb_current = hi if hi > p.temp_max_K else lo
    out.append(
        Constraint(
            "ambient_temperature",
            "ambient temperature range",
            amb_status,
            amb_current,
            f"{p.temp_min_K:.0f}..{p.temp_max_K:.0f} K",
        )
    )

    speed_ok = max_speed_kmph <= p.speed_limit_kmph
    out.append(
        Constraint(
            "max_speed",
            "maximum vehicle speed",
            Status.OK if speed_ok else Status.VIOLATED,
            max_speed_kmph,
            f"<= {p.speed_limit_kmph:.0f} km/h",
        )
    )

    urban = stats[SegmentClass.URBAN]
    if urban.avg_velocity_kmph is None:
        out.append(
            Constraint(
                "urban_avg_velocity",
                "urban average velocity",
                Status.PENDING,
                None,
                _band(p.urban_avg_v_min_kmph, p.urban_avg_v_max_kmph, "km/h"),
            )
        )
    else:
        v = urban.avg_velocity_kmph
        ok = p.urban_avg_v_min_kmph <= v <= p.urban_avg_v_max_kmph
        out.append(
            Constraint(
                "urban_avg_velocity",
                "urban average velocity",
                Status.OK if ok else Status.VIOLATED,
                v,
                _band(p.urban_avg_v_min_kmph, p.urban_avg_v_max_kmph, "km/h"),
            )
        )

    total_km = sum(stats[s].distance_km for s in SEGMENTS)
    for seg in SEGMENTS:
        st = stats[seg]
        lo, hi = p.share_bounds(seg)
        if total_km <= 0:
            share_status, share = Status.PENDING, None
        else:
            share = st.distance_km / total_km
            share_status = Status.OK if lo <= share <= hi else Status.VIOLATED
        out.append(
            Constraint(
                f"{seg.value}_share",
                f"{seg.value} distance share",
                share_status,
                share,
                _band(lo, hi, ""),
            )
        )
        dist_ok = st.distance_km >= p.min_segment_km
        out.append(
            Constraint(
                f"{seg.value}_distance",
                f"{seg.value} distance",
                Status.OK if dist_ok else Status.PENDING,
                st.distance_km,
                f">= {p.min_segment_km:.0f} km",
            )
        )

        if st.dynamics_p95 is None or st.avg_velocity_kmph is None:
            out.append(
                Constraint(
                    f"{seg.value}_dynamics",
                    f"{seg.value} dynamics 95th percentile",
                    Status.PENDING,
                    None,
                    "below threshold",
                )
            )
        else:
            threshold = dynamics_threshold(st.avg_velocity_kmph, p)
            ok = st.dynamics_p95 <= threshold
            out.append(
                Constraint(
                    f"{seg.value}_dynamics",
                    f"{seg.value} dynamics 95th percentile",
                    Status.OK if ok else Status.VIOLATED,
                    st.dynamics_p95,
                    f"<= {threshold:.3f} m²/s³",
                )
            )

        if st.rpa_mps2 is None or st.avg_velocity_kmph is None:
            out.append(
                Constraint(
                    f"{seg.value}_rpa",
                    f"{seg.value} relative positive acceleration",
                    Status.PENDING,
                    None,
                    "above minimum",
                )
            )
        else:
            bound = rpa_bound(st.avg_velocity_kmph, p)
            ok = st.rpa_mps2 >= bound
            out.append(
                Constraint(
                    f"{seg.value}_rpa",
                    f"{seg.value} relative positive acceleration",
                    Status.OK if ok else Status.VIOLATED,
                    st.rpa_mps2,
                    f">= {bound:.4f} m/s²",
                )
            )

    irrecoverable = (
        max_speed_kmph > p.speed_limit_kmph or elapsed_s > p.duration_max_s
    )
    if irrecoverable:
        overall = Overall.INVALID
    elif elapsed_s < p.duration_min_s:
        overall = Overall.INCONCLUSIVE
    elif all(c.status is Status.OK for c in out):
        overall = Overall.VALID
    else:
        overall = Overall.INVALID
    return RdeVerdict(overall, irrecoverable, tuple(out))


def _band(lo: float, hi: float, unit: str) -> str:
    suffix = f" {unit}" if unit else ""
    return f"{lo:g}..{hi:g}{suffix}"


def empty_stats() -> dict[SegmentClass, SegmentStats]:
    return {seg: SegmentStats(seg) for seg in SEGMENTS}
