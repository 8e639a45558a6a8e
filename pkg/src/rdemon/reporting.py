"""Post-processing of stored trips: per-segment aggregation tables and
plot-ready time series.

Printed tables round distance to 0.01 km and emission rates to whole
mg/km and g/km; the JSON format keeps full precision.  Zero-distance
segments report absent rates.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

from .emissions import EmissionCoefficients
from .obd import CdpTrip, SensorProfile, detect_profile, to_engine_events
from .rde import SEGMENTS, RdeParameters, TripTracker


class ReportError(Exception):
    pass


class NotRdeCapableError(ReportError):
    pass


class UnknownStreamError(ReportError):
    pass


@dataclass(frozen=True)
class SegmentRow:
    segment: str
    distance_km: float
    nox_mg_per_km: float | None
    co2_g_per_km: float | None


def segment_table(
    trip: CdpTrip,
    params: RdeParameters | None = None,
    profile: SensorProfile | None = None,
    coefficients: EmissionCoefficients | None = None,
) -> list[SegmentRow]:
    """Three segment rows plus a mass-weighted total row."""
    params = params or RdeParameters()
    profile = profile or detect_profile(trip)
    if not profile.rde_capable:
        raise NotRdeCapableError(
            "trip lacks the sensor set needed for emission aggregation"
        )
    tracker = TripTracker(params)
    tracker.observe_all(to_engine_events(trip, profile, coefficients))

    rows: list[SegmentRow] = []
    stats = tracker.segment_stats()
    for seg in SEGMENTS:
        st = stats[seg]
        if st.distance_km > 0:
            rows.append(
                SegmentRow(
                    seg.value,
                    st.distance_km,
                    st.nox_mg / st.distance_km,
                    st.co2_g / st.distance_km,
                )
            )
        else:
            rows.append(SegmentRow(seg.value, 0.0, None, None))
    total_km = tracker.total_distance_km
    rows.append(
        SegmentRow(
            "total",
            total_km,
            tracker.total_nox_mg / total_km if total_km > 0 else None,
            tracker.total_co2_g / total_km if total_km > 0 else None,
        )
    )
    return rows


# ---------------------------------------------------------------------------
# output formats (CSV column order is fixed and documented)
# ---------------------------------------------------------------------------

CSV_COLUMNS = ("segment", "distance_km", "nox_mg_per_km", "co2_g_per_km")


def _rounded(row: SegmentRow) -> tuple[str, str, str, str]:
    return (
        row.segment,
        f"{row.distance_km:.2f}",
        "-" if row.nox_mg_per_km is None else f"{row.nox_mg_per_km:.0f}",
        "-" if row.co2_g_per_km is None else f"{row.co2_g_per_km:.0f}",
    )


def format_table(rows: Sequence[SegmentRow]) -> str:
    header = ("segment", "distance [km]", "NOx [mg/km]", "CO2 [g/km]")
    body = [_rounded(r) for r in rows]
    widths = [
        max(len(header[i]), *(len(b[i]) for b in body)) for i in range(4)
    ]
    lines = [
        "  ".join(h.ljust(widths[i]) for i, h in enumerate(header)),
        "  ".join("-" * widths[i] for i in range(4)),
    ]
    for b in body:
        lines.append(
            b[0].ljust(widths[0])
            + "  "
            + "  ".join(b[i].rjust(widths[i]) for i in range(1, 4))
        )
    return "\n".join(lines)


def format_csv(rows: Sequence[SegmentRow]) -> str:
    lines = [",".join(CSV_COLUMNS)]
    lines += [",".join(_rounded(r)) for r in rows]
    return "\n".join(lines) + "\n"


def format_json(rows: Sequence[SegmentRow]) -> str:
    return json.dumps(
        {
            "rows": [
                {
                    "segment": r.segment,
                    "distance_km": r.distance_km,
                    "nox_mg_per_km": r.nox_mg_per_km,
                    "co2_g_per_km": r.co2_g_per_km,
                }
                for r in rows
            ]
        },
        indent=2,
        ensure_ascii=False,
    ) + "\n"


def report_document(rows: Sequence[SegmentRow]) -> dict:
    return json.loads(format_json(rows))


# ---------------------------------------------------------------------------
# plot series
# ---------------------------------------------------------------------------


def series(
    trip: CdpTrip,
    streams: Sequence[str],
    max_points: int | None = None,
    profile: SensorProfile | None = None,
) -> dict[str, list[tuple[float, float]]]:
    """Per-stream ``(t, value)`` arrays from the decoded trip, optionally
    downsampled to ``max_points`` while keeping the global extrema."""
    profile = profile or detect_profile(trip)
    by_stream: dict[str, list[tuple[float, float]]] = {}
    for ev in to_engine_events(trip, profile):
        if isinstance(ev.value, bool):
            continue
        by_stream.setdefault(ev.stream, []).append((ev.time, ev.value))
    out: dict[str, list[tuple[float, float]]] = {}
    for name in streams:
        if name not in by_stream:
            raise UnknownStreamError(
                f"stream {name!r} not present in trip (have: {sorted(by_stream)})"
            )
        pts = by_stream[name]
        out[name] = downsample(pts, max_points) if max_points else list(pts)
    return out


def downsample(
    points: list[tuple[float, float]], max_points: int
) -> list[tuple[float, float]]:
    """At most ``max_points`` points, always retaining global min and max."""
    if max_points <= 0:
        raise ValueError("max_points must be positive")
    n = len(points)
    if n <= max_points:
        return list(points)
    picks = {k * n // max_points for k in range(max_points)}
    imin = min(range(n), key=lambda i: points[i][1])
    imax = max(range(n), key=lambda i: points[i][1])
    picks |= {imin, imax}
    reserved = {imin, imax}
    ordered = sorted(picks)
    while len(ordered) > max_points:
        # drop the removable pick packed tightest against its predecessor
        candidates = [
            (ordered[i] - ordered[i - 1], i)
            for i in range(1, len(ordered))
            if ordered[i] not in reserved
        ]
        _, i = min(candidates)
        ordered.pop(i)
    return [points[i] for i in ordered]
