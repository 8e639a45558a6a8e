"""Request/response schemas of the monitor service.

``UiState`` is the complete dashboard snapshot: clients render it without
recomputing anything.  Values are rounded to display precision here, so
every number a client shows can be matched verbatim against the wire
message.  The same object is returned by ``GET /sessions/{id}/state`` and
streamed over the live WebSocket; trigger records are interleaved on the
socket with ``type: "trigger"``.
"""

from __future__ import annotations

from typing import Literal

from pydantic import BaseModel, Field

from ..rde import RdeParameters, RdeVerdict, SegmentClass, TripTracker
from ..rde.rules import dynamics_threshold, rpa_bound


class SegmentPanel(BaseModel):
    segment: Literal["urban", "rural", "motorway"]
    distance_km: float
    share_lo: float
    share_hi: float
    share_lo_km: float
    share_hi_km: float
    min_distance_km: float
    avg_velocity_kmph: float | None
    dynamics_p95: float | None
    dynamics_threshold: float | None
    rpa: float | None
    rpa_threshold: float | None


class ConstraintModel(BaseModel):
    id: str
    description: str
    status: Literal["ok", "violated", "pending"]
    current: float | None
    bound: str


class TriggerNote(BaseModel):
    t_s: float
    message: str


class UiState(BaseModel):
    type: Literal["state"] = "state"
    t_s: float
    velocity_kmph: float
    total_distance_km: float
    expected_trip_km: float
    verdict: Literal["?", "valid", "invalid"]
    irrecoverable: bool
    nox_mg_per_km: float | None
    nox_limit_mg_per_km: float
    segments: list[SegmentPanel]
    constraints: list[ConstraintModel]
    recent_triggers: list[TriggerNote]


class TriggerRecord(BaseModel):
    type: Literal["trigger"] = "trigger"
    t_s: float
    message: str


class StartSessionRequest(BaseModel):
    mode: Literal["replay", "live"]
    trip_id: str | None = None
    profile: str | None = None  # built-in profile name for live mode
    profile_doc: dict | None = None  # inline profile document for live mode
    rate: float | None = Field(
        default=None,
        description="simulated seconds per wall second; 0 means unthrottled "
        "(defaults: live 1.0, replay unthrottled)",
    )


class SessionInfo(BaseModel):
    id: str
    mode: Literal["replay", "live"]
    status: Literal["running", "finished"]


class ControlRequest(BaseModel):
    target_speed_kmph: float | None = None
    aggressiveness: float | None = Field(default=None, ge=0.0, le=1.0)
    end_drive: bool = False


class ControlAck(BaseModel):
    ok: bool = True


class FinalReport(BaseModel):
    session_id: str
    trip_id: str
    verdict: Literal["?", "valid", "invalid"]
    irrecoverable: bool
    state: UiState
    report: dict


class UploadResponse(BaseModel):
    trip_id: str


class TripInfo(BaseModel):
    id: str
    model: str
    n_events: int
    duration_s: float


class TripList(BaseModel):
    trips: list[TripInfo]


class SeriesResponse(BaseModel):
    series: dict[str, list[tuple[float, float]]]


def _round(x: float | None, digits: int) -> float | None:
    return None if x is None else round(x, digits)


def build_ui_state(
    tracker: TripTracker,
    verdict: RdeVerdict,
    t_s: float,
    params: RdeParameters,
    recent_triggers: list[TriggerNote],
) -> UiState:
    """Snapshot of the tracker, rounded to display precision."""
    stats = tracker.segment_stats()
    panels: list[SegmentPanel] = []
    for seg in (SegmentClass.URBAN, SegmentClass.RURAL, SegmentClass.MOTORWAY):
        st = stats[seg]
        lo, hi = params.share_bounds(seg)
        avg = st.avg_velocity_kmph
        panels.append(
            SegmentPanel(
                segment=seg.value,
                distance_km=_round(st.distance_km, 2),
                share_lo=lo,
                share_hi=hi,
                share_lo_km=_round(lo * params.expected_trip_km, 1),
                share_hi_km=_round(hi * params.expected_trip_km, 1),
                min_distance_km=params.min_segment_km,
                avg_velocity_kmph=_round(avg, 1),
                dynamics_p95=_round(st.dynamics_p95, 2),
                dynamics_threshold=(
                    _round(dynamics_threshold(avg, params), 2) if avg is not None else None
                ),
                rpa=_round(st.rpa_mps2, 4),
                rpa_threshold=(
                    _round(rpa_bound(avg, params), 4) if avg is not None else None
                ),
            )
        )
    return UiState(
        t_s=round(t_s, 1),
        velocity_kmph=round(tracker.current_velocity_kmph, 1),
        total_distance_km=_round(tracker.total_distance_km, 2),
        expected_trip_km=params.expected_trip_km,
        verdict=verdict.overall.value,
        irrecoverable=verdict.irrecoverable,
        nox_mg_per_km=_round(tracker.nox_mg_per_km, 1),
        nox_limit_mg_per_km=params.nox_limit_mg_per_km,
        segments=panels,
        constraints=[
            ConstraintModel(
                id=c.id,
                description=c.description,
                status=c.status.value,
                current=_round(c.current, 4),
                bound=c.bound,
            )
            for c in verdict.constraints
        ],
        recent_triggers=list(recent_triggers),
    )
