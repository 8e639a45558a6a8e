"""HTTP and WebSocket surface of the monitor service.

Endpoints (payload schemas in docs/api.md):

    POST   /sessions               start a replay or live session
    GET    /sessions/{id}          session status
    DELETE /sessions/{id}          stop, persist, return the final report
    GET    /sessions/{id}/state    latest UiState snapshot
    POST   /sessions/{id}/control  steer a live session
    WS     /sessions/{id}/live     UiState + trigger records, JSON per message
    POST   /trips                  upload a CDP document (body = the JSON)
    GET    /trips                  list stored trips
    GET    /trips/{id}             canonical CDP document
    GET    /trips/{id}/report      segment aggregation table
    GET    /trips/{id}/series      plot series, ?streams=a,b&max_points=n
"""

from __future__ import annotations

import asyncio
import os
from contextlib import asynccontextmanager
from pathlib import Path

from fastapi import FastAPI, HTTPException, Request, Response, WebSocket, WebSocketDisconnect
from fastapi.staticfiles import StaticFiles

from ..obd import SchemaError, UnsortedEventsError, read_cdp
from ..rde import RdeParameters
from ..reporting import UnknownStreamError, series as trip_series
from ..sim import BUILTIN_PROFILES, profile_from_document
from .models import (
    ControlAck,
    ControlRequest,
    FinalReport,
    SeriesResponse,
    SessionInfo,
    StartSessionRequest,
    TripInfo,
    TripList,
    UiState,
    UploadResponse,
)
from .sessions import (
    NoSessionError,
    NotLiveError,
    SessionBusyError,
    SessionManager,
    _ControlMessage,
)
from .store import TripStore, UnknownTripError


def create_app(
    trip_dir: str | Path | None = None,
    params: RdeParameters | None = None,
    ui_dir: str | Path | None = None,
) -> FastAPI:
    trip_dir = Path(trip_dir or os.environ.get("RDEMON_TRIP_DIR", "./trips"))
    params = params or RdeParameters()

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        app.state.loop = asyncio.get_running_loop()
        yield

    app = FastAPI(title="rdemon monitor service", lifespan=lifespan)
    store = TripStore(trip_dir)
    manager = SessionManager(store, params)
    app.state.store = store
    app.state.manager = manager

    # -- sessions ---------------------------------------------------------

    @app.post("/sessions", response_model=SessionInfo, status_code=201)
    def start_session(req: StartSessionRequest) -> SessionInfo:
        kwargs: dict = {"mode": req.mode, "rate": req.rate, "loop": app.state.loop}
        if req.mode == "replay":
            if not req.trip_id:
                raise HTTPException(422, "replay mode needs trip_id")
            try:
                kwargs["trip"] = store.get(req.trip_id)
            except UnknownTripError:
                raise HTTPException(404, f"unknown trip {req.trip_id}") from None
            kwargs["trip_id"] = req.trip_id
        else:
            if req.profile_doc is not None:
                try:
                    profile = profile_from_document(req.profile_doc)
                except (KeyError, TypeError, ValueError) as err:
                    raise HTTPException(422, f"bad profile document: {err}") from None
            else:
                name = req.profile or "valid"
                if name not in BUILTIN_PROFILES:
                    raise HTTPException(
                        422,
                        f"unknown profile {name!r} (built-ins: {sorted(BUILTIN_PROFILES)})",
                    )
                profile = BUILTIN_PROFILES[name]()
            kwargs["profile"] = profile
        try:
            session = manager.start(**kwargs)
        except SessionBusyError as err:
            raise HTTPException(409, str(err)) from None
        return SessionInfo(id=session.id, mode=session.mode, status=session.status)

    @app.get("/sessions/{session_id}", response_model=SessionInfo)
    def session_info(session_id: str) -> SessionInfo:
        session = _session(session_id)
        return SessionInfo(id=session.id, mode=session.mode, status=session.status)

    @app.delete("/sessions/{session_id}", response_model=FinalReport)
    def stop_session(session_id: str) -> FinalReport:
        _session(session_id)
        return manager.stop(session_id)

    @app.get("/sessions/{session_id}/state", response_model=UiState)
    def session_state(session_id: str) -> UiState:
        return _session(session_id).latest

    @app.post("/sessions/{session_id}/control", response_model=ControlAck)
    def control_session(session_id: str, req: ControlRequest) -> ControlAck:
        session = _session(session_id)
        try:
            session.control(
                _ControlMessage(
                    target_speed_kmph=req.target_speed_kmph,
                    aggressiveness=req.aggressiveness,
                    end_drive=req.end_drive,
                )
            )
        except NotLiveError as err:
            raise HTTPException(409, str(err)) from None
        return ControlAck()

    @app.websocket("/sessions/{session_id}/live")
    async def live(websocket: WebSocket, session_id: str) -> None:
        try:
            session = manager.get(session_id)
        except NoSessionError:
            await websocket.close(code=4404)
            return
        await websocket.accept()
        # bounded: a lagging consumer loses old snapshots, never the newest
        q: asyncio.Queue = asyncio.Queue(maxsize=512)
        session.subscribe(q)
        try:
            while True:
                message = await q.get()
                if message is None:  # session finished
                    break
                await websocket.send_json(message)
        except WebSocketDisconnect:
            pass
        finally:
            session.unsubscribe(q)
            try:
                await websocket.close()
            except RuntimeError:
                pass

    def _session(session_id: str):
        try:
            return manager.get(session_id)
        except NoSessionError:
            raise HTTPException(404, f"no session {session_id}") from None

    # -- trips -------------------------------------------------------------

    @app.post("/trips", response_model=UploadResponse, status_code=201)
    async def upload_trip(request: Request) -> UploadResponse:
        body = await request.body()
        try:
            trip_id = store.put(body)
        except (SchemaError, UnsortedEventsError) as err:
            raise HTTPException(400, str(err)) from None
        return UploadResponse(trip_id=trip_id)

    @app.get("/trips", response_model=TripList)
    def list_trips() -> TripList:
        infos = []
        for trip_id in store.ids():
            trip = store.get(trip_id)
            duration = (
                trip.events[-1].t - trip.events[0].t if trip.events else 0.0
            )
            infos.append(
                TripInfo(
                    id=trip_id,
                    model=trip.vehicle.model,
                    n_events=len(trip.events),
                    duration_s=duration,
                )
            )
        return TripList(trips=infos)

    @app.get("/trips/{trip_id}")
    def get_trip(trip_id: str) -> Response:
        try:
            data = store.get_bytes(trip_id)
        except UnknownTripError:
            raise HTTPException(404, f"unknown trip {trip_id}") from None
        return Response(content=data, media_type="application/json")

    @app.get("/trips/{trip_id}/report")
    def trip_report(trip_id: str) -> dict:
        try:
            return store.report(trip_id, params)
        except UnknownTripError:
            raise HTTPException(404, f"unknown trip {trip_id}") from None

    @app.get("/trips/{trip_id}/series", response_model=SeriesResponse)
    def trip_series_endpoint(
        trip_id: str, streams: str, max_points: int | None = None
    ) -> SeriesResponse:
        try:
            trip = store.get(trip_id)
        except UnknownTripError:
            raise HTTPException(404, f"unknown trip {trip_id}") from None
        names = [s.strip() for s in streams.split(",") if s.strip()]
        try:
            out = trip_series(trip, names, max_points=max_points)
        except UnknownStreamError as err:
            raise HTTPException(404, str(err)) from None
        return SeriesResponse(series=out)

    # -- static dashboard (built separately; mounted when present) ---------

    ui_dir = Path(ui_dir or os.environ.get("RDEMON_UI_DIR", "frontend/dist"))
    if ui_dir.is_dir():
        app.mount("/ui", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app
