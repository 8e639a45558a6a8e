"""Session loop: one thread owns simulator, monitor, and tracker.

Request handlers talk to the loop through a control queue and read
immutable snapshots; WebSocket subscribers receive every snapshot and
rising-edge trigger record via their own asyncio queues.  Snapshots are
published once per simulated second plus immediately on any trigger, and
the loop optionally paces itself against the wall clock (``rate``
simulated seconds per wall second; 0 runs unthrottled).
"""

from __future__ import annotations

import asyncio
import queue
import threading
import time
import uuid
from collections import deque
from dataclasses import dataclass

from ..engine import Event, Monitor, TriggerFire
from ..obd import CdpTrip, Vehicle, detect_profile, to_engine_events
from ..obd.cdp import CdpEvent
from ..obd.pids import decode_pid
from ..rde import RdeParameters, TripTracker, build_rde_spec
from ..sim import DEFAULT_START_EPOCH, Control, DriveProfile, SimState, step
from ..speclang import parse, typecheck
from .models import FinalReport, TriggerNote, UiState, build_ui_state
from .store import TripStore


class SessionError(Exception):
    pass


class SessionBusyError(SessionError):
    pass


class NoSessionError(SessionError):
    pass


class NotLiveError(SessionError):
    pass


@dataclass
class _ControlMessage:
    target_speed_kmph: float | None = None
    aggressiveness: float | None = None
    end_drive: bool = False


class Session:
    """A single monitoring run (replay of a stored trip, or live sim)."""

    def __init__(
        self,
        mode: str,
        store: TripStore,
        params: RdeParameters,
        trip: CdpTrip | None = None,
        trip_id: str | None = None,
        profile: DriveProfile | None = None,
        rate: float | None = None,
        loop: asyncio.AbstractEventLoop | None = None,
    ):
        self.id = uuid.uuid4().hex[:12]
        self.mode = mode
        self.params = params
        self._store = store
        self._trip = trip
        self.trip_id = trip_id
        self._profile = profile
        self._rate = rate if rate is not None else (1.0 if mode == "live" else 0.0)
        self._loop = loop

        self._tracker = TripTracker(params)
        tspec = typecheck(parse(build_rde_spec(params)))
        self._monitor = Monitor(tspec)
        self._monitored_streams = {d.name for d in tspec.spec.inputs}
        self._recent: deque[TriggerNote] = deque(maxlen=8)

        self._lock = threading.Lock()
        self._subscribers: list[asyncio.Queue] = []
        self._latest: UiState | None = None
        self._final: FinalReport | None = None
        self._controls: queue.Queue[_ControlMessage] = queue.Queue()
        self._stop = threading.Event()
        # outgoing messages are batched behind a single scheduled flush so
        # an unthrottled session cannot flood the event loop
        self._out_buffer: deque = deque()
        self._flush_scheduled = False
        self._thread = threading.Thread(target=self._run, daemon=True)

        self.status = "running"
        self._publish_snapshot(0.0)
        self._thread.start()

    # -- client surface -----------------------------------------------------

    @property
    def latest(self) -> UiState:
        with self._lock:
            return self._latest

    def control(self, message: _ControlMessage) -> None:
        if self.mode != "live":
            raise NotLiveError("control commands only apply to live sessions")
        self._controls.put(message)

    def subscribe(self, q: asyncio.Queue) -> None:
        with self._lock:
            self._subscribers.append(q)
            latest, finished = self._latest, self.status == "finished"
        if latest is not None:
            q.put_nowait(latest.model_dump())
        if finished:
            q.put_nowait(None)

    def unsubscribe(self, q: asyncio.Queue) -> None:
        with self._lock:
            if q in self._subscribers:
                self._subscribers.remove(q)

    def stop(self) -> FinalReport:
        """Block until the loop finished and the trip is persisted."""
        self._stop.set()
        self._thread.join()
        return self._final

    # -- loop ----------------------------------------------------------------

    def _run(self) -> None:
        try:
            if self.mode == "replay":
                self._run_replay()
            else:
                self._run_live()
        finally:
            self._finalize()

    def _run_replay(self) -> None:
        profile = detect_profile(self._trip)
        events = to_engine_events(self._trip, profile)
        pace = _Pacer(self._rate)
        next_snapshot = 1.0
        last_t = 0.0
        for event in events:
            if self._stop.is_set():
                break
            while event.time >= next_snapshot:
                self._settle(next_snapshot)
                self._publish_snapshot(next_snapshot)
                pace.wait(next_snapshot)
                next_snapshot += 1.0
            self._feed(event)
            last_t = max(last_t, event.time)
        self._settle(last_t)
        self._publish_snapshot(last_t)

    def _run_live(self) -> None:
        converter = _LiveDecoder()
        state = SimState()
        cdp_events: list[CdpEvent] = []
        pace = _Pacer(self._rate)
        script = self._scripted_controls()
        manual: Control | None = None

        while not self._stop.is_set():
            update, end_drive = self._drain_controls(manual)
            if end_drive:
                break
            if update is not None:
                manual = update  # manual steering latches over the script
            control = manual if manual is not None else next(script, None)
            if control is None:
                break  # script exhausted and nobody took the wheel
            state, tick = step(state, 1.0, control, self._profile)
            cdp_events.extend(tick)
            for ev in converter.decode(tick):
                self._feed(ev)
            self._settle(state.t)
            self._publish_snapshot(state.t)
            pace.wait(state.t)
        self._live_events = cdp_events

    def _scripted_controls(self):
        for phase in self._profile.phases:
            control = Control(phase.target_speed_kmph, phase.aggressiveness)
            for _ in range(int(round(phase.duration_s))):
                yield control

    def _drain_controls(self, manual: Control | None) -> tuple[Control | None, bool]:
        """Fold queued control messages; the second value signals end-drive."""
        update: Control | None = None
        while True:
            try:
                msg = self._controls.get_nowait()
            except queue.Empty:
                return update, False
            if msg.end_drive:
                return update, True
            base = update or manual or Control(0.0, 0.5)
            update = Control(
                msg.target_speed_kmph
                if msg.target_speed_kmph is not None
                else base.target_speed_kmph,
                msg.aggressiveness
                if msg.aggressiveness is not None
                else base.aggressiveness,
            )

    def _feed(self, event: Event) -> None:
        # decoded trips carry more streams (GPS, raw sensors) than the
        # specification declares; the monitor sees only its inputs
        if event.stream in self._monitored_streams:
            self._handle_outputs(self._monitor.ingest(event))
        self._tracker.observe(event)

    def _settle(self, t: float) -> None:
        self._handle_outputs(self._monitor.advance_time(t))

    def _handle_outputs(self, outputs) -> None:
        for out in outputs:
            if isinstance(out, TriggerFire) and out.rising:
                note = TriggerNote(t_s=round(out.time, 1), message=out.message)
                self._recent.append(note)
                self._push({"type": "trigger", "t_s": note.t_s, "message": note.message})
                self._publish_snapshot(out.time)

    def _publish_snapshot(self, t: float) -> None:
        state = build_ui_state(
            self._tracker, self._tracker.verdict(), t, self.params, list(self._recent)
        )
        with self._lock:
            self._latest = state
        self._push(state.model_dump())

    def _push(self, message) -> None:
        if self._loop is None:
            return
        with self._lock:
            if not self._subscribers and message is not None:
                return  # latest state stays available via `latest`
            self._out_buffer.append(message)
            if self._flush_scheduled:
                return
            self._flush_scheduled = True
        self._loop.call_soon_threadsafe(self._flush_messages)

    def _flush_messages(self) -> None:
        """Runs on the event loop: drain the batch into subscriber queues,
        dropping the oldest entries of a lagging subscriber."""
        with self._lock:
            batch = list(self._out_buffer)
            self._out_buffer.clear()
            self._flush_scheduled = False
            subscribers = list(self._subscribers)
        for q in subscribers:
            for message in batch:
                while q.full():
                    try:
                        q.get_nowait()
                    except asyncio.QueueEmpty:
                        break
                q.put_nowait(message)

    def _finalize(self) -> None:
        if self.mode == "live":
            events = getattr(self, "_live_events", [])
            trip = CdpTrip(
                vehicle=Vehicle("simulated car", "standard"),
                events=tuple(
                    CdpEvent(ev.t + DEFAULT_START_EPOCH, ev.kind, ev.pid, ev.payload, ev.gps)
                    for ev in events
                ),
            )
            self.trip_id = self._store.put(trip)
        state = self.latest
        try:
            report = self._store.report(self.trip_id, self.params)
        except Exception:
            # trips without the full sensor set still finish cleanly
            report = {"rows": []}
        self._final = FinalReport(
            session_id=self.id,
            trip_id=self.trip_id,
            verdict=state.verdict,
            irrecoverable=state.irrecoverable,
            state=state,
            report=report,
        )
        with self._lock:
            self.status = "finished"
        self._push(None)  # end-of-session sentinel for live subscribers


class _Pacer:
    """Paces simulated seconds against the wall clock."""

    def __init__(self, rate: float):
        self.rate = rate
        self.start = time.monotonic()

    def wait(self, sim_t: float) -> None:
        if self.rate <= 0:
            return
        due = self.start + sim_t / self.rate
        delay = due - time.monotonic()
        if delay > 0:
            time.sleep(delay)


class _LiveDecoder:
    """Causal per-tick decoding for live mode: the acceleration stream is
    a backward difference (replay uses centered differences instead)."""

    def __init__(self):
        self._last: tuple[float, float] | None = None  # (t, m/s)
        self._t0: float | None = None

    def decode(self, tick: list[CdpEvent]) -> list[Event]:
        out: list[Event] = []
        for ev in tick:
            t = ev.t if self._t0 is None else ev.t - self._t0
            if self._t0 is None:
                self._t0 = ev.t
                t = 0.0
            if ev.kind == "gps":
                out.append(Event(t, "lat", ev.gps.lat))
                out.append(Event(t, "lon", ev.gps.lon))
                continue
            for ch in decode_pid(ev.pid, ev.payload):
                if ch.name == "ambient_C":
                    out.append(Event(t, "ambient_K", ch.value + 273.15))
                elif ch.name == "velo_kmph":
                    v = ch.value / 3.6
                    if self._last is not None and t > self._last[0]:
                        accel = (v - self._last[1]) / (t - self._last[0])
                        out.append(Event(t, "accel_mpss", accel))
                    self._last = (t, v)
                    out.append(Event(t, ch.name, ch.value))
                else:
                    out.append(Event(t, ch.name, ch.value))
        # derive emission rates from the tick's decoded sensors
        held = {e.stream: e.value for e in out}
        if out and {"maf_gps", "fuel_Lph", "nox_ppm_down"} <= held.keys():
            from ..emissions import co2_mass_flow, exhaust_mass_flow, nox_mass_flow

            t = out[0].time
            exhaust = exhaust_mass_flow(held["maf_gps"], held["fuel_Lph"])
            out.append(Event(t, "nox_mgps", nox_mass_flow(held["nox_ppm_down"], exhaust)))
            out.append(Event(t, "co2_gps", co2_mass_flow(held["fuel_Lph"])))
        order = {"velo_kmph": 2, "accel_mpss": 1}
        out.sort(key=lambda e: (e.time, order.get(e.stream, 0)))
        return out


class SessionManager:
    """At most one active session; finished sessions hold the slot until
    their final report is collected with ``stop``."""

    def __init__(self, store: TripStore, params: RdeParameters | None = None):
        self.store = store
        self.params = params or RdeParameters()
        self._session: Session | None = None
        self._lock = threading.Lock()

    def start(self, **kwargs) -> Session:
        with self._lock:
            if self._session is not None:
                raise SessionBusyError("a session is already active")
            session = Session(store=self.store, params=self.params, **kwargs)
            self._session = session
            return session

    def get(self, session_id: str) -> Session:
        with self._lock:
            session = self._session
        if session is None or session.id != session_id:
            raise NoSessionError(session_id)
        return session

    def stop(self, session_id: str) -> FinalReport:
        session = self.get(session_id)
        report = session.stop()
        with self._lock:
            self._session = None
        return report
