"""The car-data-platform trip format: timestamped raw OBD and GPS events.

Trips are UTF-8 JSON validated against the schema shipped in
``rdemon/schemas/cdp.schema.json``.  ``write_cdp`` emits a canonical
encoding (sorted keys, compact separators, trailing newline), so
``write(read(x))`` is byte-identity on canonical input and trips hash
stably for content addressing.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources

import jsonschema


class CdpError(Exception):
    pass


class SchemaError(CdpError):
    def __init__(self, message: str, path: str = "$"):
        super().__init__(f"{path}: {message}")
        self.path = path


class UnsortedEventsError(CdpError):
    pass


CDP_VERSION = "1.0"


@dataclass(frozen=True)
class GpsFix:
    lat: float
    lon: float
    alt_m: float | None = None
    speed_mps: float | None = None


@dataclass(frozen=True)
class CdpEvent:
    """Exactly one of ``obd`` (pid + payload) or ``gps`` is populated."""

    t: float
    kind: str  # "obd" | "gps"
    pid: int | None = None
    payload: bytes | None = None
    gps: GpsFix | None = None

    @staticmethod
    def obd(t: float, pid: int, payload: bytes) -> "CdpEvent":
        return CdpEvent(t, "obd", pid=pid, payload=payload)

    @staticmethod
    def fix(
        t: float,
        lat: float,
        lon: float,
        alt_m: float | None = None,
        speed_mps: float | None = None,
    ) -> "CdpEvent":
        return CdpEvent(t, "gps", gps=GpsFix(lat, lon, alt_m, speed_mps))


@dataclass(frozen=True)
class Vehicle:
    model: str = "unknown"
    profile_id: str = "standard"


@dataclass(frozen=True)
class CdpTrip:
    vehicle: Vehicle
    events: tuple[CdpEvent, ...]
    version: str = CDP_VERSION

    @property
    def start_time(self) -> float:
        return self.events[0].t if self.events else 0.0


def _schema() -> dict:
    text = resources.files("rdemon.schemas").joinpath("cdp.schema.json").read_text()
    return json.loads(text)


_SCHEMA = _schema()
_VALIDATOR = jsonschema.Draft202012Validator(_SCHEMA)


def read_cdp(data: bytes | str) -> CdpTrip:
    """Parse and validate a trip document.

    Raises :class:`SchemaError` (with the offending JSON path) on any
    structural problem and :class:`UnsortedEventsError` when event
    timestamps decrease.
    """
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as err:
            raise SchemaError(f"not UTF-8: {err}") from None
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as err:
        raise SchemaError(f"not JSON: {err.msg} (line {err.lineno})") from None

    error = jsonschema.exceptions.best_match(_VALIDATOR.iter_errors(doc))
    if error is not None:
        path = "$" + "".join(
            f"[{p}]" if isinstance(p, int) else f".{p}" for p in error.absolute_path
        )
        raise SchemaError(error.message, path)

    events: list[CdpEvent] = []
    last_t: float | None = None
    for i, ev in enumerate(doc["events"]):
        t = float(ev["t"])
        if last_t is not None and t < last_t:
            raise UnsortedEventsError(
                f"event {i} at t={t} is earlier than its predecessor at t={last_t}"
            )
        last_t = t
        if ev["kind"] == "obd":
            events.append(
                CdpEvent.obd(t, int(ev["pid"], 16), bytes.fromhex(ev["payload"]))
            )
        else:
            events.append(
                CdpEvent.fix(
                    t,
                    float(ev["lat"]),
                    float(ev["lon"]),
                    None if "alt_m" not in ev else float(ev["alt_m"]),
                    None if "speed_mps" not in ev else float(ev["speed_mps"]),
                )
            )
    vehicle = Vehicle(doc["vehicle"]["model"], doc["vehicle"]["profile_id"])
    return CdpTrip(vehicle=vehicle, events=tuple(events), version=doc["version"])


def trip_document(trip: CdpTrip) -> dict:
    events = []
    for ev in trip.events:
        if ev.kind == "obd":
            events.append(
                {
                    "t": ev.t,
                    "kind": "obd",
                    "pid": f"{ev.pid:02X}",
                    "payload": ev.payload.hex().upper(),
                }
            )
        else:
            rec = {"t": ev.t, "kind": "gps", "lat": ev.gps.lat, "lon": ev.gps.lon}
            if ev.gps.alt_m is not None:
                rec["alt_m"] = ev.gps.alt_m
            if ev.gps.speed_mps is not None:
                rec["speed_mps"] = ev.gps.speed_mps
            events.append(rec)
    return {
        "version": trip.version,
        "vehicle": {"model": trip.vehicle.model, "profile_id": trip.vehicle.profile_id},
        "events": events,
    }


def write_cdp(trip: CdpTrip) -> bytes:
    """Serialize to the canonical UTF-8 encoding."""
    text = json.dumps(
        trip_document(trip), ensure_ascii=False, sort_keys=True, separators=(",", ":")
    )
    return (text + "\n").encode("utf-8")
