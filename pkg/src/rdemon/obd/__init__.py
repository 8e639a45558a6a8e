"""OBD-II decoding, the CDP trip format, and trip-to-event conversion."""

from .cdp import (
    CDP_VERSION,
    CdpError,
    CdpEvent,
    CdpTrip,
    GpsFix,
    SchemaError,
    UnsortedEventsError,
    Vehicle,
    read_cdp,
    trip_document,
    write_cdp,
)
from .convert import TripDecodeError, derive_acceleration, to_engine_events
from .pids import (
    PID_AMBIENT_TEMP,
    PID_ENGINE_RPM,
    PID_FUEL_RATE,
    PID_MAF,
    PID_NOX_PAIR,
    PID_TABLE,
    PID_VEHICLE_SPEED,
    DecodedChannel,
    ObdError,
    PayloadLengthError,
    UnknownPidError,
    decode_pid,
    encode_pid,
)
from .profiles import (
    DETECTION_WINDOW_S,
    PROFILE_SCALING,
    RDE_REQUIRED_PIDS,
    SensorProfile,
    detect_profile,
)

__all__ = [
    "CDP_VERSION",
    "CdpError",
    "CdpEvent",
    "CdpTrip",
    "DETECTION_WINDOW_S",
    "DecodedChannel",
    "GpsFix",
    "ObdError",
    "PID_AMBIENT_TEMP",
    "PID_ENGINE_RPM",
    "PID_FUEL_RATE",
    "PID_MAF",
    "PID_NOX_PAIR",
    "PID_TABLE",
    "PID_VEHICLE_SPEED",
    "PROFILE_SCALING",
    "PayloadLengthError",
    "RDE_REQUIRED_PIDS",
    "SchemaError",
    "SensorProfile",
    "TripDecodeError",
    "UnknownPidError",
    "UnsortedEventsError",
    "Vehicle",
    "decode_pid",
    "derive_acceleration",
    "detect_profile",
    "encode_pid",
    "read_cdp",
    "to_engine_events",
    "trip_document",
    "write_cdp",
]
