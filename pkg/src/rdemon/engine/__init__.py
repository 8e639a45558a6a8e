"""Online stream evaluation engine."""

from .io import output_record, parse_event_csv, run_offline, write_outputs_ndjson
from .monitor import (
    EngineError,
    Event,
    EventTypeError,
    Monitor,
    MonitorOutput,
    NonMonotonicTimeError,
    StreamValue,
    TriggerFire,
    UnknownStreamError,
    new_monitor,
)
from .windows import WindowBuffer, percentile, trapezoid_integral, window_aggregate

__all__ = [
    "EngineError",
    "Event",
    "EventTypeError",
    "Monitor",
    "MonitorOutput",
    "NonMonotonicTimeError",
    "StreamValue",
    "TriggerFire",
    "UnknownStreamError",
    "WindowBuffer",
    "new_monitor",
    "output_record",
    "parse_event_csv",
    "percentile",
    "run_offline",
    "trapezoid_integral",
    "window_aggregate",
    "write_outputs_ndjson",
]
