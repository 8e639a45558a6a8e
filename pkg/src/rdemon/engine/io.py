"""Offline monitoring: CSV events in, line-delimited JSON records out.

Event CSV: one ``time,stream,value`` row per sample (an optional header
row is skipped).  Values are floats, or ``true``/``false`` for Bool
streams.  Output records are ``{"t": …, "stream": …, "value": …}`` for
stream values and ``{"t": …, "trigger": …, "message": …}`` for trigger
notifications, one JSON object per line.
"""

from __future__ import annotations

import json
from typing import IO, Iterable

from ..speclang import parse, typecheck
from .monitor import Event, Monitor, MonitorOutput, StreamValue, TriggerFire


def parse_event_csv(lines: Iterable[str]) -> list[Event]:
    events: list[Event] = []
    for lineno, line in enumerate(lines, start=1):
        line = line.strip()
        if not line:
            continue
        parts = [p.strip() for p in line.split(",")]
        if len(parts) != 3:
            raise ValueError(f"line {lineno}: expected time,stream,value")
        if lineno == 1 and parts[0].lower() == "time":
            continue
        try:
            t = float(parts[0])
        except ValueError:
            raise ValueError(f"line {lineno}: bad timestamp {parts[0]!r}") from None
        raw = parts[2]
        value: float | bool
        if raw in ("true", "false"):
            value = raw == "true"
        else:
            try:
                value = float(raw)
            except ValueError:
                raise ValueError(f"line {lineno}: bad value {raw!r}") from None
        events.append(Event(t, parts[1], value))
    return events


def output_record(out: MonitorOutput) -> dict:
    if isinstance(out, StreamValue):
        return {"t": out.time, "stream": out.stream, "value": out.value}
    if isinstance(out, TriggerFire):
        return {"t": out.time, "trigger": out.trigger, "message": out.message}
    raise TypeError(f"not a monitor output: {out!r}")


def write_outputs_ndjson(outputs: Iterable[MonitorOutput], fp: IO[str]) -> None:
    for out in outputs:
        fp.write(json.dumps(output_record(out), ensure_ascii=False))
        fp.write("\n")


def run_offline(
    spec_text: str,
    events: Iterable[Event],
    percentile_method: str = "nearest-rank",
) -> list[MonitorOutput]:
    """Monitor a full trace: ingest every event, then settle the last instant."""
    tspec = typecheck(parse(spec_text))
    monitor = Monitor(tspec, start_time=0.0, percentile_method=percentile_method)
    return monitor.run(events)
