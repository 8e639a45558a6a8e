"""Command-line interface.

File-level commands (``export-spec``, ``simulate``, ``report``,
``monitor``, ``replay``) call the core package directly; the ``client``
group is a thin HTTP client for a running monitor service; ``serve``
starts that service.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from . import __version__
from .engine import parse_event_csv, run_offline, write_outputs_ndjson
from .obd import detect_profile, read_cdp, to_engine_events
from .rde import RdeParameters, build_rde_spec
from .reporting import format_csv, format_json, format_table, segment_table
from .sim import BUILTIN_PROFILES, profile_from_document, run_profile
from .obd.cdp import write_cdp


@click.group()
@click.version_option(__version__)
def main() -> None:
    """Runtime monitoring for real-driving-emissions test drives."""


# ---------------------------------------------------------------------------
# local commands
# ---------------------------------------------------------------------------


@main.command("export-spec")
@click.option("-o", "--out", type=click.Path(dir_okay=False), default=None,
              help="write to a file instead of stdout")
@click.option("--window-s", type=float, default=None, help="dynamics window override")
@click.option("--nox-limit", type=float, default=None, help="NOx mg/km limit override")
def export_spec(out: str | None, window_s: float | None, nox_limit: float | None) -> None:
    """Emit the monitored specification text for inspection."""
    overrides = {}
    if window_s is not None:
        overrides["dynamics_window_s"] = window_s
    if nox_limit is not None:
        overrides["nox_limit_mg_per_km"] = nox_limit
    text = build_rde_spec(RdeParameters(**overrides))
    if out:
        Path(out).write_text(text)
        click.echo(f"wrote {out}")
    else:
        click.echo(text, nl=False)


@main.command()
@click.option("--profile", "profile_name", default="valid",
              help=f"built-in profile ({', '.join(sorted(BUILTIN_PROFILES))}) "
                   "or a profile JSON file path")
@click.option("--out", required=True, type=click.Path(dir_okay=False))
@click.option("--model", default="simulated car")
def simulate(profile_name: str, out: str, model: str) -> None:
    """Run a scripted drive and write the trip as a CDP document."""
    if profile_name in BUILTIN_PROFILES:
        profile = BUILTIN_PROFILES[profile_name]()
    else:
        doc = json.loads(Path(profile_name).read_text())
        profile = profile_from_document(doc)
    trip = run_profile(profile, model=model)
    Path(out).write_bytes(write_cdp(trip))
    click.echo(f"wrote {out} ({len(trip.events)} events)")


@main.command()
@click.argument("trip_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--format", "fmt", type=click.Choice(["table", "csv", "json"]),
              default="table")
@click.option("--coefficients", "coeff_file", default=None,
              type=click.Path(exists=True, dir_okay=False),
              help="emission coefficient overrides (key = value file)")
def report(trip_file: str, fmt: str, coeff_file: str | None) -> None:
    """Per-segment emission aggregation of a stored trip."""
    from .emissions import load_coefficients

    coefficients = load_coefficients(coeff_file) if coeff_file else None
    trip = read_cdp(Path(trip_file).read_bytes())
    rows = segment_table(trip, coefficients=coefficients)
    renderer = {"table": format_table, "csv": format_csv, "json": format_json}[fmt]
    click.echo(renderer(rows), nl=(fmt == "table"))


@main.command()
@click.argument("events_csv", type=click.Path(exists=True, dir_okay=False))
@click.option("--spec", "spec_file", type=click.Path(exists=True, dir_okay=False),
              default=None, help="specification text (default: the built-in rules)")
@click.option("-o", "--out", type=click.Path(dir_okay=False), default=None)
def monitor(events_csv: str, spec_file: str | None, out: str | None) -> None:
    """Evaluate a specification over a CSV event log (time,stream,value)."""
    spec_text = Path(spec_file).read_text() if spec_file else build_rde_spec()
    events = parse_event_csv(Path(events_csv).read_text().splitlines())
    outputs = run_offline(spec_text, events)
    _write_ndjson(outputs, out)


@main.command()
@click.argument("trip_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--spec", "spec_file", type=click.Path(exists=True, dir_okay=False),
              default=None)
@click.option("-o", "--out", type=click.Path(dir_okay=False), default=None)
def replay(trip_file: str, spec_file: str | None, out: str | None) -> None:
    """Replay a CDP trip through the monitor, emitting NDJSON outputs."""
    from .speclang import parse as parse_spec

    trip = read_cdp(Path(trip_file).read_bytes())
    events = to_engine_events(trip, detect_profile(trip))
    spec_text = Path(spec_file).read_text() if spec_file else build_rde_spec()
    declared = {d.name for d in parse_spec(spec_text).inputs}
    outputs = run_offline(spec_text, [e for e in events if e.stream in declared])
    _write_ndjson(outputs, out)


def _write_ndjson(outputs, out: str | None) -> None:
    if out:
        with open(out, "w") as fp:
            write_outputs_ndjson(outputs, fp)
        click.echo(f"wrote {out} ({len(outputs)} records)", err=True)
    else:
        write_outputs_ndjson(outputs, sys.stdout)


@main.command()
@click.option("--host", default="127.0.0.1")
@click.option("--port", default=8000, type=int)
@click.option("--trip-dir", default="./trips", type=click.Path(file_okay=False))
@click.option("--ui-dir", default=None, type=click.Path(file_okay=False),
              help="serve a built dashboard from this directory at /ui")
def serve(host: str, port: int, trip_dir: str, ui_dir: str | None) -> None:
    """Run the monitor service."""
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(trip_dir=trip_dir, ui_dir=ui_dir), host=host, port=port)


# ---------------------------------------------------------------------------
# thin client against a running service
# ---------------------------------------------------------------------------


@main.group()
@click.option("--server", default="http://127.0.0.1:8000", show_default=True)
@click.pass_context
def client(ctx: click.Context, server: str) -> None:
    """Talk to a running monitor service."""
    ctx.obj = server.rstrip("/")


def _request(server: str, method: str, path: str, **kwargs):
    import httpx

    response = httpx.request(method, server + path, timeout=60.0, **kwargs)
    if response.status_code >= 400:
        detail = response.json().get("detail", response.text)
        raise click.ClickException(f"{response.status_code}: {detail}")
    return response


@client.command("upload")
@click.argument("trip_file", type=click.Path(exists=True, dir_okay=False))
@click.pass_obj
def client_upload(server: str, trip_file: str) -> None:
    """Upload a CDP trip; prints its content id."""
    response = _request(server, "POST", "/trips", content=Path(trip_file).read_bytes())
    click.echo(response.json()["trip_id"])


@client.command("trips")
@click.pass_obj
def client_trips(server: str) -> None:
    for info in _request(server, "GET", "/trips").json()["trips"]:
        click.echo(f"{info['id']}  {info['duration_s']:8.1f}s  {info['model']}")


@client.command("start-replay")
@click.argument("trip_id")
@click.option("--rate", type=float, default=None)
@click.pass_obj
def client_start_replay(server: str, trip_id: str, rate: float | None) -> None:
    body = {"mode": "replay", "trip_id": trip_id, "rate": rate}
    click.echo(_request(server, "POST", "/sessions", json=body).json()["id"])


@client.command("start-live")
@click.option("--profile", default="valid")
@click.option("--rate", type=float, default=None)
@click.pass_obj
def client_start_live(server: str, profile: str, rate: float | None) -> None:
    body = {"mode": "live", "profile": profile, "rate": rate}
    click.echo(_request(server, "POST", "/sessions", json=body).json()["id"])


@client.command("state")
@click.argument("session_id")
@click.pass_obj
def client_state(server: str, session_id: str) -> None:
    state = _request(server, "GET", f"/sessions/{session_id}/state").json()
    click.echo(json.dumps(state, indent=2))


@client.command("control")
@click.argument("session_id")
@click.option("--target", type=float, default=None, help="target speed km/h")
@click.option("--aggressiveness", type=float, default=None)
@click.option("--end", is_flag=True, help="end the drive")
@click.pass_obj
def client_control(server: str, session_id: str, target: float | None,
                   aggressiveness: float | None, end: bool) -> None:
    body = {"target_speed_kmph": target, "aggressiveness": aggressiveness,
            "end_drive": end}
    _request(server, "POST", f"/sessions/{session_id}/control", json=body)
    click.echo("ok")


@client.command("stop")
@click.argument("session_id")
@click.pass_obj
def client_stop(server: str, session_id: str) -> None:
    final = _request(server, "DELETE", f"/sessions/{session_id}").json()
    click.echo(json.dumps(final, indent=2))


@client.command("report")
@click.argument("trip_id")
@click.pass_obj
def client_report(server: str, trip_id: str) -> None:
    click.echo(json.dumps(_request(server, "GET", f"/trips/{trip_id}/report").json(),
                          indent=2))


if __name__ == "__main__":
    main()
