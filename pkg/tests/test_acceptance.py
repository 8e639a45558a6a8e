"""Acceptance suite: one test per acceptance criterion, each printing a
pass/fail line (run with ``pytest -s tests/test_acceptance.py`` to see
them inline).  Tolerances are pinned here and nowhere else."""

import json
import math
import random
import sys
import time
from contextlib import contextmanager
from io import StringIO

import pytest
from fastapi.testclient import TestClient

from rdemon.engine import (
    Event,
    Monitor,
    StreamValue,
    TriggerFire,
    run_offline,
    window_aggregate,
    write_outputs_ndjson,
)
from rdemon.obd import (
    CdpEvent,
    CdpTrip,
    PID_TABLE,
    UnknownPidError,
    Vehicle,
    decode_pid,
    detect_profile,
    read_cdp,
    to_engine_events,
    write_cdp,
)
from rdemon.rde import (
    Overall,
    RdeParameters,
    TripTracker,
    build_rde_spec,
    rde_fragment,
)
from rdemon.reporting import format_json, segment_table
from rdemon.service import create_app
from rdemon.sim import (
    SegmentLeg,
    alternating_profile,
    golden_valid_profile,
    run_profile,
    speeding_profile,
    synthetic_segment_trip,
)
from rdemon.speclang import AggFunc, AggKind, parse, typecheck


@contextmanager
def criterion(name: str):
    started = time.perf_counter()
    try:
        yield
    except BaseException:
        print(f"ACCEPTANCE FAIL — {name}", file=sys.stderr, flush=True)
        raise
    elapsed = time.perf_counter() - started
    print(f"ACCEPTANCE PASS — {name} ({elapsed:.2f}s)", flush=True)


# ---------------------------------------------------------------------------
# 1. paper-snippet fidelity
# ---------------------------------------------------------------------------


def test_criterion_paper_snippet_fidelity():
    with criterion("paper-snippet fidelity (rural fragment, brute-force oracle)"):
        started = time.perf_counter()
        tspec = typecheck(parse(rde_fragment()))
        monitor = Monitor(tspec)
        seconds = 600
        events = []
        for k in range(seconds):
            events.append(Event(float(k), "velo_kmph", 70.0))
            events.append(Event(float(k), "accel_mpss", 1.0))
        outputs = monitor.run(events)
        runtime = time.perf_counter() - started

        dyn = [(o.time, o.value) for o in outputs
               if isinstance(o, StreamValue) and o.stream == "rural_dyn"]
        assert len(dyn) == seconds - 1  # one per whole second covered by events
        for _, value in dyn:
            assert abs(value - 70.0 * 1.0 / 3.6) <= 1e-9

        # brute-force recomputation of the percentile stream and trigger
        fires = {o.time for o in outputs if isinstance(o, TriggerFire)}
        pctl = {o.time: o.value for o in outputs
                if isinstance(o, StreamValue) and o.stream == "rural_pctl_dyn"}
        threshold = 0.136 * 70.0 + 14.44
        assert threshold == pytest.approx(23.96, abs=1e-12)
        history = []
        for d in range(1, seconds):
            d = float(d)
            history.append((d, 70.0 * 1.0 / 3.6))  # rural_dyn produced at d
            window = [v for t, v in history if d - 7200.0 < t <= d]
            window.sort()
            expected_p95 = window[math.ceil(0.95 * len(window)) - 1]
            assert abs(pctl[d] - expected_p95) <= 1e-9
            should_fire = expected_p95 > threshold  # avg velocity 70 <= 74.6
            assert (d in fires) == should_fire
        assert runtime < 1.0, f"fragment run took {runtime:.2f}s"


# ---------------------------------------------------------------------------
# 2. reference-table reproduction
# ---------------------------------------------------------------------------

DRIVE_1 = ([SegmentLeg(35.45, 50, 137, 222),
            SegmentLeg(22.33, 75, 305, 154),
            SegmentLeg(26.10, 120, 241, 153)], (83.88, 214.0, 183.0))
DRIVE_2 = ([SegmentLeg(37.46, 50, 102, 251),
            SegmentLeg(27.40, 75, 90, 172),
            SegmentLeg(25.37, 120, 105, 175)], (90.22, 99.0, 205.0))


def test_criterion_reference_table_reproduction():
    with criterion("aggregation-table reproduction (both reference drives)"):
        started = time.perf_counter()
        for legs, (dist, nox, co2) in (DRIVE_1, DRIVE_2):
            rows = segment_table(synthetic_segment_trip(legs))
            total = rows[-1]
            assert total.distance_km == pytest.approx(dist, abs=0.02)
            assert total.nox_mg_per_km == pytest.approx(nox, abs=1.0)
            assert total.co2_g_per_km == pytest.approx(co2, abs=1.0)
        assert time.perf_counter() - started < 5.0


# ---------------------------------------------------------------------------
# 3. window-oracle suite
# ---------------------------------------------------------------------------

WINDOW_SUITE_SPEC = """
input x: Float64
output w_avg : Float64 @1Hz := x.aggregate(over: 7.5, using: avg).defaults(to: 0.0)
output w_sum : Float64 @1Hz := x.aggregate(over: 7.5, using: sum).defaults(to: 0.0)
output w_cnt : Float64 @1Hz := x.aggregate(over: 7.5, using: count).defaults(to: 0.0)
output w_min : Float64 @1Hz := x.aggregate(over: 7.5, using: min).defaults(to: 0.0)
output w_max : Float64 @1Hz := x.aggregate(over: 7.5, using: max).defaults(to: 0.0)
output w_int : Float64 @1Hz := x.aggregate(over: 7.5, using: integral).defaults(to: 0.0)
output w_p95 : Float64 @1Hz := x.aggregate(over: 7.5, using: pctl(95)).defaults(to: 0.0)
"""

EXACT_FUNCS = {"w_cnt", "w_min", "w_max", "w_p95"}
FUNCS = {
    "w_avg": AggFunc(AggKind.AVG),
    "w_sum": AggFunc(AggKind.SUM),
    "w_cnt": AggFunc(AggKind.COUNT),
    "w_min": AggFunc(AggKind.MIN),
    "w_max": AggFunc(AggKind.MAX),
    "w_int": AggFunc(AggKind.INTEGRAL),
    "w_p95": AggFunc(AggKind.PCTL, 95.0),
}


def test_criterion_window_oracle_suite():
    with criterion("window oracle: 1,000 random streams vs naive recomputation"):
        started = time.perf_counter()
        tspec = typecheck(parse(WINDOW_SUITE_SPEC))
        checked = 0
        for seed in range(1000):
            rng = random.Random(seed)
            n = rng.randint(10, 60)
            times = sorted(rng.uniform(0.0, 20.0) for _ in range(n))
            events = [Event(t, "x", rng.uniform(-100.0, 100.0)) for t in times]
            outputs = Monitor(tspec).run(events)
            history = [(e.time, e.value) for e in events]
            by_stream: dict[str, list[tuple[float, float]]] = {}
            for o in outputs:
                if isinstance(o, StreamValue):
                    by_stream.setdefault(o.stream, []).append((o.time, o.value))
            for stream, func in FUNCS.items():
                for d, got in by_stream.get(stream, []):
                    window = [(t, v) for t, v in history if d - 7.5 < t <= d and t < d]
                    want = window_aggregate(window, func)
                    if want is None:
                        want = 0.0
                    if stream in EXACT_FUNCS:
                        assert got == want, (seed, stream, d)
                    else:
                        tol = 1e-9 * max(1.0, abs(want))
                        assert abs(got - want) <= tol, (seed, stream, d)
                    checked += 1
        runtime = time.perf_counter() - started
        assert checked > 100_000
        assert runtime < 30.0, f"oracle suite took {runtime:.1f}s"


# ---------------------------------------------------------------------------
# 4. verdict end-to-end
# ---------------------------------------------------------------------------


def minute_snapshots(profile):
    """Decoded-trip tracker verdicts sampled once per simulated minute."""
    trip = run_profile(profile)
    events = to_engine_events(trip, detect_profile(trip))
    tracker = TripTracker()
    snapshots = []
    next_mark = 60.0
    for event in events:
        if event.time >= next_mark:
            snapshots.append((next_mark / 60.0, tracker.verdict()))
            next_mark += 60.0
        tracker.observe(event)
    snapshots.append((tracker.elapsed_s / 60.0, tracker.verdict()))
    return snapshots, tracker


def test_criterion_verdict_end_to_end():
    with criterion("verdict end-to-end (golden / speeding / alternating)"):
        golden, _ = minute_snapshots(golden_valid_profile())
        valid_minutes = [m for m, v in golden if v.overall is Overall.VALID]
        assert any(91.0 <= m <= 119.0 for m in valid_minutes), valid_minutes
        assert all(v.overall is not Overall.INVALID for m, v in golden if m < 90)

        # overspeed: irrecoverable from the transgression tick onward
        trip = run_profile(speeding_profile())
        events = to_engine_events(trip, detect_profile(trip))
        tracker = TripTracker()
        transgressed_at = None
        for event in events:
            tracker.observe(event)
            if event.stream != "velo_kmph":
                continue
            verdict = tracker.verdict()
            if transgressed_at is None and tracker.max_speed_kmph > 160.0:
                transgressed_at = event.time
            if transgressed_at is not None:
                assert verdict.irrecoverable
                assert verdict.overall is Overall.INVALID
        assert transgressed_at is not None

        alternating, _ = minute_snapshots(alternating_profile())
        in_window = [(m, v) for m, v in alternating if 90.0 <= m <= 120.0]
        valid_then_invalid = False
        seen_valid = False
        for _, v in in_window:
            if v.overall is Overall.VALID:
                seen_valid = True
            elif seen_valid and v.overall is Overall.INVALID:
                valid_then_invalid = True
        assert valid_then_invalid, [
            (m, v.overall.value) for m, v in in_window
        ]


# ---------------------------------------------------------------------------
# 5. determinism of stored-trip replay
# ---------------------------------------------------------------------------


def ndjson_of(trip) -> str:
    events = to_engine_events(trip, detect_profile(trip))
    monitored = {"velo_kmph", "accel_mpss", "ambient_K", "nox_mgps", "co2_gps"}
    events = [e for e in events if e.stream in monitored]
    outputs = run_offline(build_rde_spec(), events)
    buf = StringIO()
    write_outputs_ndjson(outputs, buf)
    return buf.getvalue()


def test_criterion_replay_determinism():
    with criterion("determinism: byte-identical replay logs and reports"):
        trip_bytes = write_cdp(run_profile(speeding_profile()))
        trip_a, trip_b = read_cdp(trip_bytes), read_cdp(trip_bytes)
        assert ndjson_of(trip_a) == ndjson_of(trip_b)

        table_trip = write_cdp(synthetic_segment_trip(DRIVE_1[0]))
        report_a = format_json(segment_table(read_cdp(table_trip)))
        report_b = format_json(segment_table(read_cdp(table_trip)))
        assert report_a == report_b


# ---------------------------------------------------------------------------
# 6. CDP round-trip and decode totality
# ---------------------------------------------------------------------------


def random_trip(seed: int) -> CdpTrip:
    rng = random.Random(seed)
    models = ["Wagen élégant", "車両 A6", "plain sedan", "Жигули"]
    events = []
    t = 1_000_000.0
    for _ in range(rng.randint(0, 40)):
        t += rng.uniform(0.0, 2.0)
        if rng.random() < 0.3:
            events.append(
                CdpEvent.fix(
                    t,
                    rng.uniform(-89, 89),
                    rng.uniform(-179, 179),
                    alt_m=rng.choice([None, rng.uniform(-10, 3000)]),
                    speed_mps=rng.choice([None, rng.uniform(0, 60)]),
                )
            )
        else:
            pid = rng.choice(sorted(PID_TABLE))
            payload = bytes(rng.randrange(256) for _ in range(PID_TABLE[pid].length))
            events.append(CdpEvent.obd(t, pid, payload))
    return CdpTrip(vehicle=Vehicle(rng.choice(models), "standard"), events=tuple(events))


def test_criterion_cdp_round_trip_and_decode_totality():
    with criterion("CDP round-trip corpus and PID decode totality"):
        for seed in range(50):
            trip = random_trip(seed)
            data = write_cdp(trip)
            assert read_cdp(data) == trip
            assert write_cdp(read_cdp(data)) == data

        rng = random.Random(4242)
        for pid, spec in PID_TABLE.items():
            for _ in range(200):
                payload = bytes(rng.randrange(256) for _ in range(spec.length))
                channels = decode_pid(pid, payload)
                assert len(channels) == len(spec.channels)
                assert all(isinstance(c.value, float) for c in channels)
        for bad_pid in set(range(256)) - set(PID_TABLE):
            with pytest.raises(UnknownPidError):
                decode_pid(bad_pid, b"")


# ---------------------------------------------------------------------------
# 7. the primary suite stands alone (service driven over HTTP/WS only)
# ---------------------------------------------------------------------------


def test_criterion_service_over_wire_without_frontend(tmp_path):
    with criterion("service exercised via HTTP/WS alone (no secondary build)"):
        assert "frontend" not in {m.split(".")[0] for m in sys.modules}
        app = create_app(trip_dir=tmp_path / "trips")
        with TestClient(app) as client:
            trip = synthetic_segment_trip(DRIVE_1[0])
            trip_id = client.post("/trips", content=write_cdp(trip)).json()["trip_id"]
            report = client.get(f"/trips/{trip_id}/report").json()
            assert report["rows"][-1]["nox_mg_per_km"] == pytest.approx(214.0, abs=1.0)
            sid = client.post(
                "/sessions", json={"mode": "replay", "trip_id": trip_id, "rate": 0}
            ).json()["id"]
            states = []
            with client.websocket_connect(f"/sessions/{sid}/live") as ws:
                while True:
                    try:
                        msg = ws.receive_json()
                    except Exception:
                        break
                    if msg["type"] == "state":
                        states.append(msg)
            final = client.delete(f"/sessions/{sid}").json()
            assert states[-1]["nox_mg_per_km"] > states[-1]["nox_limit_mg_per_km"]
            assert final["trip_id"] == trip_id
