"""Monitor semantics: deadlines, sample-and-hold, filters, windows, triggers."""

import io
import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rdemon.engine import (
    Event,
    Monitor,
    NonMonotonicTimeError,
    StreamValue,
    TriggerFire,
    UnknownStreamError,
    parse_event_csv,
    run_offline,
    window_aggregate,
    write_outputs_ndjson,
)
from rdemon.rde import rde_fragment
from rdemon.speclang import AggFunc, AggKind, parse, typecheck


def check(text):
    return typecheck(parse(text))


def values_of(outputs, stream):
    return [(o.time, o.value) for o in outputs if isinstance(o, StreamValue) and o.stream == stream]


def fires(outputs):
    return [o for o in outputs if isinstance(o, TriggerFire)]


DYN_SPEC = """
input velo_kmph, accel_mpss: Float64
output dyn : Float64 @1Hz := velo_kmph * accel_mpss / 3.6
"""


# ---------------------------------------------------------------------------
# monitor construction
# ---------------------------------------------------------------------------


def test_new_monitor_deadlines_on_one_hz_grid():
    m = Monitor(check(rde_fragment()), start_time=0.0)
    assert set(m.next_deadlines.values()) == {1.0}
    m.advance_time(2.5)
    assert set(m.next_deadlines.values()) == {3.0}


def test_new_monitor_without_periodic_streams_has_no_deadlines():
    m = Monitor(check("input x: Float64\noutput y := x * 2.0"))
    assert m.next_deadlines == {}


def test_new_monitor_start_offset():
    m = Monitor(check(rde_fragment()), start_time=5.0)
    assert set(m.next_deadlines.values()) == {6.0}


# ---------------------------------------------------------------------------
# ingest
# ---------------------------------------------------------------------------


def test_event_before_first_deadline_produces_no_periodic_output():
    m = Monitor(check(DYN_SPEC))
    assert m.ingest(Event(0.5, "velo_kmph", 36.0)) == []


def test_sample_and_hold_and_absent_input():
    """Deadline 1.0 fires when t=1.2 arrives: velocity held, accel absent."""
    m = Monitor(check(DYN_SPEC))
    m.ingest(Event(0.5, "velo_kmph", 36.0))
    out = m.ingest(Event(1.2, "accel_mpss", 1.0))
    assert values_of(out, "dyn") == []  # accel had never been sampled at d=1.0
    out = m.advance_time(2.0)
    assert values_of(out, "dyn") == [(2.0, 10.0)]  # 36 * 1 / 3.6


def test_non_monotonic_event_rejected():
    m = Monitor(check(DYN_SPEC))
    m.ingest(Event(2.0, "velo_kmph", 10.0))
    with pytest.raises(NonMonotonicTimeError):
        m.ingest(Event(1.0, "velo_kmph", 10.0))


def test_unknown_stream_rejected():
    m = Monitor(check(DYN_SPEC))
    with pytest.raises(UnknownStreamError):
        m.ingest(Event(0.0, "nope", 1.0))


def test_event_at_deadline_applies_after_the_deadline_fires():
    m = Monitor(check(DYN_SPEC))
    m.ingest(Event(0.0, "velo_kmph", 36.0))
    m.ingest(Event(0.0, "accel_mpss", 1.0))
    out = m.ingest(Event(1.0, "velo_kmph", 72.0))
    assert values_of(out, "dyn") == [(1.0, 10.0)]  # pre-event velocity 36
    out = m.advance_time(2.0)
    assert values_of(out, "dyn") == [(2.0, 20.0)]


# ---------------------------------------------------------------------------
# advance_time
# ---------------------------------------------------------------------------


def test_advance_fires_exactly_the_grid_deadlines():
    spec = check("input x: Float64\noutput c : Float64 @1Hz := x.aggregate(over: 10, using: count).defaults(to: 0.0)")
    m = Monitor(spec)
    out = m.advance_time(3.0)
    assert values_of(out, "c") == [(1.0, 0.0), (2.0, 0.0), (3.0, 0.0)]


def test_advance_to_current_time_is_a_noop():
    m = Monitor(check(DYN_SPEC))
    m.advance_time(1.5)
    assert m.advance_time(1.5) == []


def test_initially_true_trigger_fires_at_first_deadline():
    spec = check(
        "input x: Float64\n"
        "output c : Float64 @1Hz := x.aggregate(over: 10, using: count).defaults(to: 0.0)\n"
        "trigger c == 0.0"
    )
    m = Monitor(spec)
    out = m.advance_time(1.0)
    assert len(fires(out)) == 1
    assert fires(out)[0].time == 1.0
    assert fires(out)[0].rising


def test_trigger_refires_while_condition_holds_with_rising_edge_marked():
    spec = check(
        "input x: Float64\n"
        "output c : Float64 @1Hz := x.aggregate(over: 10, using: count).defaults(to: 0.0)\n"
        "trigger c == 0.0"
    )
    m = Monitor(spec)
    out = m.advance_time(3.0)
    tr = fires(out)
    assert [t.time for t in tr] == [1.0, 2.0, 3.0]
    assert [t.rising for t in tr] == [True, False, False]


# ---------------------------------------------------------------------------
# filters and absence
# ---------------------------------------------------------------------------


def test_false_filter_suppresses_value_but_windows_still_default():
    m = Monitor(check(rde_fragment()))
    m.ingest(Event(0.0, "velo_kmph", 36.0))  # urban speed: is_rural false
    m.ingest(Event(0.0, "accel_mpss", 1.0))
    out = m.advance_time(1.0)
    assert values_of(out, "rural_dyn") == []
    assert values_of(out, "rural_pctl_dyn") == [(1.0, 0.0)]
    assert values_of(out, "is_rural") == [(1.0, False)]


def test_rural_trace_produces_dynamics_each_second():
    m = Monitor(check(rde_fragment()))
    events = []
    for k in range(5):
        events.append(Event(float(k), "velo_kmph", 70.0))
        events.append(Event(float(k), "accel_mpss", 1.0))
    out = m.run(events)
    assert values_of(out, "rural_dyn") == [
        (float(k), pytest.approx(70.0 / 3.6)) for k in range(1, 5)
    ]


def test_direct_reference_to_suppressed_stream_is_absent():
    spec = check(
        "input x: Float64\n"
        "output gated : Float64 @1Hz filter: x.defaults(to: 0.0) > 10.0 := x.defaults(to: 0.0)\n"
        "output relay : Float64 @1Hz := gated + 1.0\n"
        "output caught : Float64 @1Hz := gated.defaults(to: -1.0)\n"
    )
    m = Monitor(spec)
    m.ingest(Event(0.0, "x", 5.0))
    out = m.advance_time(1.0)
    assert values_of(out, "gated") == []
    assert values_of(out, "relay") == []           # absence propagates
    assert values_of(out, "caught") == [(1.0, -1.0)]  # ... unless defaulted
    m.ingest(Event(1.5, "x", 20.0))
    out = m.advance_time(2.0)
    assert values_of(out, "gated") == [(2.0, 20.0)]
    assert values_of(out, "relay") == [(2.0, 21.0)]


def test_division_by_zero_is_absent():
    spec = check(
        "input x: Float64\n"
        "output q : Float64 @1Hz := (1.0 / x.defaults(to: 0.0)).defaults(to: -1.0)"
    )
    m = Monitor(spec)
    out = m.advance_time(1.0)
    assert values_of(out, "q") == [(1.0, -1.0)]


def test_event_timed_output_reevaluates_on_events():
    spec = check("input x: Float64\noutput y := x * 2.0")
    m = Monitor(spec)
    out = m.ingest(Event(0.5, "x", 3.0))
    assert out == []  # same-time batch still open
    out = m.ingest(Event(1.5, "x", 4.0))
    assert values_of(out, "y") == [(0.5, 6.0)]
    out = m.advance_time(1.5)
    assert values_of(out, "y") == [(1.5, 8.0)]


def test_simultaneous_events_apply_before_evaluation():
    spec = check("input a, b: Float64\noutput s := a + b")
    m = Monitor(spec)
    m.ingest(Event(1.0, "a", 1.0))
    m.ingest(Event(1.0, "b", 2.0))
    out = m.advance_time(1.0)
    assert values_of(out, "s") == [(1.0, 3.0)]  # one evaluation, both applied


# ---------------------------------------------------------------------------
# window aggregation
# ---------------------------------------------------------------------------


def test_pctl_nearest_rank_paper_example():
    samples = [(float(i), float(i + 1)) for i in range(20)]  # values 1..20
    assert window_aggregate(samples, AggFunc(AggKind.PCTL, 95.0)) == 19.0


def test_empty_window_is_absent():
    for kind in AggKind:
        func = AggFunc(kind, 50.0 if kind is AggKind.PCTL else None)
        assert window_aggregate([], func) is None


def test_integral_of_constant_over_one_second():
    assert window_aggregate([(0.0, 10.0), (1.0, 10.0)], AggFunc(AggKind.INTEGRAL)) == 10.0


def test_integral_of_single_sample_is_zero():
    assert window_aggregate([(0.0, 10.0)], AggFunc(AggKind.INTEGRAL)) == 0.0


def test_sample_exactly_at_window_left_edge_is_excluded():
    spec = check(
        "input x: Float64\n"
        "output m : Float64 @1Hz := x.aggregate(over: 2, using: avg).defaults(to: -1.0)"
    )
    m = Monitor(spec)
    m.ingest(Event(1.0, "x", 100.0))  # at d=3: 3-2=1.0, excluded (left-open)
    m.ingest(Event(1.5, "x", 10.0))
    out = m.advance_time(3.0)
    assert values_of(out, "m")[-1] == (3.0, 10.0)


def test_window_sees_same_instant_value_from_earlier_layer():
    spec = check(
        "input x: Float64\n"
        "output y : Float64 @1Hz := x.defaults(to: 7.0)\n"
        "output n : Float64 @1Hz := y.aggregate(over: 10, using: count).defaults(to: 0.0)"
    )
    m = Monitor(spec)
    out = m.advance_time(1.0)
    assert values_of(out, "n") == [(1.0, 1.0)]


def test_self_window_sees_only_past_values():
    spec = check(
        "output a : Float64 @1Hz := a.aggregate(over: 100, using: count).defaults(to: 0.0)"
    )
    m = Monitor(spec)
    out = m.advance_time(3.0)
    # at d=1 the window is empty; each deadline then appends one sample
    assert values_of(out, "a") == [(1.0, 0.0), (2.0, 1.0), (3.0, 2.0)]


def test_percentile_linear_method_knob():
    spec = check(
        "input x: Float64\n"
        "output p : Float64 @1Hz := x.aggregate(over: 10, using: pctl(50)).defaults(to: 0.0)"
    )
    events = [Event(0.1 * i, "x", float(i)) for i in range(1, 5)]  # 1,2,3,4

    def run_with(method):
        m = Monitor(spec, percentile_method=method)
        out = []
        for e in events:
            out.extend(m.ingest(e))
        out.extend(m.advance_time(1.0))
        return values_of(out, "p")[-1][1]

    assert run_with("nearest-rank") == 2.0  # ceil(0.5*4) = 2nd smallest
    assert run_with("linear") == 2.5


# ---------------------------------------------------------------------------
# determinism and equivalence
# ---------------------------------------------------------------------------


def _random_events(seed, n=120, streams=("x",), span=40.0):
    rng = random.Random(seed)
    times = sorted(rng.uniform(0, span) for _ in range(n))
    return [
        Event(t, rng.choice(streams), round(rng.uniform(-50, 50), 3)) for t in times
    ]


WINDOW_SPEC = """
input x: Float64
output w_avg : Float64 @1Hz := x.aggregate(over: 7.5, using: avg).defaults(to: 0.0)
output w_sum : Float64 @1Hz := x.aggregate(over: 7.5, using: sum).defaults(to: 0.0)
output w_cnt : Float64 @1Hz := x.aggregate(over: 7.5, using: count).defaults(to: 0.0)
output w_min : Float64 @1Hz := x.aggregate(over: 7.5, using: min).defaults(to: 0.0)
output w_max : Float64 @1Hz := x.aggregate(over: 7.5, using: max).defaults(to: 0.0)
output w_int : Float64 @1Hz := x.aggregate(over: 7.5, using: integral).defaults(to: 0.0)
output w_p95 : Float64 @1Hz := x.aggregate(over: 7.5, using: pctl(95)).defaults(to: 0.0)
"""


def test_determinism_identical_output_lists():
    events = _random_events(7)
    tspec = check(WINDOW_SPEC)
    out1 = Monitor(tspec).run(events)
    out2 = Monitor(tspec).run(events)
    assert out1 == out2


def test_online_equals_offline():
    events = _random_events(11)
    tspec = check(WINDOW_SPEC)
    online = []
    m = Monitor(tspec)
    for e in events:
        online.extend(m.ingest(e))
    online.extend(m.advance_time(events[-1].time))
    assert online == Monitor(tspec).run(events)


def test_windows_match_naive_recomputation_small():
    """Mini version of the acceptance window-oracle suite (20 streams)."""
    funcs = {
        "w_avg": AggFunc(AggKind.AVG),
        "w_sum": AggFunc(AggKind.SUM),
        "w_cnt": AggFunc(AggKind.COUNT),
        "w_min": AggFunc(AggKind.MIN),
        "w_max": AggFunc(AggKind.MAX),
        "w_int": AggFunc(AggKind.INTEGRAL),
        "w_p95": AggFunc(AggKind.PCTL, 95.0),
    }
    tspec = check(WINDOW_SPEC)
    for seed in range(20):
        events = _random_events(seed, n=60, span=20.0)
        outs = Monitor(tspec).run(events)
        history = [(e.time, e.value) for e in events]
        for stream, func in funcs.items():
            for t, got in values_of(outs, stream):
                window = [(ts, v) for ts, v in history if t - 7.5 < ts <= t]
                want = window_aggregate(window, func)
                if want is None:
                    want = 0.0
                assert got == pytest.approx(want, rel=1e-9, abs=1e-9), (
                    stream, seed, t,
                )


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000))
def test_buffer_results_equal_pure_recomputation(seed):
    events = _random_events(seed, n=30, span=12.0)
    tspec = check(
        "input x: Float64\n"
        "output s : Float64 @1Hz := x.aggregate(over: 3, using: sum).defaults(to: 0.0)"
    )
    outs = Monitor(tspec).run(events)
    history = [(e.time, e.value) for e in events]
    for t, got in values_of(outs, "s"):
        window = [(ts, v) for ts, v in history if t - 3 < ts <= t]
        want = window_aggregate(window, AggFunc(AggKind.SUM))
        assert got == (want if want is not None else 0.0)


# ---------------------------------------------------------------------------
# trigger details
# ---------------------------------------------------------------------------


def test_trigger_never_fires_when_condition_false():
    spec = check(
        "input x: Float64\n"
        "output c : Float64 @1Hz := x.aggregate(over: 5, using: count).defaults(to: 0.0)\n"
        "trigger c < 0.0"
    )
    assert fires(Monitor(spec).advance_time(10.0)) == []


def test_trigger_on_raw_input_fires_at_event_time():
    spec = check('input v: Float64\ntrigger v > 160.0 "overspeed"')
    m = Monitor(spec)
    m.ingest(Event(3.3, "v", 165.0))
    out = m.advance_time(4.0)
    tr = fires(out)
    assert len(tr) == 1
    assert tr[0].time == 3.3
    assert tr[0].message == "overspeed"
    assert tr[0].values == {"v": 165.0}


def test_trigger_message_defaults_to_condition_text():
    spec = check("input v: Float64\ntrigger v > 1.0")
    m = Monitor(spec)
    m.ingest(Event(0.0, "v", 2.0))
    out = m.advance_time(1.0)
    assert fires(out)[0].message == "v > 1"


def test_trigger_times_equal_evaluation_instants():
    spec = check(
        "input x: Float64\n"
        "output c : Float64 @1Hz := x.aggregate(over: 100, using: count).defaults(to: 0.0)\n"
        "trigger c >= 2.0"
    )
    m = Monitor(spec)
    m.ingest(Event(0.2, "x", 1.0))
    m.ingest(Event(0.4, "x", 1.0))
    m.ingest(Event(0.6, "x", 1.0))
    out = m.advance_time(5.0)
    assert [t.time for t in fires(out)] == [1.0, 2.0, 3.0, 4.0, 5.0]


# ---------------------------------------------------------------------------
# offline CSV / NDJSON interface
# ---------------------------------------------------------------------------


def test_csv_parsing_with_header_and_bools():
    text = "time,stream,value\n0.5,velo_kmph,36.0\n1.0,flag,true\n"
    events = parse_event_csv(text.splitlines())
    assert events == [Event(0.5, "velo_kmph", 36.0), Event(1.0, "flag", True)]


def test_csv_rejects_malformed_rows():
    with pytest.raises(ValueError, match="line 1"):
        parse_event_csv(["1.0,too,many,fields"])


def test_run_offline_and_ndjson_shapes():
    csv = "\n".join(f"{k}.0,velo_kmph,70.0\n{k}.0,accel_mpss,1.0" for k in range(3))
    outs = run_offline(rde_fragment(), parse_event_csv(csv.splitlines()))
    buf = io.StringIO()
    write_outputs_ndjson(outs, buf)
    lines = buf.getvalue().strip().splitlines()
    assert lines, "expected some output records"
    import json

    for line in lines:
        rec = json.loads(line)
        assert "t" in rec
        assert ("stream" in rec and "value" in rec) or (
            "trigger" in rec and "message" in rec
        )


def test_offline_runs_are_byte_identical():
    csv = [f"{k}.5,velo_kmph,{60 + k}.0" for k in range(10)]
    events = parse_event_csv(csv)

    def render():
        buf = io.StringIO()
        write_outputs_ndjson(run_offline(rde_fragment(), events), buf)
        return buf.getvalue()

    assert render() == render()


def test_integral_window_matches_quadrature():
    """Engine integral of a sampled sine equals direct trapezoid quadrature."""
    tspec = check(
        "input x: Float64\n"
        "output i : Float64 @1Hz := x.aggregate(over: 1000, using: integral).defaults(to: 0.0)"
    )
    events = [Event(0.1 * k, "x", math.sin(0.1 * k)) for k in range(200)]
    outs = Monitor(tspec).run(events)
    t_end, got = values_of(outs, "i")[-1]
    # an input sample stamped exactly at a deadline applies after it fires
    pts = [(e.time, e.value) for e in events if e.time < t_end]
    want = sum(
        (v0 + v1) / 2 * (t1 - t0) for (t0, v0), (t1, v1) in zip(pts, pts[1:])
    )
    assert got == pytest.approx(want, rel=1e-12)
