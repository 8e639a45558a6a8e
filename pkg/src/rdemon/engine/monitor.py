"""Deterministic online evaluator for a typed specification.

Timing model
------------
The monitor is driven entirely by event timestamps; there is no wall
clock.  Periodic streams with rate ``f`` evaluate at deadlines
``start + k/f`` (integer ``k``, so the grid never drifts).  When an event
with timestamp ``t`` arrives, every deadline ``d <= t`` fires first, then
the event is applied.  Events sharing one timestamp (across different
inputs) are all applied before the event-timed streams evaluate at that
timestamp, so evaluation of an event batch is deferred until time moves
past it (or ``advance_time`` flushes it).

Value model
-----------
Expressions evaluate to a value or to *absent*.  Reading an input yields
its most recent sample (sample-and-hold); reading an output stream yields
the value it produced in the current evaluation cycle, absent if it
evaluated in this cycle without producing (filter false, or absence
propagated), and its most recent earlier value if it did not evaluate in
this cycle at all.  Absence propagates through operators, division by
zero is absent, and ``.defaults(to:)`` stops absence.  A trigger fires at
every evaluation where its condition is true; the ``rising`` flag marks
transitions from not-true so consumers can deduplicate sustained alarms.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Union

from ..speclang.ast import (
    Binary,
    BinOp,
    Default,
    Expr,
    IfThenElse,
    Literal,
    StreamRef,
    Unary,
    UnOp,
    ValueType,
    WindowExpr,
)
from ..speclang.printer import print_expr
from ..speclang.typecheck import TypedSpecification
from .windows import PercentileMethod, WindowBuffer


class EngineError(Exception):
    """Base class for monitor runtime errors."""


class NonMonotonicTimeError(EngineError):
    pass


class UnknownStreamError(EngineError):
    pass


class EventTypeError(EngineError):
    pass


_ABSENT = object()


@dataclass(frozen=True)
class Event:
    """One input sample: seconds since trip start, stream name, value."""

    time: float
    stream: str
    value: float | bool


@dataclass(frozen=True)
class StreamValue:
    time: float
    stream: str
    value: float | bool


@dataclass(frozen=True)
class TriggerFire:
    time: float
    trigger: int
    message: str
    values: dict[str, float | bool | None] = field(compare=False)
    rising: bool = True


MonitorOutput = Union[StreamValue, TriggerFire]


class Monitor:
    """Single-owner online evaluator; mutate from one thread at a time."""

    def __init__(
        self,
        tspec: TypedSpecification,
        start_time: float = 0.0,
        percentile_method: PercentileMethod = "nearest-rank",
    ):
        self.tspec = tspec
        self.start_time = start_time
        self.current_time = start_time
        self.percentile_method = percentile_method

        self._input_types = {d.name: d.ty for d in tspec.spec.inputs}
        self._registers: dict[str, float | bool] = {}
        self._cycle: dict[str, object] = {}

        # deadline bookkeeping: k-th deadline of stream s is start + k/f
        self._tick_index: dict[str, int] = {}
        self._next_deadline: dict[str, float] = {}
        for name, info in tspec.outputs.items():
            if info.periodic:
                self._tick_index[name] = 1
                self._next_deadline[name] = start_time + 1.0 / info.rate_hz

        # window buffers, keyed by buffer id; order stats only where read
        order_needed: set[int] = set()
        for node, buf_id in tspec.window_ids.items():
            if node.func.kind.value in ("min", "max", "pctl"):
                order_needed.add(buf_id)
        self._buffers = {
            b.buffer_id: WindowBuffer(b.duration_s, b.buffer_id in order_needed)
            for b in tspec.windows
        }
        self._buffers_by_target: dict[str, list[WindowBuffer]] = {}
        for b in tspec.windows:
            self._buffers_by_target.setdefault(b.target, []).append(
                self._buffers[b.buffer_id]
            )

        self._trigger_state = [False] * len(tspec.spec.triggers)
        self._pending_inputs: set[str] = set()
        self._pending_time: float | None = None
        self._outputs: list[MonitorOutput] = []
        self._has_event_streams = any(
            not info.periodic for info in tspec.outputs.values()
        )

    # -- public API ------------------------------------------------------

    @property
    def next_deadlines(self) -> dict[str, float]:
        return dict(self._next_deadline)

    def ingest(self, event: Event) -> list[MonitorOutput]:
        """Feed one input sample; returns outputs released by it."""
        ty = self._input_types.get(event.stream)
        if ty is None:
            raise UnknownStreamError(f"not a declared input stream: {event.stream!r}")
        if isinstance(event.value, bool) != (ty is ValueType.BOOL):
            raise EventTypeError(
                f"stream {event.stream!r} expects {ty}, got {event.value!r}"
            )
        if event.time < self.current_time:
            raise NonMonotonicTimeError(
                f"event at t={event.time} behind monitor time t={self.current_time}"
            )
        if self._pending_time is not None and event.time > self._pending_time:
            self._flush_pending()
        self._fire_deadlines(event.time)
        self._registers[event.stream] = event.value
        for buf in self._buffers_by_target.get(event.stream, ()):
            buf.append(event.time, event.value)
        self._pending_inputs.add(event.stream)
        self._pending_time = event.time
        self.current_time = event.time
        return self._drain()

    def advance_time(self, t: float) -> list[MonitorOutput]:
        """Fire every deadline up to ``t`` and settle pending events."""
        if t < self.current_time:
            raise NonMonotonicTimeError(
                f"advance to t={t} behind monitor time t={self.current_time}"
            )
        self._flush_pending()
        self._fire_deadlines(t)
        self.current_time = t
        return self._drain()

    def run(self, events: Iterable[Event]) -> list[MonitorOutput]:
        """Feed a whole trace and settle it; equals event-by-event feeding."""
        out: list[MonitorOutput] = []
        last = self.current_time
        for event in events:
            out.extend(self.ingest(event))
            last = event.time
        out.extend(self.advance_time(last))
        return out

    # -- internals ---------------------------------------------------------

    def _drain(self) -> list[MonitorOutput]:
        out = self._outputs
        self._outputs = []
        return out

    def _flush_pending(self) -> None:
        if self._pending_time is None:
            return
        updated, t = self._pending_inputs, self._pending_time
        self._pending_inputs = set()
        self._pending_time = None
        if self._has_event_streams or self.tspec.spec.triggers:
            self._event_cycle(t, updated)

    def _fire_deadlines(self, limit: float) -> None:
        while self._next_deadline:
            d = min(self._next_deadline.values())
            if d > limit:
                break
            due = {s for s, nd in self._next_deadline.items() if nd == d}
            self._periodic_cycle(d, due)
            for s in due:
                self._tick_index[s] += 1
                info = self.tspec.outputs[s]
                self._next_deadline[s] = (
                    self.start_time + self._tick_index[s] / info.rate_hz
                )
            self.current_time = d

    def _periodic_cycle(self, d: float, due: set[str]) -> None:
        for buf in self._buffers.values():
            buf.evict(d)
        self._cycle = {}
        for layer in self.tspec.layers:
            for name in layer:
                if name in due:
                    self._evaluate_stream(name, d)
        self._evaluate_triggers(d, updated_inputs=frozenset())
        self._cycle = {}

    def _event_cycle(self, t: float, updated: set[str]) -> None:
        for buf in self._buffers.values():
            buf.evict(t)
        self._cycle = {}
        for layer in self.tspec.layers:
            for name in layer:
                info = self.tspec.outputs[name]
                if info.periodic:
                    continue
                if info.all_deps & (updated | self._cycle.keys()):
                    self._evaluate_stream(name, t)
        self._evaluate_triggers(t, updated_inputs=frozenset(updated))
        self._cycle = {}

    def _evaluate_stream(self, name: str, t: float) -> None:
        info = self.tspec.outputs[name]
        if info.filter is not None:
            if self._eval(info.filter, t) is not True:
                self._cycle[name] = _ABSENT
                return
        value = self._eval(info.body, t)
        self._cycle[name] = value
        if value is _ABSENT:
            return
        self._registers[name] = value
        for buf in self._buffers_by_target.get(name, ()):
            buf.append(t, value)
        self._outputs.append(StreamValue(t, name, value))

    def _evaluate_triggers(self, t: float, updated_inputs: frozenset[str]) -> None:
        produced = updated_inputs | self._cycle.keys()
        for i, trig in enumerate(self.tspec.spec.triggers):
            refs = self.tspec.trigger_refs[i]
            if refs and not refs & produced:
                continue
            value = self._eval(trig.condition, t)
            fired = value is True
            rising = fired and not self._trigger_state[i]
            self._trigger_state[i] = fired
            if fired:
                message = trig.message or print_expr(trig.condition)
                values = {
                    name: self._ref_value(name) for name in sorted(refs)
                }
                self._outputs.append(TriggerFire(t, i, message, values, rising))

    def _ref_value(self, name: str) -> float | bool | None:
        v = self._lookup(name)
        return None if v is _ABSENT else v

    def _lookup(self, name: str) -> object:
        if name in self._cycle:
            return self._cycle[name]
        if name in self._registers:
            return self._registers[name]
        return _ABSENT

    def _eval(self, expr: Expr, t: float) -> object:
        if isinstance(expr, Literal):
            return expr.value
        if isinstance(expr, StreamRef):
            return self._lookup(expr.name)
        if isinstance(expr, Unary):
            v = self._eval(expr.operand, t)
            if v is _ABSENT:
                return _ABSENT
            return -v if expr.op is UnOp.NEG else (not v)
        if isinstance(expr, Binary):
            left = self._eval(expr.left, t)
            if left is _ABSENT:
                return _ABSENT
            right = self._eval(expr.right, t)
            if right is _ABSENT:
                return _ABSENT
            return _apply_binop(expr.op, left, right)
        if isinstance(expr, WindowExpr):
            buf = self._buffers[self.tspec.window_ids[expr]]
            buf.evict(t)
            value = buf.aggregate(expr.func, self.percentile_method)
            return _ABSENT if value is None else value
        if isinstance(expr, Default):
            v = self._eval(expr.operand, t)
            if v is _ABSENT:
                return self._eval(expr.fallback, t)
            return v
        if isinstance(expr, IfThenElse):
            cond = self._eval(expr.cond, t)
            if cond is _ABSENT:
                return _ABSENT
            return self._eval(expr.then if cond else expr.orelse, t)
        raise EngineError(f"cannot evaluate node {expr!r}")


def _apply_binop(op: BinOp, left, right):
    if op is BinOp.ADD:
        return left + right
    if op is BinOp.SUB:
        return left - right
    if op is BinOp.MUL:
        return left * right
    if op is BinOp.DIV:
        if right == 0:
            return _ABSENT
        return left / right
    if op is BinOp.LT:
        return left < right
    if op is BinOp.LE:
        return left <= right
    if op is BinOp.GT:
        return left > right
    if op is BinOp.GE:
        return left >= right
    if op is BinOp.EQ:
        return left == right
    if op is BinOp.NE:
        return left != right
    if op is BinOp.AND:
        return left and right
    if op is BinOp.OR:
        return left or right
    raise EngineError(f"unknown operator {op!r}")


def new_monitor(
    tspec: TypedSpecification,
    start_time: float = 0.0,
    percentile_method: PercentileMethod = "nearest-rank",
) -> Monitor:
    """Fresh monitor: empty registers, first deadlines at ``start + 1/f``."""
    return Monitor(tspec, start_time, percentile_method)
