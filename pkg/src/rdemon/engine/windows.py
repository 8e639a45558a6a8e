"""Sliding-window sample buffers and aggregation functions.

A window at evaluation instant ``d`` with duration ``D`` covers the
half-open interval ``(d - D, d]``: a sample stamped exactly ``d`` counts,
a sample stamped exactly ``d - D`` does not.

Aggregations over an empty window are *absent* (``None``); callers apply
``.defaults(to:)``.  The percentile is nearest-rank by default: sort
ascending and take the element at 1-based index ``ceil(p/100 * n)``;
``linear`` interpolation is available as a configuration knob.

Buffer accumulators are maintained so every read equals a fresh
left-to-right recomputation over the retained samples bit for bit:
appends extend the running fold, and any eviction rebuilds the fold from
the remaining samples.  Rebuilds are cheap in practice because the
monitored specifications either never evict (window at least as long as
the trip) or keep only short buffers.
"""

from __future__ import annotations

import math
from bisect import bisect_left, insort
from collections import deque
from typing import Sequence

from ..speclang.ast import AggFunc, AggKind

PercentileMethod = str  # "nearest-rank" | "linear"


def percentile(values: Sequence[float], p: float, method: PercentileMethod = "nearest-rank") -> float:
    """Percentile of a non-empty, ascending-sorted sequence."""
    n = len(values)
    if n == 0:
        raise ValueError("percentile of empty sequence")
    if method == "nearest-rank":
        rank = math.ceil(p / 100.0 * n)
        return values[max(rank, 1) - 1]
    if method == "linear":
        pos = (n - 1) * p / 100.0
        lo = math.floor(pos)
        hi = math.ceil(pos)
        if lo == hi:
            return values[int(pos)]
        return values[lo] * (hi - pos) + values[hi] * (pos - lo)
    raise ValueError(f"unknown percentile method {method!r}")


def trapezoid_integral(samples: Sequence[tuple[float, float]]) -> float:
    """Trapezoidal integral of value over time across the samples."""
    total = 0.0
    for (t0, v0), (t1, v1) in zip(samples, samples[1:]):
        total += (v0 + v1) * 0.5 * (t1 - t0)
    return total


def window_aggregate(
    samples: Sequence[tuple[float, float]],
    func: AggFunc,
    percentile_method: PercentileMethod = "nearest-rank",
) -> float | None:
    """Aggregate time-sorted ``(time, value)`` samples; ``None`` when empty.

    ``count`` counts samples; ``integral`` is the trapezoidal integral of
    value over time (a single sample integrates to 0).
    """
    if not samples:
        return None
    values = [v for _, v in samples]
    kind = func.kind
    if kind is AggKind.COUNT:
        return float(len(values))
    if kind is AggKind.SUM:
        return _fold_sum(values)
    if kind is AggKind.AVG:
        return _fold_sum(values) / len(values)
    if kind is AggKind.MIN:
        return min(values)
    if kind is AggKind.MAX:
        return max(values)
    if kind is AggKind.INTEGRAL:
        return trapezoid_integral(samples)
    if kind is AggKind.PCTL:
        return percentile(sorted(values), func.percentile, percentile_method)
    raise ValueError(f"unknown aggregation {func!r}")


def _fold_sum(values: Sequence[float]) -> float:
    total = 0.0
    for v in values:
        total += v
    return total


class WindowBuffer:
    """Retained samples of one target stream over one duration."""

    __slots__ = (
        "duration_s",
        "samples",
        "track_order",
        "sorted_values",
        "_sum",
        "_integral",
    )

    def __init__(self, duration_s: float, track_order: bool = False):
        self.duration_s = duration_s
        self.samples: deque[tuple[float, float]] = deque()
        self.track_order = track_order
        self.sorted_values: list[float] = []
        self._sum = 0.0
        self._integral = 0.0

    def append(self, t: float, value: float) -> None:
        if self.samples:
            t0, v0 = self.samples[-1]
            self._integral += (v0 + value) * 0.5 * (t - t0)
        self.samples.append((t, value))
        self._sum += value
        if self.track_order:
            insort(self.sorted_values, value)

    def evict(self, now: float) -> None:
        """Drop samples with ``time <= now - duration``."""
        cutoff = now - self.duration_s
        evicted = False
        while self.samples and self.samples[0][0] <= cutoff:
            _, v = self.samples.popleft()
            evicted = True
            if self.track_order:
                self.sorted_values.pop(bisect_left(self.sorted_values, v))
        if evicted:
            self._rebuild()

    def _rebuild(self) -> None:
        self._sum = _fold_sum([v for _, v in self.samples])
        self._integral = trapezoid_integral(list(self.samples))

    def aggregate(self, func: AggFunc, percentile_method: PercentileMethod) -> float | None:
        n = len(self.samples)
        if n == 0:
            return None
        kind = func.kind
        if kind is AggKind.COUNT:
            return float(n)
        if kind is AggKind.SUM:
            return self._sum
        if kind is AggKind.AVG:
            return self._sum / n
        if kind is AggKind.INTEGRAL:
            return self._integral
        if kind is AggKind.MIN:
            return self.sorted_values[0]
        if kind is AggKind.MAX:
            return self.sorted_values[-1]
        if kind is AggKind.PCTL:
            return percentile(self.sorted_values, func.percentile, percentile_method)
        raise ValueError(f"unknown aggregation {func!r}")
