"""Regulatory rules: parameters, verdict logic, and generated specifications."""

from .params import SEGMENTS, DomainError, RdeParameters, SegmentClass
from .rules import classify_segment, dynamics, dynamics_threshold, rpa, rpa_bound
from .spectext import build_rde_spec, rde_fragment
from .tracker import TRACKED_STREAMS, TripTracker
from .verdict import (
    Constraint,
    Overall,
    RdeVerdict,
    SegmentStats,
    Status,
    empty_stats,
    update_verdict,
)

__all__ = [
    "Constraint",
    "DomainError",
    "Overall",
    "RdeParameters",
    "RdeVerdict",
    "SEGMENTS",
    "SegmentClass",
    "SegmentStats",
    "Status",
    "TRACKED_STREAMS",
    "TripTracker",
    "build_rde_spec",
    "classify_segment",
    "dynamics",
    "dynamics_threshold",
    "empty_stats",
    "rde_fragment",
    "rpa",
    "rpa_bound",
    "update_verdict",
]
