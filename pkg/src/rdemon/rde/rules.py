"""Core driving-dynamics computations behind the drive verdict."""

from __future__ import annotations

from typing import Sequence

from .params import DomainError, RdeParameters, SegmentClass


def classify_segment(velocity_kmph: float, p: RdeParameters | None = None) -> SegmentClass:
    """Segment of a velocity sample; boundaries belong to the slower class."""
    if velocity_kmph < 0:
        raise DomainError(f"negative velocity: {velocity_kmph}")
    p = p or RdeParameters()
    if velocity_kmph <= p.urban_max_kmph:
        return SegmentClass.URBAN
    if velocity_kmph <= p.rural_max_kmph:
        return SegmentClass.RURAL
    return SegmentClass.MOTORWAY


def dynamics(velocity_kmph: float, accel_mps2: float) -> float:
    """Driving dynamics v*a in m²/s³ (velocity in km/h, acceleration in m/s²)."""
    return velocity_kmph * accel_mps2 / 3.6


def dynamics_threshold(v_avg_kmph: float, p: RdeParameters | None = None) -> float:
    """Upper bound on the dynamics percentile, affine in average velocity."""
    if v_avg_kmph < 0:
        raise DomainError(f"negative average velocity: {v_avg_kmph}")
    p = p or RdeParameters()
    if v_avg_kmph <= p.dyn_v_cutoff_kmph:
        return p.dyn_low_slope * v_avg_kmph + p.dyn_low_intercept
    return p.dyn_high_slope * v_avg_kmph + p.dyn_high_intercept


def rpa_bound(v_avg_kmph: float, p: RdeParameters | None = None) -> float:
    """Lower bound on relative positive acceleration (m/s²)."""
    p = p or RdeParameters()
    if v_avg_kmph <= p.rpa_v_cutoff_kmph:
        return p.rpa_slope * v_avg_kmph + p.rpa_intercept
    return p.rpa_high_min


def rpa(
    samples: Sequence[tuple[float, float, float]],
    distance_m: float | None = None,
    p: RdeParameters | None = None,
) -> float | None:
    """Relative positive acceleration of a segment, in m/s².

    ``samples`` are ``(velocity_mps, accel_mps2, dt_s)`` triples.  The sum
    of ``v * a * dt`` over samples accelerating faster than the cutoff is
    normalized by the segment distance (``sum(v * dt)`` unless given).
    Returns ``None`` when the distance is zero.
    """
    if not samples:
        raise ValueError("rpa of an empty segment")
    p = p or RdeParameters()
    if distance_m is None:
        distance_m = sum(v * dt for v, _, dt in samples)
    if distance_m <= 0:
        return None
    total = sum(
        v * a * dt for v, a, dt in samples if a > p.rpa_accel_cutoff_mps2
    )
    return total / distance_m
