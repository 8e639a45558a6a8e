"""Generates the monitored specification text from the parameter set.

``build_rde_spec`` emits the full preconfigured specification: segment
filters, per-segment average velocity, distance and dynamics-percentile
streams, emission integrals, and one trigger per checkable constraint.
``rde_fragment`` is the four-output rural-dynamics fragment with the two
elided stream definitions filled in; its layering is pinned by tests.
"""

from __future__ import annotations

from ..speclang.ast import fmt_num
from .params import RdeParameters, SegmentClass

_SEG_BY_NAME = {s.value: s for s in SegmentClass}


def rde_fragment(p: RdeParameters | None = None) -> str:
    """Rural driving-dynamics check: inputs, four output streams, one trigger.

    ``rural_avg_velo`` reads the trailing average of all velocity samples
    while in the rural segment; the full specification from
    :func:`build_rde_spec` refines this to a rural-only average via a
    helper stream, which this compact fragment deliberately omits.
    """
    p = p or RdeParameters()
    w = fmt_num(p.dynamics_window_s)
    u_max = fmt_num(p.urban_max_kmph)
    r_max = fmt_num(p.rural_max_kmph)
    return (
        "input velo_kmph, accel_mpss: Float64\n"
        f"output is_rural : Bool @1Hz := velo_kmph.defaults(to: 0.0) > {u_max}"
        f" ∧ velo_kmph.defaults(to: 0.0) <= {r_max}\n"
        "output rural_avg_velo : Float64 @1Hz filter: is_rural := "
        f"velo_kmph.aggregate(over: {w}, using: avg).defaults(to: 0.0)\n"
        "output rural_dyn : Float64 @1Hz filter: is_rural := "
        "velo_kmph * accel_mpss / 3.6\n"
        "output rural_pctl_dyn : Float64 @1Hz := \n"
        f"    rural_dyn.aggregate(over: {w}, using: pctl({fmt_num(p.dynamics_percentile)}))"
        ".defaults(to: 0.0)\n"
        f"trigger rural_pctl_dyn > ({fmt_num(p.dyn_low_slope)} * rural_avg_velo + "
        f"{fmt_num(p.dyn_low_intercept)})\n"
        f"    ∧ rural_avg_velo <= {fmt_num(p.dyn_v_cutoff_kmph)}\n"
    )


def build_rde_spec(p: RdeParameters | None = None) -> str:
    """Full specification text; parses and typechecks under the spec language."""
    p = p or RdeParameters()
    n = fmt_num
    w = n(p.dynamics_window_s)
    pctl = n(p.dynamics_percentile)
    gate = f"elapsed_s >= {n(p.duration_min_s)}"

    lines: list[str] = [
        "// Real Driving Emissions monitoring specification.",
        "// Generated from the active parameter set; regenerate after changing it.",
        "",
        "input velo_kmph, accel_mpss, ambient_K, nox_mgps, co2_gps: Float64",
        "",
        "// ---- segment classification (stops count as urban) ----",
        "output velo : Float64 @1Hz := velo_kmph.defaults(to: 0.0)",
        f"output is_urban : Bool @1Hz := velo <= {n(p.urban_max_kmph)}",
        f"output is_rural : Bool @1Hz := velo > {n(p.urban_max_kmph)} ∧ velo <= {n(p.rural_max_kmph)}",
        f"output is_motorway : Bool @1Hz := velo > {n(p.rural_max_kmph)}",
        "",
        "// ---- trip time and distance ----",
        "output tick : Float64 @1Hz := 1.0",
        f"output elapsed_s : Float64 @1Hz := tick.aggregate(over: {w}, using: count).defaults(to: 0.0)",
        f"output total_dist_km : Float64 @1Hz := velo.aggregate(over: {w}, using: integral).defaults(to: 0.0) / 3600.0",
    ]

    for seg in ("urban", "rural", "motorway"):
        lines += [
            "",
            f"// ---- {seg} segment ----",
            f"output {seg}_velo : Float64 @1Hz filter: is_{seg} := velo",
            f"output {seg}_avg_velo : Float64 @1Hz := "
            f"{seg}_velo.aggregate(over: {w}, using: avg).defaults(to: 0.0)",
            f"output {seg}_velo_z : Float64 @1Hz := if is_{seg} then velo else 0.0",
            f"output {seg}_dist_km : Float64 @1Hz := "
            f"{seg}_velo_z.aggregate(over: {w}, using: integral).defaults(to: 0.0) / 3600.0",
            f"output {seg}_share : Float64 @1Hz := {seg}_dist_km / total_dist_km",
            f"output {seg}_dyn : Float64 @1Hz filter: is_{seg} := velo_kmph * accel_mpss / 3.6",
            f"output {seg}_pctl_dyn : Float64 @1Hz := ",
            f"    {seg}_dyn.aggregate(over: {w}, using: pctl({pctl})).defaults(to: 0.0)",
            f"output {seg}_rpa_z : Float64 @1Hz := "
            f"if is_{seg} ∧ accel_mpss.defaults(to: 0.0) > {n(p.rpa_accel_cutoff_mps2)} "
            f"then velo / 3.6 * accel_mpss.defaults(to: 0.0) else 0.0",
            f"output {seg}_rpa : Float64 @1Hz := "
            f"{seg}_rpa_z.aggregate(over: {w}, using: integral).defaults(to: 0.0)"
            f" / ({seg}_dist_km * 1000.0)",
        ]

    lines += [
        "",
        "// ---- emissions ----",
        f"output total_nox_mg : Float64 @1Hz := nox_mgps.aggregate(over: {w}, using: integral).defaults(to: 0.0)",
        f"output total_co2_g : Float64 @1Hz := co2_gps.aggregate(over: {w}, using: integral).defaults(to: 0.0)",
        "output nox_mg_per_km : Float64 @1Hz := total_nox_mg / total_dist_km",
        "",
        "// ---- universal constraints ----",
        f'trigger velo_kmph > {n(p.speed_limit_kmph)} "vehicle speed above the {n(p.speed_limit_kmph)} km/h limit"',
        f'trigger ambient_K < {n(p.temp_min_K)} "ambient temperature below {n(p.temp_min_K)} K"',
        f'trigger ambient_K > {n(p.temp_max_K)} "ambient temperature above {n(p.temp_max_K)} K"',
        f'trigger elapsed_s > {n(p.duration_max_s)} "trip exceeded the maximum test duration"',
        f"trigger nox_mg_per_km > {n(p.nox_limit_mg_per_km)} ∧ total_dist_km > 1.0 "
        f'"NOx per kilometre above the {n(p.nox_limit_mg_per_km)} mg/km limit"',
        f"trigger (urban_avg_velo < {n(p.urban_avg_v_min_kmph)} ∨ urban_avg_velo > "
        f'{n(p.urban_avg_v_max_kmph)}) ∧ {gate} "urban average velocity outside the permitted band"',
        "",
        "// ---- driving dynamics (the rural low-speed branch is the",
        "// ----  published reference form of this constraint) ----",
    ]

    for seg in ("urban", "rural", "motorway"):
        lines += [
            f"trigger {seg}_pctl_dyn > ({n(p.dyn_low_slope)} * {seg}_avg_velo + {n(p.dyn_low_intercept)})",
            f"    ∧ {seg}_avg_velo <= {n(p.dyn_v_cutoff_kmph)} "
            f'"{seg} driving dynamics above the permitted percentile"',
            f"trigger {seg}_pctl_dyn > ({n(p.dyn_high_slope)} * {seg}_avg_velo + {n(p.dyn_high_intercept)})"
            f" ∧ {seg}_avg_velo > {n(p.dyn_v_cutoff_kmph)} "
            f'"{seg} driving dynamics above the permitted percentile"',
            f"trigger {seg}_rpa < (if {seg}_avg_velo <= {n(p.rpa_v_cutoff_kmph)} "
            f"then {n(p.rpa_slope)} * {seg}_avg_velo + {n(p.rpa_intercept)} "
            f"else {n(p.rpa_high_min)}) ∧ {gate} "
            f'"{seg} relative positive acceleration below the minimum"',
        ]

    lines += ["", "// ---- distance composition (checked near trip end) ----"]
    for seg in ("urban", "rural", "motorway"):
        lo, hi = p.share_bounds(_SEG_BY_NAME[seg])
        lines += [
            f"trigger ({seg}_share < {n(lo)} ∨ {seg}_share > {n(hi)}) ∧ {gate} "
            f'"{seg} distance share outside the permitted band"',
            f"trigger {seg}_dist_km < {n(p.min_segment_km)} ∧ {gate} "
            f'"{seg} distance below the {n(p.min_segment_km)} km minimum"',
        ]

    return "\n".join(lines) + "\n"
