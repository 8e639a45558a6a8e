/**
 * Pure view-models for the progress view.
 *
 * Every piece of text is taken verbatim from the snapshot (numbers via
 * String(x), strings as-is) so the rendering is auditable against the
 * recorded channel: no rounding, unit conversion, or arithmetic happens
 * on displayed values. Bar geometry (fractions in [0, 1]) is derived
 * from the same values but only drives element widths, never text.
 */

import type { SegmentPanel, TriggerNote, UiState } from './types.js';

export type Indicator = 'inconclusive' | 'success' | 'failure';

export interface DotView {
  valueText: string;
  thresholdText: string;
  fraction: number; // dot position along the bar
  thresholdFraction: number;
  ok: boolean;
}

export interface SegmentView {
  name: string;
  distanceText: string;
  avgVelocityText: string;
  distanceFraction: number;
  shareLoFraction: number;
  shareHiFraction: number;
  dynamics: DotView | null;
  rpa: DotView | null;
}

export interface ConstraintView {
  id: string;
  description: string;
  status: string;
  currentText: string;
  boundText: string;
}

export interface ProgressView {
  timeText: string;
  distanceText: string;
  velocityText: string;
  indicator: Indicator;
  indicatorGlyph: '?' | '✓' | '✗';
  noxText: string;
  noxLimitText: string;
  noxFraction: number;
  noxLimitFraction: number;
  noxOverLimit: boolean;
  segments: SegmentView[];
  constraints: ConstraintView[];
  triggerLines: string[];
}

const ABSENT = '–'; // – shown when a value has not materialized yet

function clamp01(x: number): number {
  return x < 0 ? 0 : x > 1 ? 1 : x;
}

function text(value: number | null): string {
  return value === null ? ABSENT : String(value);
}

function dotView(
  value: number | null,
  threshold: number | null,
  mustStayBelow: boolean,
): DotView | null {
  if (value === null || threshold === null) {
    return null;
  }
  // the bar spans twice the threshold so the mark sits mid-bar
  const scale = threshold > 0 ? threshold * 2 : 1;
  return {
    valueText: String(value),
    thresholdText: String(threshold),
    fraction: clamp01(value / scale),
    thresholdFraction: 0.5,
    ok: mustStayBelow ? value <= threshold : value >= threshold,
  };
}

function segmentView(panel: SegmentPanel, expectedTripKm: number): SegmentView {
  return {
    name: panel.segment,
    distanceText: `${String(panel.distance_km)} km`,
    avgVelocityText:
      panel.avg_velocity_kmph === null
        ? ABSENT
        : `${String(panel.avg_velocity_kmph)} km/h`,
    distanceFraction: clamp01(panel.distance_km / (panel.share_hi * expectedTripKm * 1.25)),
    shareLoFraction: clamp01(panel.share_lo_km / (panel.share_hi * expectedTripKm * 1.25)),
    shareHiFraction: clamp01(panel.share_hi_km / (panel.share_hi * expectedTripKm * 1.25)),
    dynamics: dotView(panel.dynamics_p95, panel.dynamics_threshold, true),
    rpa: dotView(panel.rpa, panel.rpa_threshold, false),
  };
}

export function indicatorOf(verdict: UiState['verdict']): Indicator {
  if (verdict === 'valid') return 'success';
  if (verdict === 'invalid') return 'failure';
  return 'inconclusive';
}

export function triggerLine(note: TriggerNote): string {
  return `t=${String(note.t_s)} ${note.message}`;
}

export function progressView(state: UiState): ProgressView {
  const indicator = indicatorOf(state.verdict);
  const noxScale = state.nox_limit_mg_per_km * 1.5;
  const nox = state.nox_mg_per_km;
  return {
    timeText: `${String(state.t_s)} s`,
    distanceText: `${String(state.total_distance_km)} km`,
    velocityText: `${String(state.velocity_kmph)} km/h`,
    indicator,
    indicatorGlyph:
      indicator === 'success' ? '✓' : indicator === 'failure' ? '✗' : '?',
    noxText: nox === null ? ABSENT : `${String(nox)} mg/km`,
    noxLimitText: `${String(state.nox_limit_mg_per_km)} mg/km`,
    noxFraction: nox === null ? 0 : clamp01(nox / noxScale),
    noxLimitFraction: clamp01(state.nox_limit_mg_per_km / noxScale),
    noxOverLimit: nox !== null && nox > state.nox_limit_mg_per_km,
    segments: state.segments.map((p) => segmentView(p, state.expected_trip_km)),
    constraints: state.constraints.map((c) => ({
      id: c.id,
      description: c.description,
      status: c.status,
      currentText: text(c.current),
      boundText: c.bound,
    })),
    triggerLines: state.recent_triggers.map(triggerLine),
  };
}

/**
 * Folds successive snapshots, latching the failure state: once a
 * snapshot arrives irrecoverable, the indicator stays failed no matter
 * what later messages claim.
 */
export class ProgressSession {
  private failed = false;

  fold(state: UiState): ProgressView {
    if (state.irrecoverable) {
      this.failed = true;
    }
    const view = progressView(state);
    if (this.failed) {
      view.indicator = 'failure';
      view.indicatorGlyph = '✗';
    }
    return view;
  }
}

/**
 * All numeric tokens a rendered progress view displays; the audit
 * checks each against the numbers of the snapshot it came from.
 */
export function renderedNumericTokens(view: ProgressView): string[] {
  const texts: string[] = [
    view.timeText,
    view.distanceText,
    view.velocityText,
    view.noxText,
    view.noxLimitText,
  ];
  for (const seg of view.segments) {
    texts.push(seg.distanceText, seg.avgVelocityText);
    for (const dot of [seg.dynamics, seg.rpa]) {
      if (dot) {
        texts.push(dot.valueText, dot.thresholdText);
      }
    }
  }
  for (const c of view.constraints) {
    texts.push(c.currentText);
  }
  const tokens: string[] = [];
  for (const t of texts) {
    const match = t.match(/-?\d+(?:\.\d+)?(?:e[+-]?\d+)?/gi);
    if (match) {
      tokens.push(...match);
    }
  }
  return tokens;
}
