import { describe, expect, it } from 'vitest';

import type { SegmentPanel, UiState } from '../src/types.js';
import { indicatorOf, progressView } from '../src/view.js';

function panel(overrides: Partial<SegmentPanel> = {}): SegmentPanel {
  return {
    segment: 'urban',
    distance_km: 10.5,
    share_lo: 0.29,
    share_hi: 0.44,
    share_lo_km: 24.1,
    share_hi_km: 36.5,
    min_distance_km: 16,
    avg_velocity_kmph: 28.4,
    dynamics_p95: 12.3,
    dynamics_threshold: 18.3,
    rpa: 0.18,
    rpa_threshold: 0.13,
    ...overrides,
  };
}

function snapshot(overrides: Partial<UiState> = {}): UiState {
  return {
    type: 'state',
    t_s: 120,
    velocity_kmph: 48,
    total_distance_km: 1.2,
    expected_trip_km: 83,
    verdict: '?',
    irrecoverable: false,
    nox_mg_per_km: 214,
    nox_limit_mg_per_km: 168,
    segments: [panel(), panel({ segment: 'rural' }), panel({ segment: 'motorway' })],
    constraints: [
      { id: 'duration', description: 'total test duration', status: 'pending', current: 120, bound: '5400..7200 s' },
    ],
    recent_triggers: [{ t_s: 50, message: 'vehicle speed above the 160 km/h limit' }],
    ...overrides,
  };
}

describe('progress view', () => {
  it('is a pure function of the snapshot', () => {
    const a = progressView(snapshot());
    const b = progressView(snapshot());
    expect(a).toEqual(b);
  });

  it('maps the tri-state verdict to the indicator', () => {
    expect(indicatorOf('?')).toBe('inconclusive');
    expect(indicatorOf('valid')).toBe('success');
    expect(indicatorOf('invalid')).toBe('failure');
    expect(progressView(snapshot()).indicatorGlyph).toBe('?');
  });

  it('crosses the limit mark when NOx exceeds the threshold', () => {
    const view = progressView(snapshot({ nox_mg_per_km: 214 }));
    expect(view.noxOverLimit).toBe(true);
    expect(view.noxFraction).toBeGreaterThan(view.noxLimitFraction);
    const under = progressView(snapshot({ nox_mg_per_km: 80 }));
    expect(under.noxOverLimit).toBe(false);
    expect(under.noxFraction).toBeLessThan(under.noxLimitFraction);
  });

  it('shows absent values as dashes, not zeros', () => {
    const view = progressView(
      snapshot({
        nox_mg_per_km: null,
        segments: [
          panel({ avg_velocity_kmph: null, dynamics_p95: null, rpa: null }),
          panel({ segment: 'rural' }),
          panel({ segment: 'motorway' }),
        ],
      }),
    );
    expect(view.noxText).toBe('–');
    expect(view.segments[0].avgVelocityText).toBe('–');
    expect(view.segments[0].dynamics).toBeNull();
    expect(view.segments[0].rpa).toBeNull();
  });

  it('keeps bar fractions inside [0, 1]', () => {
    const view = progressView(
      snapshot({
        nox_mg_per_km: 99999,
        segments: [
          panel({ distance_km: 1e6 }),
          panel({ segment: 'rural', distance_km: 0 }),
          panel({ segment: 'motorway' }),
        ],
      }),
    );
    expect(view.noxFraction).toBeLessThanOrEqual(1);
    for (const seg of view.segments) {
      expect(seg.distanceFraction).toBeGreaterThanOrEqual(0);
      expect(seg.distanceFraction).toBeLessThanOrEqual(1);
    }
  });

  it('marks dynamics dots against their thresholds in both directions', () => {
    const view = progressView(snapshot());
    // dynamics must stay below, rpa must stay above
    expect(view.segments[0].dynamics?.ok).toBe(true);
    expect(view.segments[0].rpa?.ok).toBe(true);
    const bad = progressView(
      snapshot({
        segments: [
          panel({ dynamics_p95: 25.0, rpa: 0.05 }),
          panel({ segment: 'rural' }),
          panel({ segment: 'motorway' }),
        ],
      }),
    );
    expect(bad.segments[0].dynamics?.ok).toBe(false);
    expect(bad.segments[0].rpa?.ok).toBe(false);
  });
});
