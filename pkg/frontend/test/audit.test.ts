/**
 * Dashboard audit against a recorded live session (three simulated
 * minutes with an overspeed burst): every number the progress view
 * renders appears verbatim in the UiState message it was rendered from,
 * and the failure state never reverts once shown irrecoverable.
 */

import { readFileSync } from 'node:fs';
import { dirname, join } from 'node:path';
import { fileURLToPath } from 'node:url';
import { describe, expect, it } from 'vitest';

import type { LiveMessage, TriggerRecord, UiState } from '../src/types.js';
import {
  ProgressSession,
  progressView,
  renderedNumericTokens,
  triggerLine,
} from '../src/view.js';

const here = dirname(fileURLToPath(import.meta.url));
const fixture = readFileSync(join(here, 'fixtures/live_session.ndjson'), 'utf8');

const messages: LiveMessage[] = fixture
  .trim()
  .split('\n')
  .map((line) => JSON.parse(line) as LiveMessage);

const states = messages.filter((m): m is UiState => m.type === 'state');
const triggers = messages.filter((m): m is TriggerRecord => m.type === 'trigger');

/** Every number in a JSON document, in its canonical String() form. */
function numbersIn(value: unknown, out: Set<string>): Set<string> {
  if (typeof value === 'number') {
    out.add(String(value));
  } else if (Array.isArray(value)) {
    for (const v of value) numbersIn(v, out);
  } else if (value !== null && typeof value === 'object') {
    for (const v of Object.values(value)) numbersIn(v, out);
  }
  return out;
}

describe('recorded live session', () => {
  it('covers a three-minute drive with an irrecoverable overspeed', () => {
    expect(states.length).toBeGreaterThan(150);
    const last = states[states.length - 1];
    expect(last.t_s).toBeGreaterThanOrEqual(175);
    expect(states.some((s) => !s.irrecoverable)).toBe(true);
    expect(states.some((s) => s.irrecoverable)).toBe(true);
    expect(triggers.some((t) => t.message.includes('160'))).toBe(true);
  });

  it('renders only numbers that appear verbatim in the source message', () => {
    let checked = 0;
    for (const state of states) {
      const allowed = numbersIn(state, new Set<string>());
      for (const token of renderedNumericTokens(progressView(state))) {
        expect(allowed.has(token), `token ${token} not in message at t=${state.t_s}`).toBe(true);
        checked += 1;
      }
    }
    expect(checked).toBeGreaterThan(3000);
  });

  it('renders constraint bounds and trigger messages verbatim', () => {
    for (const state of states) {
      const view = progressView(state);
      state.constraints.forEach((c, i) => {
        expect(view.constraints[i].boundText).toBe(c.bound);
        expect(view.constraints[i].description).toBe(c.description);
      });
      state.recent_triggers.forEach((note, i) => {
        expect(view.triggerLines[i]).toBe(triggerLine(note));
        expect(view.triggerLines[i]).toContain(note.message);
      });
    }
  });

  it('never reverts the failure state once shown irrecoverable', () => {
    const session = new ProgressSession();
    let failedSeen = false;
    for (const state of states) {
      const view = session.fold(state);
      if (view.indicator === 'failure' && state.irrecoverable) {
        failedSeen = true;
      }
      if (failedSeen) {
        expect(view.indicator).toBe('failure');
        expect(view.indicatorGlyph).toBe('✗');
      }
    }
    expect(failedSeen).toBe(true);
  });

  it('latches even against a hypothetically reverting feed', () => {
    const flipped = states.find((s) => s.irrecoverable)!;
    const sunny = states.find((s) => !s.irrecoverable)!;
    const session = new ProgressSession();
    session.fold(sunny);
    expect(session.fold(flipped).indicator).toBe('failure');
    // a later optimistic message must not clear the failure
    expect(session.fold(sunny).indicator).toBe('failure');
  });

  it('reports verdict transitions in snapshot order', () => {
    const times = states.map((s) => s.t_s);
    const sorted = [...times].sort((a, b) => a - b);
    expect(times).toEqual(sorted);
  });
});
