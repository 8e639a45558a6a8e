/** Application entry: session controls, live progress view, replay charts. */

import { api, ApiError, liveUrl } from './api.js';
import { chartModel } from './chart.js';
import { el, renderChart, renderProgress } from './dom.js';
import type { LiveMessage, SeriesMap } from './types.js';
import { ProgressSession } from './view.js';
import { LiveChannel } from './ws.js';

const app = document.getElementById('app')!;

const banner = el('div', 'banner banner-error');
banner.style.display = 'none';

const controlsBox = el('div', 'controls');
const progressBox = el('div', 'progress');
const replayBox = el('div', 'replay');

app.append(banner, controlsBox, progressBox, replayBox);

let sessionId: string | null = null;
let live = false;
let channel: LiveChannel | null = null;
let folder = new ProgressSession();
let stale = false;

function showError(err: unknown): void {
  banner.textContent = err instanceof ApiError ? err.message : String(err);
  banner.style.display = 'block';
  setTimeout(() => (banner.style.display = 'none'), 6000);
}

function attach(id: string, isLive: boolean): void {
  sessionId = id;
  live = isLive;
  folder = new ProgressSession();
  channel?.close();
  channel = new LiveChannel(liveUrl(id), {
    onMessage: (message: LiveMessage) => {
      if (message.type === 'state') {
        renderProgress(progressBox, folder.fold(message), stale);
        renderControls();
      }
    },
    onStale: (s: boolean) => {
      stale = s;
    },
    onEnd: async () => {
      if (sessionId) {
        try {
          const final = await api.stopSession(sessionId);
          sessionId = null;
          renderControls();
          await showReport(final.trip_id);
        } catch (err) {
          showError(err);
        }
      }
    },
  });
  renderControls();
}

function renderControls(): void {
  controlsBox.replaceChildren();
  const title = el('h1', '', 'Emissions test drive monitor');
  controlsBox.appendChild(title);

  if (sessionId === null) {
    const startLive = el('button', '', 'start live drive');
    startLive.onclick = async () => {
      try {
        const info = await api.startLive('valid', 1.0);
        attach(info.id, true);
      } catch (err) {
        showError(err);
      }
    };
    controlsBox.appendChild(startLive);
    void renderTripPicker();
    return;
  }

  if (live) {
    const slider = el('input') as HTMLInputElement;
    slider.type = 'range';
    slider.min = '0';
    slider.max = '160';
    slider.step = '5';
    slider.title = 'target speed';
    slider.onchange = () => {
      void api
        .control(sessionId!, { target_speed_kmph: Number(slider.value) })
        .catch(showError);
    };
    const aggression = el('input') as HTMLInputElement;
    aggression.type = 'range';
    aggression.min = '0.1';
    aggression.max = '1';
    aggression.step = '0.05';
    aggression.title = 'aggressiveness';
    aggression.onchange = () => {
      void api
        .control(sessionId!, { aggressiveness: Number(aggression.value) })
        .catch(showError);
    };
    const end = el('button', '', 'end drive');
    end.onclick = () => {
      void api.control(sessionId!, { end_drive: true }).catch(showError);
    };
    controlsBox.append(
      el('span', 'control-label', 'target speed'),
      slider,
      el('span', 'control-label', 'aggressiveness'),
      aggression,
      end,
    );
  } else {
    // replayed drives cannot be steered
    const note = el('span', 'control-label', 'replaying stored drive');
    const stop = el('button', '', 'stop replay');
    stop.onclick = async () => {
      try {
        await api.stopSession(sessionId!);
        sessionId = null;
        renderControls();
      } catch (err) {
        showError(err);
      }
    };
    controlsBox.append(note, stop);
  }
}

async function renderTripPicker(): Promise<void> {
  try {
    const { trips } = await api.listTrips();
    const picker = el('div', 'trip-picker');
    for (const trip of trips) {
      const row = el('div', 'trip-row');
      row.appendChild(el('span', 'mono', trip.id));
      row.appendChild(el('span', '', trip.model));
      const watch = el('button', '', 'replay live');
      watch.onclick = async () => {
        try {
          const info = await api.startReplay(trip.id, 60.0);
          attach(info.id, false);
        } catch (err) {
          showError(err);
        }
      };
      const plot = el('button', '', 'charts');
      plot.onclick = () => void showReport(trip.id);
      row.append(watch, plot);
      picker.appendChild(row);
    }
    controlsBox.appendChild(picker);
  } catch (err) {
    showError(err);
  }
}

const DEFAULT_STREAMS = ['velo_kmph', 'nox_mgps'];
const SELECTABLE = [
  'velo_kmph',
  'accel_mpss',
  'nox_mgps',
  'co2_gps',
  'ambient_K',
  'maf_gps',
  'fuel_Lph',
  'nox_ppm_down',
];

async function showReport(tripId: string): Promise<void> {
  replayBox.replaceChildren(el('h2', '', `trip ${tripId}`));
  try {
    const { rows } = await api.report(tripId);
    const table = el('table', 'report');
    const head = el('tr');
    for (const column of ['segment', 'distance [km]', 'NOx [mg/km]', 'CO2 [g/km]']) {
      head.appendChild(el('th', '', column));
    }
    table.appendChild(head);
    for (const row of rows) {
      const tr = el('tr');
      tr.appendChild(el('td', '', row.segment));
      tr.appendChild(el('td', 'mono', String(row.distance_km)));
      tr.appendChild(el('td', 'mono', row.nox_mg_per_km === null ? '–' : String(row.nox_mg_per_km)));
      tr.appendChild(el('td', 'mono', row.co2_g_per_km === null ? '–' : String(row.co2_g_per_km)));
      table.appendChild(tr);
    }
    replayBox.appendChild(table);

    const chartBox = el('div', 'chart-box');
    const selector = el('div', 'stream-select');
    const selected = new Set(DEFAULT_STREAMS);
    let series: SeriesMap = {};

    const redraw = () => renderChart(chartBox, chartModel(series, [...selected]));
    for (const name of SELECTABLE) {
      const label = el('label', 'stream-option');
      const box = el('input') as HTMLInputElement;
      box.type = 'checkbox';
      box.checked = selected.has(name);
      box.onchange = async () => {
        box.checked ? selected.add(name) : selected.delete(name);
        if (box.checked && !(name in series)) {
          try {
            const result = await api.series(tripId, [name], 1500);
            series = { ...series, ...result.series };
          } catch (err) {
            showError(err);
            box.checked = false;
            selected.delete(name);
          }
        }
        redraw();
      };
      label.append(box, document.createTextNode(name));
      selector.appendChild(label);
    }
    replayBox.append(selector, chartBox);
    const result = await api.series(tripId, DEFAULT_STREAMS, 1500);
    series = result.series;
    redraw();
  } catch (err) {
    showError(err);
  }
}

renderControls();
