/** DOM rendering of the pure view-models (browser side only). */

import type { ChartModel } from './chart.js';
import type { ProgressView } from './view.js';

export function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className = '',
  text = '',
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text) node.textContent = text;
  return node;
}

function bar(fraction: number, className: string, marks: Array<[number, string]>): HTMLElement {
  const track = el('div', 'bar-track');
  const fill = el('div', `bar-fill ${className}`);
  fill.style.width = `${(fraction * 100).toFixed(2)}%`;
  track.appendChild(fill);
  for (const [at, markClass] of marks) {
    const mark = el('div', `bar-mark ${markClass}`);
    mark.style.left = `${(at * 100).toFixed(2)}%`;
    track.appendChild(mark);
  }
  return track;
}

function dotRow(label: string, dot: { valueText: string; thresholdText: string; fraction: number; thresholdFraction: number; ok: boolean } | null): HTMLElement {
  const row = el('div', 'dot-row');
  row.appendChild(el('span', 'dot-label', label));
  if (!dot) {
    row.appendChild(el('span', 'dot-absent', '–'));
    return row;
  }
  const track = el('div', 'bar-track dot-track');
  const marker = el('div', `dot ${dot.ok ? 'dot-ok' : 'dot-bad'}`);
  marker.style.left = `${(dot.fraction * 100).toFixed(2)}%`;
  const threshold = el('div', 'bar-mark mark-threshold');
  threshold.style.left = `${(dot.thresholdFraction * 100).toFixed(2)}%`;
  track.appendChild(marker);
  track.appendChild(threshold);
  row.appendChild(track);
  row.appendChild(el('span', 'dot-value', `${dot.valueText} / ${dot.thresholdText}`));
  return row;
}

export function renderProgress(root: HTMLElement, view: ProgressView, stale: boolean): void {
  root.replaceChildren();
  if (stale) {
    root.appendChild(el('div', 'banner banner-stale', 'connection lost — data may be stale'));
  }

  const head = el('div', 'head');
  head.appendChild(el('span', 'head-time', view.timeText));
  head.appendChild(el('span', 'head-distance', view.distanceText));
  head.appendChild(el('span', 'head-velocity', view.velocityText));
  root.appendChild(head);

  root.appendChild(
    el('div', `indicator indicator-${view.indicator}`, view.indicatorGlyph),
  );

  const nox = el('div', 'nox');
  nox.appendChild(el('span', 'nox-label', 'NOx'));
  nox.appendChild(
    bar(view.noxFraction, view.noxOverLimit ? 'fill-over' : 'fill-nox', [
      [view.noxLimitFraction, 'mark-limit'],
    ]),
  );
  nox.appendChild(el('span', 'nox-value', `${view.noxText} (limit ${view.noxLimitText})`));
  root.appendChild(nox);

  for (const seg of view.segments) {
    const panel = el('div', 'segment');
    const title = el('div', 'segment-title');
    title.appendChild(el('span', 'segment-name', seg.name));
    title.appendChild(el('span', 'segment-distance', seg.distanceText));
    title.appendChild(el('span', 'segment-avg', seg.avgVelocityText));
    panel.appendChild(title);
    panel.appendChild(
      bar(seg.distanceFraction, 'fill-distance', [
        [seg.shareLoFraction, 'mark-share'],
        [seg.shareHiFraction, 'mark-share'],
      ]),
    );
    panel.appendChild(dotRow('dyn', seg.dynamics));
    panel.appendChild(dotRow('rpa', seg.rpa));
    root.appendChild(panel);
  }

  if (view.triggerLines.length) {
    const list = el('div', 'triggers');
    for (const line of view.triggerLines) {
      list.appendChild(el('div', 'trigger-line', line));
    }
    root.appendChild(list);
  }

  const table = el('table', 'constraints');
  for (const c of view.constraints) {
    const tr = el('tr', `status-${c.status}`);
    tr.appendChild(el('td', '', c.description));
    tr.appendChild(el('td', '', c.status));
    tr.appendChild(el('td', 'mono', c.currentText));
    tr.appendChild(el('td', 'mono', c.boundText));
    table.appendChild(tr);
  }
  root.appendChild(table);
}

const SVG_NS = 'http://www.w3.org/2000/svg';

export function renderChart(root: HTMLElement, model: ChartModel): void {
  root.replaceChildren();
  if (model.empty) {
    root.appendChild(el('div', 'chart-empty', 'no streams selected'));
    return;
  }
  const svg = document.createElementNS(SVG_NS, 'svg');
  svg.setAttribute('viewBox', `0 0 ${model.width} ${model.height}`);
  svg.setAttribute('class', 'chart');
  for (const line of model.lines) {
    const path = document.createElementNS(SVG_NS, 'path');
    path.setAttribute('d', line.path);
    path.setAttribute('fill', 'none');
    path.setAttribute('stroke', line.color);
    path.setAttribute('stroke-width', '1.5');
    svg.appendChild(path);
  }
  root.appendChild(svg);
  const legend = el('div', 'chart-legend');
  for (const line of model.lines) {
    const item = el('span', 'legend-item', line.name);
    item.style.color = line.color;
    legend.appendChild(item);
  }
  legend.appendChild(
    el('span', 'chart-range mono', `t ${model.xMinText}…${model.xMaxText}  y ${model.yMinText}…${model.yMaxText}`),
  );
  root.appendChild(legend);
}
