/** Minimal SVG line charts for the replay view: pure path-building. */

import type { SeriesMap } from './types.js';

export interface ChartLine {
  name: string;
  color: string;
  path: string;
}

export interface ChartModel {
  width: number;
  height: number;
  lines: ChartLine[];
  empty: boolean;
  xMinText: string;
  xMaxText: string;
  yMinText: string;
  yMaxText: string;
}

const PALETTE = ['#2b8a3e', '#1c7ed6', '#e8590c', '#9c36b5', '#0b7285', '#c92a2a'];

export function polylinePath(
  points: Array<[number, number]>,
  width: number,
  height: number,
  xRange: [number, number],
  yRange: [number, number],
): string {
  if (points.length === 0) {
    return '';
  }
  const [x0, x1] = xRange;
  const [y0, y1] = yRange;
  const dx = x1 - x0 || 1;
  const dy = y1 - y0 || 1;
  const steps = points.map(([x, y], i) => {
    const px = ((x - x0) / dx) * width;
    const py = height - ((y - y0) / dy) * height;
    return `${i === 0 ? 'M' : 'L'}${px.toFixed(1)},${py.toFixed(1)}`;
  });
  return steps.join(' ');
}

export function chartModel(
  series: SeriesMap,
  selected: string[],
  width = 640,
  height = 240,
): ChartModel {
  const lines: ChartLine[] = [];
  let xMin = Infinity;
  let xMax = -Infinity;
  let yMin = Infinity;
  let yMax = -Infinity;
  for (const name of selected) {
    for (const [x, y] of series[name] ?? []) {
      xMin = Math.min(xMin, x);
      xMax = Math.max(xMax, x);
      yMin = Math.min(yMin, y);
      yMax = Math.max(yMax, y);
    }
  }
  const empty = !isFinite(xMin);
  if (!empty) {
    for (let i = 0; i < selected.length; i++) {
      const name = selected[i];
      lines.push({
        name,
        color: PALETTE[i % PALETTE.length],
        path: polylinePath(series[name] ?? [], width, height, [xMin, xMax], [yMin, yMax]),
      });
    }
  }
  return {
    width,
    height,
    lines,
    empty,
    xMinText: empty ? '' : String(xMin),
    xMaxText: empty ? '' : String(xMax),
    yMinText: empty ? '' : String(yMin),
    yMaxText: empty ? '' : String(yMax),
  };
}
