// Time-series view: selected species/locus traces with stimulus and lesion
// markers on the tick axis. Geometry is computed by a pure function so the
// scaling math is unit-testable; the SVG renderer just serializes it.

import type { Marker, Series } from '../state.js';

export interface ChartGeometry {
  width: number;
  height: number;
  maxTick: number;
  maxQuantity: number;
  polylines: { key: string; color: string; points: string }[];
  markerLines: { x: number; kind: 'lesion' | 'stimulus'; label: string }[];
}

const PALETTE = ['#2a9d8f', '#e76f51', '#457b9d', '#e9c46a', '#9b5de5', '#f15bb5', '#606c38', '#118ab2'];

const PAD = 24;

export function seriesColor(index: number): string {
  return PALETTE[index % PALETTE.length];
}

export function computeChart(
  series: Series[],
  markers: Marker[],
  width = 640,
  height = 220,
): ChartGeometry {
  const ticks = series.flatMap((s) => s.points.map((p) => p.tick));
  const maxTick = Math.max(1, ...ticks, ...markers.map((m) => m.tick));
  const maxQuantity = Math.max(1e-9, ...series.flatMap((s) => s.points.map((p) => p.quantity)));
  const xOf = (tick: number) => PAD + (tick / maxTick) * (width - 2 * PAD);
  const yOf = (quantity: number) => height - PAD - (quantity / maxQuantity) * (height - 2 * PAD);
  const polylines = series.map((s, i) => ({
    key: s.key,
    color: seriesColor(i),
    points: s.points.map((p) => `${xOf(p.tick).toFixed(1)},${yOf(p.quantity).toFixed(1)}`).join(' '),
  }));
  const markerLines = markers.map((m) => ({ x: xOf(m.tick), kind: m.kind, label: m.label }));
  return { width, height, maxTick, maxQuantity, polylines, markerLines };
}

export function renderTimeseries(series: Series[], markers: Marker[], width = 640, height = 220): string {
  const chart = computeChart(series, markers, width, height);
  const markerSvg = chart.markerLines
    .map(
      (m) =>
        `<line class="marker ${m.kind}" x1="${m.x.toFixed(1)}" x2="${m.x.toFixed(1)}" y1="${PAD}" y2="${height - PAD}">` +
        `<title>${m.label}</title></line>`,
    )
    .join('');
  const lineSvg = chart.polylines
    .map((p) => `<polyline fill="none" stroke="${p.color}" stroke-width="1.5" points="${p.points}"><title>${p.key}</title></polyline>`)
    .join('');
  const legend = chart.polylines
    .map((p) => `<span class="legend-item"><span class="swatch" style="background:${p.color}"></span>${p.key}</span>`)
    .join('');
  return (
    `<svg viewBox="0 0 ${width} ${height}" class="timeseries" role="img">` +
    `<rect x="${PAD}" y="${PAD}" width="${width - 2 * PAD}" height="${height - 2 * PAD}" class="plot-area"/>` +
    markerSvg +
    lineSvg +
    `</svg><div class="legend">${legend || 'no series selected'}</div>`
  );
}
