// Blackboard view: level bands stacked by rank (rank 0 on top), one lane per
// region, one gauge per nonzero signal. Pure HTML-string renderer.

import type { LabViewState, GaugeCell } from '../state.js';

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, '&amp;')
    .replace(/</g, '&lt;')
    .replace(/>/g, '&gt;')
    .replace(/"/g, '&quot;');
}

function gaugeHtml(cell: GaugeCell, maxQuantity: number): string {
  const fraction = cell.isFlag ? cell.quantity : maxQuantity > 0 ? cell.quantity / maxQuantity : 0;
  const width = Math.max(2, Math.round(fraction * 100));
  const cls = cell.isFlag ? (cell.quantity > 0 ? 'gauge flag on' : 'gauge flag') : 'gauge';
  const shown = cell.isFlag ? (cell.quantity > 0 ? 'on' : 'off') : cell.quantity.toFixed(1);
  return (
    `<div class="${cls}" data-species="${escapeHtml(cell.species)}">` +
    `<span class="gauge-label">${escapeHtml(cell.species)}</span>` +
    `<span class="gauge-bar"><span class="gauge-fill" style="width:${width}%"></span></span>` +
    `<span class="gauge-value">${shown}</span></div>`
  );
}

export function renderBlackboard(view: LabViewState): string {
  const maxQuantity = Math.max(
    1,
    ...view.bands.flatMap((band) =>
      band.lanes.flatMap((lane) => lane.gauges.filter((g) => !g.isFlag).map((g) => g.quantity)),
    ),
  );
  const bands = view.bands
    .map((band) => {
      const lanes =
        band.lanes.length === 0
          ? '<div class="lane empty">quiet</div>'
          : band.lanes
              .map(
                (lane) =>
                  `<div class="lane" data-region="${escapeHtml(lane.region)}">` +
                  `<span class="lane-tag">${escapeHtml(lane.region)}</span>` +
                  lane.gauges.map((g) => gaugeHtml(g, maxQuantity)).join('') +
                  '</div>',
              )
              .join('');
      return (
        `<section class="level-band" data-level="${escapeHtml(band.level)}">` +
        `<header>${escapeHtml(band.level)} <small>rank ${band.rank} · ${escapeHtml(band.kind)}</small></header>` +
        lanes +
        '</section>'
      );
    })
    .join('');
  return `<div class="blackboard" data-tick="${view.tick}">${bands}</div>`;
}
