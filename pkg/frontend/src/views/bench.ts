// Lab bench: run controls, stimulus injector, lesion composer, fork tools,
// plus the auditable command log. Renderers are pure; main.ts wires events.

import type { Command } from '../api.js';
import type { LabViewState } from '../state.js';
import type { ModelInfo } from '../types.js';
import { escapeHtml } from './blackboard.js';

export function renderBench(view: LabViewState, model: ModelInfo, running: boolean): string {
  const agentOptions = model.agents
    .map((a) => `<option value="${escapeHtml(a.id)}">${escapeHtml(a.id)}</option>`)
    .join('');
  const interfaceOptions = model.agents
    .filter((a) => a.kind === 'interface')
    .map((a) => `<option value="${escapeHtml(a.id)}">${escapeHtml(a.id)}</option>`)
    .join('');
  const speciesOptions = model.species
    .map((s) => `<option value="${escapeHtml(s.name)}">${escapeHtml(s.name)}</option>`)
    .join('');
  const levelOptions = model.levels
    .map((l) => `<option value="${escapeHtml(l.name)}">${escapeHtml(l.name)}</option>`)
    .join('');
  const ligandOptions = model.ligands
    .map((l) => `<option value="${escapeHtml(l)}">${escapeHtml(l)}</option>`)
    .join('');
  return `
<div class="bench">
  <div class="bench-row controls">
    <button id="btn-run">${running ? 'pause' : 'run'}</button>
    <button id="btn-step1">step 1</button>
    <button id="btn-stepn">step</button>
    <input id="step-count" type="number" value="10" min="1" style="width:4em">
    <span class="tick-badge">tick ${view.tick}</span>
    <span class="status-badge">${escapeHtml(view.status)}</span>
  </div>
  <fieldset class="bench-row"><legend>stimulus</legend>
    <select id="stim-ligand">${ligandOptions}</select>
    amount <input id="stim-amount" type="number" value="5.0" step="0.5" style="width:4.5em">
    from <input id="stim-from" type="number" value="${view.tick}" min="${view.tick}" style="width:4.5em">
    to <input id="stim-to" type="number" value="${view.tick + 10}" style="width:4.5em">
    <button id="btn-stimulus">inject</button>
  </fieldset>
  <fieldset class="bench-row"><legend>lesion</legend>
    <select id="lesion-kind">
      <option value="knockout">knockout</option>
      <option value="attenuate">attenuate</option>
      <option value="clamp">clamp</option>
      <option value="block">block</option>
    </select>
    <span class="lesion-agent">agent <select id="lesion-agent">${agentOptions}</select></span>
    <span class="lesion-block">receptor <select id="lesion-receptor">${interfaceOptions}</select></span>
    <span class="lesion-factor">factor <input id="lesion-factor" type="number" value="0.5" step="0.1" min="0.01" max="0.99" style="width:4em"></span>
    <span class="lesion-clamp">
      species <select id="lesion-species">${speciesOptions}</select>
      level <select id="lesion-level">${levelOptions}</select>
      region <input id="lesion-region" value="global" style="width:6em">
      value <input id="lesion-value" type="number" value="0.0" step="0.5" min="0" style="width:4em">
    </span>
    at <input id="lesion-at" type="number" value="${view.tick}" min="${view.tick}" style="width:4.5em">
    until <input id="lesion-until" placeholder="open" style="width:4.5em">
    <button id="btn-lesion">apply</button>
  </fieldset>
  <fieldset class="bench-row"><legend>what-if</legend>
    <button id="btn-fork">fork session</button>
    <span id="lineage" class="breadcrumb">${renderLineage(view)}</span>
    compare <select id="compare-key">${seriesOptions(view)}</select>
    against fork <input id="compare-fork" placeholder="fork session id" style="width:14em">
    <button id="btn-compare">overlay</button>
  </fieldset>
</div>`;
}

function seriesOptions(view: LabViewState): string {
  return view.series
    .map((s) => `<option value="${escapeHtml(s.key)}">${escapeHtml(s.key)}</option>`)
    .join('');
}

export function renderLineage(view: LabViewState): string {
  const hops = view.lineage ? [view.lineage, view.sessionId] : [view.sessionId];
  return hops.map((h) => `<code>${escapeHtml(h.slice(0, 8))}</code>`).join(' → ');
}

export function renderCommandLog(commands: Command[]): string {
  if (commands.length === 0) return '<p class="empty">no interventions yet</p>';
  const rows = [...commands]
    .slice(-30)
    .reverse()
    .map(
      (c) =>
        `<tr><td>${c.seq}</td><td>${escapeHtml(c.method)}</td><td>${escapeHtml(c.path)}</td>` +
        `<td class="body">${c.body ? escapeHtml(c.body.slice(0, 120)) : ''}</td></tr>`,
    )
    .join('');
  return `<table class="command-log"><thead><tr><th>#</th><th>method</th><th>path</th><th>body</th></tr></thead><tbody>${rows}</tbody></table>`;
}
