// Network view: agents as nodes colored by last-firing recency, agency
// columns outlined around their members. Layout is a pure function.

import type { ColumnInfo } from '../types.js';
import { byCodeUnit, type NetworkNode } from '../state.js';
import { escapeHtml } from './blackboard.js';

export interface NodePosition {
  id: string;
  x: number;
  y: number;
  column: string | null;
}

export interface ColumnOutline {
  region: string;
  x: number;
  y: number;
  width: number;
  height: number;
}

export interface NetworkLayout {
  width: number;
  height: number;
  positions: NodePosition[];
  outlines: ColumnOutline[];
}

const CELL_W = 120;
const CELL_H = 56;
const GAP = 28;

export function layoutNetwork(nodes: NetworkNode[], columns: ColumnInfo[]): NetworkLayout {
  const assigned = new Map<string, string>();
  const ordered = [...columns].sort((a, b) => byCodeUnit(a.region, b.region));
  for (const column of ordered) {
    for (const member of column.members) {
      if (!assigned.has(member)) assigned.set(member, column.region);
    }
  }
  const groups = new Map<string | null, NetworkNode[]>();
  for (const node of [...nodes].sort((a, b) => byCodeUnit(a.id, b.id))) {
    const key = assigned.get(node.id) ?? null;
    const group = groups.get(key) ?? [];
    group.push(node);
    groups.set(key, group);
  }
  const groupKeys = [...groups.keys()].sort((a, b) => byCodeUnit(a ?? '~', b ?? '~'));

  const positions: NodePosition[] = [];
  const outlines: ColumnOutline[] = [];
  let x = GAP;
  let height = 0;
  for (const key of groupKeys) {
    const members = groups.get(key)!;
    members.forEach((node, row) => {
      positions.push({ id: node.id, x, y: GAP + row * CELL_H, column: key });
    });
    const tall = GAP + members.length * CELL_H;
    if (key !== null) {
      outlines.push({
        region: key,
        x: x - GAP / 2,
        y: GAP / 2,
        width: CELL_W + GAP - 8,
        height: tall - GAP / 2,
      });
    }
    height = Math.max(height, tall + GAP);
    x += CELL_W + GAP;
  }
  return { width: Math.max(x, CELL_W + 2 * GAP), height: Math.max(height, CELL_H + 2 * GAP), positions, outlines };
}

export function recencyClass(lastFired: number | null, currentTick: number): string {
  if (lastFired === null) return 'never';
  const age = currentTick - 1 - lastFired;
  if (age <= 0) return 'hot';
  if (age <= 3) return 'warm';
  return 'cold';
}

export function renderNetwork(nodes: NetworkNode[], columns: ColumnInfo[], currentTick: number): string {
  const layout = layoutNetwork(nodes, columns);
  const byId = new Map(nodes.map((n) => [n.id, n]));
  const outlines = layout.outlines
    .map(
      (o) =>
        `<g class="column-outline"><rect x="${o.x}" y="${o.y}" width="${o.width}" height="${o.height}" rx="10"/>` +
        `<text x="${o.x + 6}" y="${o.y + 14}">${escapeHtml(o.region)}</text></g>`,
    )
    .join('');
  const nodeSvg = layout.positions
    .map((p) => {
      const node = byId.get(p.id)!;
      const cls = `agent-node ${node.kind} ${recencyClass(node.lastFired, currentTick)}`;
      const fired = node.lastFired === null ? 'never fired' : `last fired tick ${node.lastFired}`;
      return (
        `<g class="${cls}" data-agent="${escapeHtml(p.id)}">` +
        `<rect x="${p.x}" y="${p.y}" width="${CELL_W - 16}" height="${CELL_H - 20}" rx="7"><title>${fired}</title></rect>` +
        `<text x="${p.x + 8}" y="${p.y + 22}">${escapeHtml(p.id)}</text></g>`
      );
    })
    .join('');
  return `<svg viewBox="0 0 ${layout.width} ${layout.height}" class="network" role="img">${outlines}${nodeSvg}</svg>`;
}
