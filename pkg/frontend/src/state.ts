// View-state assembly. Everything here is a pure projection of service
// payloads: reloading the page and re-fetching /state + /trace + the model
// summary rebuilds the identical LabViewState (no client-side simulation).

import type {
  ColumnInfo,
  ModelInfo,
  SessionState,
  StreamEvent,
  TickSummary,
  TraceRow,
} from './types.js';

export interface GaugeCell {
  species: string;
  quantity: number;
  isFlag: boolean;
}

export interface RegionLane {
  region: string;
  gauges: GaugeCell[];
}

export interface LevelBand {
  level: string;
  rank: number;
  kind: string;
  lanes: RegionLane[];
}

export interface SeriesPoint {
  tick: number;
  quantity: number;
}

export interface Series {
  key: string; // species@level/region
  species: string;
  level: string;
  region: string;
  points: SeriesPoint[];
}

export interface Marker {
  tick: number;
  kind: 'lesion' | 'stimulus';
  label: string;
}

export interface NetworkNode {
  id: string;
  kind: 'internal' | 'interface';
  priority: number;
  lastFired: number | null;
}

export interface LabViewState {
  sessionId: string;
  modelId: string;
  modelName: string;
  tick: number;
  status: string;
  lineage: string | null;
  eventCount: number;
  bands: LevelBand[];
  series: Series[];
  markers: Marker[];
  nodes: NetworkNode[];
  columns: ColumnInfo[];
}

export function byCodeUnit(a: string, b: string): number {
  return a < b ? -1 : a > b ? 1 : 0;
}

export type FiringRecency = Record<string, number>;

export function seriesKey(species: string, level: string, region: string): string {
  return `${species}@${level}/${region}`;
}

function lesionLabel(l: SessionState['lesions'][number]): string {
  const target = l.agent ?? `${l.species}@${l.level}/${l.region}`;
  return `${l.kind} ${target}`;
}

export function buildMarkers(model: ModelInfo, state: SessionState): Marker[] {
  const markers: Marker[] = [];
  for (const stim of [...model.stimuli, ...state.extra_stimuli]) {
    markers.push({ tick: stim.from_tick, kind: 'stimulus', label: `${stim.ligand}=${stim.amount}` });
  }
  for (const lesion of state.lesions) {
    markers.push({ tick: lesion.at_tick, kind: 'lesion', label: lesionLabel(lesion) });
  }
  markers.sort((a, b) => a.tick - b.tick || byCodeUnit(a.label, b.label));
  return markers;
}

export function buildBands(model: ModelInfo, state: SessionState): LevelBand[] {
  const flags = new Set(model.species.filter((s) => s.kind === 'flag').map((s) => s.name));
  const byLevel = new Map<string, Map<string, GaugeCell[]>>();
  for (const signal of state.signals) {
    let lanes = byLevel.get(signal.level);
    if (!lanes) byLevel.set(signal.level, (lanes = new Map()));
    let cells = lanes.get(signal.region);
    if (!cells) lanes.set(signal.region, (cells = []));
    cells.push({ species: signal.species, quantity: signal.quantity, isFlag: flags.has(signal.species) });
  }
  const bands: LevelBand[] = [];
  for (const level of [...model.levels].sort((a, b) => a.rank - b.rank)) {
    const lanes: RegionLane[] = [];
    const laneMap = byLevel.get(level.name);
    if (laneMap) {
      for (const region of [...laneMap.keys()].sort()) {
        const gauges = laneMap.get(region)!;
        gauges.sort((a, b) => byCodeUnit(a.species, b.species));
        lanes.push({ region, gauges });
      }
    }
    bands.push({ level: level.name, rank: level.rank, kind: level.kind, lanes });
  }
  return bands;
}

export function buildSeries(rows: TraceRow[], selection: string[] | null): Series[] {
  const grouped = new Map<string, Series>();
  for (const row of rows) {
    const key = seriesKey(row.species, row.level, row.region);
    if (selection && !selection.includes(key)) continue;
    let series = grouped.get(key);
    if (!series) {
      grouped.set(key, (series = { key, species: row.species, level: row.level, region: row.region, points: [] }));
    }
    series.points.push({ tick: row.tick, quantity: row.quantity });
  }
  const out = [...grouped.values()];
  for (const series of out) series.points.sort((a, b) => a.tick - b.tick);
  out.sort((a, b) => byCodeUnit(a.key, b.key));
  return out;
}

export function buildViewState(
  model: ModelInfo,
  state: SessionState,
  rows: TraceRow[],
  recency: FiringRecency,
  selection: string[] | null = null,
): LabViewState {
  const nodes: NetworkNode[] = model.agents.map((agent) => ({
    id: agent.id,
    kind: agent.kind,
    priority: agent.priority,
    lastFired: recency[agent.id] ?? null,
  }));
  return {
    sessionId: state.session_id,
    modelId: state.model_id,
    modelName: model.name,
    tick: state.tick,
    status: state.status,
    lineage: state.lineage,
    eventCount: state.event_count,
    bands: buildBands(model, state),
    series: buildSeries(rows, selection),
    markers: buildMarkers(model, state),
    nodes,
    columns: model.columns,
  };
}

// -- firing recency --------------------------------------------------------
// Recency comes from service data alone, by either route: step-response
// summaries while driving, or the event journal after a reload. Both fold
// to the same map, which the tests assert.

export function recencyFromSummaries(prev: FiringRecency, summaries: TickSummary[]): FiringRecency {
  const next: FiringRecency = { ...prev };
  for (const summary of summaries) {
    for (const firing of summary.firings) {
      if (firing.fired) next[firing.agent] = summary.tick;
    }
  }
  return next;
}

export function applyStreamEvent(prev: FiringRecency, event: StreamEvent): FiringRecency {
  if (event.type !== 'firing' || !event.fired) return prev;
  return { ...prev, [event.agent]: event.tick };
}

export function recencyFromJournal(events: StreamEvent[]): FiringRecency {
  let recency: FiringRecency = {};
  for (const event of events) recency = applyStreamEvent(recency, event);
  return recency;
}

// -- fork comparison ---------------------------------------------------------

export interface ComparisonSeries {
  key: string;
  base: SeriesPoint[];
  fork: SeriesPoint[];
}

export function compareTraces(
  baseRows: TraceRow[],
  forkRows: TraceRow[],
  key: string,
): ComparisonSeries {
  const pick = (rows: TraceRow[]) =>
    buildSeries(rows, [key]).find((s) => s.key === key)?.points ?? [];
  return { key, base: pick(baseRows), fork: pick(forkRows) };
}
