// Shared fixtures shaped exactly like lab-service responses.

import type { ModelInfo, SessionState, StreamEvent, TickSummary, TraceRow } from '../src/types.js';

export const MODEL: ModelInfo = {
  model_id: 'demo-abc123',
  name: 'demo',
  metadata: {},
  levels: [
    { name: 'membrane', rank: 0, kind: 'membrane' },
    { name: 'cytosol', rank: 1, kind: 'cytosol' },
  ],
  species: [
    { name: 'A', kind: 'messenger', decay: 0 },
    { name: 'B', kind: 'messenger', decay: 0 },
    { name: 'armed', kind: 'flag', decay: 0 },
  ],
  ligands: ['food'],
  agents: [
    { id: 'eater', kind: 'interface', priority: 5, multiplicity: 1, probability: 1, region: 'patch' },
    { id: 'mixer', kind: 'internal', priority: 0, multiplicity: 1, probability: 1, region: 'patch' },
  ],
  stimuli: [{ ligand: 'food', amount: 1.0, from_tick: 0, to_tick: 4 }],
  occupancy: {},
  columns: [{ region: 'patch', levels: ['membrane', 'cytosol'], members: ['eater', 'mixer'] }],
};

export const STATE: SessionState = {
  session_id: 'sess-1',
  model_id: 'demo-abc123',
  tick: 4,
  status: 'idle',
  seed: 7,
  lineage: null,
  event_count: 9,
  signals: [
    { species: 'A', level: 'membrane', region: 'patch', quantity: 6.0 },
    { species: 'B', level: 'cytosol', region: 'patch', quantity: 3.0 },
    { species: 'armed', level: 'cytosol', region: 'patch', quantity: 1.0 },
  ],
  lesions: [
    {
      id: 'ko-1', kind: 'knockout', at_tick: 2, until_tick: null, agent: 'mixer',
      species: null, level: null, region: null, factor: null, value: null, in_force: true,
    },
  ],
  extra_stimuli: [{ ligand: 'food', amount: 2.0, from_tick: 3, to_tick: 6 }],
};

export const ROWS: TraceRow[] = [
  { tick: 0, level: 'membrane', region: 'patch', species: 'A', quantity: 9.0 },
  { tick: 1, level: 'membrane', region: 'patch', species: 'A', quantity: 8.0 },
  { tick: 1, level: 'cytosol', region: 'patch', species: 'B', quantity: 1.0 },
  { tick: 2, level: 'membrane', region: 'patch', species: 'A', quantity: 7.0 },
  { tick: 2, level: 'cytosol', region: 'patch', species: 'B', quantity: 2.0 },
  { tick: 3, level: 'membrane', region: 'patch', species: 'A', quantity: 6.0 },
  { tick: 3, level: 'cytosol', region: 'patch', species: 'B', quantity: 3.0 },
];

export const SUMMARIES: TickSummary[] = [
  {
    tick: 0,
    stimuli_active: [['food', 1.0]],
    agenda: [{ agent: 'eater', reason: 'interface_poll' }],
    firings: [{ agent: 'eater', fired: true, count: 1, skip_reason: null }],
    event_count: 2,
    emissions: [],
  },
  {
    tick: 1,
    stimuli_active: [['food', 1.0]],
    agenda: [
      { agent: 'eater', reason: 'refire' },
      { agent: 'mixer', reason: 'event_match' },
    ],
    firings: [
      { agent: 'eater', fired: true, count: 1, skip_reason: null },
      { agent: 'mixer', fired: false, count: 0, skip_reason: 'condition_false' },
    ],
    event_count: 2,
    emissions: [],
  },
];

export const JOURNAL: StreamEvent[] = [
  { type: 'write', tick: 0, actor: 'eater', species: 'A', level: 'membrane', region: 'patch', kind: 'remove', amount: 1, resulting: 9, seq: 0 },
  { type: 'firing', tick: 0, agent: 'eater', fired: true, count: 1, skip_reason: null },
  { type: 'tick', tick: 0, stimuli_active: [['food', 1.0]] },
  { type: 'write', tick: 1, actor: 'eater', species: 'A', level: 'membrane', region: 'patch', kind: 'remove', amount: 1, resulting: 8, seq: 0 },
  { type: 'firing', tick: 1, agent: 'eater', fired: true, count: 1, skip_reason: null },
  { type: 'firing', tick: 1, agent: 'mixer', fired: false, count: 0, skip_reason: 'condition_false' },
  { type: 'tick', tick: 1, stimuli_active: [['food', 1.0]] },
];

export function jsonResponse(body: unknown, status = 200): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { 'content-type': 'application/json' },
  });
}
