// API payload shapes, mirroring docs/api_reference.md in the engine repo.

export interface Diagnostic {
  severity: 'error' | 'warning';
  code: string;
  message: string;
  line: number;
  col: number;
}

export interface ModelUpload {
  model_id: string;
  diagnostics: Diagnostic[];
}

export interface LevelInfo {
  name: string;
  rank: number;
  kind: string;
}

export interface SpeciesInfo {
  name: string;
  kind: 'messenger' | 'flag';
  decay: number;
}

export interface AgentInfo {
  id: string;
  kind: 'internal' | 'interface';
  priority: number;
  multiplicity: number;
  probability: number;
  region: string | null;
}

export interface StimulusInfo {
  ligand: string;
  amount: number;
  from_tick: number;
  to_tick: number;
}

export interface ColumnInfo {
  region: string;
  levels: string[];
  members: string[];
}

export interface ModelInfo {
  model_id: string;
  name: string;
  metadata: Record<string, string>;
  levels: LevelInfo[];
  species: SpeciesInfo[];
  ligands: string[];
  agents: AgentInfo[];
  stimuli: StimulusInfo[];
  occupancy: Record<string, { sensing: string[]; affecting: string[]; species: string[] }>;
  columns: ColumnInfo[];
}

export interface SignalState {
  species: string;
  level: string;
  region: string;
  quantity: number;
}

export interface LesionState {
  id: string;
  kind: string;
  at_tick: number;
  until_tick: number | null;
  agent: string | null;
  species: string | null;
  level: string | null;
  region: string | null;
  factor: number | null;
  value: number | null;
  in_force: boolean;
}

export interface SessionState {
  session_id: string;
  model_id: string;
  tick: number;
  status: 'idle' | 'running' | 'ended';
  seed: number;
  lineage: string | null;
  event_count: number;
  signals: SignalState[];
  lesions: LesionState[];
  extra_stimuli: StimulusInfo[];
}

export interface FiringSummary {
  agent: string;
  fired: boolean;
  count: number;
  skip_reason: string | null;
}

export interface TickSummary {
  tick: number;
  stimuli_active: [string, number][];
  agenda: { agent: string; reason: string }[];
  firings: FiringSummary[];
  event_count: number;
  emissions: { agent: string; ligand: string; amount: number }[];
}

export interface TraceRow {
  tick: number;
  level: string;
  region: string;
  species: string;
  quantity: number;
}

export interface LesionRequest {
  kind: 'knockout' | 'attenuate' | 'clamp' | 'block';
  at_tick: number;
  until_tick?: number | null;
  agent?: string | null;
  species?: string | null;
  level?: string | null;
  region?: string;
  factor?: number | null;
  value?: number | null;
  id?: string | null;
}

export interface StimulusRequest {
  ligand: string;
  amount: number;
  from_tick: number;
  to_tick: number;
}

// Journal objects from GET /sessions/{id}/events.
export type StreamEvent =
  | { type: 'write'; tick: number; actor: string; species: string; level: string; region: string; kind: string; amount: number; resulting: number; seq: number }
  | { type: 'firing'; tick: number; agent: string; fired: boolean; count: number; skip_reason: string | null }
  | { type: 'emission'; tick: number; agent: string; ligand: string; amount: number }
  | { type: 'tick'; tick: number; stimuli_active: [string, number][] }
  | { type: 'stream_end'; reason: string };
