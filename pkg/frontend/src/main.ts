// Wiring: binds the pure renderers to the DOM, drives the lab service, and
// consumes the session event stream. All displayed data comes from the
// service; a reload rebuilds the identical view from /state + /trace.

import { ApiError, LabClient } from './api.js';
import {
  buildViewState,
  compareTraces,
  recencyFromJournal,
  recencyFromSummaries,
  type FiringRecency,
  type LabViewState,
} from './state.js';
import { renderBlackboard } from './views/blackboard.js';
import { renderBench, renderCommandLog } from './views/bench.js';
import { renderNetwork } from './views/network.js';
import { renderTimeseries } from './views/timeseries.js';
import type { ModelInfo, StreamEvent, TraceRow } from './types.js';

interface App {
  client: LabClient;
  model: ModelInfo | null;
  sessionId: string | null;
  rows: TraceRow[];
  recency: FiringRecency;
  running: boolean;
  runTimer: number | null;
  selection: string[] | null;
  compare: { forkId: string; key: string; forkRows: TraceRow[] } | null;
  streamAbort: AbortController | null;
}

const app: App = {
  client: new LabClient(apiBase()),
  model: null,
  sessionId: null,
  rows: [],
  recency: {},
  running: false,
  runTimer: null,
  selection: null,
  compare: null,
  streamAbort: null,
};

function apiBase(): string {
  const params = new URLSearchParams(window.location.search);
  return params.get('api') ?? '';
}

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

function notice(text: string, isError = false): void {
  const banner = el('notice');
  banner.textContent = text;
  banner.className = isError ? 'notice error' : 'notice';
  banner.hidden = !text;
}

function staleBanner(visible: boolean): void {
  el('stale').hidden = !visible;
}

function describe(error: unknown): string {
  if (error instanceof ApiError) {
    const detail = error.detail as { diagnostics?: { message: string; line: number }[] } | string;
    if (detail && typeof detail === 'object' && detail.diagnostics) {
      return detail.diagnostics.map((d) => `line ${d.line}: ${d.message}`).join('; ');
    }
    return String(typeof detail === 'string' ? detail : error.message);
  }
  return error instanceof Error ? error.message : String(error);
}

async function refresh(): Promise<void> {
  if (!app.model || !app.sessionId) return;
  try {
    const [state, rows] = await Promise.all([
      app.client.getState(app.sessionId),
      app.client.getTrace(app.sessionId),
    ]);
    app.rows = rows;
    const view = buildViewState(app.model, state, rows, app.recency, app.selection);
    renderAll(view);
    staleBanner(false);
  } catch (error) {
    staleBanner(true);
    notice(describe(error), true);
  }
}

function renderAll(view: LabViewState): void {
  el('blackboard-panel').innerHTML = renderBlackboard(view);
  const markers = view.markers;
  const overlay = app.compare
    ? compareTraces(app.rows, app.compare.forkRows, app.compare.key)
    : null;
  const series = overlay
    ? [
        ...view.series,
        {
          key: `${overlay.key} (fork)`,
          species: '',
          level: '',
          region: '',
          points: overlay.fork,
        },
      ]
    : view.series;
  el('timeseries-panel').innerHTML = renderTimeseries(series, markers);
  el('network-panel').innerHTML = renderNetwork(view.nodes, view.columns, view.tick);
  el('bench-panel').innerHTML = renderBench(view, app.model!, app.running);
  el('log-panel').innerHTML = renderCommandLog(app.client.commands);
  wireBench(view);
}

async function stepTicks(ticks: number): Promise<void> {
  if (!app.sessionId) return;
  try {
    const summaries = await app.client.step(app.sessionId, ticks);
    app.recency = recencyFromSummaries(app.recency, summaries);
    await refresh();
    notice('');
  } catch (error) {
    notice(describe(error), true);
  }
}

function setRunning(on: boolean): void {
  app.running = on;
  if (app.runTimer !== null) {
    window.clearInterval(app.runTimer);
    app.runTimer = null;
  }
  if (on) {
    app.runTimer = window.setInterval(() => void stepTicks(1), 400);
  }
}

function wireBench(view: LabViewState): void {
  el('btn-run').onclick = () => {
    setRunning(!app.running);
    void refresh();
  };
  el('btn-step1').onclick = () => void stepTicks(1);
  el('btn-stepn').onclick = () =>
    void stepTicks(Number((el<HTMLInputElement>('step-count')).value) || 1);
  el('btn-stimulus').onclick = () => {
    void (async () => {
      try {
        await app.client.addStimulus(app.sessionId!, {
          ligand: el<HTMLSelectElement>('stim-ligand').value,
          amount: Number(el<HTMLInputElement>('stim-amount').value),
          from_tick: Number(el<HTMLInputElement>('stim-from').value),
          to_tick: Number(el<HTMLInputElement>('stim-to').value),
        });
        await refresh();
        notice('');
      } catch (error) {
        notice(describe(error), true);
      }
    })();
  };
  el('btn-lesion').onclick = () => {
    void (async () => {
      const kind = el<HTMLSelectElement>('lesion-kind').value as
        | 'knockout'
        | 'attenuate'
        | 'clamp'
        | 'block';
      const until = el<HTMLInputElement>('lesion-until').value;
      const body = {
        kind,
        at_tick: Number(el<HTMLInputElement>('lesion-at').value),
        until_tick: until ? Number(until) : null,
        agent:
          kind === 'block'
            ? el<HTMLSelectElement>('lesion-receptor').value
            : kind === 'clamp'
              ? null
              : el<HTMLSelectElement>('lesion-agent').value,
        factor: kind === 'attenuate' ? Number(el<HTMLInputElement>('lesion-factor').value) : null,
        species: kind === 'clamp' ? el<HTMLSelectElement>('lesion-species').value : null,
        level: kind === 'clamp' ? el<HTMLSelectElement>('lesion-level').value : null,
        region: kind === 'clamp' ? el<HTMLInputElement>('lesion-region').value : 'global',
        value: kind === 'clamp' ? Number(el<HTMLInputElement>('lesion-value').value) : null,
      };
      try {
        await app.client.addLesion(app.sessionId!, body);
        await refresh();
        notice('');
      } catch (error) {
        notice(describe(error), true);
      }
    })();
  };
  el('btn-fork').onclick = () => {
    void (async () => {
      try {
        const fork = await app.client.fork(app.sessionId!);
        notice(`forked: ${fork.session_id} (paste it into the compare box of either session)`);
      } catch (error) {
        notice(describe(error), true);
      }
    })();
  };
  el('btn-compare').onclick = () => {
    void (async () => {
      const forkId = el<HTMLInputElement>('compare-fork').value.trim();
      const key = el<HTMLSelectElement>('compare-key').value;
      if (!forkId) {
        app.compare = null;
        await refresh();
        return;
      }
      try {
        const forkRows = await app.client.getTrace(forkId);
        app.compare = { forkId, key, forkRows };
        await refresh();
        notice('');
      } catch (error) {
        notice(describe(error), true);
      }
    })();
  };
}

async function followEvents(): Promise<void> {
  if (!app.sessionId) return;
  app.streamAbort?.abort();
  const abort = new AbortController();
  app.streamAbort = abort;
  try {
    const response = await fetch(app.client.eventsUrl(app.sessionId), { signal: abort.signal });
    const reader = response.body!.getReader();
    const decoder = new TextDecoder();
    let buffer = '';
    for (;;) {
      const { value, done } = await reader.read();
      if (done) break;
      buffer += decoder.decode(value, { stream: true });
      const lines = buffer.split('\n');
      buffer = lines.pop() ?? '';
      for (const line of lines) {
        if (!line.startsWith('data: ')) continue;
        const event = JSON.parse(line.slice(6)) as StreamEvent;
        if (event.type === 'firing' && event.fired) {
          app.recency = { ...app.recency, [event.agent]: event.tick };
        }
        appendTicker(event);
      }
    }
  } catch {
    if (!abort.signal.aborted) staleBanner(true);
  }
}

function appendTicker(event: StreamEvent): void {
  if (event.type !== 'write' && event.type !== 'emission') return;
  const ticker = el('ticker');
  const line = document.createElement('div');
  line.textContent =
    event.type === 'write'
      ? `t${event.tick} ${event.actor}: ${event.kind} ${event.species}@${event.level}/${event.region} -> ${event.resulting}`
      : `t${event.tick} ${event.agent} emits ${event.ligand} x${event.amount}`;
  ticker.prepend(line);
  while (ticker.childElementCount > 40) ticker.lastElementChild?.remove();
}

async function bootSession(sessionId: string): Promise<void> {
  app.sessionId = sessionId;
  window.sessionStorage.setItem('cellulat-session', sessionId);
  const state = await app.client.getState(sessionId);
  app.model = await app.client.getModel(state.model_id);
  // Rebuild firing recency purely from service data (the event journal).
  const drained = await fetch(
    `${apiBase()}/sessions/${sessionId}/events?cursor=0&follow=false`,
  );
  const events: StreamEvent[] = [];
  for (const line of (await drained.text()).split('\n')) {
    if (line.startsWith('data: ')) events.push(JSON.parse(line.slice(6)) as StreamEvent);
  }
  app.recency = recencyFromJournal(events);
  await refresh();
  void followEvents();
}

async function boot(): Promise<void> {
  el('btn-load').onclick = () => {
    void (async () => {
      try {
        const text = el<HTMLTextAreaElement>('model-text').value;
        const upload = await app.client.loadModel(text);
        const seed = Number(el<HTMLInputElement>('seed').value) || 0;
        const session = await app.client.createSession(upload.model_id, seed);
        notice(
          upload.diagnostics.length
            ? upload.diagnostics.map((d) => `${d.severity} line ${d.line}: ${d.message}`).join('; ')
            : '',
        );
        await bootSession(session.session_id);
      } catch (error) {
        notice(describe(error), true);
      }
    })();
  };
  el('btn-attach').onclick = () => {
    void bootSession(el<HTMLInputElement>('attach-id').value.trim()).catch((error) =>
      notice(describe(error), true),
    );
  };
  const remembered = window.sessionStorage.getItem('cellulat-session');
  if (remembered) {
    try {
      await bootSession(remembered);
    } catch {
      window.sessionStorage.removeItem('cellulat-session');
    }
  }
}

void boot();
