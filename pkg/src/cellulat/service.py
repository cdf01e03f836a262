"""Session-oriented HTTP service for the virtual laboratory.

JSON over HTTP (FastAPI) plus a server-push event stream (SSE).  Sessions
are in-memory; commands against one session are serialized by a
per-session lock, distinct sessions run independently.  The full endpoint
and schema contract is documented in docs/api_reference.md.

Configuration: CELLULAT_ADDR (host:port, default 127.0.0.1:8077) and
CELLULAT_MODEL_DIR (directory of .cellulat files preloaded at startup).
"""

from __future__ import annotations

import hashlib
import json
import os
import threading
import time
import uuid
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, HTTPException, Query, Request
from fastapi.responses import StreamingResponse
from pydantic import BaseModel, Field

from .columns import columns_json, occupancy_json
from .dsl import parse_and_validate
from .errors import LesionError
from .lesions import apply_lesion
from .model import Lesion, Locus, ModelDef, StimulusEntry
from .scheduler import SimState, TickReport, load_state, save_state, step
from .trace import TraceCollector, row_to_json


class SessionCreate(BaseModel):
    model_id: str
    seed: int = 0


class StepRequest(BaseModel):
    ticks: int = Field(default=1, ge=0, le=100_000)


class StimulusRequest(BaseModel):
    ligand: str
    amount: float = Field(ge=0.0)
    from_tick: int = Field(ge=0)
    to_tick: int = Field(ge=0)


class LesionRequest(BaseModel):
    kind: str
    at_tick: int = Field(ge=0)
    until_tick: Optional[int] = None
    agent: Optional[str] = None
    species: Optional[str] = None
    level: Optional[str] = None
    region: str = "global"
    factor: Optional[float] = None
    value: Optional[float] = None
    id: Optional[str] = None


@dataclass
class GCPolicy:
    max_idle_seconds: float = 3600.0
    max_sessions: int = 256


@dataclass
class ModelRecord:
    id: str
    text: str
    model: ModelDef
    warnings: list = field(default_factory=list)


class SessionRecord:
    def __init__(self, session_id: str, model_id: str, sim: SimState, lineage: str | None = None):
        self.id = session_id
        self.model_id = model_id
        self.sim = sim
        self.status = "idle"  # idle | running | ended
        self.lineage = lineage
        self.lock = threading.Lock()
        self.journal: list[dict] = []
        self.collector = TraceCollector(sim.model)
        self.last_used = 0.0


def _event_json(ev) -> dict:
    return {
        "type": "write",
        "tick": ev.tick,
        "actor": ev.actor,
        "species": ev.species,
        "level": ev.locus.level,
        "region": ev.locus.region,
        "kind": ev.kind,
        "amount": ev.amount,
        "resulting": ev.resulting,
        "seq": ev.seq,
    }


def _report_summary(report: TickReport) -> dict:
    return {
        "tick": report.tick,
        "stimuli_active": [list(s) for s in report.stimuli_active],
        "agenda": [{"agent": e.agent, "reason": e.reason} for e in report.agenda],
        "firings": [
            {"agent": f.agent, "fired": f.fired, "count": f.count, "skip_reason": f.skip_reason}
            for f in report.firings
        ],
        "event_count": len(report.events),
        "emissions": [
            {"agent": e.agent, "ligand": e.ligand, "amount": e.amount} for e in report.emissions
        ],
    }


class LabService:
    """In-memory model and session stores with per-session serialization."""

    def __init__(
        self,
        gc_policy: GCPolicy | None = None,
        clock=time.monotonic,
        trace_dir: str | Path | None = None,
    ):
        self.models: dict[str, ModelRecord] = {}
        self.sessions: dict[str, SessionRecord] = {}
        self.gc_policy = gc_policy or GCPolicy()
        self.clock = clock
        self.trace_dir = Path(trace_dir) if trace_dir else None
        if self.trace_dir:
            self.trace_dir.mkdir(parents=True, exist_ok=True)
        self._store_lock = threading.Lock()

    def _persist_rows(self, session: "SessionRecord", rows) -> None:
        # Durability knob: traces survive the in-memory session.
        if self.trace_dir is None:
            return
        with open(self.trace_dir / f"{session.id}.jsonl", "a", encoding="utf-8") as fh:
            for row in rows:
                fh.write(json.dumps(row_to_json(row)) + "\n")

    # -- models -----------------------------------------------------------

    def add_model(self, text: str) -> tuple[ModelRecord | None, list]:
        model, diags = parse_and_validate(text)
        if model is None:
            return None, diags
        digest = hashlib.sha1(text.encode("utf-8")).hexdigest()[:10]
        model_id = f"{model.name}-{digest}"
        record = ModelRecord(model_id, text, model, [d for d in diags if d.severity == "warning"])
        with self._store_lock:
            self.models[model_id] = record
        return record, diags

    def load_model_dir(self, directory: str | Path) -> int:
        count = 0
        for path in sorted(Path(directory).glob("*.cellulat")):
            record, _ = self.add_model(path.read_text(encoding="utf-8"))
            if record is not None:
                count += 1
        return count

    # -- sessions ----------------------------------------------------------

    def get_model(self, model_id: str) -> ModelRecord:
        record = self.models.get(model_id)
        if record is None:
            raise HTTPException(status_code=404, detail=f"unknown model {model_id!r}")
        return record

    def get_session(self, session_id: str) -> SessionRecord:
        session = self.sessions.get(session_id)
        if session is None:
            raise HTTPException(status_code=404, detail=f"unknown session {session_id!r}")
        return session

    def command_session(self, session_id: str) -> SessionRecord:
        session = self.get_session(session_id)
        if session.status == "ended":
            raise HTTPException(status_code=409, detail=f"session {session_id!r} has ended")
        return session

    def create_session(self, model_id: str, seed: int) -> SessionRecord:
        record = self.get_model(model_id)
        session = SessionRecord(uuid.uuid4().hex, model_id, SimState(record.model, seed=seed))
        session.last_used = self.clock()
        with self._store_lock:
            self.sessions[session.id] = session
        return session

    def fork_session(self, parent: SessionRecord) -> SessionRecord:
        # Copy-on-fork through the full state serializer: nothing is shared.
        sim_copy = load_state(save_state(parent.sim))
        child = SessionRecord(uuid.uuid4().hex, parent.model_id, sim_copy, lineage=parent.id)
        child.journal = list(parent.journal)
        child.collector = TraceCollector(sim_copy.model)
        child.collector.ever_nonzero = set(parent.collector.ever_nonzero)
        child.collector.rows = list(parent.collector.rows)
        child.last_used = self.clock()
        with self._store_lock:
            self.sessions[child.id] = child
        return child

    def step_session(self, session: SessionRecord, ticks: int) -> list[dict]:
        summaries = []
        with session.lock:
            session.status = "running"
            session.last_used = self.clock()
            try:
                for _ in range(ticks):
                    report = step(session.sim)
                    for ev in report.events:
                        session.journal.append(_event_json(ev))
                    for f in report.firings:
                        session.journal.append(
                            {"type": "firing", "tick": report.tick, "agent": f.agent,
                             "fired": f.fired, "count": f.count, "skip_reason": f.skip_reason}
                        )
                    for em in report.emissions:
                        session.journal.append(
                            {"type": "emission", "tick": report.tick, "agent": em.agent,
                             "ligand": em.ligand, "amount": em.amount}
                        )
                    session.journal.append(
                        {"type": "tick", "tick": report.tick,
                         "stimuli_active": [list(s) for s in report.stimuli_active]}
                    )
                    rows = session.collector.collect(session.sim.board, report.tick)
                    self._persist_rows(session, rows)
                    summaries.append(_report_summary(report))
            finally:
                session.status = "idle"
        return summaries

    def gc(self, now: float | None = None) -> int:
        """Drop ended and idle-expired sessions; never reclaim running ones."""
        now = self.clock() if now is None else now
        policy = self.gc_policy
        reclaimed = 0
        with self._store_lock:
            for sid in list(self.sessions):
                session = self.sessions[sid]
                if session.status == "running":
                    continue
                expired = now - session.last_used > policy.max_idle_seconds
                if session.status == "ended" or expired:
                    del self.sessions[sid]
                    reclaimed += 1
            if len(self.sessions) > policy.max_sessions:
                idle = sorted(
                    (s for s in self.sessions.values() if s.status != "running"),
                    key=lambda s: s.last_used,
                )
                while len(self.sessions) > policy.max_sessions and idle:
                    victim = idle.pop(0)
                    del self.sessions[victim.id]
                    reclaimed += 1
        return reclaimed


def _lesion_from_request(body: LesionRequest) -> Lesion:
    kind = {"block": "receptor_block"}.get(body.kind, body.kind)
    locus = Locus(body.level, body.region) if body.level else None
    ident = body.id or f"{body.kind}-{uuid.uuid4().hex[:8]}"
    return Lesion(
        id=ident, kind=kind, at_tick=body.at_tick, until_tick=body.until_tick,
        agent=body.agent, species=body.species, locus=locus,
        factor=body.factor, value=body.value,
    )


def create_app(
    model_dir: str | Path | None = None,
    gc_policy: GCPolicy | None = None,
    trace_dir: str | Path | None = None,
) -> FastAPI:
    app = FastAPI(title="cellulat lab service", version="0.1.0")
    lab = LabService(gc_policy=gc_policy, trace_dir=trace_dir)
    app.state.lab = lab
    if model_dir:
        lab.load_model_dir(model_dir)

    @app.post("/models")
    async def create_model(request: Request):
        text = (await request.body()).decode("utf-8")
        record, diags = lab.add_model(text)
        payload = [
            {"severity": d.severity, "code": d.code, "message": d.message, "line": d.line, "col": d.col}
            for d in diags
        ]
        if record is None:
            raise HTTPException(status_code=422, detail={"diagnostics": payload})
        return {"model_id": record.id, "diagnostics": payload}

    @app.get("/models/{model_id}")
    def get_model(model_id: str):
        record = lab.get_model(model_id)
        model = record.model
        occupancy = occupancy_json(model)
        columns = columns_json(model)
        return {
            "model_id": record.id,
            "name": model.name,
            "metadata": model.metadata,
            "levels": [{"name": l.name, "rank": l.rank, "kind": l.kind} for l in model.levels],
            "species": [{"name": s.name, "kind": s.kind, "decay": s.decay} for s in model.species],
            "ligands": list(model.ligands),
            "agents": [
                {
                    "id": a.id, "kind": a.kind, "priority": a.priority,
                    "multiplicity": a.multiplicity, "probability": a.firing_probability,
                    "region": a.region_tag,
                }
                for a in model.agents
            ],
            "stimuli": [
                {"ligand": s.ligand, "amount": s.amount, "from_tick": s.from_tick, "to_tick": s.to_tick}
                for s in model.stimuli
            ],
            "occupancy": occupancy,
            "columns": columns,
        }

    @app.post("/sessions")
    def create_session(body: SessionCreate):
        session = lab.create_session(body.model_id, body.seed)
        return {"session_id": session.id}

    @app.post("/sessions/{session_id}/step")
    def step_session(session_id: str, body: StepRequest):
        session = lab.command_session(session_id)
        return lab.step_session(session, body.ticks)

    @app.post("/sessions/{session_id}/stimuli")
    def add_stimulus(session_id: str, body: StimulusRequest):
        session = lab.command_session(session_id)
        with session.lock:
            sim = session.sim
            if body.ligand not in sim.index.ligands:
                raise HTTPException(status_code=422, detail=f"unknown ligand {body.ligand!r}")
            if body.from_tick < sim.tick:
                raise HTTPException(
                    status_code=422,
                    detail=f"stimulus starts at {body.from_tick} but session is at tick {sim.tick}",
                )
            if body.to_tick < body.from_tick:
                raise HTTPException(status_code=422, detail="empty stimulus window")
            sim.extra_stimuli.append(
                StimulusEntry(body.ligand, body.amount, body.from_tick, body.to_tick)
            )
            session.last_used = lab.clock()
        return {"ok": True}

    @app.post("/sessions/{session_id}/lesions")
    def add_lesion(session_id: str, body: LesionRequest):
        session = lab.command_session(session_id)
        with session.lock:
            lesion = _lesion_from_request(body)
            try:
                apply_lesion(session.sim, lesion)
            except LesionError as exc:
                raise HTTPException(status_code=422, detail=str(exc)) from None
            session.last_used = lab.clock()
        return {"ok": True, "lesion_id": lesion.id}

    @app.post("/sessions/{session_id}/fork")
    def fork(session_id: str):
        session = lab.command_session(session_id)
        with session.lock:
            child = lab.fork_session(session)
        return {"session_id": child.id}

    @app.post("/sessions/{session_id}/end")
    def end_session(session_id: str):
        session = lab.get_session(session_id)
        with session.lock:
            session.status = "ended"
        return {"status": "ended"}

    @app.get("/sessions/{session_id}/state")
    def get_state(session_id: str):
        session = lab.get_session(session_id)
        with session.lock:
            sim = session.sim
            signals = [
                {"species": sp, "level": loc.level, "region": loc.region, "quantity": q}
                for sp, loc, q in sim.board.nonzero_items()
            ]
            lesions = [
                {
                    "id": l.id, "kind": l.kind, "at_tick": l.at_tick, "until_tick": l.until_tick,
                    "agent": l.agent, "species": l.species,
                    "level": l.locus.level if l.locus else None,
                    "region": l.locus.region if l.locus else None,
                    "factor": l.factor, "value": l.value,
                    "in_force": l.in_force(sim.tick),
                }
                for l in sim.lesions
            ]
            stimuli = [
                {"ligand": s.ligand, "amount": s.amount, "from_tick": s.from_tick, "to_tick": s.to_tick}
                for s in sim.extra_stimuli
            ]
            return {
                "session_id": session.id,
                "model_id": session.model_id,
                "tick": sim.tick,
                "status": session.status,
                "seed": sim.seed,
                "lineage": session.lineage,
                "event_count": sim.board.event_count,
                "signals": signals,
                "lesions": lesions,
                "extra_stimuli": stimuli,
            }

    @app.get("/sessions/{session_id}/trace")
    def get_trace(session_id: str, from_tick: int = Query(default=0, alias="from")):
        session = lab.get_session(session_id)
        with session.lock:
            rows = [row_to_json(r) for r in session.collector.rows if r.tick >= from_tick]
        return {"rows": rows}

    @app.get("/sessions/{session_id}/events")
    def events(session_id: str, cursor: int = 0, follow: bool = True):
        session = lab.get_session(session_id)

        def stream():
            pos = cursor
            while True:
                journal = session.journal
                while pos < len(journal):
                    yield f"data: {json.dumps(journal[pos])}\n\n"
                    pos += 1
                if session.status == "ended":
                    yield f'data: {{"type": "stream_end", "reason": "session_ended"}}\n\n'
                    return
                if not follow:
                    yield f'data: {{"type": "stream_end", "reason": "drained"}}\n\n'
                    return
                time.sleep(0.02)

        return StreamingResponse(stream(), media_type="text/event-stream")

    @app.post("/gc")
    def run_gc():
        return {"reclaimed": lab.gc()}

    return app


def main() -> None:
    import uvicorn

    addr = os.environ.get("CELLULAT_ADDR", "127.0.0.1:8077")
    host, _, port = addr.rpartition(":")
    app = create_app(
        model_dir=os.environ.get("CELLULAT_MODEL_DIR"),
        trace_dir=os.environ.get("CELLULAT_TRACE_DIR"),
    )
    uvicorn.run(app, host=host or "127.0.0.1", port=int(port))


if __name__ == "__main__":
    main()
