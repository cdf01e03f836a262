"""Control mechanism: per-tick agendas, ordered opportunistic firing, time.

One tick = (1) resolve active stimuli, (2) build the agenda from the
previous tick's write events, refires and polled interface agents,
(3) fire agenda entries in (priority desc, id asc) order against the live
board — agents see earlier same-tick writes when re-checked, but same-tick
writes never admit NEW agenda entries — (4) decay, (5) clamp lesions,
(6) advance the tick counter.

Everything is deterministic given (model, stimuli, lesions, seed): the
single RNG is consumed in agenda order, and SimState serializes completely
for snapshot/replay.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass

from .agents import fire_multiple, sensed_inputs
from .blackboard import WriteEvent, create_blackboard
from .model import Lesion, Locus, ModelDef, ModelIndex, StimulusEntry


@dataclass(frozen=True)
class AgendaEntry:
    agent: str
    reason: str  # "event_match" | "refire" | "interface_poll"


@dataclass(frozen=True)
class FiringRecord:
    agent: str
    fired: bool
    count: int = 0
    skip_reason: str | None = None


@dataclass(frozen=True)
class EmissionRecord:
    agent: str
    ligand: str
    amount: float


@dataclass(frozen=True)
class TickReport:
    """Complete record of one executed tick."""

    tick: int
    stimuli_active: tuple[tuple[str, float], ...]
    agenda: tuple[AgendaEntry, ...]
    firings: tuple[FiringRecord, ...]
    events: tuple[WriteEvent, ...]
    emissions: tuple[EmissionRecord, ...]


class SeededRng:
    """Deterministic uniform stream with JSON-serializable state."""

    def __init__(self, seed: int):
        self.seed = seed
        self._r = random.Random(seed)

    def random(self) -> float:
        return self._r.random()

    def state_json(self) -> list:
        version, internal, gauss = self._r.getstate()
        return [version, list(internal), gauss]

    def set_state_json(self, state: list) -> None:
        version, internal, gauss = state
        self._r.setstate((version, tuple(internal), gauss))


class SimState:
    """One simulation run: board, clock, RNG, schedule, lesions, logs."""

    def __init__(
        self,
        model: ModelDef,
        seed: int = 0,
        extra_stimuli: list[StimulusEntry] | None = None,
        lesions: list[Lesion] | None = None,
    ):
        self.model = model
        self.index = ModelIndex(model)
        self.board = create_blackboard(model, self.index)
        self.rng = SeededRng(seed)
        self.seed = seed
        self.tick = 0
        self.prev_events: tuple[WriteEvent, ...] = ()
        self.prev_fired: frozenset[str] = frozenset()
        self.extra_stimuli: list[StimulusEntry] = list(extra_stimuli or [])
        self.lesions: list[Lesion] = list(lesions or [])
        self.emission_log: list[tuple[int, EmissionRecord]] = []
        # Event-subscription index: sensed (species, locus) -> agent ids.
        self.sense_index: dict[tuple[str, Locus], list[str]] = {}
        self.ligand_sensors: dict[str, list[str]] = {}
        for agent in model.agents:
            sensed = sensed_inputs(agent)
            for pair in sensed.signals:
                self.sense_index.setdefault(pair, []).append(agent.id)
            if agent.is_interface:
                for lig in sensed.ligands:
                    self.ligand_sensors.setdefault(lig, []).append(agent.id)

    # -- stimuli ----------------------------------------------------------

    def stimuli_at(self, tick: int) -> dict[str, float]:
        """Ligand -> summed amount over schedule entries covering the tick."""
        active: dict[str, float] = {}
        for entry in list(self.model.stimuli) + self.extra_stimuli:
            if entry.from_tick <= tick <= entry.to_tick:
                active[entry.ligand] = active.get(entry.ligand, 0.0) + entry.amount
        return {k: v for k, v in active.items() if v > 0.0}

    def lesions_in_force(self, tick: int) -> list[Lesion]:
        return [l for l in self.lesions if l.in_force(tick)]


def build_agenda(
    model: ModelDef,
    prev_events,
    prev_fired,
    stimuli_active: dict[str, float],
    *,
    sense_index: dict[tuple[str, Locus], list[str]] | None = None,
    ligand_sensors: dict[str, list[str]] | None = None,
    excluded: frozenset[str] = frozenset(),
) -> list[AgendaEntry]:
    """Admission rules: event match, refire, interface poll (that precedence).

    With ``sense_index`` the event matches come from the subscription
    index; without it they are re-derived by scanning every agent against
    the full previous-tick event list (the naive reference path).
    """
    event_matched: set[str] = set()
    if sense_index is not None:
        for ev in prev_events:
            event_matched.update(sense_index.get((ev.species, ev.locus), ()))
    else:
        for agent in model.agents:
            sensed = sensed_inputs(agent)
            for ev in prev_events:
                if (ev.species, ev.locus) in sensed.signals:
                    event_matched.add(agent.id)
                    break

    polled: set[str] = set()
    if ligand_sensors is not None:
        for lig, amount in stimuli_active.items():
            if amount > 0.0:
                polled.update(ligand_sensors.get(lig, ()))
    else:
        for agent in model.agents:
            if not agent.is_interface:
                continue
            sensed = sensed_inputs(agent)
            if any(stimuli_active.get(lig, 0.0) > 0.0 for lig in sensed.ligands):
                polled.add(agent.id)

    entries = []
    for agent in model.agents:
        if agent.id in excluded:
            continue
        if agent.id in event_matched:
            entries.append(AgendaEntry(agent.id, "event_match"))
        elif agent.id in prev_fired:
            entries.append(AgendaEntry(agent.id, "refire"))
        elif agent.id in polled:
            entries.append(AgendaEntry(agent.id, "interface_poll"))
    agents = model.agent_map()
    entries.sort(key=lambda e: (-agents[e.agent].priority, e.agent))
    return entries


def _execute_tick(sim: SimState, use_index: bool) -> TickReport:
    tick = sim.tick
    lesions = sim.lesions_in_force(tick)
    knocked = frozenset(l.agent for l in lesions if l.kind == "knockout")
    blocked = {l.agent for l in lesions if l.kind == "receptor_block"}
    attenuation: dict[str, float] = {}
    for l in lesions:
        if l.kind == "attenuate":
            attenuation[l.agent] = attenuation.get(l.agent, 1.0) * l.factor

    stimuli = sim.stimuli_at(tick)
    agenda = build_agenda(
        sim.model,
        sim.prev_events,
        sim.prev_fired,
        stimuli,
        sense_index=sim.sense_index if use_index else None,
        ligand_sensors=sim.ligand_sensors if use_index else None,
        excluded=knocked,
    )

    firings: list[FiringRecord] = []
    emissions: list[EmissionRecord] = []
    for entry in agenda:
        agent = sim.index.agents[entry.agent]
        # A blocked receptor reads every ligand as absent.
        view = {} if agent.id in blocked else stimuli
        outcomes = fire_multiple(
            agent, sim.board, sim.rng, view, attenuation=attenuation.get(agent.id, 1.0)
        )
        fired_count = sum(1 for o in outcomes if o.fired)
        if fired_count:
            skip = None
        elif outcomes:
            skip = outcomes[0].skip_reason
        else:
            skip = "condition_false"
        firings.append(FiringRecord(agent.id, fired_count > 0, fired_count, skip))
        for o in outcomes:
            for em in o.emissions:
                emissions.append(EmissionRecord(agent.id, em.ligand, em.amount))

    sim.board.apply_decay()
    for l in lesions:
        if l.kind == "clamp":
            sim.board.apply("lesion", l.species, l.locus, "set", l.value)

    events = sim.board.finish_tick()
    report = TickReport(
        tick=tick,
        stimuli_active=tuple(sorted(stimuli.items())),
        agenda=tuple(agenda),
        firings=tuple(firings),
        events=events,
        emissions=tuple(emissions),
    )
    sim.prev_events = events
    sim.prev_fired = frozenset(f.agent for f in firings if f.fired)
    sim.tick += 1
    for em in emissions:
        sim.emission_log.append((tick, em))
    return report


def step(sim: SimState) -> TickReport:
    """Execute one tick using the event-subscription index."""
    return _execute_tick(sim, use_index=True)


def reference_step(sim: SimState) -> TickReport:
    """Naive twin of :func:`step`: full agent scan instead of the index."""
    return _execute_tick(sim, use_index=False)


def run(sim: SimState, n_ticks: int) -> list[TickReport]:
    if n_ticks < 0:
        raise ValueError("n_ticks must be >= 0")
    return [step(sim) for _ in range(n_ticks)]


# -- serialization ------------------------------------------------------------

def _locus_to_json(locus: Locus) -> list:
    return [locus.level, locus.region]


def _event_to_json(ev: WriteEvent) -> dict:
    return {
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


def _event_from_json(d: dict) -> WriteEvent:
    return WriteEvent(
        d["tick"], d["actor"], d["species"], Locus(d["level"], d["region"]),
        d["kind"], d["amount"], d["resulting"], d["seq"],
    )


def _lesion_to_json(l: Lesion) -> dict:
    return {
        "id": l.id,
        "kind": l.kind,
        "at_tick": l.at_tick,
        "until_tick": l.until_tick,
        "agent": l.agent,
        "species": l.species,
        "locus": _locus_to_json(l.locus) if l.locus else None,
        "factor": l.factor,
        "value": l.value,
    }


def _lesion_from_json(d: dict) -> Lesion:
    return Lesion(
        id=d["id"],
        kind=d["kind"],
        at_tick=d["at_tick"],
        until_tick=d["until_tick"],
        agent=d["agent"],
        species=d["species"],
        locus=Locus(*d["locus"]) if d["locus"] else None,
        factor=d["factor"],
        value=d["value"],
    )


def _stimulus_to_json(s: StimulusEntry) -> dict:
    return {"ligand": s.ligand, "amount": s.amount, "from_tick": s.from_tick, "to_tick": s.to_tick}


def save_state(sim: SimState) -> str:
    """Serialize the full simulation state at a tick boundary."""
    from .dsl import pretty_print

    if sim.board.current_events:
        raise ValueError("can only save at a tick boundary")
    doc = {
        "version": 1,
        "model_text": pretty_print(sim.model),
        "seed": sim.seed,
        "tick": sim.tick,
        "rng_state": sim.rng.state_json(),
        "quantities": [
            [sp, loc.level, loc.region, q] for (sp, loc), q in sorted(
                sim.board.quantities().items(), key=lambda kv: (kv[0][0], kv[0][1].level, kv[0][1].region)
            )
        ],
        "history": [_event_to_json(ev) for ev in sim.board.history],
        "prev_events": [_event_to_json(ev) for ev in sim.prev_events],
        "prev_fired": sorted(sim.prev_fired),
        "extra_stimuli": [_stimulus_to_json(s) for s in sim.extra_stimuli],
        "lesions": [_lesion_to_json(l) for l in sim.lesions],
        "emission_log": [
            [t, em.agent, em.ligand, em.amount] for t, em in sim.emission_log
        ],
    }
    return json.dumps(doc)


def load_state(text: str) -> SimState:
    """Rebuild a simulation saved by :func:`save_state`."""
    from .dsl import load_model

    doc = json.loads(text)
    model = load_model(doc["model_text"])
    sim = SimState(model, seed=doc["seed"])
    sim.extra_stimuli = [
        StimulusEntry(s["ligand"], s["amount"], s["from_tick"], s["to_tick"])
        for s in doc["extra_stimuli"]
    ]
    sim.lesions = [_lesion_from_json(d) for d in doc["lesions"]]
    sim.tick = doc["tick"]
    sim.rng.set_state_json(doc["rng_state"])
    sim.board.tick = doc["tick"]
    sim.board._q = {
        (sp, Locus(level, region)): q for sp, level, region, q in doc["quantities"]
    }
    sim.board.history = [_event_from_json(d) for d in doc["history"]]
    sim.prev_events = tuple(_event_from_json(d) for d in doc["prev_events"])
    sim.prev_fired = frozenset(doc["prev_fired"])
    sim.emission_log = [
        (t, EmissionRecord(agent, ligand, amount))
        for t, agent, ligand, amount in doc["emission_log"]
    ]
    return sim
