"""The blackboard: shared quantities per (species, locus) plus the write log.

Quantities are abstract non-negative reals.  Flags are binary-valued
species living in the same store so one event log covers both signal
kinds.  Every mutation appends a WriteEvent; replaying the log from the
initial state reproduces the current quantities bit-for-bit (decay writes
are therefore recorded as absolute ``set`` values, not deltas).
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import (
    DuplicateInitializer,
    FlagDomain,
    InsufficientQuantity,
    NegativeQuantity,
    UnknownLevel,
    UnknownSpecies,
)
from .model import Locus, ModelDef, ModelIndex

WRITE_KINDS = ("add", "remove", "set")


@dataclass(frozen=True)
class WriteEvent:
    """One applied blackboard mutation.

    ``amount`` is the delta for add/remove and the assigned value for set;
    ``resulting`` is the quantity immediately after application.  ``seq``
    restarts at 0 each tick and increases with application order.
    """

    tick: int
    actor: str
    species: str
    locus: Locus
    kind: str
    amount: float
    resulting: float
    seq: int


@dataclass(frozen=True)
class SignalEntry:
    species: str
    locus: Locus
    quantity: float


@dataclass(frozen=True)
class BlackboardSnapshot:
    """Immutable view: tick, all nonzero entries, cumulative event count."""

    tick: int
    entries: tuple[SignalEntry, ...]
    event_count: int


class BlackboardState:
    """Mutable store owned by a single scheduler context.

    Snapshots and events are immutable values and may be shared freely.
    """

    def __init__(self, model: ModelDef, index: ModelIndex | None = None):
        self.model = model
        self.index = index or ModelIndex(model)
        self.tick = 0
        self._q: dict[tuple[str, Locus], float] = {}
        self._seq = 0
        self.current_events: list[WriteEvent] = []
        self.history: list[WriteEvent] = []

    # -- queries ---------------------------------------------------------

    def _check_names(self, species: str, locus: Locus) -> None:
        if species not in self.index.species:
            raise UnknownSpecies(species)
        if locus.level not in self.index.levels:
            raise UnknownLevel(locus.level)

    def read(self, species: str, locus: Locus) -> float:
        """Current quantity; undeclared (species, locus) pairs read 0.0."""
        self._check_names(species, locus)
        return self._q.get((species, locus), 0.0)

    def nonzero_items(self) -> list[tuple[str, Locus, float]]:
        items = [(sp, loc, q) for (sp, loc), q in self._q.items() if q != 0.0]
        items.sort(key=lambda it: (it[0], it[1].level, it[1].region))
        return items

    def quantities(self) -> dict[tuple[str, Locus], float]:
        return {k: v for k, v in self._q.items() if v != 0.0}

    @property
    def event_count(self) -> int:
        return len(self.history)

    def snapshot(self) -> BlackboardSnapshot:
        entries = tuple(
            SignalEntry(sp, loc, q) for sp, loc, q in self.nonzero_items()
        )
        return BlackboardSnapshot(self.tick, entries, self.event_count)

    # -- mutations --------------------------------------------------------

    def apply(self, actor: str, species: str, locus: Locus, kind: str, amount: float) -> WriteEvent:
        """Apply one mutation and log it; all-or-nothing on error."""
        self._check_names(species, locus)
        spec = self.index.species[species]
        if kind not in WRITE_KINDS:
            raise ValueError(f"unknown write kind {kind!r}")
        current = self._q.get((species, locus), 0.0)
        if spec.is_flag:
            if kind != "set":
                raise FlagDomain(f"{species}: flags admit only set")
            if amount not in (0.0, 1.0):
                raise FlagDomain(f"{species}: flag value must be 0 or 1, got {amount}")
            new = amount
        elif kind == "set":
            if amount < 0.0:
                raise NegativeQuantity(f"set {species} to {amount}")
            new = amount
        else:
            if amount < 0.0:
                raise NegativeQuantity(f"{kind} {species} amount {amount}")
            if kind == "add":
                new = current + amount
            else:  # remove
                if amount > current:
                    raise InsufficientQuantity(
                        f"remove {amount} of {species} at {locus.level}/{locus.region} "
                        f"but only {current} present"
                    )
                new = current - amount
        self._q[(species, locus)] = new
        event = WriteEvent(self.tick, actor, species, locus, kind, amount, new, self._seq)
        self._seq += 1
        self.current_events.append(event)
        self.history.append(event)
        return event

    def apply_decay(self) -> list[WriteEvent]:
        """End-of-tick exponential decay for messenger species with decay > 0.

        Writes the surviving quantity as an absolute set so that log
        replay is exact.
        """
        events = []
        for sp, loc, q in self.nonzero_items():
            spec = self.index.species[sp]
            if spec.is_flag or spec.decay <= 0.0 or q <= 0.0:
                continue
            events.append(self.apply("decay", sp, loc, "set", q * (1.0 - spec.decay)))
        return events

    def finish_tick(self) -> tuple[WriteEvent, ...]:
        """Close the current tick: return its events, reset seq, advance tick."""
        events = tuple(self.current_events)
        self.current_events = []
        self._seq = 0
        self.tick += 1
        return events


def create_blackboard(model: ModelDef, index: ModelIndex | None = None) -> BlackboardState:
    """Fresh board holding the model's declared initial quantities.

    Initial quantities are the time-zero state, not events.
    """
    board = BlackboardState(model, index)
    seen: set[tuple[str, Locus]] = set()
    for init in model.initializers:
        key = (init.species, init.locus)
        if key in seen:
            raise DuplicateInitializer(
                f"{init.species} at {init.locus.level}/{init.locus.region}"
            )
        seen.add(key)
        board._check_names(init.species, init.locus)
        board._q[key] = init.quantity
    return board


def initial_quantities(model: ModelDef) -> dict[tuple[str, Locus], float]:
    return {(i.species, i.locus): i.quantity for i in model.initializers}


def replay_events(model: ModelDef, events) -> dict[tuple[str, Locus], float]:
    """Re-derive quantities by folding a write log over the initial state.

    Independent of BlackboardState.apply on purpose: used to check the
    event-log soundness invariant.
    """
    q = initial_quantities(model)
    for ev in events:
        key = (ev.species, ev.locus)
        current = q.get(key, 0.0)
        if ev.kind == "add":
            q[key] = current + ev.amount
        elif ev.kind == "remove":
            q[key] = current - ev.amount
        else:
            q[key] = ev.amount
    return {k: v for k, v in q.items() if v != 0.0}
