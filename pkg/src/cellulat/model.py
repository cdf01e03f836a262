"""Domain types for pathway models.

A model declares blackboard levels, signal species, external ligands,
initial quantities, a stimulus schedule and a set of agents.  Everything
here is a plain dataclass; parsing, validation and pretty-printing live in
:mod:`cellulat.dsl`, runtime state in :mod:`cellulat.blackboard` and
:mod:`cellulat.scheduler`.

Source line numbers are carried on declarations for diagnostics but are
excluded from equality, so structural comparison (e.g. in round-trip
tests) ignores them.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

LEVEL_KINDS = ("membrane", "cytosol", "nucleus", "organelle", "custom")
SPECIES_KINDS = ("messenger", "flag")
COMPARATORS = (">=", "<=", ">", "<", "=")

GLOBAL_REGION = "global"


@dataclass(frozen=True)
class Level:
    """One blackboard stratum standing for a cellular structure."""

    name: str
    rank: int
    kind: str = "custom"
    line: int = field(default=0, compare=False, repr=False)


@dataclass(frozen=True)
class Locus:
    """A (level, region) address on the blackboard.

    Regions are free symbolic tags; every level implicitly has the
    region ``"global"``.
    """

    level: str
    region: str = GLOBAL_REGION


@dataclass(frozen=True)
class SignalSpecies:
    """A signal kind: graded messenger or binary activation flag.

    ``decay`` is the per-tick exponential loss fraction for messengers;
    flags never decay.
    """

    name: str
    kind: str = "messenger"
    decay: float = 0.0
    line: int = field(default=0, compare=False, repr=False)

    @property
    def is_flag(self) -> bool:
        return self.kind == "flag"


@dataclass(frozen=True)
class Initializer:
    species: str
    locus: Locus
    quantity: float
    line: int = field(default=0, compare=False, repr=False)


@dataclass(frozen=True)
class StimulusEntry:
    """Ligand presence in the external medium over an inclusive tick window."""

    ligand: str
    amount: float
    from_tick: int
    to_tick: int
    line: int = field(default=0, compare=False, repr=False)


# --- condition expressions -------------------------------------------------

@dataclass(frozen=True)
class SignalAtom:
    """Threshold comparison against a blackboard quantity."""

    species: str
    locus: Locus
    comparator: str
    threshold: float
    line: int = field(default=0, compare=False, repr=False)


@dataclass(frozen=True)
class LigandAtom:
    """Threshold comparison against a ligand in the external medium.

    Only interface agents may carry ligand atoms.
    """

    ligand: str
    comparator: str
    threshold: float
    line: int = field(default=0, compare=False, repr=False)


@dataclass(frozen=True)
class Not:
    child: "ConditionExpr"


@dataclass(frozen=True)
class And:
    children: tuple["ConditionExpr", ...]


@dataclass(frozen=True)
class Or:
    children: tuple["ConditionExpr", ...]


ConditionExpr = Union[SignalAtom, LigandAtom, Not, And, Or]


# --- boolean-network condition backend --------------------------------------

@dataclass(frozen=True)
class BoolNode:
    """A network node; input nodes bind an atom, internal nodes carry rules."""

    name: str
    atom: Union[SignalAtom, LigandAtom, None] = None
    line: int = field(default=0, compare=False, repr=False)

    @property
    def is_input(self) -> bool:
        return self.atom is not None


@dataclass(frozen=True)
class BoolRule:
    """Truth table for one internal node.

    ``table`` has ``2**len(inputs)`` entries; row index is built MSB-first
    from the listed inputs, i.e. index = sum(state[inputs[i]] << (k-1-i)).
    """

    node: str
    inputs: tuple[str, ...]
    table: tuple[int, ...]
    line: int = field(default=0, compare=False, repr=False)


@dataclass(frozen=True)
class BooleanNetBackend:
    """Synchronous boolean network used as an agent's condition.

    Input nodes are clamped to their binarized atoms; internal nodes start
    at 0 and update synchronously for exactly ``sync_steps`` rounds, after
    which ``output_node`` is read.
    """

    nodes: tuple[BoolNode, ...]
    rules: tuple[BoolRule, ...]
    output_node: str
    sync_steps: int = 1
    line: int = field(default=0, compare=False, repr=False)


# --- effects -----------------------------------------------------------------

@dataclass(frozen=True)
class Effect:
    """One blackboard mutation in an agent's action part.

    kind is "produce" (add), "consume" (remove) or "set" (flag assignment).
    """

    kind: str
    species: str
    locus: Locus
    amount: float
    line: int = field(default=0, compare=False, repr=False)


@dataclass(frozen=True)
class EmitEffect:
    """Secretion of a ligand into the external medium (interface agents only)."""

    ligand: str
    amount: float
    line: int = field(default=0, compare=False, repr=False)


AnyEffect = Union[Effect, EmitEffect]


@dataclass(frozen=True)
class AgentDef:
    """An autonomous agent: condition part plus ordered action part.

    Internal agents transduce blackboard signals; interface agents bridge
    the external medium (they alone may sense ligands and emit).
    ``multiplicity`` caps how many times the agent may fire per tick,
    re-checking its condition before each attempt.
    """

    id: str
    kind: str  # "internal" | "interface"
    condition: Union[ConditionExpr, BooleanNetBackend]
    effects: tuple[AnyEffect, ...]
    multiplicity: int = 1
    priority: int = 0
    firing_probability: float = 1.0
    region_tag: Union[str, None] = None
    line: int = field(default=0, compare=False, repr=False)

    @property
    def is_interface(self) -> bool:
        return self.kind == "interface"


# --- lesions -----------------------------------------------------------------

LESION_KINDS = ("knockout", "attenuate", "clamp", "receptor_block")


@dataclass(frozen=True)
class Lesion:
    """A timed perturbation, in force for ticks at_tick..until_tick inclusive.

    knockout/attenuate/receptor_block target an agent; clamp pins a
    (species, locus) to ``value`` at the end of every in-force tick.
    """

    id: str
    kind: str
    at_tick: int
    until_tick: Union[int, None] = None
    agent: Union[str, None] = None
    species: Union[str, None] = None
    locus: Union[Locus, None] = None
    factor: Union[float, None] = None
    value: Union[float, None] = None

    def in_force(self, tick: int) -> bool:
        if tick < self.at_tick:
            return False
        return self.until_tick is None or tick <= self.until_tick


# --- the model ---------------------------------------------------------------

@dataclass
class ModelDef:
    """A complete pathway model in canonical declaration order.

    Construction normalizes ordering (levels by rank, the rest sorted by
    name/identity) so two models with the same content compare equal no
    matter how their declarations were ordered.
    """

    name: str
    levels: list[Level] = field(default_factory=list)
    species: list[SignalSpecies] = field(default_factory=list)
    ligands: list[str] = field(default_factory=list)
    initializers: list[Initializer] = field(default_factory=list)
    agents: list[AgentDef] = field(default_factory=list)
    stimuli: list[StimulusEntry] = field(default_factory=list)
    metadata: dict[str, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.levels.sort(key=lambda l: (l.rank, l.name))
        self.species.sort(key=lambda s: s.name)
        self.ligands.sort()
        self.initializers.sort(key=lambda i: (i.species, i.locus.level, i.locus.region))
        self.agents.sort(key=lambda a: a.id)
        self.stimuli.sort(key=lambda s: (s.from_tick, s.ligand, s.to_tick, s.amount))

    def level_names(self) -> set[str]:
        return {l.name for l in self.levels}

    def species_map(self) -> dict[str, SignalSpecies]:
        return {s.name: s for s in self.species}

    def agent_map(self) -> dict[str, AgentDef]:
        return {a.id: a for a in self.agents}


class ModelIndex:
    """Precomputed lookup tables over a validated model (hot-path helper)."""

    def __init__(self, model: ModelDef):
        self.model = model
        self.levels = {l.name: l for l in model.levels}
        self.species = {s.name: s for s in model.species}
        self.agents = {a.id: a for a in model.agents}
        self.ligands = set(model.ligands)
