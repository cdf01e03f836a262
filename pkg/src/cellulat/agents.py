"""Condition evaluation and firing semantics for autonomous agents.

Conditions are pure predicates over (blackboard quantities, current-tick
stimuli).  Firing is opportunistic and atomic: all consume effects are
pre-checked together, then consumes apply before produces and flag sets,
each group in declaration order.  An unsatisfiable consume or a failed
probability draw yields a not-fired outcome instead of an error.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from .blackboard import BlackboardState, WriteEvent
from .model import (
    AgentDef,
    And,
    BooleanNetBackend,
    Effect,
    EmitEffect,
    LigandAtom,
    Locus,
    Not,
    Or,
    SignalAtom,
)

StimulusView = Mapping[str, float]

_CMP = {
    ">=": lambda a, b: a >= b,
    "<=": lambda a, b: a <= b,
    ">": lambda a, b: a > b,
    "<": lambda a, b: a < b,
    "=": lambda a, b: a == b,
}


@dataclass(frozen=True)
class SensedInputs:
    """What an agent subscribes to: blackboard pairs and ligand names."""

    signals: frozenset[tuple[str, Locus]]
    ligands: frozenset[str]


@dataclass(frozen=True)
class ExternalEmission:
    ligand: str
    amount: float


@dataclass(frozen=True)
class FiringOutcome:
    fired: bool
    events: tuple[WriteEvent, ...] = ()
    emissions: tuple[ExternalEmission, ...] = ()
    skip_reason: str | None = None


def _atom_value(atom, board: BlackboardState, stimuli: StimulusView) -> float:
    if isinstance(atom, SignalAtom):
        return board.read(atom.species, atom.locus)
    return stimuli.get(atom.ligand, 0.0)


def _atom_true(atom, board, stimuli) -> bool:
    return _CMP[atom.comparator](_atom_value(atom, board, stimuli), atom.threshold)


def _eval_expr(expr, board, stimuli) -> bool:
    if isinstance(expr, (SignalAtom, LigandAtom)):
        return _atom_true(expr, board, stimuli)
    if isinstance(expr, Not):
        return not _eval_expr(expr.child, board, stimuli)
    if isinstance(expr, And):
        return all(_eval_expr(c, board, stimuli) for c in expr.children)
    if isinstance(expr, Or):
        return any(_eval_expr(c, board, stimuli) for c in expr.children)
    raise TypeError(f"not a condition expression: {expr!r}")


def _eval_boolnet(net: BooleanNetBackend, board, stimuli) -> bool:
    # Input nodes clamp to their binarized atoms; internal nodes start at 0.
    state: dict[str, int] = {}
    for node in net.nodes:
        state[node.name] = int(_atom_true(node.atom, board, stimuli)) if node.is_input else 0
    for _ in range(net.sync_steps):
        updated = dict(state)
        for rule in net.rules:
            idx = 0
            for name in rule.inputs:
                idx = (idx << 1) | state[name]
            updated[rule.node] = rule.table[idx]
        state = updated
    return bool(state[net.output_node])


def evaluate_condition(agent: AgentDef, board: BlackboardState, stimuli: StimulusView) -> bool:
    """Pure: true iff the agent's condition holds under current state."""
    cond = agent.condition
    if isinstance(cond, BooleanNetBackend):
        return _eval_boolnet(cond, board, stimuli)
    return _eval_expr(cond, board, stimuli)


def _collect_atoms(expr, out: list) -> None:
    if isinstance(expr, (SignalAtom, LigandAtom)):
        out.append(expr)
    elif isinstance(expr, Not):
        _collect_atoms(expr.child, out)
    elif isinstance(expr, (And, Or)):
        for c in expr.children:
            _collect_atoms(c, out)


def condition_atoms(agent: AgentDef) -> list:
    """All atoms referenced by the condition (boolnet: its input atoms)."""
    atoms: list = []
    if isinstance(agent.condition, BooleanNetBackend):
        for node in agent.condition.nodes:
            if node.atom is not None:
                atoms.append(node.atom)
    else:
        _collect_atoms(agent.condition, atoms)
    return atoms


def sensed_inputs(agent: AgentDef) -> SensedInputs:
    """Subscription index entry: sensed (species, locus) pairs and ligands."""
    signals = set()
    ligands = set()
    for atom in condition_atoms(agent):
        if isinstance(atom, SignalAtom):
            signals.add((atom.species, atom.locus))
        else:
            ligands.add(atom.ligand)
    return SensedInputs(frozenset(signals), frozenset(ligands))


def fire(agent: AgentDef, board: BlackboardState, rng, *, attenuation: float = 1.0) -> FiringOutcome:
    """One firing attempt; the caller has already checked the condition.

    Draw order is fixed: probability first (only when < 1.0, keeping
    certain agents stream-neutral), then the joint consume pre-check.
    """
    if agent.firing_probability < 1.0 and rng.random() >= agent.firing_probability:
        return FiringOutcome(False, skip_reason="probability_draw")

    needed: dict[tuple[str, Locus], float] = {}
    for eff in agent.effects:
        if isinstance(eff, Effect) and eff.kind == "consume":
            key = (eff.species, eff.locus)
            needed[key] = needed.get(key, 0.0) + eff.amount * attenuation
    for (sp, loc), amt in needed.items():
        if board.read(sp, loc) < amt:
            return FiringOutcome(False, skip_reason="consume_unsatisfiable")

    events: list[WriteEvent] = []
    emissions: list[ExternalEmission] = []
    for eff in agent.effects:
        if isinstance(eff, Effect) and eff.kind == "consume":
            events.append(board.apply(agent.id, eff.species, eff.locus, "remove", eff.amount * attenuation))
    for eff in agent.effects:
        if isinstance(eff, EmitEffect):
            emissions.append(ExternalEmission(eff.ligand, eff.amount))
        elif eff.kind == "produce":
            events.append(board.apply(agent.id, eff.species, eff.locus, "add", eff.amount * attenuation))
        elif eff.kind == "set":
            events.append(board.apply(agent.id, eff.species, eff.locus, "set", eff.amount))
    return FiringOutcome(True, tuple(events), tuple(emissions))


def fire_multiple(
    agent: AgentDef,
    board: BlackboardState,
    rng,
    stimuli: StimulusView,
    *,
    attenuation: float = 1.0,
) -> list[FiringOutcome]:
    """Up to ``multiplicity`` sequential attempts, re-checking before each.

    Stops at the first condition failure or unsatisfiable consume (neither
    can recover within the tick); a failed probability draw only skips
    that attempt.
    """
    outcomes: list[FiringOutcome] = []
    for _ in range(agent.multiplicity):
        if not evaluate_condition(agent, board, stimuli):
            break
        outcome = fire(agent, board, rng, attenuation=attenuation)
        outcomes.append(outcome)
        if not outcome.fired and outcome.skip_reason == "consume_unsatisfiable":
            break
    return outcomes


def emit_external(agent: AgentDef, board: BlackboardState, stimuli: StimulusView | None = None) -> list[ExternalEmission]:
    """Emissions the agent would make right now (condition gated), no mutation."""
    view: StimulusView = stimuli or {}
    if not evaluate_condition(agent, board, view):
        return []
    return [ExternalEmission(e.ligand, e.amount) for e in agent.effects if isinstance(e, EmitEffect)]
