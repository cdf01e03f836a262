"""Spatial organization analysis over the static agent/locus graph.

Horizontal: per-level occupancy summaries.  Vertical: agency columns —
groups of agents working the same region tag across two or more levels.
Columns are derived from declared sense/affect loci, not runtime traces.
"""

from __future__ import annotations

from dataclasses import dataclass

from .agents import condition_atoms
from .model import AgentDef, Effect, Locus, ModelDef, SignalAtom


@dataclass(frozen=True)
class AgencyColumn:
    region: str
    levels_spanned: frozenset[str]
    members: frozenset[str]


@dataclass(frozen=True)
class LevelOccupancy:
    sensing: frozenset[str]
    affecting: frozenset[str]
    species: frozenset[str]


@dataclass(frozen=True)
class ColumnDiffReport:
    appeared: frozenset[str]
    vanished: frozenset[str]
    membership_changes: tuple[tuple[str, frozenset[str], frozenset[str]], ...]
    merged: tuple[tuple[str, frozenset[str]], ...]
    split: tuple[tuple[str, frozenset[str]], ...]

    @property
    def is_empty(self) -> bool:
        return not (self.appeared or self.vanished or self.membership_changes or self.merged or self.split)


def touched_loci(agent: AgentDef) -> set[Locus]:
    """Every locus the agent senses or affects."""
    loci = {atom.locus for atom in condition_atoms(agent) if isinstance(atom, SignalAtom)}
    loci.update(eff.locus for eff in agent.effects if isinstance(eff, Effect))
    return loci


def detect_columns(model: ModelDef) -> frozenset[AgencyColumn]:
    """Group agents by touched region; a region spanning >= 2 levels is a column."""
    members: dict[str, set[str]] = {}
    levels: dict[str, set[str]] = {}
    for agent in model.agents:
        for locus in touched_loci(agent):
            members.setdefault(locus.region, set()).add(agent.id)
            levels.setdefault(locus.region, set()).add(locus.level)
    return frozenset(
        AgencyColumn(region, frozenset(levels[region]), frozenset(ids))
        for region, ids in members.items()
        if len(levels[region]) >= 2
    )


def column_diff(before: frozenset[AgencyColumn], after: frozenset[AgencyColumn]) -> ColumnDiffReport:
    """Structural diff keyed by region; merges/splits via member overlap."""
    before_by = {c.region: c for c in before}
    after_by = {c.region: c for c in after}

    appeared = frozenset(after_by) - frozenset(before_by)
    vanished = frozenset(before_by) - frozenset(after_by)

    membership_changes = []
    for region in sorted(set(before_by) & set(after_by)):
        b, a = before_by[region], after_by[region]
        if b.members != a.members:
            membership_changes.append((region, a.members - b.members, b.members - a.members))

    merged = []
    for region in sorted(after_by):
        sources = frozenset(
            b.region for b in before if b.members & after_by[region].members
        )
        if len(sources) >= 2:
            merged.append((region, sources))
    split = []
    for region in sorted(before_by):
        targets = frozenset(
            a.region for a in after if a.members & before_by[region].members
        )
        if len(targets) >= 2:
            split.append((region, targets))

    return ColumnDiffReport(
        appeared=appeared,
        vanished=vanished,
        membership_changes=tuple(membership_changes),
        merged=tuple(merged),
        split=tuple(split),
    )


def columns_json(model: ModelDef) -> list[dict]:
    """detect_columns output in the shared JSON report shape."""
    return [
        {"region": c.region, "levels": sorted(c.levels_spanned), "members": sorted(c.members)}
        for c in sorted(detect_columns(model), key=lambda c: c.region)
    ]


def occupancy_json(model: ModelDef) -> dict[str, dict]:
    """level_occupancy output in the shared JSON report shape."""
    return {
        name: {
            "sensing": sorted(occ.sensing),
            "affecting": sorted(occ.affecting),
            "species": sorted(occ.species),
        }
        for name, occ in level_occupancy(model).items()
    }


def level_occupancy(model: ModelDef) -> dict[str, LevelOccupancy]:
    """Per-level static summary: who senses there, who writes there, what lives there."""
    sensing: dict[str, set[str]] = {l.name: set() for l in model.levels}
    affecting: dict[str, set[str]] = {l.name: set() for l in model.levels}
    species: dict[str, set[str]] = {l.name: set() for l in model.levels}
    for init in model.initializers:
        species.setdefault(init.locus.level, set()).add(init.species)
    for agent in model.agents:
        for atom in condition_atoms(agent):
            if isinstance(atom, SignalAtom):
                sensing.setdefault(atom.locus.level, set()).add(agent.id)
        for eff in agent.effects:
            if isinstance(eff, Effect):
                affecting.setdefault(eff.locus.level, set()).add(agent.id)
                species.setdefault(eff.locus.level, set()).add(eff.species)
    return {
        name: LevelOccupancy(
            frozenset(sensing.get(name, ())),
            frozenset(affecting.get(name, ())),
            frozenset(species.get(name, ())),
        )
        for name in (l.name for l in model.levels)
    }
