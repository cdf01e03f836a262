"""The virtual-laboratory core: timed perturbations and paired-trace comparison.

Four lesion kinds cover components and sections of a pathway: knockout,
attenuate and receptor_block target an agent, clamp pins a signal locus.
run_paired executes baseline and lesioned twins from the same seed and
reports where and how much they diverge.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import LesionError, LesionSpecError
from .model import Lesion, Locus, ModelDef, StimulusEntry
from .scheduler import SimState, TickReport, step

# Spec strings: knockout:AGENT@T[..T2] | attenuate:AGENT:FACTOR@T[..T2]
#               clamp:SPECIES:LEVEL[/REGION]:VALUE@T[..T2] | block:AGENT@T[..T2]
_SPEC_RE = re.compile(r"^(?P<kind>knockout|attenuate|clamp|block):(?P<body>[^@]*)@(?P<at>\d+)(?:\.\.(?P<until>\d+))?$")


def parse_lesion_spec(text: str, lesion_id: str | None = None) -> Lesion:
    """Parse the compact spec grammar used by the CLI; raises LesionSpecError."""
    m = _SPEC_RE.match(text.strip())
    if not m:
        raise LesionSpecError(f"bad lesion spec {text!r}")
    kind = m.group("kind")
    body = m.group("body")
    at_tick = int(m.group("at"))
    until = int(m.group("until")) if m.group("until") else None
    ident = lesion_id or text.strip()
    if kind in ("knockout", "block"):
        if not body or ":" in body:
            raise LesionSpecError(f"bad lesion spec {text!r}")
        return Lesion(
            id=ident,
            kind="receptor_block" if kind == "block" else "knockout",
            at_tick=at_tick,
            until_tick=until,
            agent=body,
        )
    if kind == "attenuate":
        parts = body.split(":")
        if len(parts) != 2:
            raise LesionSpecError(f"bad lesion spec {text!r}")
        agent, factor_text = parts
        try:
            factor = float(factor_text)
        except ValueError:
            raise LesionSpecError(f"bad attenuation factor in {text!r}") from None
        return Lesion(id=ident, kind="attenuate", at_tick=at_tick, until_tick=until, agent=agent, factor=factor)
    parts = body.split(":")
    if len(parts) != 3:
        raise LesionSpecError(f"bad lesion spec {text!r}")
    species, locus_text, value_text = parts
    locus_parts = locus_text.split("/")
    if len(locus_parts) == 1:
        locus = Locus(locus_parts[0])
    elif len(locus_parts) == 2:
        locus = Locus(locus_parts[0], locus_parts[1])
    else:
        raise LesionSpecError(f"bad clamp locus in {text!r}")
    try:
        value = float(value_text)
    except ValueError:
        raise LesionSpecError(f"bad clamp value in {text!r}") from None
    return Lesion(id=ident, kind="clamp", at_tick=at_tick, until_tick=until, species=species, locus=locus, value=value)


def validate_lesion(model: ModelDef, lesion: Lesion, current_tick: int = 0) -> None:
    """Raise LesionError for unknown targets or an invalid window."""
    agents = model.agent_map()
    if lesion.kind not in ("knockout", "attenuate", "clamp", "receptor_block"):
        raise LesionError(f"unknown lesion kind {lesion.kind!r}")
    if lesion.at_tick < current_tick:
        raise LesionError(f"lesion window starts at {lesion.at_tick}, already at tick {current_tick}")
    if lesion.until_tick is not None and lesion.until_tick < lesion.at_tick:
        raise LesionError(f"lesion window {lesion.at_tick}..{lesion.until_tick} is empty")
    if lesion.kind in ("knockout", "attenuate", "receptor_block"):
        if lesion.agent not in agents:
            raise LesionError(f"unknown agent {lesion.agent!r}")
        if lesion.kind == "receptor_block" and not agents[lesion.agent].is_interface:
            raise LesionError(f"receptor_block targets internal agent {lesion.agent!r}")
        if lesion.kind == "attenuate" and not (lesion.factor is not None and 0.0 < lesion.factor < 1.0):
            raise LesionError(f"attenuation factor must be in (0,1), got {lesion.factor}")
    else:
        species = model.species_map()
        if lesion.species not in species:
            raise LesionError(f"unknown species {lesion.species!r}")
        if lesion.locus is None or lesion.locus.level not in model.level_names():
            raise LesionError(f"unknown level in clamp locus {lesion.locus!r}")
        if lesion.value is None or lesion.value < 0.0:
            raise LesionError(f"clamp value must be >= 0, got {lesion.value}")
        if species[lesion.species].is_flag and lesion.value not in (0.0, 1.0):
            raise LesionError(f"clamp of flag {lesion.species!r} to {lesion.value}")


def apply_lesion(sim: SimState, lesion: Lesion) -> Lesion:
    """Validate against the live simulation and register; returns the lesion."""
    validate_lesion(sim.model, lesion, current_tick=sim.tick)
    sim.lesions.append(lesion)
    return lesion


@dataclass(frozen=True)
class DivergenceReport:
    """Where and how much a lesioned run departs from its baseline."""

    first_divergence_tick: int | None
    species_max_delta: dict[str, float]
    firing_count_delta: dict[str, int]


@dataclass(frozen=True)
class PairedRun:
    baseline: tuple[TickReport, ...]
    lesioned: tuple[TickReport, ...]
    divergence: DivergenceReport


def _firing_counts(reports) -> dict[str, int]:
    counts: dict[str, int] = {}
    for report in reports:
        for record in report.firings:
            counts[record.agent] = counts.get(record.agent, 0) + record.count
    return counts


def compute_divergence(
    model: ModelDef,
    baseline: list[TickReport],
    lesioned: list[TickReport],
    baseline_states: list[dict],
    lesioned_states: list[dict],
) -> DivergenceReport:
    """Compare per-tick end states: first differing tick plus per-species extremes."""
    first: int | None = None
    max_delta = {s.name: 0.0 for s in model.species}
    for tick, (b, l) in enumerate(zip(baseline_states, lesioned_states)):
        differs = False
        for key in set(b) | set(l):
            delta = abs(b.get(key, 0.0) - l.get(key, 0.0))
            if delta > 0.0:
                differs = True
                species = key[0]
                if delta > max_delta[species]:
                    max_delta[species] = delta
        if differs and first is None:
            first = tick
    base_counts = _firing_counts(baseline)
    les_counts = _firing_counts(lesioned)
    firing_delta = {
        a.id: les_counts.get(a.id, 0) - base_counts.get(a.id, 0) for a in model.agents
    }
    return DivergenceReport(first, max_delta, firing_delta)


def run_paired(
    model: ModelDef,
    stimuli: list[StimulusEntry] | None,
    lesions: list[Lesion],
    n_ticks: int,
    seed: int = 0,
) -> PairedRun:
    """Baseline vs lesioned twin runs from one seed; extra stimuli apply to both."""
    for lesion in lesions:
        validate_lesion(model, lesion, current_tick=0)
    extra = list(stimuli or [])
    baseline_sim = SimState(model, seed=seed, extra_stimuli=extra)
    lesioned_sim = SimState(model, seed=seed, extra_stimuli=extra, lesions=list(lesions))
    baseline_reports: list[TickReport] = []
    lesioned_reports: list[TickReport] = []
    baseline_states: list[dict] = []
    lesioned_states: list[dict] = []
    for _ in range(n_ticks):
        baseline_reports.append(step(baseline_sim))
        baseline_states.append(baseline_sim.board.quantities())
        lesioned_reports.append(step(lesioned_sim))
        lesioned_states.append(lesioned_sim.board.quantities())
    divergence = compute_divergence(model, baseline_reports, lesioned_reports, baseline_states, lesioned_states)
    return PairedRun(tuple(baseline_reports), tuple(lesioned_reports), divergence)
