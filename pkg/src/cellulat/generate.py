"""Seeded random model generator for differential and round-trip testing.

Models are small, structurally valid by construction (validate() returns
no errors; reachability warnings are allowed) and always contain an
interface agent plus an early stimulus so traces are not trivially quiet.
"""

from __future__ import annotations

import random

from .model import (
    AgentDef,
    And,
    BooleanNetBackend,
    BoolNode,
    BoolRule,
    Effect,
    EmitEffect,
    Initializer,
    Level,
    LigandAtom,
    Locus,
    ModelDef,
    Not,
    Or,
    SignalAtom,
    SignalSpecies,
    StimulusEntry,
)

_LEVEL_KINDS = ("membrane", "cytosol", "nucleus", "organelle", "custom")
_REGIONS = ("global", "patch_a", "patch_b")
_THRESHOLDS = (0.5, 1.0, 2.0)
_AMOUNTS = (0.5, 1.0, 2.0)


def random_model(
    seed: int,
    *,
    max_agents: int = 6,
    max_species: int = 4,
    max_levels: int = 3,
) -> ModelDef:
    rng = random.Random(seed)
    n_levels = rng.randint(1, max_levels)
    levels = [Level(f"lvl{i}", i, rng.choice(_LEVEL_KINDS)) for i in range(n_levels)]
    level_names = [l.name for l in levels]

    n_species = rng.randint(1, max_species)
    species = []
    for i in range(n_species):
        if rng.random() < 0.3:
            species.append(SignalSpecies(f"sp{i}", "flag"))
        else:
            decay = rng.choice((0.0, 0.0, 0.0, 0.25, 0.5))
            species.append(SignalSpecies(f"sp{i}", "messenger", decay))
    messengers = [s for s in species if not s.is_flag]
    flags = [s for s in species if s.is_flag]

    ligands = [f"lig{i}" for i in range(rng.randint(1, 2))]

    def locus() -> Locus:
        return Locus(rng.choice(level_names), rng.choice(_REGIONS))

    initializers = []
    used = set()
    for sp in messengers:
        if rng.random() < 0.7:
            loc = locus()
            if (sp.name, loc) not in used:
                used.add((sp.name, loc))
                initializers.append(Initializer(sp.name, loc, float(rng.randint(1, 20))))

    def signal_atom() -> SignalAtom:
        sp = rng.choice(species)
        cmp = rng.choice((">=", ">", "<", "<=", "="))
        if sp.is_flag:
            return SignalAtom(sp.name, locus(), rng.choice((">=", "=")), rng.choice((0.0, 1.0)))
        return SignalAtom(sp.name, locus(), cmp, rng.choice(_THRESHOLDS))

    def condition(interface: bool):
        atoms = []
        for _ in range(rng.randint(1, 3)):
            if interface and rng.random() < 0.5:
                atoms.append(LigandAtom(rng.choice(ligands), ">=", rng.choice(_THRESHOLDS)))
            else:
                atoms.append(signal_atom())
        atoms = [Not(a) if rng.random() < 0.15 else a for a in atoms]
        if len(atoms) == 1:
            return atoms[0]
        return And(tuple(atoms)) if rng.random() < 0.7 else Or(tuple(atoms))

    def boolnet(interface: bool) -> BooleanNetBackend:
        n_inputs = rng.randint(1, 2)
        nodes = []
        for i in range(n_inputs):
            if interface and rng.random() < 0.4:
                atom = LigandAtom(rng.choice(ligands), ">=", rng.choice(_THRESHOLDS))
            else:
                atom = signal_atom()
            nodes.append(BoolNode(f"in{i}", atom))
        inputs = tuple(n.name for n in nodes)
        table = tuple(rng.randint(0, 1) for _ in range(2 ** len(inputs)))
        nodes.append(BoolNode("out", None))
        rule = BoolRule("out", inputs, table)
        return BooleanNetBackend(tuple(nodes), (rule,), "out", rng.randint(1, 2))

    def effects(interface: bool) -> tuple:
        effs = []
        for _ in range(rng.randint(1, 3)):
            roll = rng.random()
            if roll < 0.25 and messengers:
                effs.append(Effect("consume", rng.choice(messengers).name, locus(), rng.choice(_AMOUNTS)))
            elif roll < 0.75 and messengers:
                effs.append(Effect("produce", rng.choice(messengers).name, locus(), rng.choice(_AMOUNTS)))
            elif flags:
                effs.append(Effect("set", rng.choice(flags).name, locus(), float(rng.randint(0, 1))))
        if interface and rng.random() < 0.3:
            effs.append(EmitEffect(rng.choice(ligands), rng.choice(_AMOUNTS)))
        if not effs:
            sp = rng.choice(species)
            if sp.is_flag:
                effs.append(Effect("set", sp.name, locus(), 1.0))
            else:
                effs.append(Effect("produce", sp.name, locus(), 1.0))
        return tuple(effs)

    n_agents = rng.randint(1, max_agents)
    agents = []
    for i in range(n_agents):
        interface = i == 0 or rng.random() < 0.25
        cond = boolnet(interface) if rng.random() < 0.15 else condition(interface)
        agents.append(
            AgentDef(
                id=f"ag{i}",
                kind="interface" if interface else "internal",
                condition=cond,
                effects=effects(interface),
                multiplicity=rng.choice((1, 1, 1, 2, 3)),
                priority=rng.randint(-5, 5),
                firing_probability=rng.choice((1.0, 1.0, 1.0, 0.5, 0.9)),
                region_tag=rng.choice((None, None, "patch_a")),
            )
        )

    stimuli = [StimulusEntry(rng.choice(ligands), float(rng.randint(1, 5)), 0, rng.randint(0, 15))]
    if rng.random() < 0.4:
        start = rng.randint(1, 8)
        stimuli.append(StimulusEntry(rng.choice(ligands), float(rng.randint(1, 3)), start, start + rng.randint(0, 6)))

    return ModelDef(
        name=f"rand{seed}",
        levels=levels,
        species=species,
        ligands=ligands,
        initializers=initializers,
        agents=agents,
        stimuli=stimuli,
    )


def iter_random_models(count: int, base_seed: int = 0, **kwargs):
    for i in range(count):
        yield random_model(base_seed + i, **kwargs)
