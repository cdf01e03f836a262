"""Bundled, validated pathway models.

The flagship is the calcium release cascade (ca2plus); toy linear chains
of configurable length serve the propagation-latency and differential
tests.  Every scenario's text parses and validates with zero errors, and
carries a machine-readable manifest of expected properties that the
acceptance suite asserts.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources

from .dsl import load_model, pretty_print
from .model import (
    AgentDef,
    And,
    Effect,
    Initializer,
    Level,
    LigandAtom,
    Locus,
    ModelDef,
    SignalAtom,
    SignalSpecies,
    StimulusEntry,
)

CHAIN_MAX = 64


@dataclass(frozen=True)
class Scenario:
    name: str
    text: str
    description: str
    expected: dict = field(default_factory=dict)

    def model(self) -> ModelDef:
        return load_model(self.text)


def _data_text(name: str) -> str:
    return resources.files("cellulat.data").joinpath(name).read_text(encoding="utf-8")


def ca2plus_scenario() -> Scenario:
    """GPCR-driven calcium cascade on one membrane patch."""
    return Scenario(
        name="ca2plus",
        text=_data_text("ca2plus.cellulat"),
        description=(
            "Sustained ligand L1 activates a surface receptor; the cascade sets "
            "G-protein and PKC flags, converts PIP2 into IP3 and DAG, and drains "
            "the ER store into cytosolic calcium one unit per tick."
        ),
        expected=json.loads(_data_text("ca2plus_expected.json")),
    )


def toy_linear_chain(n: int) -> Scenario:
    """A relay of n agents converting S0 stock into Sn, one unit per hop.

    A single-tick pulse of the trigger ligand at tick 0 walks one unit down
    the chain; S_k first becomes nonzero at tick k-1.
    """
    if not 1 <= n <= CHAIN_MAX:
        raise ValueError(f"chain length must be in 1..{CHAIN_MAX}, got {n}")
    cytosol = Locus("cytosol")
    species = [SignalSpecies(f"S{i}") for i in range(n + 1)]
    agents = []
    for i in range(1, n + 1):
        consume = Effect("consume", f"S{i - 1}", cytosol, 1.0)
        produce = Effect("produce", f"S{i}", cytosol, 1.0)
        stock_atom = SignalAtom(f"S{i - 1}", cytosol, ">=", 1.0)
        if i == 1:
            condition = And((LigandAtom("trigger", ">=", 1.0), stock_atom))
            kind = "interface"
        else:
            condition = stock_atom
            kind = "internal"
        agents.append(AgentDef(id=f"A{i}", kind=kind, condition=condition, effects=(consume, produce)))
    model = ModelDef(
        name=f"chain{n}",
        levels=[Level("cytosol", 0, "cytosol")],
        species=species,
        ligands=["trigger"],
        initializers=[Initializer("S0", cytosol, 1000.0)],
        agents=agents,
        stimuli=[StimulusEntry("trigger", 1.0, 0, 0)],
    )
    return Scenario(
        name=f"chain{n}",
        text=pretty_print(model),
        description=f"Linear relay of {n} agents over species S0..S{n}.",
        expected={"first_nonzero_tick": {f"S{n}": n - 1}},
    )
