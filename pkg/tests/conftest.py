import pytest

from cellulat.dsl import load_model
from cellulat.model import (
    AgentDef,
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
from cellulat.scenarios import ca2plus_scenario

MEMBRANE = Locus("membrane")
CYTOSOL = Locus("cytosol")


def tiny_model(**overrides) -> ModelDef:
    """Two levels, two messengers, one flag, one ligand; no agents by default."""
    fields = dict(
        name="tiny",
        levels=[Level("membrane", 0, "membrane"), Level("cytosol", 1, "cytosol")],
        species=[
            SignalSpecies("A", "messenger"),
            SignalSpecies("B", "messenger"),
            SignalSpecies("F", "flag"),
        ],
        ligands=["L"],
        initializers=[Initializer("A", MEMBRANE, 10.0)],
        agents=[],
        stimuli=[],
    )
    fields.update(overrides)
    return ModelDef(**fields)


def relay_model() -> ModelDef:
    """Interface gate plus one converter, driven by a sustained ligand."""
    gate = AgentDef(
        id="gate",
        kind="interface",
        condition=LigandAtom("L", ">=", 1.0),
        effects=(Effect("produce", "A", MEMBRANE, 1.0),),
    )
    converter = AgentDef(
        id="conv",
        kind="internal",
        condition=SignalAtom("A", MEMBRANE, ">=", 1.0),
        effects=(
            Effect("consume", "A", MEMBRANE, 1.0),
            Effect("produce", "B", CYTOSOL, 1.0),
        ),
    )
    return tiny_model(
        initializers=[],
        agents=[gate, converter],
        stimuli=[StimulusEntry("L", 1.0, 0, 50)],
    )


@pytest.fixture(scope="session")
def ca2plus_model():
    return load_model(ca2plus_scenario().text)


@pytest.fixture(scope="session")
def ca2plus_expected():
    return ca2plus_scenario().expected
