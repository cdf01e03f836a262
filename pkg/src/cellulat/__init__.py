"""Deterministic blackboard simulation of intracellular signalling networks.

Agents (receptors, proteins, enzymes) with condition/action parts react
to write events on a multi-level blackboard standing for the cell's
internal medium.  The package bundles a pathway description language, a
lesion virtual laboratory, a trace CLI and an HTTP session service.
"""

from .agents import (
    ExternalEmission,
    FiringOutcome,
    emit_external,
    evaluate_condition,
    fire,
    fire_multiple,
    sensed_inputs,
)
from .blackboard import (
    BlackboardSnapshot,
    BlackboardState,
    SignalEntry,
    WriteEvent,
    create_blackboard,
    replay_events,
)
from .columns import AgencyColumn, ColumnDiffReport, column_diff, detect_columns, level_occupancy
from .dsl import Diagnostic, ParseResult, load_model, parse, parse_and_validate, pretty_print, validate
from .errors import (
    CellulatError,
    DuplicateInitializer,
    FlagDomain,
    InsufficientQuantity,
    LesionError,
    LesionSpecError,
    ModelError,
    NegativeQuantity,
    UnknownLevel,
    UnknownSpecies,
)
from .lesions import (
    DivergenceReport,
    PairedRun,
    apply_lesion,
    compute_divergence,
    parse_lesion_spec,
    run_paired,
    validate_lesion,
)
from .model import (
    AgentDef,
    And,
    BooleanNetBackend,
    BoolNode,
    BoolRule,
    Effect,
    EmitEffect,
    Initializer,
    Lesion,
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
from .scenarios import Scenario, ca2plus_scenario, toy_linear_chain
from .scheduler import (
    AgendaEntry,
    EmissionRecord,
    FiringRecord,
    SeededRng,
    SimState,
    TickReport,
    build_agenda,
    load_state,
    reference_step,
    run,
    save_state,
    step,
)
from .trace import TraceCollector, TraceRow

__version__ = "0.1.0"
