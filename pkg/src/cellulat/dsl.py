"""Parser, validator and pretty-printer for the `.cellulat` model format.

The format is line/block oriented with keyword headers; `#` starts a
comment, blank lines and indentation are insignificant.  The normative
grammar ships in docs/dsl_reference.md.  Parsing is total: any input
yields either a model or a list of located diagnostics, never a crash.

Canonical form: `pretty_print` emits declarations in a fixed order and
spelling, `parse(pretty_print(m))` is structurally equal to `m`, and
pretty-printing is idempotent byte-for-byte.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .errors import ModelError
from .model import (
    COMPARATORS,
    GLOBAL_REGION,
    LEVEL_KINDS,
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

RESERVED_WORDS = frozenset(
    """model meta level signal ligand init stimulus agent interface when boolnet
    node senses rule table consume produce set emit at amount value kind rank
    decay from to priority multiplicity probability region steps output and or
    not messenger flag""".split()
)

_IDENT_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")
_TOKEN_RE = re.compile(r'"[^"]*"|\(|\)|>=|<=|>|<|=|[^\s()<>="#]+')


@dataclass(frozen=True)
class Diagnostic:
    severity: str  # "error" | "warning"
    code: str
    message: str
    line: int = 0
    col: int = 1

    def __str__(self) -> str:
        return f"{self.severity}[{self.code}] line {self.line}:{self.col}: {self.message}"


@dataclass
class ParseResult:
    model: ModelDef | None
    diagnostics: list[Diagnostic] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.model is not None


@dataclass(frozen=True)
class _Token:
    text: str
    line: int
    col: int


def _tokenize_line(text: str, line_no: int, diags: list[Diagnostic]) -> list[_Token]:
    code = text.split("#", 1)[0]
    tokens = []
    covered = [False] * len(code)
    for m in _TOKEN_RE.finditer(code):
        tokens.append(_Token(m.group(0), line_no, m.start() + 1))
        for i in range(m.start(), m.end()):
            covered[i] = True
    for i, ch in enumerate(code):
        if not ch.isspace() and not covered[i]:
            diags.append(
                Diagnostic("error", "lexical_error", f"cannot tokenize {ch!r}", line_no, i + 1)
            )
            return []
    return tokens


class _LineParser:
    """Cursor over one logical line's tokens, reporting syntax errors."""

    def __init__(self, tokens: list[_Token], diags: list[Diagnostic]):
        self.tokens = tokens
        self.pos = 0
        self.diags = diags
        self.failed = False

    @property
    def line(self) -> int:
        return self.tokens[0].line if self.tokens else 0

    def error(self, message: str, code: str = "syntax_error") -> None:
        tok = self.tokens[min(self.pos, len(self.tokens) - 1)]
        self.diags.append(Diagnostic("error", code, message, tok.line, tok.col))
        self.failed = True

    def at_end(self) -> bool:
        return self.pos >= len(self.tokens)

    def peek(self) -> str | None:
        return self.tokens[self.pos].text if not self.at_end() else None

    def take(self) -> _Token | None:
        if self.at_end():
            self.error("unexpected end of line")
            return None
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, word: str) -> bool:
        tok = self.take()
        if tok is None:
            return False
        if tok.text != word:
            self.error(f"expected {word!r}, got {tok.text!r}")
            return False
        return True

    def ident(self, what: str = "identifier") -> str | None:
        tok = self.take()
        if tok is None:
            return None
        if not _IDENT_RE.match(tok.text):
            self.error(f"expected {what}, got {tok.text!r}")
            return None
        if tok.text in RESERVED_WORDS:
            self.error(f"{tok.text!r} is a reserved word")
            return None
        return tok.text

    def integer(self) -> int | None:
        tok = self.take()
        if tok is None:
            return None
        try:
            return int(tok.text)
        except ValueError:
            self.error(f"expected integer, got {tok.text!r}")
            return None

    def number(self) -> float | None:
        tok = self.take()
        if tok is None:
            return None
        try:
            return float(tok.text)
        except ValueError:
            self.error(f"expected number, got {tok.text!r}")
            return None

    def locus(self, default_region: str) -> Locus | None:
        tok = self.take()
        if tok is None:
            return None
        parts = tok.text.split("/")
        if len(parts) == 1:
            level, region = parts[0], default_region
        elif len(parts) == 2:
            level, region = parts
        else:
            self.error(f"bad locus {tok.text!r}")
            return None
        for part in (level, region):
            if not _IDENT_RE.match(part) or part in RESERVED_WORDS:
                self.error(f"bad locus {tok.text!r}")
                return None
        return Locus(level, region)

    def require_end(self) -> None:
        if not self.at_end() and not self.failed:
            self.error(f"unexpected trailing {self.tokens[self.pos].text!r}")


# --- condition expression parsing --------------------------------------------

def _parse_atom(lp: _LineParser, default_region: str):
    if lp.peek() == "ligand":
        lp.take()
        tok = lp.take()
        if tok is None:
            return None
        name = tok.text
        if not _IDENT_RE.match(name) or name in RESERVED_WORDS:
            lp.error(f"expected ligand name, got {name!r}")
            return None
        cmp_tok = lp.take()
        if cmp_tok is None or cmp_tok.text not in COMPARATORS:
            lp.error("expected comparator")
            return None
        threshold = lp.number()
        if threshold is None:
            return None
        return LigandAtom(name, cmp_tok.text, threshold, line=tok.line)
    tok = lp.take()
    if tok is None:
        return None
    species = tok.text
    if not _IDENT_RE.match(species) or species in RESERVED_WORDS:
        lp.error(f"expected species name, got {species!r}")
        return None
    if not lp.expect("at"):
        return None
    locus = lp.locus(default_region)
    if locus is None:
        return None
    cmp_tok = lp.take()
    if cmp_tok is None or cmp_tok.text not in COMPARATORS:
        lp.error("expected comparator")
        return None
    threshold = lp.number()
    if threshold is None:
        return None
    return SignalAtom(species, locus, cmp_tok.text, threshold, line=tok.line)


def _parse_unary(lp: _LineParser, default_region: str):
    if lp.peek() == "not":
        lp.take()
        child = _parse_unary(lp, default_region)
        return None if child is None else Not(child)
    if lp.peek() == "(":
        lp.take()
        expr = _parse_or(lp, default_region)
        if expr is None:
            return None
        if lp.peek() != ")":
            lp.error("expected ')'")
            return None
        lp.take()
        return expr
    return _parse_atom(lp, default_region)


def _parse_and(lp: _LineParser, default_region: str):
    children = []
    first = _parse_unary(lp, default_region)
    if first is None:
        return None
    children.append(first)
    while lp.peek() == "and":
        lp.take()
        nxt = _parse_unary(lp, default_region)
        if nxt is None:
            return None
        children.append(nxt)
    return children[0] if len(children) == 1 else And(tuple(children))


def _parse_or(lp: _LineParser, default_region: str):
    children = []
    first = _parse_and(lp, default_region)
    if first is None:
        return None
    children.append(first)
    while lp.peek() == "or":
        lp.take()
        nxt = _parse_and(lp, default_region)
        if nxt is None:
            return None
        children.append(nxt)
    return children[0] if len(children) == 1 else Or(tuple(children))


def _parse_condition(lp: _LineParser, default_region: str):
    expr = _parse_or(lp, default_region)
    if expr is not None:
        lp.require_end()
        if lp.failed:
            return None
    return expr


# --- the model parser --------------------------------------------------------

_TOP_KEYWORDS = {"model", "meta", "level", "signal", "ligand", "init", "stimulus", "agent", "interface"}
_AGENT_KEYWORDS = {"when", "boolnet", "node", "consume", "produce", "set", "emit"}


class _AgentBuilder:
    def __init__(self, kind: str, name: str, line: int):
        self.kind = kind
        self.name = name
        self.line = line
        self.priority = 0
        self.multiplicity = 1
        self.probability = 1.0
        self.region_tag: str | None = None
        self.condition = None
        self.effects: list = []
        self.bool_nodes: list[BoolNode] = []
        self.bool_rules: list[BoolRule] = []
        self.bool_output: str | None = None
        self.bool_steps = 1
        self.bool_open = False
        self.bool_line = 0

    @property
    def default_region(self) -> str:
        return self.region_tag or GLOBAL_REGION


def parse(text: str) -> ParseResult:
    """Parse model text; on any error diagnostic the model is None."""
    diags: list[Diagnostic] = []
    model_name: str | None = None
    metadata: dict[str, str] = {}
    levels: list[Level] = []
    species: list[SignalSpecies] = []
    ligands: list[str] = []
    initializers: list[Initializer] = []
    stimuli: list[StimulusEntry] = []
    agents: list[AgentDef] = []
    current: _AgentBuilder | None = None

    def dup_error(what: str, name: str, line: int) -> None:
        diags.append(
            Diagnostic("error", "duplicate_declaration", f"duplicate {what} {name!r}", line)
        )

    def close_boolnet(builder: _AgentBuilder) -> None:
        if not builder.bool_open:
            return
        builder.bool_open = False
        if not builder.bool_nodes:
            diags.append(
                Diagnostic(
                    "error", "syntax_error",
                    f"boolnet block of agent {builder.name!r} has no nodes (unclosed block)",
                    builder.bool_line,
                )
            )
            return
        builder.condition = BooleanNetBackend(
            tuple(builder.bool_nodes),
            tuple(builder.bool_rules),
            builder.bool_output,
            builder.bool_steps,
            line=builder.bool_line,
        )

    def close_agent() -> None:
        nonlocal current
        if current is None:
            return
        close_boolnet(current)
        if current.condition is None:
            diags.append(
                Diagnostic(
                    "error", "syntax_error",
                    f"agent {current.name!r} has no condition (unclosed block)",
                    current.line,
                )
            )
        else:
            if any(a.id == current.name for a in agents):
                dup_error("agent", current.name, current.line)
            agents.append(
                AgentDef(
                    id=current.name,
                    kind=current.kind,
                    condition=current.condition,
                    effects=tuple(current.effects),
                    multiplicity=current.multiplicity,
                    priority=current.priority,
                    firing_probability=current.probability,
                    region_tag=current.region_tag,
                    line=current.line,
                )
            )
        current = None

    for line_no, raw in enumerate(text.splitlines(), start=1):
        tokens = _tokenize_line(raw, line_no, diags)
        if not tokens:
            continue
        lp = _LineParser(tokens, diags)
        head = lp.take().text

        if head in _TOP_KEYWORDS and head not in ("agent", "interface"):
            close_agent()

        if head == "model":
            name = lp.ident("model name")
            lp.require_end()
            if name is not None:
                if model_name is not None:
                    dup_error("model header", name, line_no)
                model_name = name
        elif head == "meta":
            key = lp.ident("metadata key")
            tok = lp.take()
            lp.require_end()
            if key is not None and tok is not None and not lp.failed:
                value = tok.text[1:-1] if tok.text.startswith('"') else tok.text
                if key in metadata:
                    dup_error("metadata key", key, line_no)
                metadata[key] = value
        elif head == "level":
            name = lp.ident("level name")
            ok = lp.expect("kind")
            kind_tok = lp.take()
            ok = lp.expect("rank") and ok
            rank = lp.integer()
            lp.require_end()
            if name is not None and kind_tok is not None and rank is not None and not lp.failed:
                if any(l.name == name for l in levels):
                    dup_error("level", name, line_no)
                levels.append(Level(name, rank, kind_tok.text, line=line_no))
        elif head == "signal":
            name = lp.ident("signal name")
            lp.expect("kind")
            kind_tok = lp.take()
            decay = 0.0
            if lp.peek() == "decay":
                lp.take()
                decay = lp.number()
            lp.require_end()
            if name is not None and kind_tok is not None and decay is not None and not lp.failed:
                if any(s.name == name for s in species):
                    dup_error("signal", name, line_no)
                species.append(SignalSpecies(name, kind_tok.text, decay, line=line_no))
        elif head == "ligand":
            name = lp.ident("ligand name")
            lp.require_end()
            if name is not None and not lp.failed:
                if name in ligands:
                    dup_error("ligand", name, line_no)
                ligands.append(name)
        elif head == "init":
            name = lp.ident("species name")
            lp.expect("at")
            locus = lp.locus(GLOBAL_REGION)
            lp.expect("amount")
            amount = lp.number()
            lp.require_end()
            if name is not None and locus is not None and amount is not None and not lp.failed:
                if any(i.species == name and i.locus == locus for i in initializers):
                    dup_error("initializer", f"{name} at {locus.level}/{locus.region}", line_no)
                initializers.append(Initializer(name, locus, amount, line=line_no))
        elif head == "stimulus":
            name = lp.ident("ligand name")
            lp.expect("amount")
            amount = lp.number()
            lp.expect("from")
            start = lp.integer()
            lp.expect("to")
            end = lp.integer()
            lp.require_end()
            if None not in (name, amount, start, end) and not lp.failed:
                stimuli.append(StimulusEntry(name, amount, start, end, line=line_no))
        elif head in ("agent", "interface"):
            close_agent()
            name = lp.ident("agent id")
            builder = _AgentBuilder("interface" if head == "interface" else "internal", name or "?", line_no)
            while not lp.at_end() and not lp.failed:
                opt = lp.take().text
                if opt == "priority":
                    value = lp.integer()
                    if value is not None:
                        builder.priority = value
                elif opt == "multiplicity":
                    value = lp.integer()
                    if value is not None:
                        builder.multiplicity = value
                elif opt == "probability":
                    value = lp.number()
                    if value is not None:
                        builder.probability = value
                elif opt == "region":
                    value = lp.ident("region tag")
                    if value is not None:
                        builder.region_tag = value
                else:
                    lp.error(f"unknown agent option {opt!r}")
            if name is not None and not lp.failed:
                current = builder
        elif head in _AGENT_KEYWORDS:
            if current is None:
                lp.error(f"{head!r} outside an agent block")
                continue
            if head != "node":
                close_boolnet(current)
            if head == "when":
                expr = _parse_condition(lp, current.default_region)
                if expr is not None:
                    if current.condition is not None:
                        dup_error("condition", current.name, line_no)
                    current.condition = expr
            elif head == "boolnet":
                lp.expect("steps")
                steps = lp.integer()
                lp.expect("output")
                out = lp.ident("output node")
                lp.require_end()
                if steps is not None and out is not None and not lp.failed:
                    if current.condition is not None or current.bool_nodes:
                        dup_error("condition", current.name, line_no)
                    current.bool_open = True
                    current.bool_steps = steps
                    current.bool_output = out
                    current.bool_line = line_no
            elif head == "node":
                if not current.bool_open:
                    lp.error("'node' outside a boolnet block")
                    continue
                name = lp.ident("node name")
                mode = lp.take()
                if name is None or mode is None:
                    continue
                if any(n.name == name for n in current.bool_nodes):
                    dup_error("node", name, line_no)
                if mode.text == "senses":
                    atom = _parse_atom(lp, current.default_region)
                    lp.require_end()
                    if atom is not None and not lp.failed:
                        current.bool_nodes.append(BoolNode(name, atom, line=line_no))
                elif mode.text == "rule":
                    inputs = []
                    while lp.peek() not in ("table", None):
                        inp = lp.ident("input node")
                        if inp is None:
                            break
                        inputs.append(inp)
                    if not lp.expect("table"):
                        continue
                    bits_tok = lp.take()
                    lp.require_end()
                    if bits_tok is None or lp.failed:
                        continue
                    if not re.fullmatch(r"[01]+", bits_tok.text):
                        lp.error(f"truth table must be 0/1 bits, got {bits_tok.text!r}")
                        continue
                    current.bool_nodes.append(BoolNode(name, None, line=line_no))
                    current.bool_rules.append(
                        BoolRule(name, tuple(inputs), tuple(int(b) for b in bits_tok.text), line=line_no)
                    )
                else:
                    lp.error(f"expected 'senses' or 'rule', got {mode.text!r}")
            elif head in ("consume", "produce"):
                name = lp.ident("species name")
                lp.expect("at")
                locus = lp.locus(current.default_region)
                lp.expect("amount")
                amount = lp.number()
                lp.require_end()
                if name is not None and locus is not None and amount is not None and not lp.failed:
                    current.effects.append(Effect(head, name, locus, amount, line=line_no))
            elif head == "set":
                name = lp.ident("species name")
                lp.expect("at")
                locus = lp.locus(current.default_region)
                lp.expect("value")
                value = lp.number()
                lp.require_end()
                if name is not None and locus is not None and value is not None and not lp.failed:
                    current.effects.append(Effect("set", name, locus, value, line=line_no))
            elif head == "emit":
                name = lp.ident("ligand name")
                lp.expect("amount")
                amount = lp.number()
                lp.require_end()
                if name is not None and amount is not None and not lp.failed:
                    current.effects.append(EmitEffect(name, amount, line=line_no))
        else:
            lp.error(f"unknown keyword {head!r}")

    close_agent()
    if model_name is None:
        diags.append(Diagnostic("error", "syntax_error", "missing 'model' header", 1))
    if any(d.severity == "error" for d in diags):
        return ParseResult(None, diags)
    model = ModelDef(
        name=model_name,
        levels=levels,
        species=species,
        ligands=ligands,
        initializers=initializers,
        agents=agents,
        stimuli=stimuli,
        metadata=metadata,
    )
    return ParseResult(model, diags)


# --- validation ---------------------------------------------------------------

def _atom_checks(atom, agent: AgentDef, model: ModelDef, level_names, species_map, ligand_set, out):
    if isinstance(atom, SignalAtom):
        if atom.species not in species_map:
            out.append(Diagnostic("error", "unknown_species", f"unknown species {atom.species!r}", atom.line))
        if atom.locus.level not in level_names:
            out.append(Diagnostic("error", "unknown_level", f"unknown level {atom.locus.level!r}", atom.line))
    else:
        if atom.ligand not in ligand_set:
            out.append(Diagnostic("error", "unknown_ligand", f"unknown ligand {atom.ligand!r}", atom.line))
        if not agent.is_interface:
            out.append(
                Diagnostic(
                    "error", "ligand_in_internal",
                    f"internal agent {agent.id!r} senses ligand {atom.ligand!r}", atom.line,
                )
            )


def validate(model: ModelDef) -> list[Diagnostic]:
    """Cross-reference and domain checks; returns errors and warnings."""
    from .agents import condition_atoms

    out: list[Diagnostic] = []
    if not model.levels:
        out.append(Diagnostic("error", "missing_level", "a model needs at least one level"))
    level_names = model.level_names()
    species_map = model.species_map()
    ligand_set = set(model.ligands)

    seen_ranks: dict[int, str] = {}
    for level in model.levels:
        if level.kind not in LEVEL_KINDS:
            out.append(Diagnostic("error", "level_kind", f"unknown level kind {level.kind!r}", level.line))
        if level.rank < 0:
            out.append(Diagnostic("error", "rank_domain", f"negative rank on level {level.name!r}", level.line))
        if level.rank in seen_ranks:
            out.append(
                Diagnostic(
                    "error", "duplicate_declaration",
                    f"levels {seen_ranks[level.rank]!r} and {level.name!r} share rank {level.rank}",
                    level.line,
                )
            )
        seen_ranks[level.rank] = level.name

    for spec in model.species:
        if spec.kind not in ("messenger", "flag"):
            out.append(Diagnostic("error", "species_kind", f"unknown species kind {spec.kind!r}", spec.line))
        if not 0.0 <= spec.decay <= 1.0:
            out.append(Diagnostic("error", "decay_domain", f"decay of {spec.name!r} outside [0,1]", spec.line))
        elif spec.is_flag and spec.decay != 0.0:
            out.append(Diagnostic("error", "flag_domain", f"flag {spec.name!r} cannot decay", spec.line))

    for init in model.initializers:
        if init.species not in species_map:
            out.append(Diagnostic("error", "unknown_species", f"unknown species {init.species!r}", init.line))
            continue
        if init.locus.level not in level_names:
            out.append(Diagnostic("error", "unknown_level", f"unknown level {init.locus.level!r}", init.line))
        if init.quantity < 0.0:
            out.append(Diagnostic("error", "quantity_domain", f"negative initial quantity for {init.species!r}", init.line))
        elif species_map[init.species].is_flag and init.quantity not in (0.0, 1.0):
            out.append(Diagnostic("error", "flag_domain", f"flag {init.species!r} initialized to {init.quantity}", init.line))

    for stim in model.stimuli:
        if stim.ligand not in ligand_set:
            out.append(Diagnostic("error", "unknown_ligand", f"unknown ligand {stim.ligand!r}", stim.line))
        if stim.amount < 0.0:
            out.append(Diagnostic("error", "quantity_domain", f"negative stimulus amount for {stim.ligand!r}", stim.line))
        if stim.from_tick < 0 or stim.from_tick > stim.to_tick:
            out.append(Diagnostic("error", "stimulus_range", f"bad stimulus window {stim.from_tick}..{stim.to_tick}", stim.line))

    for agent in model.agents:
        if agent.multiplicity < 1:
            out.append(Diagnostic("error", "multiplicity_domain", f"agent {agent.id!r} multiplicity < 1", agent.line))
        if not 0.0 < agent.firing_probability <= 1.0:
            out.append(Diagnostic("error", "probability_domain", f"agent {agent.id!r} probability outside (0,1]", agent.line))
        for atom in condition_atoms(agent):
            _atom_checks(atom, agent, model, level_names, species_map, ligand_set, out)
        if isinstance(agent.condition, BooleanNetBackend):
            _boolnet_checks(agent.condition, agent, out)
        for eff in agent.effects:
            if isinstance(eff, EmitEffect):
                if eff.ligand not in ligand_set:
                    out.append(Diagnostic("error", "unknown_ligand", f"unknown ligand {eff.ligand!r}", eff.line))
                if not agent.is_interface:
                    out.append(Diagnostic("error", "emit_in_internal", f"internal agent {agent.id!r} emits", eff.line))
                if eff.amount <= 0.0:
                    out.append(Diagnostic("error", "amount_domain", f"emission amount must be > 0", eff.line))
                continue
            if eff.species not in species_map:
                out.append(Diagnostic("error", "unknown_species", f"unknown species {eff.species!r}", eff.line))
                continue
            if eff.locus.level not in level_names:
                out.append(Diagnostic("error", "unknown_level", f"unknown level {eff.locus.level!r}", eff.line))
            target = species_map[eff.species]
            if eff.kind in ("produce", "consume"):
                if target.is_flag:
                    out.append(
                        Diagnostic("error", "effect_domain", f"{eff.kind} targets flag {eff.species!r}", eff.line)
                    )
                if eff.amount <= 0.0:
                    out.append(Diagnostic("error", "amount_domain", f"{eff.kind} amount must be > 0", eff.line))
            elif eff.kind == "set":
                if not target.is_flag:
                    out.append(
                        Diagnostic("error", "effect_domain", f"set targets messenger {eff.species!r}", eff.line)
                    )
                elif eff.amount not in (0.0, 1.0):
                    out.append(Diagnostic("error", "flag_domain", f"flag set to {eff.amount}", eff.line))
            else:
                out.append(Diagnostic("error", "effect_domain", f"unknown effect kind {eff.kind!r}", eff.line))

    _reachability_warnings(model, out)
    return out


def _boolnet_checks(net: BooleanNetBackend, agent: AgentDef, out: list[Diagnostic]) -> None:
    names = [n.name for n in net.nodes]
    name_set = set(names)
    if len(names) != len(name_set):
        out.append(Diagnostic("error", "duplicate_declaration", f"duplicate boolnet node in {agent.id!r}", net.line))
    if net.output_node not in name_set:
        out.append(Diagnostic("error", "boolnet_structure", f"output node {net.output_node!r} not declared", net.line))
    if net.sync_steps < 1:
        out.append(Diagnostic("error", "boolnet_structure", "sync steps must be >= 1", net.line))
    ruled = {r.node for r in net.rules}
    for node in net.nodes:
        if node.is_input and node.name in ruled:
            out.append(Diagnostic("error", "boolnet_structure", f"input node {node.name!r} has a rule", node.line))
        if not node.is_input and node.name not in ruled:
            out.append(Diagnostic("error", "boolnet_structure", f"internal node {node.name!r} has no rule", node.line))
    for rule in net.rules:
        for inp in rule.inputs:
            if inp not in name_set:
                out.append(Diagnostic("error", "boolnet_structure", f"rule input {inp!r} not declared", rule.line))
        if len(rule.table) != 2 ** len(rule.inputs):
            out.append(
                Diagnostic(
                    "error", "boolnet_structure",
                    f"table for {rule.node!r} needs {2 ** len(rule.inputs)} entries, has {len(rule.table)}",
                    rule.line,
                )
            )


def _reachability_warnings(model: ModelDef, out: list[Diagnostic]) -> None:
    from .agents import condition_atoms

    produced: set[str] = set()
    for agent in model.agents:
        for eff in agent.effects:
            if isinstance(eff, Effect) and eff.kind in ("produce", "set"):
                produced.add(eff.species)
    initialized = {i.species for i in model.initializers}
    sensed: set[str] = set()
    for agent in model.agents:
        for atom in condition_atoms(agent):
            if isinstance(atom, SignalAtom):
                sensed.add(atom.species)

    species_map = model.species_map()
    for agent in model.agents:
        for atom in condition_atoms(agent):
            if not isinstance(atom, SignalAtom) or atom.species not in species_map:
                continue
            if atom.species not in produced and atom.species not in initialized:
                out.append(
                    Diagnostic(
                        "warning", "unreachable_agent",
                        f"agent {agent.id!r} senses {atom.species!r}, which nothing produces or initializes",
                        agent.line,
                    )
                )
                break
    for spec in model.species:
        if spec.name not in sensed:
            out.append(
                Diagnostic(
                    "warning", "dead_end_species",
                    f"species {spec.name!r} is never sensed by any agent",
                    spec.line,
                )
            )


def parse_and_validate(text: str) -> tuple[ModelDef | None, list[Diagnostic]]:
    result = parse(text)
    if result.model is None:
        return None, result.diagnostics
    diags = result.diagnostics + validate(result.model)
    if any(d.severity == "error" for d in diags):
        return None, diags
    return result.model, diags


def load_model(text: str) -> ModelDef:
    """Parse and validate; raise ModelError on any error diagnostic."""
    model, diags = parse_and_validate(text)
    if model is None:
        raise ModelError([d for d in diags if d.severity == "error"])
    return model


# --- pretty printing ----------------------------------------------------------

def _num(x: float) -> str:
    return repr(float(x))


def _locus_str(locus: Locus, default_region: str) -> str:
    if locus.region == default_region:
        return locus.level
    return f"{locus.level}/{locus.region}"


def _atom_str(atom, default_region: str) -> str:
    if isinstance(atom, LigandAtom):
        return f"ligand {atom.ligand} {atom.comparator} {_num(atom.threshold)}"
    return f"{atom.species} at {_locus_str(atom.locus, default_region)} {atom.comparator} {_num(atom.threshold)}"


def _expr_str(expr, default_region: str, min_prec: int = 1) -> str:
    if isinstance(expr, (SignalAtom, LigandAtom)):
        return _atom_str(expr, default_region)
    if isinstance(expr, Not):
        text, prec = "not " + _expr_str(expr.child, default_region, 4), 3
    elif isinstance(expr, And):
        text, prec = " and ".join(_expr_str(c, default_region, 3) for c in expr.children), 2
    else:
        text, prec = " or ".join(_expr_str(c, default_region, 2) for c in expr.children), 1
    return f"({text})" if prec < min_prec else text


def pretty_print(model: ModelDef) -> str:
    """Canonical text form; parse(pretty_print(m)) is structurally equal to m."""
    lines = [f"model {model.name}"]
    for key in sorted(model.metadata):
        lines.append(f'meta {key} "{model.metadata[key]}"')
    if model.levels:
        lines.append("")
    for level in sorted(model.levels, key=lambda l: (l.rank, l.name)):
        lines.append(f"level {level.name} kind {level.kind} rank {level.rank}")
    if model.species:
        lines.append("")
    for spec in sorted(model.species, key=lambda s: s.name):
        suffix = f" decay {_num(spec.decay)}" if spec.decay != 0.0 else ""
        lines.append(f"signal {spec.name} kind {spec.kind}{suffix}")
    if model.ligands:
        lines.append("")
    for name in sorted(model.ligands):
        lines.append(f"ligand {name}")
    if model.initializers:
        lines.append("")
    for init in sorted(model.initializers, key=lambda i: (i.species, i.locus.level, i.locus.region)):
        lines.append(
            f"init {init.species} at {_locus_str(init.locus, GLOBAL_REGION)} amount {_num(init.quantity)}"
        )
    if model.stimuli:
        lines.append("")
    for stim in sorted(model.stimuli, key=lambda s: (s.from_tick, s.ligand, s.to_tick, s.amount)):
        lines.append(
            f"stimulus {stim.ligand} amount {_num(stim.amount)} from {stim.from_tick} to {stim.to_tick}"
        )
    for agent in sorted(model.agents, key=lambda a: a.id):
        lines.append("")
        lines.extend(_agent_lines(agent))
    return "\n".join(lines) + "\n"


def _agent_lines(agent: AgentDef) -> list[str]:
    head = "interface" if agent.is_interface else "agent"
    parts = [head, agent.id]
    if agent.priority != 0:
        parts += ["priority", str(agent.priority)]
    if agent.multiplicity != 1:
        parts += ["multiplicity", str(agent.multiplicity)]
    if agent.firing_probability != 1.0:
        parts += ["probability", _num(agent.firing_probability)]
    if agent.region_tag is not None:
        parts += ["region", agent.region_tag]
    lines = [" ".join(parts)]
    region = agent.region_tag or GLOBAL_REGION
    cond = agent.condition
    if isinstance(cond, BooleanNetBackend):
        lines.append(f"  boolnet steps {cond.sync_steps} output {cond.output_node}")
        rules = {r.node: r for r in cond.rules}
        for node in cond.nodes:
            if node.is_input:
                lines.append(f"    node {node.name} senses {_atom_str(node.atom, region)}")
            else:
                rule = rules[node.name]
                inputs = " ".join(rule.inputs)
                bits = "".join(str(b) for b in rule.table)
                lines.append(f"    node {node.name} rule {inputs} table {bits}")
    else:
        lines.append(f"  when {_expr_str(cond, region)}")
    for eff in agent.effects:
        if isinstance(eff, EmitEffect):
            lines.append(f"  emit {eff.ligand} amount {_num(eff.amount)}")
        elif eff.kind == "set":
            lines.append(f"  set {eff.species} at {_locus_str(eff.locus, region)} value {_num(eff.amount)}")
        else:
            lines.append(
                f"  {eff.kind} {eff.species} at {_locus_str(eff.locus, region)} amount {_num(eff.amount)}"
            )
    return lines
