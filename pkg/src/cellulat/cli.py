"""Command-line front door: run, validate, lesion-compare.

Exit codes: 0 success, 1 missing input file, 2 validation errors
(diagnostics on stderr), 64 flag/usage errors.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from dataclasses import asdict
from pathlib import Path

from .columns import columns_json, occupancy_json
from .dsl import parse_and_validate
from .errors import LesionSpecError
from .lesions import parse_lesion_spec, run_paired, validate_lesion
from .model import ModelDef, StimulusEntry
from .scheduler import SimState, TickReport, step
from .trace import TraceCollector, write_csv, write_jsonl

EXIT_OK = 0
EXIT_MISSING_FILE = 1
EXIT_VALIDATION = 2
EXIT_USAGE = 64

_STIMULUS_RE = re.compile(r"^(?P<ligand>\w+)=(?P<amount>[0-9.eE+-]+)@(?P<from>\d+)\.\.(?P<to>\d+)$")


class _Parser(argparse.ArgumentParser):
    """argparse with the conventional 64 exit code for usage errors."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _stimulus_flag(text: str) -> StimulusEntry:
    m = _STIMULUS_RE.match(text)
    if not m:
        raise argparse.ArgumentTypeError(f"bad stimulus {text!r}, expected LIGAND=AMT@FROM..TO")
    return StimulusEntry(m.group("ligand"), float(m.group("amount")), int(m.group("from")), int(m.group("to")))


def _lesion_flag(text: str):
    try:
        return parse_lesion_spec(text)
    except LesionSpecError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="cellulat", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="simulate a model and write trace + firing log")
    run_p.add_argument("model_file")
    run_p.add_argument("--ticks", type=int, required=True)
    run_p.add_argument("--seed", type=int, default=0)
    run_p.add_argument("--stimulus", action="append", type=_stimulus_flag, default=[],
                       metavar="LIGAND=AMT@FROM..TO")
    run_p.add_argument("--lesion", action="append", type=_lesion_flag, default=[], metavar="SPEC")
    run_p.add_argument("--out-trace", default=None)
    run_p.add_argument("--out-log", default=None)
    run_p.add_argument("--format", choices=("csv", "jsonl"), default="csv")

    val_p = sub.add_parser("validate", help="parse and validate a model file")
    val_p.add_argument("model_file")

    ins_p = sub.add_parser("inspect", help="emit occupancy and agency-column report as JSON")
    ins_p.add_argument("model_file")
    ins_p.add_argument("--out", default=None)

    cmp_p = sub.add_parser("lesion-compare", help="run baseline vs lesioned and report divergence")
    cmp_p.add_argument("model_file")
    cmp_p.add_argument("--ticks", type=int, required=True)
    cmp_p.add_argument("--seed", type=int, default=0)
    cmp_p.add_argument("--lesion", action="append", type=_lesion_flag, required=True, metavar="SPEC")
    cmp_p.add_argument("--out", default=None)
    return parser


def _load(path_text: str) -> tuple[ModelDef | None, int]:
    path = Path(path_text)
    if not path.is_file():
        print(f"cellulat: no such file: {path}", file=sys.stderr)
        return None, EXIT_MISSING_FILE
    model, diags = parse_and_validate(path.read_text(encoding="utf-8"))
    for diag in diags:
        print(diag, file=sys.stderr)
    if model is None:
        return None, EXIT_VALIDATION
    return model, EXIT_OK


def _report_to_json(report: TickReport) -> dict:
    return {
        "tick": report.tick,
        "stimuli_active": [list(s) for s in report.stimuli_active],
        "agenda": [asdict(e) for e in report.agenda],
        "firings": [asdict(f) for f in report.firings],
        "events": [
            {
                "tick": ev.tick, "actor": ev.actor, "species": ev.species,
                "level": ev.locus.level, "region": ev.locus.region,
                "kind": ev.kind, "amount": ev.amount, "resulting": ev.resulting, "seq": ev.seq,
            }
            for ev in report.events
        ],
        "emissions": [asdict(e) for e in report.emissions],
    }


def _cmd_run(args) -> int:
    if args.ticks < 0:
        print("cellulat: error: --ticks must be >= 0", file=sys.stderr)
        return EXIT_USAGE
    model, code = _load(args.model_file)
    if model is None:
        return code
    extra = []
    if args.stimulus:
        if model.stimuli:
            print("cellulat: warning: --stimulus flags replace the model's stimulus schedule", file=sys.stderr)
        model.stimuli = []
        extra = list(args.stimulus)
    try:
        for lesion in args.lesion:
            validate_lesion(model, lesion)
        for entry in extra:
            if entry.ligand not in model.ligands:
                raise ValueError(f"unknown ligand {entry.ligand!r} in --stimulus")
    except Exception as exc:
        print(f"cellulat: {exc}", file=sys.stderr)
        return EXIT_VALIDATION

    sim = SimState(model, seed=args.seed, extra_stimuli=extra, lesions=list(args.lesion))
    collector = TraceCollector(model)
    reports = []
    if args.ticks == 0:
        collector.collect(sim.board, 0)
    for _ in range(args.ticks):
        report = step(sim)
        reports.append(report)
        collector.collect(sim.board, report.tick)

    if args.out_trace:
        if args.format == "csv":
            write_csv(collector.rows, args.out_trace)
        else:
            write_jsonl(collector.rows, args.out_trace)
    else:
        out = sys.stdout
        out.write("tick,level,region,species,quantity\n")
        for row in collector.rows:
            out.write(f"{row.tick},{row.level},{row.region},{row.species},{row.quantity!r}\n")
    if args.out_log:
        with open(args.out_log, "w", encoding="utf-8") as fh:
            for report in reports:
                fh.write(json.dumps(_report_to_json(report)) + "\n")
    return EXIT_OK


def _cmd_validate(args) -> int:
    path = Path(args.model_file)
    if not path.is_file():
        print(f"cellulat: no such file: {path}", file=sys.stderr)
        return EXIT_MISSING_FILE
    model, diags = parse_and_validate(path.read_text(encoding="utf-8"))
    for diag in diags:
        print(diag, file=sys.stderr)
    return EXIT_OK if model is not None else EXIT_VALIDATION


def _cmd_inspect(args) -> int:
    model, code = _load(args.model_file)
    if model is None:
        return code
    doc = {
        "model": model.name,
        "levels": [{"name": l.name, "rank": l.rank, "kind": l.kind} for l in model.levels],
        "occupancy": occupancy_json(model),
        "columns": columns_json(model),
    }
    rendered = json.dumps(doc, indent=2) + "\n"
    if args.out:
        Path(args.out).write_text(rendered, encoding="utf-8")
    else:
        sys.stdout.write(rendered)
    return EXIT_OK


def _cmd_lesion_compare(args) -> int:
    if args.ticks < 0:
        print("cellulat: error: --ticks must be >= 0", file=sys.stderr)
        return EXIT_USAGE
    model, code = _load(args.model_file)
    if model is None:
        return code
    try:
        paired = run_paired(model, None, list(args.lesion), args.ticks, seed=args.seed)
    except Exception as exc:
        print(f"cellulat: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    divergence = paired.divergence
    doc = {
        "first_divergence_tick": divergence.first_divergence_tick,
        "species_max_delta": divergence.species_max_delta,
        "firing_count_delta": divergence.firing_count_delta,
        "ticks": args.ticks,
        "seed": args.seed,
        "lesions": [l.id for l in args.lesion],
    }
    if args.out:
        Path(args.out).write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")
    print("null" if divergence.first_divergence_tick is None else divergence.first_divergence_tick)
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "run":
        return _cmd_run(args)
    if args.command == "validate":
        return _cmd_validate(args)
    if args.command == "inspect":
        return _cmd_inspect(args)
    return _cmd_lesion_compare(args)


if __name__ == "__main__":
    sys.exit(main())
