"""Dense trace rows over a run: one row per (tick, locus, species).

A row is emitted for every currently nonzero entry plus every entry that
was ever nonzero before (so each time series is gap-free after its first
appearance).  Rows sort by (tick, level rank, region, species) which makes
CSV output byte-deterministic.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass

from .blackboard import BlackboardState
from .model import Locus, ModelDef


@dataclass(frozen=True)
class TraceRow:
    tick: int
    level: str
    region: str
    species: str
    quantity: float


class TraceCollector:
    """Accumulates dense rows tick by tick for one simulation."""

    def __init__(self, model: ModelDef):
        self._ranks = {l.name: l.rank for l in model.levels}
        self.ever_nonzero: set[tuple[str, Locus]] = set()
        self.rows: list[TraceRow] = []

    def _sort_key(self, row: TraceRow):
        return (row.tick, self._ranks.get(row.level, 0), row.region, row.species)

    def collect(self, board: BlackboardState, tick: int) -> list[TraceRow]:
        """Rows for the board's current state, labeled with the given tick."""
        current = {(sp, loc): q for sp, loc, q in board.nonzero_items()}
        self.ever_nonzero.update(current)
        rows = [
            TraceRow(tick, loc.level, loc.region, sp, current.get((sp, loc), 0.0))
            for sp, loc in self.ever_nonzero
        ]
        rows.sort(key=self._sort_key)
        self.rows.extend(rows)
        return rows


def write_csv(rows, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["tick", "level", "region", "species", "quantity"])
        for row in rows:
            writer.writerow([row.tick, row.level, row.region, row.species, repr(row.quantity)])


def write_jsonl(rows, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(json.dumps(row_to_json(row)) + "\n")


def row_to_json(row: TraceRow) -> dict:
    return {
        "tick": row.tick,
        "level": row.level,
        "region": row.region,
        "species": row.species,
        "quantity": row.quantity,
    }
