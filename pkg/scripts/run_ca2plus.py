#!/usr/bin/env python3
"""Run the bundled calcium cascade and print per-tick quantities.

Usage: python3 scripts/run_ca2plus.py [--ticks N] [--seed S]
"""

import argparse

from cellulat.model import Locus
from cellulat.scenarios import ca2plus_scenario
from cellulat.scheduler import SimState, run

WATCHED = [
    ("PIP2", Locus("membrane", "gpcr_patch")),
    ("IP3", Locus("cytosol", "gpcr_patch")),
    ("DAG", Locus("membrane", "gpcr_patch")),
    ("Ca2plus", Locus("cytosol", "gpcr_patch")),
    ("ER_Ca_store", Locus("endoplasmic_reticulum", "gpcr_patch")),
    ("PKC_active", Locus("cytosol", "gpcr_patch")),
]


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--ticks", type=int, default=20)
    parser.add_argument("--seed", type=int, default=7)
    args = parser.parse_args()

    scenario = ca2plus_scenario()
    sim = SimState(scenario.model(), seed=args.seed)

    header = ["tick"] + [name for name, _ in WATCHED] + ["fired"]
    print("  ".join(f"{h:>12}" for h in header))
    for _ in range(args.ticks):
        report = run(sim, 1)[0]
        fired = ",".join(f.agent for f in report.firings if f.fired) or "-"
        cells = [f"{report.tick:>12}"]
        for name, locus in WATCHED:
            cells.append(f"{sim.board.read(name, locus):>12.1f}")
        cells.append(f"  {fired}")
        print("  ".join(cells))

    print()
    total = {}
    for tick, emission in sim.emission_log:
        total[emission.ligand] = total.get(emission.ligand, 0.0) + emission.amount
    print(f"external emissions: {total or 'none'}")


if __name__ == "__main__":
    main()
