#!/usr/bin/env python3
"""Knock out each agent of the calcium cascade in turn and compare traces.

Usage: python3 scripts/lesion_sweep.py [--ticks N] [--seed S]
"""

import argparse

from cellulat.lesions import run_paired
from cellulat.model import Lesion
from cellulat.scenarios import ca2plus_scenario


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--ticks", type=int, default=60)
    parser.add_argument("--seed", type=int, default=7)
    args = parser.parse_args()

    model = ca2plus_scenario().model()
    print(f"{'knockout':>10}  {'diverges@':>9}  most affected species (max |delta|)")
    for agent in model.agents:
        lesion = Lesion(id=f"ko-{agent.id}", kind="knockout", at_tick=0, agent=agent.id)
        paired = run_paired(model, None, [lesion], args.ticks, seed=args.seed)
        divergence = paired.divergence
        worst = sorted(
            ((d, s) for s, d in divergence.species_max_delta.items() if d > 0.0), reverse=True
        )
        summary = ", ".join(f"{s}={d:g}" for d, s in worst[:3]) or "none"
        tick = divergence.first_divergence_tick
        print(f"{agent.id:>10}  {('-' if tick is None else tick)!s:>9}  {summary}")


if __name__ == "__main__":
    main()
