"""Sweep round-trip delay and print how tracking error grows with it."""

import pathlib

from hpfnav import analysis
from hpfnav.workspace import load_scenario

DELAYS = [0.0, 0.1, 0.3, 0.6, 0.9, 1.2]
SEEDS = range(10)


def main():
    sc = load_scenario(pathlib.Path(__file__).parents[1] / "scenarios" / "comparison.json")
    result = analysis.sweep(sc, DELAYS, SEEDS)

    print("%6s  %10s  %8s" % ("delay", "median max", "reached"))
    for d in DELAYS:
        rows = result.select("hpf", d)
        reached = sum(r.outcome == "reached" for r in rows)
        print("%5.1fs  %9.4fm  %5d/%d" % (d, result.median_max_err("hpf", d), reached, len(rows)))

    out = pathlib.Path(__file__).parent / "out"
    out.mkdir(exist_ok=True)
    result.to_csv(out / "sweep.csv")
    print("wrote %s" % (out / "sweep.csv"))


if __name__ == "__main__":
    main()
