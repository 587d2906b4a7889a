"""Field guidance versus path tracking on the same scene.

Compares the two planners at increasing delays (median max error over ten
seeds) and at zero delay by steering smoothness (total curvature change).
"""

import dataclasses
import pathlib

from hpfnav import analysis, netloop
from hpfnav.workspace import load_scenario

DELAYS = [0.0, 0.3, 0.6, 0.9, 1.2]


def main():
    sc = load_scenario(pathlib.Path(__file__).parents[1] / "scenarios" / "comparison.json")
    result = analysis.sweep(sc, DELAYS, range(10), planners=("hpf", "fm"))

    print("%6s  %12s  %12s" % ("delay", "field (hpf)", "path (fm)"))
    for d in DELAYS:
        print("%5.1fs  %11.4fm  %11.4fm"
              % (d, result.median_max_err("hpf", d), result.median_max_err("fm", d)))

    for planner in ("hpf", "fm"):
        run_sc = dataclasses.replace(sc, planner=planner)
        log = netloop.run_loop(run_sc)
        tv = analysis.curvature(log).total_variation()
        print("%s zero-delay: %s in %.1fs, total |curvature change| %.1f"
              % (planner, log.outcome, log.total_time, tv))


if __name__ == "__main__":
    main()
