"""Policies against the TaV/SeV arrival-rate ratio (contention).

Writes results/tav_ratio/ (summary.csv is the plot-ready table, timing.csv
holds policy runtimes).  Extra arguments go to the CLI, e.g. --seeds 0,1.
"""

import sys

from _common import run_and_show

if __name__ == "__main__":
    sys.exit(run_and_show("tav_ratio_sweep.yaml", "tav_ratio", sys.argv[1:]))
