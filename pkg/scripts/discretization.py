"""LTRA(2) delay and runtime against the grid resolution l.

Writes results/discretization/ (summary.csv is the plot-ready table, timing.csv
holds policy runtimes).  Extra arguments go to the CLI, e.g. --seeds 0,1.
"""

import sys

from _common import run_and_show

if __name__ == "__main__":
    sys.exit(run_and_show("discretization_sweep.yaml", "discretization", sys.argv[1:]))
