"""Policies against the mean number of candidate SeVs (2 to 11).

Writes results/density_sweep/ (summary.csv is the plot-ready table, timing.csv
holds policy runtimes).  Extra arguments go to the CLI, e.g. --seeds 0,1.
"""

import sys

from _common import run_and_show

if __name__ == "__main__":
    sys.exit(run_and_show("density_sweep.yaml", "density_sweep", sys.argv[1:]))
