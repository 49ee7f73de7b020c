"""All four policies on the default highway.

Writes results/highway_default/ (summary.csv is the plot-ready table, timing.csv
holds policy runtimes).  Extra arguments go to the CLI, e.g. --seeds 0,1.
"""

import sys

from _common import run_and_show

if __name__ == "__main__":
    sys.exit(run_and_show("highway_default.yaml", "highway_default", sys.argv[1:]))
