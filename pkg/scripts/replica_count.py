"""Average delay and completion ratio against the LTRA replica count K.

Writes results/replica_count/ (summary.csv is the plot-ready table, timing.csv
holds policy runtimes).  Extra arguments go to the CLI, e.g. --seeds 0,1.
"""

import sys

from _common import run_and_show

if __name__ == "__main__":
    sys.exit(run_and_show("replica_sweep.yaml", "replica_count", sys.argv[1:]))
