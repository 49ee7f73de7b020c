"""LTRA(2) regret on the 8-arm static instance against the theoretical bound.

Writes results/regret_curve/regret.csv with one row per round.
"""

import sys

from _common import run_and_show

if __name__ == "__main__":
    sys.exit(run_and_show("regret_8arm.yaml", "regret_curve", sys.argv[1:], command="regret"))
