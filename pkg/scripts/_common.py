"""Shared helper: run one config through the CLI and print its summary table."""

import csv
import sys
from pathlib import Path

from replica_bandit.cli import main

ROOT = Path(__file__).resolve().parent.parent


def run_and_show(config_name: str, out_name: str, extra: list[str] | None = None, command: str = "run") -> int:
    out = ROOT / "results" / out_name
    code = main([command, "--config", str(ROOT / "configs" / config_name), "--out", str(out), *(extra or [])])
    if code != 0:
        return code
    table = out / ("summary.csv" if command == "run" else "regret.csv")
    with open(table, newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    if command == "regret":
        rows = [r for r in rows if int(r["t"]) in (1, 10, 100, 1000, 10_000) or r is rows[-1]]
    cols = list(rows[0])
    print("  ".join(cols))
    for r in rows:
        print("  ".join(_short(r[c]) for c in cols))
    return 0


def _short(v: str) -> str:
    try:
        f = float(v)
    except ValueError:
        return v
    return v if f.is_integer() and "." not in v else f"{f:.4g}"


if __name__ == "__main__":
    sys.exit(run_and_show(sys.argv[1], sys.argv[2]))
