"""Experiment runner: ``replica-bandit run | synth-trace | regret``.

Configs are YAML (JSON works too, and so does a ``manifest.json`` written by
an earlier run).  Sections, all optional except where noted::

    scenario:
      kind: synth | trace | static
      synth: {ScenarioConfig fields}
      trace: path/to/trace.csv          # kind: trace, relative to the config
      static:                           # kind: static
        arms: [[w1, ..., wl], ...]      # per-arm delay pmf weights on the grid
        d_max: 1.0
        replica_count: 2
        horizon: 10000
    task: {TaskSpec fields}
    channel: {ChannelParams fields, or path_gain_ref_db}
    sim: {SimConfig fields: deadline_s, beta, level_count, ...}
    policies: [ltra2, single, random, genie]
    seeds: [0, 1, 2]
    sweep: {axis: none | sev_density | tav_sev_ratio | discretization_level | replica_count,
            values: [...]}

Outputs of ``run`` (every CSV has a header, floats are written with ``repr``):

``metrics.csv``
    axis, value, policy, seed, average_delay_s, completion_ratio, n_tasks,
    n_skipped, mean_candidates.  One row per sweep point x seed x policy.
``summary.csv``
    axis, value, policy, n_seeds, then mean and standard error of the
    average delay and completion ratio, and mean candidate count.
``timing.csv``
    axis, value, policy, seed, policy_seconds (policy CPU time).  Timing, so not
    reproducible; kept apart from the deterministic files.
``rounds.csv`` (``--emit-rounds``)
    axis, value, policy, seed, round, tav_id, n_candidates, chosen
    (``;``-joined), offloading_delay_s, deadline_met, skipped.
``regret.csv`` (static scenarios)
    axis, value, policy, t, mean_regret, stderr, bound.
``manifest.json``
    resolved config, seeds, package version and output hashes.

``regret`` writes ``regret.csv`` with columns t, mean_regret, stderr, bound for
LTRA at the instance's K.  ``synth-trace`` writes a trace CSV.

``REPLICA_BANDIT_THREADS`` caps the number of worker processes.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import hashlib
import json
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Any, Sequence

import numpy as np
import yaml

from . import __version__
from .bandit_core import DiscreteCdf
from .delay_model import ChannelParams, TaskSpec, db_to_linear
from .mobility import (
    ScenarioConfig,
    TraceFormatError,
    expected_candidate_count,
    load_trace,
    mean_candidate_count,
    save_trace,
    sev_rate_for_candidates,
    synth_highway,
)
from .oracle import StaticInstance, pseudo_regret, regret_bound, gaps
from .simulator import PolicySpec, SimConfig, compute_metrics, run_episode, run_static_episode

EXIT_OK, EXIT_RUNTIME, EXIT_CONFIG = 0, 1, 2
SWEEP_AXES = ("none", "sev_density", "tav_sev_ratio", "discretization_level", "replica_count")
SCENARIO_KINDS = ("synth", "trace", "static")
THREADS_ENV = "REPLICA_BANDIT_THREADS"


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class StaticSpec:
    arms: tuple[tuple[float, ...], ...]
    d_max: float = 1.0
    replica_count: int = 2
    horizon: int = 10_000

    def __post_init__(self):
        if not self.arms:
            raise ConfigError("static.arms must list at least one arm")
        if len({len(a) for a in self.arms}) != 1:
            raise ConfigError("static.arms must share one grid length")
        if not 1 <= self.replica_count <= len(self.arms):
            raise ConfigError("static.replica_count must be within 1..number of arms")
        if self.horizon < 1:
            raise ConfigError("static.horizon must be >= 1")

    def instance(self, replica_count: int | None = None) -> StaticInstance:
        k = self.replica_count if replica_count is None else replica_count
        return StaticInstance(tuple(DiscreteCdf.from_pmf(a) for a in self.arms), self.d_max, k)


@dataclass(frozen=True)
class SweepSpec:
    axis: str = "none"
    values: tuple = ()

    def __post_init__(self):
        if self.axis not in SWEEP_AXES:
            raise ConfigError(f"sweep.axis must be one of {', '.join(SWEEP_AXES)}; got {self.axis!r}")
        if self.axis == "none" and self.values:
            raise ConfigError("sweep.values must be empty when sweep.axis is none")
        if self.axis != "none" and not self.values:
            raise ConfigError(f"sweep.values is empty for axis {self.axis}")

    def points(self) -> list:
        return [""] if self.axis == "none" else list(self.values)


@dataclass(frozen=True)
class ExperimentConfig:
    scenario_kind: str = "synth"
    synth: ScenarioConfig = field(default_factory=ScenarioConfig)
    trace_path: str | None = None
    static: StaticSpec | None = None
    task: TaskSpec = field(default_factory=TaskSpec)
    channel: ChannelParams = field(default_factory=ChannelParams)
    sim: SimConfig = field(default_factory=SimConfig)
    policies: tuple[str, ...] = ("ltra2", "single", "random", "genie")
    seeds: tuple[int, ...] = (0,)
    sweep: SweepSpec = field(default_factory=SweepSpec)

    def __post_init__(self):
        if self.scenario_kind not in SCENARIO_KINDS:
            raise ConfigError(f"scenario.kind must be one of {', '.join(SCENARIO_KINDS)}")
        if self.scenario_kind == "trace":
            if not self.trace_path:
                raise ConfigError("scenario.trace is required for kind: trace")
            if not Path(self.trace_path).is_file():
                raise ConfigError(f"trace file not found: {self.trace_path}")
        if self.scenario_kind == "static" and self.static is None:
            raise ConfigError("scenario.static is required for kind: static")
        if self.scenario_kind != "synth" and self.sweep.axis in ("sev_density", "tav_sev_ratio"):
            raise ConfigError(f"sweep axis {self.sweep.axis} needs a synthetic scenario")
        if self.scenario_kind == "static" and self.sweep.axis == "discretization_level":
            raise ConfigError("static instances fix their own grid; discretization sweeps need a road scenario")
        if not self.policies:
            raise ConfigError("policies must not be empty")
        if not self.seeds:
            raise ConfigError("seeds must not be empty")
        try:
            self.policy_specs()
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    def policy_specs(self, replica_count: int | None = None) -> list[PolicySpec]:
        out = []
        for text in self.policies:
            spec = PolicySpec.parse(text)
            if replica_count is not None and spec.kind == "ltra":
                spec = PolicySpec("ltra", int(replica_count))
            if spec not in out:
                out.append(spec)
        return out

    def to_dict(self) -> dict:
        scenario: dict[str, Any] = {"kind": self.scenario_kind, "synth": _plain(self.synth)}
        if self.trace_path:
            scenario["trace"] = self.trace_path
        if self.static is not None:
            scenario["static"] = _plain(self.static)
        return {
            "scenario": scenario,
            "task": _plain(self.task),
            "channel": _plain(self.channel),
            "sim": _plain(self.sim),
            "policies": list(self.policies),
            "seeds": list(self.seeds),
            "sweep": _plain(self.sweep),
        }

    @classmethod
    def from_dict(cls, doc: dict, base_dir: str | Path = ".") -> "ExperimentConfig":
        if not isinstance(doc, dict):
            raise ConfigError("config must be a mapping")
        if "config" in doc and "version" in doc:
            doc = doc["config"]  # a manifest from an earlier run
        _check_keys(doc, {"scenario", "task", "channel", "sim", "policies", "seeds", "sweep"}, "top level")
        scen = doc.get("scenario") or {}
        _check_keys(scen, {"kind", "synth", "trace", "static"}, "scenario")
        trace = scen.get("trace")
        if trace is not None:
            trace = str(Path(base_dir, trace)) if not Path(trace).is_absolute() else str(trace)
        static = None
        if scen.get("static") is not None:
            st = dict(scen["static"])
            if "arms" in st:
                st["arms"] = tuple(tuple(float(w) for w in a) for a in st["arms"])
            static = _build(StaticSpec, st, "scenario.static")
        channel = dict(doc.get("channel") or {})
        if "path_gain_ref_db" in channel:
            if "path_gain_ref" in channel:
                raise ConfigError("channel: give path_gain_ref or path_gain_ref_db, not both")
            channel["path_gain_ref"] = db_to_linear(float(channel.pop("path_gain_ref_db")))
        sweep = dict(doc.get("sweep") or {})
        if "values" in sweep:
            sweep["values"] = tuple(sweep["values"] or ())
        policies = doc.get("policies", cls.policies)
        seeds = doc.get("seeds", cls.seeds)
        if isinstance(policies, str) or isinstance(seeds, (str, int)):
            raise ConfigError("policies and seeds must be lists")
        try:
            seeds = tuple(int(s) for s in seeds)
        except (TypeError, ValueError):
            raise ConfigError("seeds must be integers") from None
        return _build(
            cls,
            dict(
                scenario_kind=scen.get("kind", "synth"),
                synth=_build(ScenarioConfig, scen.get("synth") or {}, "scenario.synth"),
                trace_path=trace,
                static=static,
                task=_build(TaskSpec, doc.get("task") or {}, "task"),
                channel=_build(ChannelParams, channel, "channel"),
                sim=_build(SimConfig, doc.get("sim") or {}, "sim"),
                policies=tuple(str(p) for p in policies),
                seeds=seeds,
                sweep=_build(SweepSpec, sweep, "sweep"),
            ),
            "config",
        )


def _check_keys(section, allowed: set, name: str) -> None:
    if not isinstance(section, dict):
        raise ConfigError(f"{name} must be a mapping")
    extra = sorted(set(section) - allowed)
    if extra:
        raise ConfigError(f"{name}: unknown keys {extra}")


def _build(cls, section: dict, name: str):
    fields = {f.name: str(f.type) for f in dataclasses.fields(cls)}
    _check_keys(section, set(fields), name)
    kwargs = {}
    for k, v in section.items():
        if isinstance(v, list):
            v = tuple(v)
        elif isinstance(v, str) and fields[k].startswith("float"):
            # YAML 1.1 reads 1.0e6 (no exponent sign) as a string
            try:
                v = float(v)
            except ValueError:
                raise ConfigError(f"{name}.{k}: expected a number, got {v!r}") from None
        kwargs[k] = v
    try:
        return cls(**kwargs)
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{name}: {exc}") from None


def _plain(obj) -> Any:
    if dataclasses.is_dataclass(obj):
        return {f.name: _plain(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, (tuple, list)):
        return [_plain(v) for v in obj]
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    return obj


def load_config(path: str | Path) -> ExperimentConfig:
    p = Path(path)
    try:
        with open(p, encoding="utf-8") as fh:
            doc = yaml.safe_load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {p}: {exc}") from None
    except yaml.YAMLError as exc:
        raise ConfigError(f"config {p} is not valid YAML: {exc}") from None
    return ExperimentConfig.from_dict(doc or {}, p.parent)


def parse_seeds(text: str) -> tuple[int, ...]:
    try:
        seeds = tuple(int(s) for s in text.split(",") if s.strip())
    except ValueError:
        raise ConfigError(f"--seeds must be comma-separated integers, got {text!r}") from None
    if not seeds:
        raise ConfigError("--seeds is empty")
    return seeds


# sweep points


@dataclass(frozen=True)
class Point:
    value: Any
    synth: ScenarioConfig
    sim: SimConfig
    specs: tuple[PolicySpec, ...]
    replica_count: int | None


def sweep_points(cfg: ExperimentConfig) -> list[Point]:
    out = []
    axis = cfg.sweep.axis
    for v in cfg.sweep.points():
        synth, sim, k = cfg.synth, cfg.sim, None
        try:
            if axis == "sev_density":
                synth = dataclasses.replace(synth, sev_arrival_rate_hz=sev_rate_for_candidates(float(v), synth))
            elif axis == "tav_sev_ratio":
                synth = dataclasses.replace(synth, tav_arrival_rate_hz=float(v) * synth.sev_arrival_rate_hz)
            elif axis == "discretization_level":
                sim = dataclasses.replace(sim, level_count=int(v))
            elif axis == "replica_count":
                k = int(v)
                if k < 1 or (cfg.static is not None and k > len(cfg.static.arms)):
                    raise ValueError(f"replica_count {k} out of range")
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"sweep value {v!r}: {exc}") from None
        out.append(Point(v, synth, sim, tuple(cfg.policy_specs(k)), k))
    return out


@lru_cache(maxsize=4)
def _cached_trace(path: str):
    return load_trace(path)


@dataclass
class CellResult:
    point_index: int
    seed: int
    metrics: list[dict]
    timing: list[dict]
    rounds: list[dict]
    chosen: dict[str, list[tuple]]


def run_cell(cfg: ExperimentConfig, point_index: int, seed: int, emit_rounds: bool = False) -> CellResult:
    """All policies of one sweep point on one seed; they share the seed's randomness."""
    point = sweep_points(cfg)[point_index]
    base = {"axis": cfg.sweep.axis, "value": point.value}
    metrics, timing, rounds, chosen = [], [], [], {}
    if cfg.scenario_kind == "static":
        inst = cfg.static.instance(point.replica_count)
        runs = []
        for spec in point.specs:
            tick = time.perf_counter()
            recs = run_static_episode(
                inst, spec, cfg.static.horizon, seed, point.sim.beta, point.sim.deadline_s, point.sim.exhaustive_limit
            )
            runs.append((spec, recs, time.perf_counter() - tick, float(inst.n_arms)))
            chosen[spec.label] = [r.chosen for r in recs]
    else:
        if cfg.scenario_kind == "trace":
            timeline = _cached_trace(cfg.trace_path)
        else:
            timeline = synth_highway(dataclasses.replace(point.synth, rng_seed=seed))
        task = cfg.task
        runs = []
        for spec in point.specs:
            res = run_episode(timeline, spec, task, cfg.channel, point.sim, seed)
            recs = res.all_records()
            cands = float(np.mean([len(r.candidates) for r in recs])) if recs else math.nan
            runs.append((spec, recs, res.policy_seconds, cands))
    for spec, recs, seconds, cands in runs:
        m = compute_metrics(recs, point.sim.deadline_s)
        row = dict(base, policy=spec.label, seed=seed)
        metrics.append(
            dict(
                row,
                average_delay_s=m.average_offloading_delay_s,
                completion_ratio=m.completion_ratio,
                n_tasks=m.n_tasks,
                n_skipped=m.n_skipped,
                mean_candidates=cands,
            )
        )
        timing.append(dict(row, policy_seconds=seconds))
        if emit_rounds:
            for r in recs:
                rounds.append(
                    dict(
                        row,
                        round=r.round,
                        tav_id=r.tav_id,
                        n_candidates=len(r.candidates),
                        chosen=";".join(str(c) for c in r.chosen),
                        offloading_delay_s=r.offloading_delay,
                        deadline_met=int(r.deadline_met),
                        skipped=int(r.skipped),
                    )
                )
    return CellResult(point_index, seed, metrics, timing, rounds, chosen)


def worker_count(n_jobs: int) -> int:
    raw = os.environ.get(THREADS_ENV)
    cap = os.cpu_count() or 1
    if raw:
        try:
            cap = int(raw)
        except ValueError:
            raise ConfigError(f"{THREADS_ENV} must be an integer, got {raw!r}") from None
        if cap < 1:
            raise ConfigError(f"{THREADS_ENV} must be >= 1")
    return max(1, min(cap, n_jobs))


def run_cells(cfg: ExperimentConfig, emit_rounds: bool = False) -> list[CellResult]:
    jobs = [(i, s) for i in range(len(sweep_points(cfg))) for s in cfg.seeds]
    workers = worker_count(len(jobs))
    if workers == 1:
        return [run_cell(cfg, i, s, emit_rounds) for i, s in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(run_cell, cfg, i, s, emit_rounds) for i, s in jobs]
        return [f.result() for f in futures]


# output


def _fmt(v) -> str:
    if isinstance(v, bool):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def write_csv(path: Path, header: Sequence[str], rows: Sequence[dict]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(row[h]) for h in header])


def _mean_stderr(xs: Sequence[float]) -> tuple[float, float]:
    a = np.asarray(xs, dtype=float)
    if len(a) < 2:
        return float(a.mean()), math.nan
    return float(a.mean()), float(a.std(ddof=1) / math.sqrt(len(a)))


def summarize(metrics: Sequence[dict]) -> list[dict]:
    groups: dict[tuple, list[dict]] = {}
    for row in metrics:
        groups.setdefault((row["axis"], str(row["value"]), row["policy"]), []).append(row)
    out = []
    for (axis, _, policy), rows in groups.items():
        d_mean, d_err = _mean_stderr([r["average_delay_s"] for r in rows])
        c_mean, c_err = _mean_stderr([r["completion_ratio"] for r in rows])
        out.append(
            dict(
                axis=axis,
                value=rows[0]["value"],
                policy=policy,
                n_seeds=len(rows),
                average_delay_mean=d_mean,
                average_delay_stderr=d_err,
                completion_ratio_mean=c_mean,
                completion_ratio_stderr=c_err,
                mean_candidates=float(np.mean([r["mean_candidates"] for r in rows])),
            )
        )
    return out


METRIC_COLS = ("axis", "value", "policy", "seed", "average_delay_s", "completion_ratio", "n_tasks", "n_skipped", "mean_candidates")
SUMMARY_COLS = (
    "axis", "value", "policy", "n_seeds", "average_delay_mean", "average_delay_stderr",
    "completion_ratio_mean", "completion_ratio_stderr", "mean_candidates",
)
TIMING_COLS = ("axis", "value", "policy", "seed", "policy_seconds")
ROUND_COLS = (
    "axis", "value", "policy", "seed", "round", "tav_id", "n_candidates", "chosen",
    "offloading_delay_s", "deadline_met", "skipped",
)
REGRET_COLS = ("t", "mean_regret", "stderr", "bound")


def regret_rows(instance: StaticInstance, chosen_by_seed: Sequence[Sequence[tuple]]) -> list[dict]:
    reps = [[_Chosen(c) for c in seq] for seq in chosen_by_seed]
    mean, stderr = pseudo_regret(instance, reps)
    deltas = list(gaps(instance).values())
    return [
        dict(
            t=t,
            mean_regret=float(mean[t - 1]),
            stderr=float(stderr[t - 1]),
            bound=regret_bound(deltas, t, instance.replica_count, instance.n_arms, instance.d_max),
        )
        for t in range(1, len(mean) + 1)
    ]


@dataclass(frozen=True)
class _Chosen:
    chosen: tuple


def write_manifest(out: Path, command: str, cfg: ExperimentConfig, files: Sequence[str]) -> None:
    hashes = {}
    for name in files:
        hashes[name] = hashlib.sha256((out / name).read_bytes()).hexdigest()
    doc = {
        "tool": "replica_bandit",
        "version": __version__,
        "command": command,
        "config": cfg.to_dict(),
        "sha256": hashes,
    }
    (out / "manifest.json").write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def cmd_run(cfg: ExperimentConfig, out: Path, emit_rounds: bool) -> list[str]:
    results = run_cells(cfg, emit_rounds)
    metrics = [row for r in results for row in r.metrics]
    out.mkdir(parents=True, exist_ok=True)
    write_csv(out / "metrics.csv", METRIC_COLS, metrics)
    write_csv(out / "summary.csv", SUMMARY_COLS, summarize(metrics))
    write_csv(out / "timing.csv", TIMING_COLS, [row for r in results for row in r.timing])
    files = ["metrics.csv", "summary.csv"]
    if emit_rounds:
        write_csv(out / "rounds.csv", ROUND_COLS, [row for r in results for row in r.rounds])
        files.append("rounds.csv")
    if cfg.scenario_kind == "static":
        rows = []
        points = sweep_points(cfg)
        for i, point in enumerate(points):
            inst = cfg.static.instance(point.replica_count)
            for spec in point.specs:
                seqs = [r.chosen[spec.label] for r in results if r.point_index == i]
                for row in regret_rows(inst, seqs):
                    rows.append(dict(row, axis=cfg.sweep.axis, value=point.value, policy=spec.label))
        write_csv(out / "regret.csv", ("axis", "value", "policy") + REGRET_COLS, rows)
        files.append("regret.csv")
    write_manifest(out, "run", cfg, files)
    return files


def cmd_regret(cfg: ExperimentConfig, out: Path) -> None:
    if cfg.scenario_kind != "static":
        raise ConfigError(
            "regret needs a static instance (scenario.kind: static); the bound assumes a fixed arm set "
            "with i.i.d. delays, which a road scenario does not provide"
        )
    if cfg.sweep.axis != "none":
        raise ConfigError("regret runs a single instance; set sweep.axis to none")
    inst = cfg.static.instance()
    spec = PolicySpec("ltra", inst.replica_count)
    cfg = dataclasses.replace(cfg, policies=(spec.label,))
    seqs = []
    for seed in cfg.seeds:
        recs = run_static_episode(
            inst, spec, cfg.static.horizon, seed, cfg.sim.beta, cfg.sim.deadline_s, cfg.sim.exhaustive_limit
        )
        seqs.append([r.chosen for r in recs])
    out.mkdir(parents=True, exist_ok=True)
    write_csv(out / "regret.csv", REGRET_COLS, regret_rows(inst, seqs))
    write_manifest(out, "regret", cfg, ["regret.csv"])


def cmd_synth_trace(cfg: ExperimentConfig, out: Path) -> Path:
    if cfg.scenario_kind != "synth":
        raise ConfigError("synth-trace needs scenario.kind: synth")
    path = out / "trace.csv" if out.is_dir() or out.suffix == "" else out
    path.parent.mkdir(parents=True, exist_ok=True)
    scen = dataclasses.replace(cfg.synth, rng_seed=cfg.seeds[0])
    timeline = synth_highway(scen)
    save_trace(timeline, path)
    measured = mean_candidate_count(timeline, scen.comm_range_m)
    print(
        f"wrote {path}: {scen.total_rounds} rounds, mean candidates {measured:.2f} "
        f"(flow formula {expected_candidate_count(scen):.2f})"
    )
    return path


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="replica-bandit", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("run", "run every sweep point x seed x policy cell"),
        ("synth-trace", "write a synthetic highway trace"),
        ("regret", "regret curve of LTRA on a static instance"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="YAML config path")
        p.add_argument("--out", required=True, help="output directory (synth-trace: file or directory)")
        p.add_argument("--seeds", help="comma-separated seeds, overriding the config")
        if name == "run":
            p.add_argument("--emit-rounds", action="store_true", help="also write rounds.csv")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        if args.seeds:
            cfg = dataclasses.replace(cfg, seeds=parse_seeds(args.seeds))
        if cfg.scenario_kind == "trace":
            _cached_trace(cfg.trace_path)
    except (ConfigError, TraceFormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    out = Path(args.out)
    try:
        if args.command == "run":
            worker_count(1)
            files = cmd_run(cfg, out, args.emit_rounds)
            print(f"wrote {', '.join(files)} to {out}")
        elif args.command == "regret":
            cmd_regret(cfg, out)
            print(f"wrote regret.csv to {out}")
        else:
            cmd_synth_trace(cfg, out)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # noqa: BLE001 - report and exit non-zero
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
