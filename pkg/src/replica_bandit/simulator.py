"""Discrete-time offloading episodes over a vehicle timeline or a static instance.

Each round every task vehicle with a policy generates one task, uploads a
replica to each chosen service vehicle and waits for all of them.  Replicas
from all task vehicles meet in per-SeV FCFS queues that persist across
rounds.  The task's delay is the fastest replica; every replica's delay
(truncated at ``d_max``) is fed back to the policy.
"""

from __future__ import annotations

import bisect
import logging
import math
import time
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .bandit_core import LTRA, NoCandidateError, PolicyConfig
from .delay_model import (
    Arrival,
    ChannelParams,
    TaskSpec,
    fcfs_serve,
    link_rate,
    path_gain,
    transmit_delay,
)
from .mobility import Direction, Role, Timeline, VehicleSnapshot
from .oracle import StaticInstance

log = logging.getLogger(__name__)

POLICY_KINDS = ("ltra", "single", "random", "genie")


class SimulationConfigError(ValueError):
    pass


@dataclass(frozen=True)
class PolicySpec:
    """``ltra`` (K replicas), ``single`` (LTRA with K=1), ``random`` or ``genie``."""

    kind: str
    replica_count: int = 1

    def __post_init__(self):
        if self.kind not in POLICY_KINDS:
            raise SimulationConfigError(f"unknown policy kind {self.kind!r}")
        if self.kind == "ltra":
            if self.replica_count < 1:
                raise SimulationConfigError("ltra needs replica_count >= 1")
        elif self.replica_count != 1:
            raise SimulationConfigError(f"{self.kind} always uses a single replica")

    @property
    def label(self) -> str:
        return f"ltra{self.replica_count}" if self.kind == "ltra" else self.kind

    @classmethod
    def parse(cls, text: str) -> "PolicySpec":
        """``ltra2`` / ``ltra:2`` / ``single`` / ``random`` / ``genie``."""
        t = text.strip().lower()
        if t.startswith("ltra"):
            rest = t[4:].lstrip(":")
            return cls("ltra", int(rest) if rest else 2)
        return cls(t)


@dataclass(frozen=True)
class SimConfig:
    deadline_s: float = 0.6
    beta: float = 0.6
    level_count: int = 50
    exhaustive_limit: int = 1000
    sev_min_freq_hz: float = 2e9
    sev_max_freq_hz: float = 8e9
    alloc_fraction_max: float = 0.6
    comm_range_m: float = 300.0
    round_duration_s: float = 1.0
    # Drop queued work once its task has passed d_max.
    abandon_at_d_max: bool = True
    # False allocates the full alloc_fraction_max share every round.
    random_share: bool = True
    # Fixed max CPU frequency per SeV id; others draw from the range.
    sev_capacity_hz: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self):
        if not 0 < self.sev_min_freq_hz <= self.sev_max_freq_hz:
            raise SimulationConfigError("need 0 < sev_min_freq_hz <= sev_max_freq_hz")
        if not 0 < self.alloc_fraction_max <= 1:
            raise SimulationConfigError("alloc_fraction_max must be in (0, 1]")
        if not self.round_duration_s > 0 or not self.comm_range_m > 0:
            raise SimulationConfigError("round_duration_s and comm_range_m must be positive")

    def policy_config(self, replica_count: int, d_max: float) -> PolicyConfig:
        return PolicyConfig(replica_count, self.beta, self.level_count, d_max, self.exhaustive_limit)


@dataclass(frozen=True)
class RoundRecord:
    round: int
    tav_id: str
    candidates: tuple[tuple[str, float], ...]
    chosen: tuple
    per_arm_delay: Mapping
    offloading_delay: float
    deadline_met: bool
    skipped: bool = False
    per_arm_wait: Mapping = field(default_factory=dict)


@dataclass
class EpisodeMetrics:
    average_offloading_delay_s: float
    completion_ratio: float
    n_tasks: int
    n_skipped: int
    delay_series: np.ndarray
    regret_series: np.ndarray | None = None


@dataclass
class EpisodeResult:
    records: dict[str, list[RoundRecord]]
    policy_seconds: float = 0.0

    def all_records(self) -> list[RoundRecord]:
        out = [r for recs in self.records.values() for r in recs]
        out.sort(key=lambda r: (r.round, r.tav_id))
        return out


def genie_choice(realized: Mapping) -> object:
    if not realized:
        raise NoCandidateError("genie needs at least one candidate")
    best = min(realized.values())
    return min(a for a, d in realized.items() if d == best)


def random_choice(candidates: Sequence, rng: np.random.Generator) -> object:
    if len(candidates) == 0:
        raise NoCandidateError("random policy needs at least one candidate")
    return candidates[int(rng.integers(len(candidates)))]


class _LtraPolicy:
    needs_realized = False

    def __init__(self, config: PolicyConfig):
        self.ltra = LTRA(config)

    def choose(self, candidates, t, realized=None):
        return self.ltra.select(candidates, t).chosen

    def observe(self, delays):
        self.ltra.observe(delays)


class _RandomPolicy:
    needs_realized = False

    def __init__(self, rng):
        self.rng = rng

    def choose(self, candidates, t, realized=None):
        return (random_choice(candidates, self.rng),)

    def observe(self, delays):
        pass


class _GeniePolicy:
    needs_realized = True

    def choose(self, candidates, t, realized=None):
        return (genie_choice(realized),)

    def observe(self, delays):
        pass


def make_policy(spec: PolicySpec, config: SimConfig, d_max: float, rng: np.random.Generator):
    if spec.kind == "ltra":
        return _LtraPolicy(config.policy_config(spec.replica_count, d_max))
    if spec.kind == "single":
        return _LtraPolicy(config.policy_config(1, d_max))
    if spec.kind == "random":
        return _RandomPolicy(rng)
    return _GeniePolicy()


class _CandidateIndex:
    """Per-direction sorted SeV positions for fast range queries.

    Gives the same answer as :func:`mobility.candidate_set`.
    """

    def __init__(self, snaps: Sequence[VehicleSnapshot]):
        self._by_dir = {}
        for direction in Direction:
            sevs = sorted(
                ((s.position_m, s.vehicle_id) for s in snaps if s.role is Role.SEV and s.direction is direction)
            )
            self._by_dir[direction] = ([p for p, _ in sevs], [v for _, v in sevs])

    def query(self, tav: VehicleSnapshot, comm_range_m: float) -> list[tuple[str, float]]:
        pos, ids = self._by_dir[tav.direction]
        lo = bisect.bisect_left(pos, tav.position_m - comm_range_m)
        hi = bisect.bisect_right(pos, tav.position_m + comm_range_m)
        out = []
        for i in range(lo, hi):
            d = abs(pos[i] - tav.position_m)
            if d <= comm_range_m:
                out.append((ids[i], d))
        out.sort()
        return out


def _episode_streams(seed: int) -> tuple[np.random.Generator, np.random.Generator]:
    env, pol = np.random.SeedSequence(seed).spawn(2)
    return np.random.default_rng(env), np.random.default_rng(pol)


def run_episode(
    timeline: Timeline,
    policies: PolicySpec | Mapping[str, PolicySpec],
    task: TaskSpec,
    channel: ChannelParams,
    config: SimConfig,
    rng_seed: int = 0,
) -> EpisodeResult:
    """Simulate every round of ``timeline``.

    ``policies`` is one spec for every TaV, or a per-TaV mapping (TaVs left
    out generate no tasks).  Environment randomness (SeV capacities and the
    per-round CPU shares) comes from its own stream, so two policies run on
    the same seed face the same draws.
    """
    env_rng, pol_rng = _episode_streams(rng_seed)
    if isinstance(policies, PolicySpec):
        default_spec, per_tav = policies, {}
    else:
        default_spec, per_tav = None, dict(policies)
        seen = {s.vehicle_id for snaps in timeline.values() for s in snaps if s.role is Role.TAV}
        missing = sorted(set(per_tav) - seen)
        if missing:
            raise SimulationConfigError(f"policies given for TaVs absent from the timeline: {missing[:5]}")

    d_max = task.d_max
    dt = config.round_duration_s
    cycles = task.cycles
    capacity: dict[str, float] = {}
    busy: dict[str, float] = {}
    agents: dict[str, object] = {}
    records: dict[str, list[RoundRecord]] = {}
    policy_seconds = 0.0
    rate_cache: dict[float, tuple[float, float]] = {}

    def link_delays(distance: float) -> tuple[float, float]:
        hit = rate_cache.get(distance)
        if hit is None:
            h = path_gain(distance, channel.path_gain_ref, channel.min_distance_m)
            up = transmit_delay(task.input_bits, link_rate(channel, h, channel.interference_up_w))
            down = 0.0
            if task.output_bits > 0:
                down = transmit_delay(task.output_bits, link_rate(channel, h, channel.interference_down_w))
            hit = rate_cache[distance] = (up, down)
            if len(rate_cache) > 100_000:
                rate_cache.clear()
        return hit

    for rnd in sorted(timeline):
        snaps = timeline[rnd]
        t = rnd + 1
        t0 = rnd * dt
        sev_ids = [s.vehicle_id for s in snaps if s.role is Role.SEV]
        for vid in sev_ids:
            if vid not in capacity:
                drawn = float(env_rng.uniform(config.sev_min_freq_hz, config.sev_max_freq_hz))
                capacity[vid] = config.sev_capacity_hz.get(vid, drawn)
                busy[vid] = 0.0
        shares = 1.0 - env_rng.random(len(sev_ids))
        if not config.random_share:
            shares[:] = 1.0
        freq = {vid: shares[i] * config.alloc_fraction_max * capacity[vid] for i, vid in enumerate(sev_ids)}

        tavs = [s for s in snaps if s.role is Role.TAV]
        if default_spec is None:
            tavs = [s for s in tavs if s.vehicle_id in per_tav]
        if not tavs:
            continue
        index = _CandidateIndex(snaps)

        pending = []  # (tav_id, candidates, chosen, distances)
        arrivals: dict[str, list[tuple[float, str, float]]] = {}
        for tav in tavs:
            tid = tav.vehicle_id
            cands = index.query(tav, config.comm_range_m)
            if not cands:
                records.setdefault(tid, []).append(
                    RoundRecord(rnd, tid, (), (), {}, math.nan, False, skipped=True)
                )
                continue
            agent = agents.get(tid)
            if agent is None:
                spec = default_spec or per_tav[tid]
                agent = agents[tid] = make_policy(spec, config, d_max, pol_rng)
            dist = dict(cands)
            realized = None
            if agent.needs_realized:
                realized = {}
                for sid, d in cands:
                    up, down = link_delays(d)
                    start = max(t0 + up, busy[sid])
                    realized[sid] = start - t0 + cycles / freq[sid] + down
            tick = time.thread_time()
            chosen = agent.choose([c for c, _ in cands], t, realized)
            policy_seconds += time.thread_time() - tick
            for sid in chosen:
                up, _ = link_delays(dist[sid])
                arrivals.setdefault(sid, []).append((t0 + up, tid, up))
            pending.append((tid, tuple(cands), chosen, agent))

        finished: dict[tuple[str, str], tuple[float, float]] = {}
        for sid, items in arrivals.items():
            items.sort()
            queue = [
                Arrival(tid, cycles, at, t0 + d_max if config.abandon_at_d_max else None)
                for at, tid, _ in items
            ]
            services, busy[sid] = fcfs_serve(queue, freq[sid], busy[sid])
            for (at, tid, _), svc in zip(items, services):
                finished[(tid, sid)] = (svc.completion, svc.start - at)

        for tid, cands, chosen, agent in pending:
            dist = dict(cands)
            per_arm = {}
            waits = {}
            raw = []
            for sid in chosen:
                done, waits[sid] = finished[(tid, sid)]
                delay = done - t0 + link_delays(dist[sid])[1]
                raw.append(delay)
                per_arm[sid] = min(delay, d_max)
            tick = time.thread_time()
            agent.observe(per_arm)
            policy_seconds += time.thread_time() - tick
            best = min(raw)
            records.setdefault(tid, []).append(
                RoundRecord(
                    rnd, tid, cands, tuple(chosen), per_arm, min(best, d_max), best <= config.deadline_s,
                    per_arm_wait=waits,
                )
            )
    return EpisodeResult(records, policy_seconds)


def sample_static_delays(instance: StaticInstance, horizon: int, rng: np.random.Generator) -> np.ndarray:
    """``(horizon, N)`` matrix of i.i.d. grid delays in seconds (inverse-CDF sampling)."""
    l = instance.level_count
    u = rng.random((horizon, instance.n_arms))
    out = np.empty_like(u)
    for n, cdf in enumerate(instance.arms):
        j = np.searchsorted(cdf.values, u[:, n], side="right")
        out[:, n] = (np.minimum(j, l - 1) + 1) / l * instance.d_max
    return out


def run_static_episode(
    instance: StaticInstance,
    spec: PolicySpec,
    horizon: int,
    rng_seed: int = 0,
    beta: float = 2 / 3,
    deadline_s: float = math.inf,
    exhaustive_limit: int = 1000,
) -> list[RoundRecord]:
    """Fixed arm set, i.i.d. delays.  All arms are present from round 1 with ``t_n = 0``."""
    env_rng, pol_rng = _episode_streams(rng_seed)
    delays = sample_static_delays(instance, horizon, env_rng)
    ids = list(range(instance.n_arms))
    k = instance.replica_count if spec.kind == "ltra" else 1
    config = PolicyConfig(k, beta, instance.level_count, instance.d_max, exhaustive_limit)
    if spec.kind in ("ltra", "single"):
        ltra = LTRA(config)
        for n in ids:
            ltra.register(n, 0)
    cands = tuple((n, 0.0) for n in ids)  # no geometry; every arm is always available
    out = []
    for t in range(1, horizon + 1):
        row = delays[t - 1]
        if spec.kind == "genie":
            chosen = (int(np.argmin(row)),)
        elif spec.kind == "random":
            chosen = (int(pol_rng.integers(instance.n_arms)),)
        else:
            chosen = ltra.select(ids, t).chosen
        per_arm = {n: float(row[n]) for n in chosen}
        if spec.kind in ("ltra", "single"):
            ltra.observe(per_arm)
        best = min(per_arm.values())
        out.append(RoundRecord(t, "tav", cands, chosen, per_arm, best, best <= deadline_s))
    return out


def compute_metrics(
    records: Sequence[RoundRecord], deadline_s: float | None = None, mu_star: float | None = None
) -> EpisodeMetrics:
    """Averages over non-skipped records; ``mu_star`` enables the regret series."""
    done = [r for r in records if not r.skipped]
    skipped = len(records) - len(done)
    if not done:
        log.warning("every round was skipped; metrics are empty")
        return EpisodeMetrics(math.nan, math.nan, 0, skipped, np.array([]))
    series = np.array([r.offloading_delay for r in done])
    if deadline_s is None:
        met = np.array([r.deadline_met for r in done])
    else:
        met = series <= deadline_s
    regret = None
    if mu_star is not None:
        regret = np.cumsum(series) - mu_star * np.arange(1, len(series) + 1)
    return EpisodeMetrics(float(series.mean()), float(met.mean()), len(done), skipped, series, regret)
