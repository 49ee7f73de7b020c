"""Vehicle timelines (trace CSV or synthetic highway) and candidate discovery.

The road is one axis ``[0, road_length_m]``.  Forward vehicles drive toward
increasing positions, backward vehicles toward decreasing ones, so the
distance between two vehicles is ``|position_a - position_b|``.
"""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable

import numpy as np

log = logging.getLogger(__name__)

TRACE_HEADER = ("round", "vehicle_id", "role", "position_m", "speed_mps", "direction")


class TraceFormatError(ValueError):
    pass


class Role(str, Enum):
    TAV = "TaV"
    SEV = "SeV"


class Direction(str, Enum):
    FORWARD = "F"
    BACKWARD = "B"


@dataclass(frozen=True)
class VehicleSnapshot:
    round: int
    vehicle_id: str
    role: Role
    position_m: float
    speed_mps: float
    direction: Direction


# round -> snapshots of that round, sorted by vehicle id
Timeline = dict[int, tuple[VehicleSnapshot, ...]]


@dataclass(frozen=True)
class ScenarioConfig:
    road_length_m: float = 12000.0
    ramp_positions_m: tuple[float, ...] = (4000.0, 8000.0)
    ramp_exit_prob: float = 0.5
    # Total over both directions; each direction gets half.
    sev_arrival_rate_hz: float = 0.45
    tav_arrival_rate_hz: float = 0.06
    max_speed_mps: float = 20.0
    min_speed_fraction: float = 0.7
    comm_range_m: float = 300.0
    round_duration_s: float = 1.0
    total_rounds: int = 1000
    rng_seed: int = 0
    # Start from a steady-state populated road instead of an empty one.
    prepopulate: bool = True

    def __post_init__(self):
        if not self.road_length_m > 0:
            raise ValueError("road_length_m must be positive")
        if not self.comm_range_m > 0:
            raise ValueError("comm_range_m must be positive")
        if self.sev_arrival_rate_hz < 0 or self.tav_arrival_rate_hz < 0:
            raise ValueError("arrival rates must be non-negative")
        if not 0 <= self.ramp_exit_prob <= 1:
            raise ValueError("ramp_exit_prob must be in [0, 1]")
        if not 0 < self.min_speed_fraction <= 1:
            raise ValueError("min_speed_fraction must be in (0, 1]")
        if not self.max_speed_mps > 0 or not self.round_duration_s > 0:
            raise ValueError("max_speed_mps and round_duration_s must be positive")
        if self.total_rounds < 0:
            raise ValueError("total_rounds must be non-negative")
        if any(not 0 < r < self.road_length_m for r in self.ramp_positions_m):
            raise ValueError("ramps must lie strictly inside the road")

    @property
    def mean_inverse_speed(self) -> float:
        lo = self.min_speed_fraction * self.max_speed_mps
        hi = self.max_speed_mps
        if hi == lo:
            return 1.0 / hi
        return math.log(hi / lo) / (hi - lo)


def expected_candidate_count(config: ScenarioConfig) -> float:
    """Steady-state mean same-direction SeVs within range of a mid-road TaV.

    Per-direction flow ``rate / 2`` over a ``2 * comm_range`` window, times the
    mean time a vehicle needs to cross one metre.
    """
    return config.sev_arrival_rate_hz / 2 * config.mean_inverse_speed * 2 * config.comm_range_m


def sev_rate_for_candidates(target: float, config: ScenarioConfig) -> float:
    """Inverse of :func:`expected_candidate_count` in the SeV arrival rate."""
    return target / (config.mean_inverse_speed * config.comm_range_m)


def _parse_row(row: list[str], lineno: int) -> VehicleSnapshot:
    if len(row) != len(TRACE_HEADER):
        raise TraceFormatError(f"line {lineno}: expected {len(TRACE_HEADER)} fields, got {len(row)}")
    rnd, vid, role, pos, speed, direction = row
    try:
        rnd_i = int(rnd)
        pos_f = float(pos)
        speed_f = float(speed)
    except ValueError as exc:
        raise TraceFormatError(f"line {lineno}: {exc}") from None
    if rnd_i < 0:
        raise TraceFormatError(f"line {lineno}: negative round {rnd_i}")
    try:
        role_e = Role(role)
    except ValueError:
        raise TraceFormatError(f"line {lineno}: unknown role {role!r}") from None
    try:
        dir_e = Direction(direction)
    except ValueError:
        raise TraceFormatError(f"line {lineno}: unknown direction {direction!r}") from None
    if not vid:
        raise TraceFormatError(f"line {lineno}: empty vehicle_id")
    return VehicleSnapshot(rnd_i, vid, role_e, pos_f, speed_f, dir_e)


def load_trace(path: str | Path) -> Timeline:
    """Read a trace CSV into a timeline (only rounds that have rows appear)."""
    rows: dict[int, dict[str, VehicleSnapshot]] = {}
    last_round = -1
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            log.warning("trace %s is empty", path)
            return {}
        if tuple(h.strip() for h in header) != TRACE_HEADER:
            raise TraceFormatError(f"line 1: bad header {header!r}")
        for row in reader:
            lineno = reader.line_num
            if not row:
                continue
            snap = _parse_row(row, lineno)
            if snap.round < last_round:
                raise TraceFormatError(f"line {lineno}: round {snap.round} after round {last_round}")
            last_round = snap.round
            bucket = rows.setdefault(snap.round, {})
            if snap.vehicle_id in bucket:
                raise TraceFormatError(
                    f"line {lineno}: duplicate vehicle {snap.vehicle_id!r} in round {snap.round}"
                )
            bucket[snap.vehicle_id] = snap
    if not rows:
        log.warning("trace %s has no rows", path)
    return {r: tuple(sorted(b.values(), key=lambda s: s.vehicle_id)) for r, b in sorted(rows.items())}


def save_trace(timeline: Timeline, path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(TRACE_HEADER)
        for rnd in sorted(timeline):
            for s in timeline[rnd]:
                writer.writerow(
                    [rnd, s.vehicle_id, s.role.value, repr(float(s.position_m)),
                     repr(float(s.speed_mps)), s.direction.value]
                )


@dataclass
class _Vehicle:
    vehicle_id: str
    role: Role
    direction: Direction
    speed: float
    position: float
    ahead: list[float] = field(default_factory=list)  # ramps not yet passed, in driving order


def synth_highway(config: ScenarioConfig, rng: np.random.Generator | None = None) -> Timeline:
    """Generate a synthetic two-direction highway timeline with ramps.

    Arrivals per entry point and round are Poisson.  Each ramp injects
    ``ramp_exit_prob`` times the road-start flow, so the flow (and density)
    stays level along the road.  Every round ``0..total_rounds-1`` is a key,
    possibly with no vehicles.
    """
    if rng is None:
        rng = np.random.default_rng(config.rng_seed)
    dt = config.round_duration_s
    L = config.road_length_m
    vmax = config.max_speed_mps
    vmin = config.min_speed_fraction * vmax
    counter = {Role.SEV: 0, Role.TAV: 0}

    def new_vehicle(role: Role, direction: Direction, position: float, speed: float) -> _Vehicle:
        counter[role] += 1
        prefix = "sev" if role is Role.SEV else "tav"
        vid = f"{prefix}{counter[role]:06d}"
        if direction is Direction.FORWARD:
            ahead = sorted(r for r in config.ramp_positions_m if r > position)
        else:
            ahead = sorted((r for r in config.ramp_positions_m if r < position), reverse=True)
        return _Vehicle(vid, role, direction, speed, position, ahead)

    def draw_speed() -> float:
        return float(rng.uniform(vmin, vmax))

    rates = {Role.SEV: config.sev_arrival_rate_hz / 2, Role.TAV: config.tav_arrival_rate_hz / 2}
    fleet: list[_Vehicle] = []

    if config.prepopulate:
        for role in (Role.SEV, Role.TAV):
            for direction in Direction:
                n = rng.poisson(rates[role] * L * config.mean_inverse_speed)
                for _ in range(n):
                    # Standing vehicles are speed-biased toward slow ones (density ~ 1/v).
                    while True:
                        v = draw_speed()
                        if rng.random() <= vmin / v:
                            break
                    fleet.append(new_vehicle(role, direction, float(rng.uniform(0, L)), v))

    timeline: Timeline = {}
    entries = [None, *config.ramp_positions_m]
    for rnd in range(config.total_rounds):
        for role in (Role.SEV, Role.TAV):
            for direction in Direction:
                for ramp in entries:
                    lam = rates[role] * dt * (1.0 if ramp is None else config.ramp_exit_prob)
                    if lam <= 0:
                        continue
                    for _ in range(rng.poisson(lam)):
                        if ramp is None:
                            pos = 0.0 if direction is Direction.FORWARD else L
                        else:
                            pos = float(ramp)
                        fleet.append(new_vehicle(role, direction, pos, draw_speed()))
        timeline[rnd] = tuple(
            sorted(
                (VehicleSnapshot(rnd, v.vehicle_id, v.role, v.position, v.speed, v.direction) for v in fleet),
                key=lambda s: s.vehicle_id,
            )
        )
        survivors = []
        for v in fleet:
            step = v.speed * dt
            v.position = v.position + step if v.direction is Direction.FORWARD else v.position - step
            exited = False
            while v.ahead and (
                v.position >= v.ahead[0] if v.direction is Direction.FORWARD else v.position <= v.ahead[0]
            ):
                v.ahead.pop(0)
                if rng.random() < config.ramp_exit_prob:
                    exited = True
                    break
            if exited or not 0.0 <= v.position <= L:
                continue
            survivors.append(v)
        fleet = survivors
    return timeline


def candidate_set(
    tav: VehicleSnapshot, vehicles: Iterable[VehicleSnapshot], comm_range_m: float
) -> list[tuple[str, float]]:
    """Same-direction SeVs within ``comm_range_m`` of ``tav``, as ``(id, distance)`` by id."""
    out = []
    for s in vehicles:
        if s.role is not Role.SEV or s.direction is not tav.direction:
            continue
        d = abs(s.position_m - tav.position_m)
        if d <= comm_range_m:
            out.append((s.vehicle_id, d))
    out.sort()
    return out


def mean_candidate_count(timeline: Timeline, comm_range_m: float, skip_rounds: int = 0) -> float:
    """Average candidate-set size over all (TaV, round) pairs."""
    total = 0
    pairs = 0
    for rnd, snaps in timeline.items():
        if rnd < skip_rounds:
            continue
        for s in snaps:
            if s.role is Role.TAV:
                total += len(candidate_set(s, snaps, comm_range_m))
                pairs += 1
    return total / pairs if pairs else 0.0
