"""Per-replica offloading delay: uplink + queue wait + compute + downlink."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np


class DelayModelError(ValueError):
    pass


class GeometryError(DelayModelError):
    pass


class InfeasibleLinkError(DelayModelError):
    pass


class NoResourceError(DelayModelError):
    pass


def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


@dataclass(frozen=True)
class ChannelParams:
    bandwidth_hz: float = 10e6
    tx_power_w: float = 0.1
    noise_power_w: float = 1e-13
    path_gain_ref: float = db_to_linear(-17.8)
    interference_up_w: float = 0.0
    interference_down_w: float = 0.0
    min_distance_m: float | None = 1.0

    def __post_init__(self):
        for name in ("bandwidth_hz", "tx_power_w", "noise_power_w", "path_gain_ref"):
            if not getattr(self, name) > 0:
                raise DelayModelError(f"{name} must be positive")
        if self.interference_up_w < 0 or self.interference_down_w < 0:
            raise DelayModelError("interference must be non-negative")

    @classmethod
    def from_db(cls, path_gain_ref_db: float = -17.8, **kwargs) -> "ChannelParams":
        return cls(path_gain_ref=db_to_linear(path_gain_ref_db), **kwargs)


@dataclass(frozen=True)
class TaskSpec:
    input_bits: float = 1e6
    output_bits: float = 0.0
    intensity_cycles_per_bit: float = 1000.0
    # Delay cap in seconds: five deadlines, so truncation rarely binds on an idle SeV.
    d_max: float = 3.0

    def __post_init__(self):
        if not self.input_bits > 0 or not self.intensity_cycles_per_bit > 0:
            raise DelayModelError("input_bits and intensity must be positive")
        if self.output_bits < 0:
            raise DelayModelError("output_bits must be non-negative")
        if not self.d_max > 0:
            raise DelayModelError("d_max must be positive")

    @property
    def cycles(self) -> float:
        return self.input_bits * self.intensity_cycles_per_bit


@dataclass
class SevCompute:
    """Compute side of one service vehicle.

    ``busy_until`` is the absolute time at which the FCFS queue drains; it
    carries backlog from one round into the next.
    """

    max_freq_hz: float
    alloc_fraction_max: float = 0.6
    busy_until: float = 0.0

    def __post_init__(self):
        if not self.max_freq_hz > 0:
            raise DelayModelError("max_freq_hz must be positive")
        if not 0 < self.alloc_fraction_max <= 1:
            raise DelayModelError("alloc_fraction_max must be in (0, 1]")


@dataclass(frozen=True)
class DelayBreakdown:
    upload_s: float
    compute_s: float
    queue_wait_s: float
    download_s: float

    @property
    def total_s(self) -> float:
        return self.upload_s + self.queue_wait_s + self.compute_s + self.download_s


def path_gain(distance_m: float, a0: float, min_distance_m: float | None = None) -> float:
    """Inverse-square gain ``a0 * d**-2``; ``min_distance_m`` clamps short links."""
    if distance_m < 0:
        raise GeometryError(f"distance must be non-negative, got {distance_m}")
    if min_distance_m is not None:
        distance_m = max(distance_m, min_distance_m)
    if distance_m == 0:
        raise GeometryError("zero distance gives a singular path gain")
    return a0 / (distance_m * distance_m)


def link_rate(params: ChannelParams, h: float, interference_w: float = 0.0) -> float:
    if not h > 0:
        raise InfeasibleLinkError(f"channel gain must be positive, got {h}")
    snr = params.tx_power_w * h / (params.noise_power_w + interference_w)
    return params.bandwidth_hz * math.log2(1.0 + snr)


def transmit_delay(bits: float, rate: float) -> float:
    if bits < 0:
        raise DelayModelError("bits must be non-negative")
    if bits == 0:
        return 0.0
    if not rate > 0:
        raise InfeasibleLinkError("cannot transmit over a zero-rate link")
    return bits / rate


def compute_delay(bits: float, intensity: float, freq_hz: float) -> float:
    if not freq_hz > 0:
        raise NoResourceError("no CPU allocated")
    return bits * intensity / freq_hz


def draw_allocated_frequency(sev: SevCompute, rng: np.random.Generator) -> float:
    """Uniform on ``(0, alloc_fraction_max * max_freq_hz]``."""
    top = sev.alloc_fraction_max * sev.max_freq_hz
    while True:
        # 1 - U maps [0, 1) onto (0, 1]
        f = (1.0 - rng.random()) * top
        if f > 0:
            return f


@dataclass(frozen=True)
class Arrival:
    owner: object
    cycles: float
    time: float
    # Work still unfinished at this time is dropped; None means never drop.
    abandon_at: float | None = None


@dataclass(frozen=True)
class Service:
    start: float
    completion: float

    def wait(self, arrival: Arrival) -> float:
        return self.start - arrival.time


def fcfs_serve(
    arrivals: Sequence[Arrival], freq_hz: float, busy_until: float = 0.0
) -> tuple[list[Service], float]:
    """Serve time-ordered ``arrivals`` first-come-first-serve at ``freq_hz``.

    ``completion_i = max(arrival_i, free_{i-1}) + cycles_i / f``, where the
    server frees up at the completion, or at ``abandon_at`` if that is sooner.
    Returns the per-arrival services and the new ``busy_until``.
    """
    if not freq_hz > 0:
        raise NoResourceError("no CPU allocated")
    out = []
    free = busy_until
    last = -math.inf
    for a in arrivals:
        if a.time < last:
            raise DelayModelError("arrivals must be time-ordered")
        last = a.time
        start = max(a.time, free)
        done = start + a.cycles / freq_hz
        out.append(Service(start, done))
        free = done if a.abandon_at is None else max(start, min(done, a.abandon_at))
    return out, free


def enqueue_and_serve(sev: SevCompute, arrivals: Sequence[Arrival], freq_hz: float) -> list[float]:
    """FCFS service on ``sev``'s queue; returns completion times and advances the queue."""
    services, sev.busy_until = fcfs_serve(arrivals, freq_hz, sev.busy_until)
    return [s.completion for s in services]


def offload_delay(
    task: TaskSpec,
    channel: ChannelParams,
    distance_m: float,
    freq_hz: float,
    queue_wait_s: float = 0.0,
) -> DelayBreakdown:
    h = path_gain(distance_m, channel.path_gain_ref, channel.min_distance_m)
    up = transmit_delay(task.input_bits, link_rate(channel, h, channel.interference_up_w))
    down = 0.0
    if task.output_bits > 0:
        down = transmit_delay(task.output_bits, link_rate(channel, h, channel.interference_down_w))
    comp = compute_delay(task.input_bits, task.intensity_cycles_per_bit, freq_hz)
    return DelayBreakdown(up, comp, queue_wait_s, down)
