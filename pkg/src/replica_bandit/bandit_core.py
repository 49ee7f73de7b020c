"""Learning-based task replication (LTRA) on discretized delay distributions.

Every arm (a service vehicle) keeps a histogram of its observed delays on the
grid ``{1/l, 2/l, ..., 1}`` (delays normalized by ``d_max``).  Each round the
policy pads every empirical CDF upward by a confidence term, which makes the
arm look stochastically faster than observed, and picks the ``K``-subset whose
expected minimum delay under those optimistic CDFs is smallest.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from typing import Hashable, Iterable, Mapping, Sequence

import numpy as np

ArmId = Hashable

# Normalized delays within this distance above a grid point snap onto it.
GRID_SNAP = 1e-9
# Subset values closer than this count as ties (lowest ids win).
TIE_TOL = 1e-12


class BanditError(Exception):
    pass


class ConfigurationError(BanditError, ValueError):
    pass


class MustInitializeError(BanditError):
    """Raised when a confidence bound is requested for an arm never played."""


class InvalidRoundError(BanditError):
    pass


class NoCandidateError(BanditError):
    pass


class ProtocolError(BanditError):
    pass


class GridMismatchError(BanditError):
    pass


@dataclass(frozen=True)
class DiscreteCdf:
    """CDF on the grid ``j/l``, ``j = 1..l``; ``values[j-1] = F(j/l)``.

    ``F(0) = 0`` is implied and never stored.
    """

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 1 or v.size == 0:
            raise ValueError("cdf values must be a non-empty 1-D sequence")
        if np.any(v < -1e-12) or np.any(v > 1 + 1e-12):
            raise ValueError("cdf values must lie in [0, 1]")
        if np.any(np.diff(v) < -1e-12):
            raise ValueError("cdf values must be non-decreasing")
        if abs(v[-1] - 1.0) > 1e-9:
            raise ValueError("cdf must reach 1 at the top of the grid")
        v = np.clip(v, 0.0, 1.0)
        v[-1] = 1.0
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def level_count(self) -> int:
        return int(self.values.size)

    @property
    def grid(self) -> np.ndarray:
        return np.arange(1, self.level_count + 1) / self.level_count

    @property
    def pmf(self) -> np.ndarray:
        return np.diff(self.values, prepend=0.0)

    def mean(self) -> float:
        """Mean of the normalized delay, ``(1/l) * sum_{j<l} (1 - F(j/l))``."""
        return float(self.pmf @ self.grid)

    def __call__(self, x: float) -> float:
        if x < 0:
            return 0.0
        j = int(math.floor(x * self.level_count + GRID_SNAP))
        if j <= 0:
            return 0.0
        return float(self.values[min(j, self.level_count) - 1])

    @classmethod
    def from_pmf(cls, pmf: Sequence[float]) -> "DiscreteCdf":
        p = np.asarray(pmf, dtype=float)
        if np.any(p < 0):
            raise ValueError("pmf entries must be non-negative")
        total = p.sum()
        if total <= 0:
            raise ValueError("pmf must have positive mass")
        return cls(np.cumsum(p / total))

    @classmethod
    def point_mass(cls, grid_value: float, level_count: int) -> "DiscreteCdf":
        j = grid_index(grid_value, level_count)
        pmf = np.zeros(level_count)
        pmf[j - 1] = 1.0
        return cls.from_pmf(pmf)

    def __eq__(self, other):
        if not isinstance(other, DiscreteCdf):
            return NotImplemented
        return self.values.shape == other.values.shape and bool(np.all(self.values == other.values))

    def __hash__(self):
        return hash(self.values.tobytes())


@dataclass(frozen=True)
class PolicyConfig:
    replica_count: int = 2
    beta: float = 0.6
    level_count: int = 50
    d_max: float = 1.0
    # Exact enumeration while C(N, K) stays at or below this; greedy beyond.
    exhaustive_limit: int = 1000

    def __post_init__(self):
        if self.replica_count < 1:
            raise ConfigurationError("replica_count must be >= 1")
        if not self.beta > 0:
            raise ConfigurationError("beta must be positive")
        if self.level_count < 1:
            raise ConfigurationError("level_count must be >= 1")
        if not self.d_max > 0:
            raise ConfigurationError("d_max must be positive")
        if self.exhaustive_limit < 1:
            raise ConfigurationError("exhaustive_limit must be >= 1")


class Mode(str, Enum):
    INITIALIZATION = "initialization"
    LEARNING = "learning"


@dataclass(frozen=True)
class SelectionDecision:
    chosen: tuple
    mode: Mode
    predicted_expected_delay: float | None = None


@dataclass
class ArmState:
    """Learning record of one arm: play count, first-seen round, delay histogram."""

    arm_id: ArmId
    t_n: int
    level_count: int
    counts: np.ndarray = field(default=None, repr=False)
    k: int = 0

    def __post_init__(self):
        if self.counts is None:
            self.counts = np.zeros(self.level_count, dtype=np.int64)
        self.k = int(self.counts.sum())

    def record(self, j: int) -> None:
        """Add one observation at grid index ``j`` (``1..l``)."""
        self.counts[j - 1] += 1
        self.k += 1

    @property
    def samples(self) -> list[float]:
        """Observed grid delays as a sorted multiset."""
        grid = np.arange(1, self.level_count + 1) / self.level_count
        return [float(g) for g, c in zip(grid, self.counts) for _ in range(int(c))]

    @property
    def empirical(self) -> DiscreteCdf:
        k = self.k
        if k == 0:
            raise MustInitializeError(f"arm {self.arm_id!r} has no samples")
        return DiscreteCdf(np.cumsum(self.counts) / k)


def normalize_and_truncate(delay: float, d_max: float) -> float:
    if not d_max > 0:
        raise ConfigurationError(f"d_max must be positive, got {d_max}")
    if delay < 0:
        raise ValueError(f"delay must be non-negative, got {delay}")
    return min(delay, d_max) / d_max


def grid_index(norm_delay: float, level_count: int) -> int:
    """Index ``j`` in ``1..l`` with ``norm_delay`` in ``((j-1)/l, j/l]``; 0 maps to 1."""
    if level_count < 1:
        raise ConfigurationError("level_count must be >= 1")
    if not 0.0 <= norm_delay <= 1.0:
        raise ValueError(f"normalized delay must be in [0, 1], got {norm_delay}")
    j = math.ceil(norm_delay * level_count - GRID_SNAP)
    return min(max(j, 1), level_count)


def discretize(norm_delay: float, level_count: int) -> float:
    return grid_index(norm_delay, level_count) / level_count


def update_empirical(arm: ArmState, grid_delay: float, level_count: int | None = None) -> ArmState:
    """Record one grid delay on ``arm`` (in place) and return it."""
    if level_count is not None and level_count != arm.level_count:
        raise GridMismatchError(
            f"arm {arm.arm_id!r} uses l={arm.level_count}, observation uses l={level_count}"
        )
    j = grid_index(grid_delay, arm.level_count)
    if abs(j / arm.level_count - grid_delay) > GRID_SNAP:
        raise GridMismatchError(f"{grid_delay} is not on the l={arm.level_count} grid")
    arm.record(j)
    return arm


def padding(k: int, t: int, t_n: int, beta: float) -> float:
    if k <= 0:
        raise MustInitializeError("confidence padding needs at least one sample")
    if t <= t_n:
        raise InvalidRoundError(f"round {t} is not after occurrence round {t_n}")
    return math.sqrt(beta * math.log(t - t_n) / k)


def optimistic_cdf(empirical: DiscreteCdf, k: int, t: int, t_n: int, beta: float) -> DiscreteCdf:
    """``min(F_hat(x) + sqrt(beta ln(t - t_n) / k), 1)`` at every grid point ``x > 0``."""
    pad = padding(k, t, t_n, beta)
    return DiscreteCdf(np.minimum(empirical.values + pad, 1.0))


def confidence_cdf(arm: ArmState, t: int, beta: float) -> DiscreteCdf:
    if arm.k == 0:
        raise MustInitializeError(f"arm {arm.arm_id!r} must be played before it gets a bound")
    return optimistic_cdf(arm.empirical, arm.k, t, arm.t_n, beta)


def _survival_rows(cdf_matrix: np.ndarray) -> np.ndarray:
    """Rows ``1 - G(j/l)`` for ``j = 0..l-1`` (with ``G(0) = 0``)."""
    n, _ = cdf_matrix.shape
    return np.hstack([np.ones((n, 1)), 1.0 - cdf_matrix[:, :-1]])


def expected_min(cdfs: Sequence[DiscreteCdf], d_max: float) -> float:
    """Expected minimum (in seconds) of independent grid-valued delays."""
    if len(cdfs) == 0:
        raise ValueError("expected_min needs a non-empty subset")
    levels = {c.level_count for c in cdfs}
    if len(levels) != 1:
        raise GridMismatchError(f"cdfs use different grids: {sorted(levels)}")
    (l,) = levels
    surv = _survival_rows(np.vstack([c.values for c in cdfs]))
    return float(d_max * np.prod(surv, axis=0).sum() / l)


@lru_cache(maxsize=256)
def _combination_table(n: int, k: int) -> np.ndarray:
    return np.array(list(itertools.combinations(range(n), k)), dtype=np.intp).reshape(-1, k)


def _first_min(values: np.ndarray) -> int:
    return int(np.flatnonzero(values <= values.min() + TIE_TOL)[0])


def best_subset_exhaustive(surv: np.ndarray, k: int) -> tuple[tuple[int, ...], float]:
    """Row indices of the ``k``-subset minimizing ``sum_j prod_i surv[i, j]``.

    Returns the unscaled objective (multiply by ``d_max / l`` for seconds).
    """
    table = _combination_table(surv.shape[0], k)
    values = np.prod(surv[table], axis=1).sum(axis=1)
    best = _first_min(values)
    return tuple(int(i) for i in table[best]), float(values[best])


def best_subset_greedy(surv: np.ndarray, k: int) -> tuple[tuple[int, ...], float]:
    n, width = surv.shape
    chosen: list[int] = []
    running = np.ones(width)
    remaining = np.ones(n, dtype=bool)
    for _ in range(k):
        values = (running[None, :] * surv).sum(axis=1)
        values[~remaining] = np.inf
        i = _first_min(values)
        chosen.append(i)
        remaining[i] = False
        running = running * surv[i]
    return tuple(sorted(chosen)), float(running.sum())


def use_exhaustive(n: int, k: int, limit: int) -> bool:
    return math.comb(n, k) <= limit


def select_subset(
    arms: Sequence[ArmState],
    t: int,
    config: PolicyConfig,
    *,
    exhaustive: bool | None = None,
) -> SelectionDecision:
    """Pick the replica set for round ``t`` among candidate ``arms``.

    Unplayed arms take priority (initialization); leftover slots go to the
    played arms with the smallest confidence-CDF mean.  Once every candidate
    has been played once, the subset minimizing the optimistic expected
    minimum delay is chosen.
    """
    if len(arms) == 0:
        raise NoCandidateError("candidate set is empty")
    arms = sorted(arms, key=lambda a: a.arm_id)
    k = min(config.replica_count, len(arms))
    fresh = [a for a in arms if a.k == 0]
    if fresh:
        chosen = [a.arm_id for a in fresh[:k]]
        if len(chosen) < k:
            played = [a for a in arms if a.k > 0]
            # mean of each confidence CDF, up to the common 1/l factor
            means = _survival_rows(confidence_matrix(played, t, config.beta)).sum(axis=1)
            order = sorted(range(len(played)), key=lambda i: (means[i], i))
            chosen += [played[i].arm_id for i in order[: k - len(chosen)]]
        return SelectionDecision(tuple(sorted(chosen)), Mode.INITIALIZATION)

    cdf_matrix = confidence_matrix(arms, t, config.beta)
    surv = _survival_rows(cdf_matrix)
    if exhaustive is None:
        exhaustive = use_exhaustive(len(arms), k, config.exhaustive_limit)
    pick = best_subset_exhaustive if exhaustive else best_subset_greedy
    idx, value = pick(surv, k)
    return SelectionDecision(
        tuple(arms[i].arm_id for i in idx),
        Mode.LEARNING,
        config.d_max * value / config.level_count,
    )


def confidence_matrix(arms: Sequence[ArmState], t: int, beta: float) -> np.ndarray:
    """Stacked confidence CDFs, one row per arm (vectorized ``confidence_cdf``)."""
    counts = np.vstack([a.counts for a in arms])
    k = np.array([a.k for a in arms], dtype=float)
    if np.any(k == 0):
        raise MustInitializeError("every arm needs a sample before learning mode")
    age = np.array([t - a.t_n for a in arms], dtype=float)
    if np.any(age <= 0):
        raise InvalidRoundError(f"round {t} is not after every occurrence round")
    pad = np.sqrt(beta * np.log(age) / k)
    return np.minimum(np.cumsum(counts, axis=1) / k[:, None] + pad[:, None], 1.0)


class LTRA:
    """Stateful LTRA policy for one task vehicle.

    Arms persist for the whole episode: an arm that leaves the candidate set
    keeps its history and original occurrence round when it comes back.
    """

    def __init__(self, config: PolicyConfig):
        self.config = config
        self.arms: dict[ArmId, ArmState] = {}
        self._pending: tuple = ()

    def register(self, arm_id: ArmId, t_n: int) -> ArmState:
        arm = self.arms.get(arm_id)
        if arm is None:
            arm = self.arms[arm_id] = ArmState(arm_id, t_n, self.config.level_count)
        return arm

    def observe(self, delays: Mapping[ArmId, float]) -> None:
        """Feed back raw delays (seconds) for every arm chosen last round."""
        for arm_id, delay in delays.items():
            if arm_id not in self.arms:
                raise ProtocolError(f"feedback for unknown arm {arm_id!r}")
            if arm_id not in self._pending:
                raise ProtocolError(f"arm {arm_id!r} was not in the last chosen set")
            norm = normalize_and_truncate(delay, self.config.d_max)
            self.arms[arm_id].record(grid_index(norm, self.config.level_count))
        self._pending = ()

    def select(self, candidates: Iterable[ArmId], t: int) -> SelectionDecision:
        arms = []
        for arm_id in candidates:
            arms.append(self.register(arm_id, t))
        decision = select_subset(arms, t, self.config)
        self._pending = decision.chosen
        return decision


def ltra_round(
    policy: LTRA,
    candidates: Iterable[ArmId],
    t: int,
    feedback: Mapping[ArmId, float] | None = None,
) -> SelectionDecision:
    """One LTRA step: absorb last round's feedback, then choose for round ``t``."""
    if feedback:
        policy.observe(feedback)
    return policy.select(candidates, t)
