"""Independent checks for the bandit engine.

Brute-force expectations by joint enumeration, exhaustive optimal subsets on
static instances, empirical regret against the logarithmic regret bound,
and the reward-side (SDCB) construction of the optimistic CDF.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .bandit_core import DiscreteCdf, GridMismatchError, optimistic_cdf

# l ** N above this is refused by the enumerating oracle (8 levels, 6 arms).
MAX_OUTCOMES = 8**6

REGRET_C1 = 2136.0


def regret_c2(n_arms: int) -> float:
    return (math.pi**2 / 3 + 1) * n_arms


class OracleSizeError(ValueError):
    pass


@dataclass(frozen=True)
class StaticInstance:
    """Fixed arm set with i.i.d. grid delays (true distributions known)."""

    arms: tuple[DiscreteCdf, ...]
    d_max: float = 1.0
    replica_count: int = 2

    def __post_init__(self):
        object.__setattr__(self, "arms", tuple(self.arms))
        if not self.arms:
            raise ValueError("instance needs at least one arm")
        if len({a.level_count for a in self.arms}) != 1:
            raise GridMismatchError("all arms must share one grid")
        if not 1 <= self.replica_count <= len(self.arms):
            raise ValueError("replica_count must be in 1..N")
        if not self.d_max > 0:
            raise ValueError("d_max must be positive")

    @property
    def n_arms(self) -> int:
        return len(self.arms)

    @property
    def level_count(self) -> int:
        return self.arms[0].level_count


@dataclass
class RegretReport:
    mu_star: float
    optimal_subset: tuple[int, ...]
    empirical_regret_series: np.ndarray
    regret_stderr: np.ndarray
    theorem_bound: np.ndarray
    delta_n: dict[int, float] = field(default_factory=dict)
    suboptimal_arms: tuple[int, ...] = ()


def brute_expected_min(cdfs: Sequence[DiscreteCdf], d_max: float) -> float:
    """Expected minimum by summing over every joint grid outcome."""
    if not cdfs:
        raise ValueError("need at least one cdf")
    l = cdfs[0].level_count
    if any(c.level_count != l for c in cdfs):
        raise GridMismatchError("all cdfs must share one grid")
    if l ** len(cdfs) > MAX_OUTCOMES:
        raise OracleSizeError(f"{l}**{len(cdfs)} outcomes exceeds the enumeration bound")
    grid = np.arange(1, l + 1) / l
    joint_p = np.ones(())
    joint_min = np.full((), np.inf)
    for c in cdfs:
        joint_p = np.multiply.outer(joint_p, c.pmf)
        joint_min = np.minimum.outer(joint_min, grid)
    return float(d_max * np.sum(joint_p * joint_min))


def brute_expected_min_loops(cdfs: Sequence[DiscreteCdf], d_max: float) -> float:
    """Same as :func:`brute_expected_min` with plain Python loops (tiny inputs)."""
    l = cdfs[0].level_count
    pmfs = [c.pmf for c in cdfs]
    total = 0.0
    for outcome in itertools.product(range(l), repeat=len(cdfs)):
        p = 1.0
        for pmf, j in zip(pmfs, outcome):
            p *= pmf[j]
        total += p * (min(outcome) + 1) / l
    return d_max * total


def subset_means(instance: StaticInstance) -> dict[tuple[int, ...], float]:
    """True expected minimum delay of every ``K``-subset, in lexicographic order."""
    return {
        s: brute_expected_min([instance.arms[i] for i in s], instance.d_max)
        for s in itertools.combinations(range(instance.n_arms), instance.replica_count)
    }


def optimal_subset(instance: StaticInstance, tol: float = 1e-12) -> tuple[tuple[int, ...], float]:
    means = subset_means(instance)
    mu_star = min(means.values())
    for s, mu in means.items():
        if mu <= mu_star + tol:
            return s, mu
    raise AssertionError("unreachable")


def gaps(instance: StaticInstance, tol: float = 1e-12) -> dict[int, float]:
    """Per-arm gap: smallest normalized excess loss over suboptimal subsets holding the arm.

    Arms that only ever sit in optimal subsets are absent.
    """
    means = subset_means(instance)
    mu_star = min(means.values())
    out: dict[int, float] = {}
    for s, mu in means.items():
        if mu <= mu_star + tol:
            continue
        gap = (mu - mu_star) / instance.d_max
        for n in s:
            out[n] = min(out.get(n, math.inf), gap)
    return dict(sorted(out.items()))


def regret_bound(
    deltas: Iterable[float], horizon: float, replica_count: int, n_arms: int, d_max: float = 1.0
) -> float:
    log_t = math.log(horizon) if horizon > 1 else 0.0
    total = sum(log_t / d for d in deltas)
    return d_max * (REGRET_C1 * replica_count * total + regret_c2(n_arms))


def theorem_bound(instance: StaticInstance, horizon: float, replica_count: int | None = None) -> float:
    k = instance.replica_count if replica_count is None else replica_count
    return regret_bound(gaps(instance).values(), horizon, k, instance.n_arms, instance.d_max)


def empirical_regret(replications: Sequence[Sequence], mu_star: float | None) -> tuple[np.ndarray, np.ndarray]:
    """Mean and standard error over replications of ``sum_{s<=t} delay_s - t * mu_star``.

    Each replication is a sequence of round records (or plain delays).
    """
    if mu_star is None:
        raise ValueError("regret needs mu_star")
    paths = []
    for records in replications:
        delays = np.array([getattr(r, "offloading_delay", r) for r in records], dtype=float)
        paths.append(np.cumsum(delays) - mu_star * np.arange(1, len(delays) + 1))
    lengths = {len(p) for p in paths}
    if len(lengths) != 1:
        raise ValueError("replications must share one horizon")
    mat = np.vstack(paths)
    mean = mat.mean(axis=0)
    if mat.shape[0] > 1:
        stderr = mat.std(axis=0, ddof=1) / math.sqrt(mat.shape[0])
    else:
        stderr = np.zeros_like(mean)
    return mean, stderr


def pseudo_regret(instance: StaticInstance, replications: Sequence[Sequence]) -> tuple[np.ndarray, np.ndarray]:
    """Mean and standard error of ``sum_{s<=t} (mu_{S_s} - mu_star)`` over replications.

    Uses the true expected minimum of each played subset instead of the
    realized delay, so the only noise left is in which subsets get played.
    """
    means = subset_means(instance)
    mu_star = min(means.values())
    cache: dict[tuple, float] = {}

    def value(chosen) -> float:
        key = tuple(sorted(chosen))
        if key not in means and key not in cache:
            cache[key] = brute_expected_min([instance.arms[i] for i in key], instance.d_max)
        return means.get(key, cache.get(key))

    excess = [[value(r.chosen) - mu_star for r in records] for records in replications]
    return empirical_regret(excess, 0.0)


def regret_report(
    instance: StaticInstance, replications: Sequence[Sequence], pseudo: bool = False
) -> RegretReport:
    """``pseudo=True`` scores played subsets by their true means (see :func:`pseudo_regret`)."""
    subset, mu_star = optimal_subset(instance)
    if pseudo:
        mean, stderr = pseudo_regret(instance, replications)
    else:
        mean, stderr = empirical_regret(replications, mu_star)
    deltas = gaps(instance)
    horizon = np.arange(1, len(mean) + 1)
    bound = np.array(
        [regret_bound(deltas.values(), t, instance.replica_count, instance.n_arms, instance.d_max) for t in horizon]
    )
    return RegretReport(mu_star, subset, mean, stderr, bound, deltas, tuple(deltas))


def sdcb_lower_cdf(empirical: DiscreteCdf, k: int, t: int, beta: float) -> DiscreteCdf:
    """Optimistic delay CDF built on the reward side ``r = 1 - d``.

    Rewards live on ``{0, 1/l, ..., 1}``.  The reward CDF is shifted down by
    ``sqrt(beta ln t / k)`` (floored at 0, forced to 1 at the top reward) and
    the result is reflected back to delays via
    ``P(D <= j/l) = 1 - P(R < 1 - j/l) = 1 - F_R(1 - (j+1)/l)``.
    """
    l = empirical.level_count
    pad = math.sqrt(beta * math.log(t) / k)
    delay_pmf = empirical.pmf  # mass at d = j/l, j = 1..l
    # reward grid index i = 0..l means r = i/l; delay j/l -> reward (l - j)/l
    reward_pmf = np.zeros(l + 1)
    for j in range(1, l + 1):
        reward_pmf[l - j] += delay_pmf[j - 1]
    reward_cdf = np.cumsum(reward_pmf)
    lower = np.maximum(reward_cdf - pad, 0.0)
    lower[l] = 1.0
    out = np.empty(l)
    for j in range(1, l + 1):
        i = l - j - 1  # reward index just below 1 - j/l
        out[j - 1] = 1.0 - (lower[i] if i >= 0 else 0.0)
    return DiscreteCdf(np.clip(out, 0.0, 1.0))


def sdcb_equivalence_check(
    empirical: DiscreteCdf, k: int, t: int, t_n: int, beta: float, tol: float = 1e-12
) -> tuple[bool, float]:
    """Compare the engine's confidence CDF with the reflected reward-side bound.

    Grid points ``x > 0`` only; valid for ``t_n == 0``, where ``ln(t - t_n) = ln t``.
    """
    if t_n != 0:
        raise ValueError("the reward-side bound uses ln t; compare only with t_n = 0")
    g = optimistic_cdf(empirical, k, t, t_n, beta)
    other = sdcb_lower_cdf(empirical, k, t, beta)
    if g.level_count != other.level_count:
        raise GridMismatchError("grid mismatch")
    dev = float(np.max(np.abs(g.values - other.values)))
    return dev <= tol, dev
