import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from replica_bandit.bandit_core import DiscreteCdf, optimistic_cdf
from replica_bandit.oracle import (
    OracleSizeError,
    StaticInstance,
    brute_expected_min,
    empirical_regret,
    gaps,
    optimal_subset,
    pseudo_regret,
    regret_bound,
    regret_c2,
    regret_report,
    sdcb_equivalence_check,
    sdcb_lower_cdf,
    subset_means,
    theorem_bound,
)
from replica_bandit.simulator import PolicySpec, run_static_episode

from conftest import cdf_families, cdfs, random_cdf


def test_brute_two_uniform_arms():
    c = DiscreteCdf.from_pmf([1, 1])
    assert brute_expected_min([c, c], 1.0) == pytest.approx(0.625, abs=1e-15)


@given(cdfs(max_levels=8), st.floats(0.1, 3.0))
def test_brute_single_arm_is_mean(c, d_max):
    assert brute_expected_min([c], d_max) == pytest.approx(c.mean() * d_max, abs=1e-12)


@given(cdf_families(max_size=3, max_levels=6))
def test_brute_with_fastest_point_mass(family):
    l = family[0].level_count
    fast = DiscreteCdf.point_mass(1 / l, l)
    assert brute_expected_min([*family, fast], 2.0) == pytest.approx(2.0 / l, abs=1e-12)


def test_brute_refuses_large_enumerations():
    c = DiscreteCdf.from_pmf(np.ones(9))
    with pytest.raises(OracleSizeError):
        brute_expected_min([c] * 6, 1.0)


def point_instance(values, l=10, k=2, d_max=1.0):
    return StaticInstance(tuple(DiscreteCdf.point_mass(v, l) for v in values), d_max, k)


def test_optimal_subset_point_masses():
    subset, mu = optimal_subset(point_instance([0.2, 0.5, 0.9]))
    assert subset == (0, 1)
    assert mu == pytest.approx(0.2)


def test_optimal_subset_ties_and_full_set():
    c = DiscreteCdf.from_pmf([1, 2, 3])
    assert optimal_subset(StaticInstance((c, c, c), 1.0, 2))[0] == (0, 1)
    assert optimal_subset(StaticInstance((c, c, c), 1.0, 3))[0] == (0, 1, 2)


def test_regret_of_constant_suboptimal_play():
    g = 0.15
    mu_star = 0.3
    paths = [[mu_star + g] * 100 for _ in range(3)]
    mean, stderr = empirical_regret(paths, mu_star)
    assert np.allclose(mean, g * np.arange(1, 101))
    assert np.allclose(stderr, 0)


def test_regret_needs_mu_star():
    with pytest.raises(ValueError):
        empirical_regret([[0.1]], None)


def test_genie_regret_at_optimum_is_zero():
    inst = point_instance([0.2, 0.5, 0.9], k=1)
    _, mu = optimal_subset(inst)
    recs = run_static_episode(inst, PolicySpec("genie"), 200, rng_seed=1)
    mean, _ = empirical_regret([recs], mu)
    assert np.allclose(mean, 0.0, atol=1e-12)


def test_theorem_bound_example():
    # N = 5, K = 2, d_max = 1, T = 1e4, four suboptimal arms with gap 0.1
    expected = 2136 * 2 * 4 * math.log(1e4) / 0.1 + (math.pi**2 / 3 + 1) * 5
    assert regret_bound([0.1] * 4, 1e4, 2, 5, 1.0) == pytest.approx(expected, rel=1e-12)
    assert expected == pytest.approx(1.5738844e6, rel=1e-6)


def test_theorem_bound_empty_suboptimal_set():
    c = DiscreteCdf.from_pmf([1, 1])
    inst = StaticInstance((c, c), 2.0, 2)
    assert gaps(inst) == {}
    assert theorem_bound(inst, 1e4) == pytest.approx(2.0 * regret_c2(2))


def test_theorem_bound_monotone_in_horizon():
    inst = point_instance([0.2, 0.4, 0.6, 0.8])
    values = [theorem_bound(inst, t) for t in (10, 100, 1000, 10_000)]
    assert values == sorted(values) and len(set(values)) == 4


def test_gaps_are_minimal_over_containing_subsets():
    rng = np.random.default_rng(5)
    for _ in range(40):
        n = int(rng.integers(2, 7))
        k = int(rng.integers(1, n + 1))
        inst = StaticInstance(tuple(random_cdf(rng, 5) for _ in range(n)), 1.5, k)
        means = subset_means(inst)
        mu_star = min(means.values())
        deltas = gaps(inst)
        for s, mu in means.items():
            if mu > mu_star + 1e-12:
                for arm in s:
                    assert deltas[arm] <= (mu - mu_star) / inst.d_max + 1e-15
        for arm, d in deltas.items():
            assert d > 0


# reward-side construction


def test_sdcb_matches_on_random_inputs():
    rng = np.random.default_rng(1)
    worst = 0.0
    for _ in range(300):
        l = int(rng.integers(1, 60))
        cdf = random_cdf(rng, l)
        k = int(rng.integers(1, 500))
        t = int(rng.integers(1, 20_000))
        ok, dev = sdcb_equivalence_check(cdf, k, t, 0, 2 / 3)
        assert ok
        worst = max(worst, dev)
    assert worst <= 1e-12


def test_sdcb_zero_padding_returns_empirical():
    cdf = DiscreteCdf.from_pmf([1, 0, 3, 2])
    lower = sdcb_lower_cdf(cdf, 10**30, 3, 0.6)
    assert np.allclose(lower.values, cdf.values, atol=1e-12)


def test_sdcb_full_clipping():
    cdf = DiscreteCdf.from_pmf([0, 0, 1, 1])
    # padding sqrt(beta ln t / k) >= 1
    g = sdcb_lower_cdf(cdf, 1, 100, 1.0)
    assert np.all(g.values == 1.0)
    assert np.array_equal(g.values, optimistic_cdf(cdf, 1, 100, 0, 1.0).values)


def test_sdcb_requires_static_occurrence():
    with pytest.raises(ValueError):
        sdcb_equivalence_check(DiscreteCdf.from_pmf([1]), 1, 5, 2, 0.6)


def test_regret_stays_under_bound_small_run():
    inst = StaticInstance(
        tuple(DiscreteCdf.from_pmf(p) for p in ([6, 3, 1, 0, 0], [1, 4, 4, 1, 0], [0, 2, 4, 3, 1], [0, 0, 2, 4, 4])),
        1.0,
        2,
    )
    reps = [run_static_episode(inst, PolicySpec("ltra", 2), 1500, rng_seed=s) for s in range(5)]
    rep = regret_report(inst, reps)
    assert np.all(rep.empirical_regret_series < rep.theorem_bound)
    assert rep.optimal_subset == optimal_subset(inst)[0]
    assert rep.suboptimal_arms == tuple(gaps(inst))


def test_pseudo_regret_zero_when_all_arms_played():
    inst = StaticInstance(tuple(DiscreteCdf.from_pmf(p) for p in ([1, 2, 1], [2, 1, 1], [1, 1, 2])), 1.0, 3)
    reps = [run_static_episode(inst, PolicySpec("ltra", 3), 50, rng_seed=s) for s in range(3)]
    rep = regret_report(inst, reps, pseudo=True)
    assert np.all(rep.empirical_regret_series == 0.0)


def test_pseudo_regret_counts_subset_gaps():
    inst = point_instance([0.2, 0.5, 0.9], k=1)
    recs = run_static_episode(inst, PolicySpec("random"), 300, rng_seed=0)
    mean, _ = pseudo_regret(inst, [recs])
    expected = np.cumsum([inst.arms[r.chosen[0]].mean() - 0.2 for r in recs])
    assert np.allclose(mean, expected)
