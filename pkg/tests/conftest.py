import numpy as np
import pytest
from hypothesis import strategies as st

from replica_bandit.bandit_core import DiscreteCdf


def random_cdf(rng: np.random.Generator, level_count: int, sparsity: float = 0.3) -> DiscreteCdf:
    pmf = rng.random(level_count)
    pmf[rng.random(level_count) < sparsity] = 0.0
    if pmf.sum() == 0:
        pmf[rng.integers(level_count)] = 1.0
    return DiscreteCdf.from_pmf(pmf)


@st.composite
def cdfs(draw, level_count=None, max_levels=8):
    l = level_count if level_count is not None else draw(st.integers(1, max_levels))
    weights = draw(st.lists(st.integers(0, 5), min_size=l, max_size=l).filter(lambda w: sum(w) > 0))
    return DiscreteCdf.from_pmf(weights)


@st.composite
def cdf_families(draw, min_size=1, max_size=4, max_levels=6):
    l = draw(st.integers(1, max_levels))
    n = draw(st.integers(min_size, max_size))
    return [draw(cdfs(level_count=l)) for _ in range(n)]


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# one line per acceptance criterion, printed after the run
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
