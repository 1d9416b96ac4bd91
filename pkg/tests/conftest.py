import numpy as np
import pytest

import expanderlab as xl


@pytest.fixture(scope="session")
def desk():
    return xl.desk_params(seed=1234)


@pytest.fixture(scope="session")
def desk_yes_samples(desk):
    """20 non-abort multi-block samples at desk scale."""
    rng = np.random.default_rng(101)
    out = []
    while len(out) < 20:
        s = xl.sample_graph(desk, rng)
        if not s.aborted:
            out.append(s)
    return out


@pytest.fixture(scope="session")
def desk_no_samples():
    """10 connected single-block samples at desk scale."""
    params = xl.DistributionParams(n=256, m=272, ell=1, d=8, seed=77)
    rng = np.random.default_rng(202)
    out = []
    while len(out) < 10:
        s = xl.sample_graph(params, rng)
        if not s.aborted and xl.components(s.graph).n_components == 1:
            out.append(s)
    return out


@pytest.fixture(scope="session")
def small_corpus():
    """Mixed small graphs: fixtures plus tiny sampled ones."""
    rng = np.random.default_rng(7)
    graphs = [
        xl.all_self_loop_graph(8, 3),
        xl.two_colored_cycle(8),
        xl.two_colored_cycle(16),
        xl.complete_four_graph(),
        xl.disjoint_union(xl.two_colored_cycle(4), xl.two_colored_cycle(4)),
    ]
    for seed in range(5):
        p = xl.DistributionParams(n=16, m=16, ell=2, d=3, seed=seed)
        res = xl.sample_nonaborting(p, rng)
        graphs.append(res.outcome.graph)
    return graphs
