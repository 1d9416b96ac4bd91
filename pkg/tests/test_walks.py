import math

import numpy as np
import pytest

import expanderlab as xl


class TestWalkCore:
    def test_single_vertex_core_never_aborts(self):
        g = xl.two_colored_cycle(16)
        wp = xl.WalkParams(core_size=1, stride=3, retained=5)
        rng = np.random.default_rng(0)
        for _ in range(20):
            out = xl.sample_walk_core(g, wp, rng)
            assert not out.aborted
            assert out.core == (out.start,)

    def test_all_self_loops_always_abort(self):
        g = xl.all_self_loop_graph(8, 3)
        wp = xl.WalkParams(core_size=2, stride=2, retained=50)
        rng = np.random.default_rng(1)
        for _ in range(20):
            out = xl.sample_walk_core(g, wp, rng)
            assert out.aborted and out.core is None
            assert set(out.retained) == {out.start}

    def test_core_stays_in_start_component(self, desk_yes_samples):
        sample = desk_yes_samples[0]
        part = xl.components(sample.graph)
        wp = xl.WalkParams(core_size=4, stride=5, retained=60)
        rng = np.random.default_rng(2)
        for _ in range(10):
            out = xl.sample_walk_core(sample.graph, wp, rng)
            labels = {int(part.labels[v]) for v in out.retained}
            assert labels == {int(part.labels[out.start])}
            if not out.aborted:
                assert len(set(out.core)) == 4

    def test_determinism_and_query_accounting(self):
        g = xl.two_colored_cycle(32)
        wp = xl.WalkParams(core_size=3, stride=4, retained=30)
        a = xl.sample_walk_core(g, wp, np.random.default_rng(3))
        b = xl.sample_walk_core(g, wp, np.random.default_rng(3))
        assert a == b
        # only move steps are charged; lazy stays are free
        assert 0 <= a.queries <= (wp.retained - 1) * wp.stride
        ctx = xl.OracleContext(g)
        c = xl.sample_walk_core(g, wp, np.random.default_rng(3), ctx=ctx)
        assert ctx.queries == c.queries == a.queries

    def test_move_fraction_is_half(self):
        g = xl.two_colored_cycle(64)
        wp = xl.WalkParams(core_size=1, stride=1, retained=4001)
        out = xl.sample_walk_core(g, wp, np.random.default_rng(4))
        total = (wp.retained - 1) * wp.stride
        sigma = math.sqrt(0.25 / total)
        assert abs(out.queries / total - 0.5) <= 4 * sigma

    def test_first_retained_is_start(self):
        g = xl.two_colored_cycle(16)
        wp = xl.WalkParams(core_size=1, stride=2, retained=7)
        out = xl.sample_walk_core(g, wp, np.random.default_rng(5), start=3)
        assert out.retained[0] == out.start == 3
        assert len(out.retained) == wp.retained


class TestBatchAbort:
    def test_self_loop_control_always_aborts(self):
        from expanderlab.walks import batch_abort_rate
        g = xl.all_self_loop_graph(8, 2)
        wp = xl.WalkParams(core_size=2, stride=2, retained=10)
        rate = batch_abort_rate(g, wp, 50, np.random.default_rng(6))
        assert rate == 1.0

    def test_expander_rarely_aborts(self, desk_no_samples):
        from expanderlab.walks import batch_abort_rate
        g = desk_no_samples[0].graph
        alpha = 1 - xl.second_eigenvalue(g).value
        wp = xl.walk_params_for(4, g.n, alpha)
        ctx = xl.OracleContext(g)
        rate = batch_abort_rate(g, wp, 500, np.random.default_rng(7), ctx=ctx)
        assert rate == 0.0
        assert ctx.queries > 0

    def test_envelope_helper(self):
        env = xl.walk_abort_envelope(retained=400, component_size=256,
                                     alpha=0.3, stride=200)
        assert env >= math.exp(-400 / 16)
        # stride long enough to kill the mixing term
        assert env < 1.0


class TestWalkUniformity:
    def test_expander_preset_passes(self, desk_no_samples):
        g = desk_no_samples[0].graph
        alpha = 1 - xl.second_eigenvalue(g).value
        # stride deep enough that the sequence envelope is non-vacuous
        stride = math.ceil(math.log(10 * 30 * g.n * 50) / -math.log1p(-alpha / 2))
        wp = xl.WalkParams(core_size=3, stride=stride, retained=30)
        rep = xl.walk_uniformity_report(g, range(g.n), wp, 400,
                                        np.random.default_rng(8), alpha=alpha)
        assert not rep.vacuous
        assert rep.passed, rep

    def test_unmixed_cycle_fails_expander_envelope(self):
        # negative control: the cycle's true gap is ~0.005, so 30 lazy steps
        # leave retained samples clumped; judged against the envelope a
        # gap-1.0 expander would satisfy, the pair feature must blow through
        g = xl.two_colored_cycle(64)
        wp = xl.WalkParams(core_size=3, stride=30, retained=9)
        rep = xl.walk_uniformity_report(g, range(g.n), wp, 600,
                                        np.random.default_rng(9), alpha=1.0)
        assert not rep.vacuous
        assert not rep.passed
        assert rep.max_pair_deviation > rep.envelope

    def test_vacuous_regime_reported(self):
        g = xl.two_colored_cycle(16)
        wp = xl.WalkParams(core_size=2, stride=1, retained=10)
        rep = xl.walk_uniformity_report(g, range(g.n), wp, 50,
                                        np.random.default_rng(10), alpha=0.05)
        assert rep.vacuous and not rep.passed


class TestOrderComparison:
    def test_empty_core_gives_identical_distributions(self):
        params = xl.DistributionParams(n=32, m=36, ell=2, d=4, seed=0)
        rep = xl.compare_sampling_orders(params, 0, 300, np.random.default_rng(11))
        for entry in rep.feature_tvd.values():
            assert entry["tvd"] <= entry["ci_hi"] + 0.15

    def test_single_block_orders_close(self):
        params = xl.DistributionParams(n=32, m=36, ell=1, d=4, seed=0)
        rep = xl.compare_sampling_orders(params, 2, 300, np.random.default_rng(12))
        assert rep.feature_tvd["core_block_pattern"]["tvd"] <= 0.02
        assert rep.feature_tvd["block0_size"]["tvd"] <= 0.2

    def test_block_zero_means(self):
        # gamma = 1/4 keeps the abort atom rare so the conditional means sit
        # at their unconditional values: n/ell graph-first,
        # m + (n-m)/ell core-first
        params = xl.DistributionParams(n=256, m=320, ell=4, d=8, seed=0)
        core_size = 2
        n_samples = 600
        rep = xl.compare_sampling_orders(params, core_size, n_samples,
                                         np.random.default_rng(13))
        sd = math.sqrt(params.n * (1 / params.ell) * (1 - 1 / params.ell))
        tol = 3 * sd / math.sqrt(n_samples)
        assert abs(rep.block0_mean_graph_first - params.n / params.ell) <= tol
        expected = core_size + (params.n - core_size) / params.ell
        assert abs(rep.block0_mean_core_first - expected) <= tol

    def test_pinned_base_rejected(self):
        params = xl.DistributionParams(n=32, m=36, ell=2, d=4, pinned=(0,))
        with pytest.raises(ValueError, match="unpinned"):
            xl.compare_sampling_orders(params, 2, 10, np.random.default_rng(14))
