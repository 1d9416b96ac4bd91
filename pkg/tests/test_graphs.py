import numpy as np
import pytest

import expanderlab as xl


def brute_involution_ok(g):
    """Independent re-check of the oracle table, one lookup at a time."""
    for j in range(g.n):
        for kappa in range(g.degree):
            if g.neighbor(g.neighbor(j, kappa), kappa) != j:
                return False
    return True


class TestValidate:
    def test_all_self_loop_ok(self):
        assert xl.validate(xl.all_self_loop_graph(8, 3)).ok

    def test_broken_involution_reported_at_first_pair(self):
        adj = np.tile(np.arange(3)[:, None], (1, 2))
        adj[0, 1] = 1
        adj[1, 1] = 2
        adj[2, 1] = 0  # keeps totality, breaks the involution
        report = xl.validate(xl.ColoredGraph(adj))
        assert not report.ok
        assert report.violation == (0, 1)

    def test_out_of_range_entry_reported(self):
        adj = np.zeros((2, 1), dtype=np.int64)
        adj[1, 0] = 5
        report = xl.validate(xl.ColoredGraph(adj))
        assert not report.ok and "range" in report.reason

    def test_sampled_graphs_validate(self):
        rng = np.random.default_rng(0)
        for seed in range(5):
            p = xl.DistributionParams(n=16, m=20, ell=2, d=3, seed=seed)
            out = xl.sample_graph(p, rng)
            assert xl.validate(out.graph).ok
            assert brute_involution_ok(out.graph)


class TestNeighbor:
    def test_self_loop_identity(self):
        g = xl.all_self_loop_graph(8, 3)
        assert g.neighbor(3, 2) == 3

    def test_cycle_matchings(self):
        g = xl.two_colored_cycle(8)
        # color 0 pairs consecutive even/odd vertices
        assert g.neighbor(0, 0) == 1
        assert g.neighbor(1, 0) == 0
        assert g.neighbor(1, 1) == 2
        assert g.neighbor(0, 1) == 7

    def test_involution_everywhere(self, small_corpus):
        for g in small_corpus:
            assert brute_involution_ok(g)

    def test_out_of_range_rejected(self):
        g = xl.two_colored_cycle(4)
        with pytest.raises(IndexError):
            g.neighbor(4, 0)
        with pytest.raises(IndexError):
            g.neighbor(0, 2)
        with pytest.raises(IndexError):
            g.neighbor(-1, 0)


class TestOracleContext:
    def test_neighbor_counts_queries(self):
        ctx = xl.OracleContext(xl.two_colored_cycle(4))
        ctx.neighbor(0, 0)
        ctx.neighbor(1, 1)
        assert ctx.queries == 2
        ctx.charge(2)
        assert ctx.queries == 4

    def test_pure_utilities_do_not_count(self):
        g = xl.two_colored_cycle(8)
        ctx = xl.OracleContext(g)
        xl.validate(g)
        xl.components(g)
        assert ctx.queries == 0


class TestRelabel:
    def test_identity(self):
        g = xl.two_colored_cycle(8)
        assert xl.relabel(g, xl.Permutation.identity(8)) == g

    def test_self_loops_invariant(self):
        g = xl.all_self_loop_graph(8, 2)
        perm = xl.Permutation.random(8, np.random.default_rng(3))
        assert xl.relabel(g, perm) == g

    def test_four_cycle_under_transposition_hand_oracle(self):
        g = xl.two_colored_cycle(4)
        perm = xl.Permutation.transposition(4, 0, 1)
        # hand-applied adj'(j,k) = p^-1(adj(p(j),k)) on all 8 pairs
        expected = np.array([[1, 2], [0, 3], [3, 0], [2, 1]])
        got = xl.relabel(g, perm)
        assert np.array_equal(got.adj, expected)
        assert xl.validate(got).ok
        assert xl.components(got).size_multiset() == xl.components(g).size_multiset()

    def test_round_trip(self, small_corpus):
        rng = np.random.default_rng(11)
        for g in small_corpus:
            perm = xl.Permutation.random(g.n, rng)
            assert xl.relabel(xl.relabel(g, perm), perm.inverted()) == g

    def test_component_multiset_preserved(self, small_corpus):
        rng = np.random.default_rng(12)
        for g in small_corpus:
            perm = xl.Permutation.random(g.n, rng)
            assert (xl.components(xl.relabel(g, perm)).size_multiset()
                    == xl.components(g).size_multiset())


class TestComponents:
    def test_self_loops_are_singletons(self):
        part = xl.components(xl.all_self_loop_graph(8, 3))
        assert part.n_components == 8
        assert part.size_multiset() == (1,) * 8

    def test_two_disjoint_cycles(self):
        g = xl.disjoint_union(xl.two_colored_cycle(4), xl.two_colored_cycle(4))
        part = xl.components(g)
        assert part.size_multiset() == (4, 4)

    def test_sampled_components_match_blocks_when_blocks_connect(self):
        rng = np.random.default_rng(5)
        p = xl.DistributionParams(n=64, m=72, ell=2, d=6, seed=9)
        hits = 0
        for _ in range(10):
            out = xl.sample_graph(p, rng)
            if out.aborted:
                continue
            part = xl.components(out.graph)
            # components never straddle blocks
            for comp in range(part.n_components):
                blocks = set(out.k_map[part.members(comp)].tolist())
                assert len(blocks) == 1
            if part.n_components == p.ell:
                # then components are exactly the block preimages
                for comp in range(part.n_components):
                    members = set(part.members(comp).tolist())
                    block = out.k_map[next(iter(members))]
                    assert members == set(out.block_preimage(block).tolist())
                hits += 1
        assert hits > 0


class TestSerialization:
    def test_binary_round_trip(self, tmp_path, small_corpus):
        for i, g in enumerate(small_corpus):
            path = tmp_path / f"g{i}.cgph"
            xl.save_graph(g, path)
            assert xl.load_graph(path) == g

    def test_csv_round_trip(self, tmp_path):
        g = xl.complete_four_graph()
        path = tmp_path / "k4.csv"
        xl.save_graph_csv(g, path)
        assert xl.load_graph_csv(path) == g

    def test_bad_magic_rejected(self, tmp_path):
        path = tmp_path / "junk.cgph"
        path.write_bytes(b"NOPE" + b"\x00" * 32)
        with pytest.raises(ValueError, match="magic"):
            xl.load_graph(path)

    def test_partial_csv_rejected(self, tmp_path):
        path = tmp_path / "partial.csv"
        path.write_text("0,0,1\n1,0,0\n0,1,1\n")  # (1,1) missing
        with pytest.raises(ValueError, match="total"):
            xl.load_graph_csv(path)


class TestRestrict:
    def test_component_restriction_is_regular(self, desk_yes_samples):
        out = desk_yes_samples[0]
        part = xl.components(out.graph)
        sub = xl.restrict_to(out.graph, part.members(0))
        assert sub.degree == out.graph.degree
        assert xl.validate(sub).ok

    def test_non_closed_set_rejected(self):
        g = xl.two_colored_cycle(8)
        with pytest.raises(ValueError, match="closed"):
            xl.restrict_to(g, [0, 1, 2])
