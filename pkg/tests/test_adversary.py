import math
from dataclasses import replace

import numpy as np
import pytest

import expanderlab as xl
from expanderlab.adversary import RelationStats

# the tiny explicit instance: petals {0,1},{0,2} against all 2-sets around 0
N6 = 6
SUNFLOWER6 = [frozenset({0, 1}), frozenset({0, 2})]
IDEAL6 = list(xl.ideal_family([0], 2, N6))


@pytest.fixture(scope="module")
def rel6():
    return xl.build_permutation_relation(SUNFLOWER6, IDEAL6, 2, N6)


@pytest.fixture(scope="module")
def stats6(rel6):
    return xl.relation_stats(rel6)


def set_mapped_to_window(pair, k):
    return frozenset(int(pair.inverse[t]) for t in range(k))


class TestConstruction:
    def test_every_oracle_maps_a_family_set_onto_window(self, rel6):
        for x in rel6.x_side:
            assert set_mapped_to_window(x, 2) in SUNFLOWER6
        for y in rel6.y_side:
            assert set_mapped_to_window(y, 2) in IDEAL6

    def test_window_sizes(self, rel6):
        # each family set contributes k! (n-k)! permutations
        assert len(rel6.x_side) == len(SUNFLOWER6) * math.factorial(2) * math.factorial(4)
        assert len(rel6.y_side) == len(IDEAL6) * math.factorial(2) * math.factorial(4)

    def test_agreement_and_swap_conditions(self, rel6):
        # conditions on every related pair: agreement off the symmetric
        # difference, value swap across it
        for xi, yi in rel6.pairs:
            x, y = rel6.x_side[xi], rel6.y_side[yi]
            s_x = set_mapped_to_window(x, 2)
            s_y = set_mapped_to_window(y, 2)
            for j in range(N6):
                if j not in (s_x | s_y) or j in (s_x & s_y):
                    assert x.forward[j] == y.forward[j]
            for j1 in s_x - s_y:
                partners = [j2 for j2 in s_y - s_x
                            if x.forward[j1] == y.forward[j2]
                            and x.forward[j2] == y.forward[j1]]
                assert len(partners) == 1

    def test_identical_sets_make_identical_pairs(self):
        rel = xl.build_permutation_relation([SUNFLOWER6[0]], [SUNFLOWER6[0]], 2, N6)
        stats = xl.relation_stats(rel)
        assert stats.degenerate and stats.l_max == 0
        for xi, yi in rel.pairs:
            assert rel.x_side[xi].forward == rel.y_side[yi].forward

    def test_scale_refusal(self):
        with pytest.raises(ValueError, match="refuses"):
            xl.build_permutation_relation([frozenset(range(2))],
                                          [frozenset(range(2))], 2, 9)


class TestStats:
    def test_degree_identities(self, stats6):
        assert stats6.m_lo == stats6.m_hi == len(IDEAL6)
        assert stats6.mp_lo == stats6.mp_hi == len(SUNFLOWER6)

    def test_relation_size(self, rel6, stats6):
        assert stats6.n_pairs == len(SUNFLOWER6) * len(IDEAL6) * 2 * 24
        assert stats6.n_pairs == len(rel6.pairs)

    def test_forward_l_max_respects_frequency_cap(self, stats6):
        # the containment-frequency estimate applies to forward positions;
        # precondition (zeta-|F|)/(n-|F|) <= (zeta/n)^(1-mu) holds here
        cap = (2 / N6) ** 0.5 * len(SUNFLOWER6) * len(IDEAL6)
        assert (2 - 1) / (N6 - 1) <= (2 / N6) ** 0.5
        assert stats6.l_max_forward <= cap

    def test_inverse_positions_carry_complement_counts(self, stats6):
        # worst product over all 2N positions: 4 ideal sets avoid the petal
        # point times 2 sunflower sets avoid the ideal point
        assert stats6.l_max == 8
        assert stats6.l_max > stats6.l_max_forward == 4

    def test_singleton_relation(self):
        rel = xl.build_permutation_relation([frozenset({0, 1})],
                                            [frozenset({0, 2})], 2, 4)
        stats = xl.relation_stats(rel)
        assert stats.m_lo == stats.m_hi == 1
        assert stats.mp_lo == stats.mp_hi == 1
        assert stats.l_max == 1

    def test_invariant_under_relabeling(self, stats6):
        rng = np.random.default_rng(0)
        rho = rng.permutation(N6)
        fam = [frozenset(int(rho[v]) for v in s) for s in SUNFLOWER6]
        ide = [frozenset(int(rho[v]) for v in s) for s in IDEAL6]
        stats = xl.relation_stats(xl.build_permutation_relation(fam, ide, 2, N6))
        assert stats == stats6


class TestUnion:
    def test_disjoint_slices_preserve_extrema(self):
        rel2 = xl.build_permutation_relation(SUNFLOWER6, IDEAL6, 2, N6)
        fam3 = [frozenset({0, 1, 2}), frozenset({0, 2, 3})]
        ideal3 = list(xl.ideal_family([0], 3, N6))
        rel3 = xl.build_permutation_relation(fam3, ideal3, 3, N6)
        s2, s3 = xl.relation_stats(rel2), xl.relation_stats(rel3)
        union = xl.union_relations([rel2, rel3])
        su = xl.relation_stats(union)
        assert su.m_lo == min(s2.m_lo, s3.m_lo)
        assert su.m_hi == max(s2.m_hi, s3.m_hi)
        assert su.mp_lo == min(s2.mp_lo, s3.mp_lo)
        assert su.mp_hi == max(s2.mp_hi, s3.mp_hi)
        assert su.l_max == max(s2.l_max, s3.l_max)
        assert su.n_pairs == s2.n_pairs + s3.n_pairs

    def test_overlapping_supports_rejected(self, rel6):
        with pytest.raises(ValueError, match="overlap"):
            xl.union_relations([rel6, rel6])


class TestBounds:
    def test_half_eps_vanishes(self, stats6):
        assert xl.query_lower_bound(stats6, 0.5).value == pytest.approx(0.0, abs=1e-12)

    def test_zero_eps_closed_form(self, stats6):
        b = xl.query_lower_bound(stats6, 0.0)
        assert not b.vacuous
        assert b.value == pytest.approx(
            math.sqrt(stats6.m_lo * stats6.mp_lo / stats6.l_max))

    def test_vacuity_flagged_not_faked(self):
        stats = RelationStats(m_lo=1, m_hi=10, mp_lo=1, mp_hi=10, l_max=4,
                              l_max_forward=4, n_x=10, n_y=10, n_pairs=10)
        b = xl.query_lower_bound(stats, 0.4)
        assert b.vacuous and b.value == 0.0

    def test_degenerate_relation_rejected(self):
        stats = RelationStats(1, 1, 1, 1, 0, 0, 1, 1, 1, degenerate=True)
        with pytest.raises(ValueError, match="l_max"):
            xl.query_lower_bound(stats, 0.1)

    def test_monotonicity_properties(self):
        rng = np.random.default_rng(1)
        for _ in range(200):
            m_lo = int(rng.integers(1, 50))
            m_hi = m_lo + int(rng.integers(0, 50))
            mp_lo = int(rng.integers(1, 50))
            mp_hi = mp_lo + int(rng.integers(0, 50))
            l1 = int(rng.integers(1, 100))
            l2 = l1 + int(rng.integers(0, 100))
            e1, e2 = sorted(rng.uniform(0, 0.5, size=2))
            base = RelationStats(m_lo, m_hi, mp_lo, mp_hi, l1, l1, 1, 1, 1)
            # non-increasing in eps and l_max, non-decreasing in m_lo
            assert (xl.query_lower_bound(base, e1).value
                    >= xl.query_lower_bound(base, e2).value - 1e-12)
            worse_l = replace(base, l_max=l2)
            assert (xl.query_lower_bound(base, e1).value
                    >= xl.query_lower_bound(worse_l, e1).value - 1e-12)
            better_m = replace(base, m_lo=m_lo + 1, m_hi=max(m_hi, m_lo + 1))
            assert (xl.query_lower_bound(better_m, e1).value
                    >= xl.query_lower_bound(base, e1).value - 1e-12)

    def test_distinguishing_wrapper(self, stats6):
        assert xl.distinguishing_lower_bound(stats6, 0.25).value == pytest.approx(0.0, abs=1e-12)
        assert (xl.distinguishing_lower_bound(stats6, 0.1).value
                == xl.query_lower_bound(stats6, 0.2).value)

    def test_closed_forms(self):
        delta, mu = 0.1, 0.5
        perm = xl.sunflower_permutation_bound(N6, 2, mu, delta)
        expected = ((1 - 2 * math.sqrt(2 * delta * (1 - 2 * delta)))
                    * (1 - 4 * delta) * math.sqrt((N6 / 2) ** (1 - mu)))
        assert perm == pytest.approx(expected)
        assert xl.sunflower_graph_bound(N6, 2, mu, delta) == pytest.approx(perm / 2)

    def test_closed_form_dominates_brute_stats_bound(self, stats6):
        # the closed form divides by the analytic frequency cap; the brute
        # l_max is at least that cap, so the closed form is the larger bound
        delta = 0.1
        closed = xl.sunflower_permutation_bound(N6, 2, 0.5, delta)
        brute = xl.distinguishing_lower_bound(stats6, delta)
        assert closed >= brute.value - 1e-12

    def test_quarter_delta_vanishes(self, stats6):
        assert xl.sunflower_permutation_bound(N6, 2, 0.5, 0.2499) < 0.01
        assert xl.distinguishing_lower_bound(stats6, 0.25).value == pytest.approx(0.0, abs=1e-12)
