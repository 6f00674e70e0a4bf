from fractions import Fraction

import pytest

from localmean.counting import (EnumerationGuardError, RootedCounts, SubtreeTable, global_stats, is_astral,
                                local_mean, mean_lower_bound_check, oracle_stats, pair_total_order, rooted_stats,
                                subtree_stats)
from localmean.tree import Subtree, all_labeled_trees, enumerate_subtrees, generate, sample_labeled_trees


def test_rooted_stats_small_cases():
    # P3 rooted at the middle: {1}, {0,1}, {1,2}, {0,1,2}
    st = rooted_stats(generate("path", [3]), 1)
    assert (st.N, st.R) == (4, 8)
    star = generate("star", [5])
    assert rooted_stats(star, 0).N == 16
    assert rooted_stats(star, 1, [0]).N == 1


def test_global_stats():
    g = global_stats(generate("path", [2]))
    assert (g.stats.N, g.stats.R, g.mean, g.density) == (3, 4, Fraction(4, 3), Fraction(2, 3))
    g = global_stats(generate("star", [5]))
    assert (g.stats.N, g.stats.R) == (20, 52)


def test_pair_total_order_matches_oracle():
    for t in all_labeled_trees(6):
        for v, w in t.edges:
            assert pair_total_order(t, v, w) == oracle_stats(t, [v, w]).R


def test_subtree_stats_against_both_oracles():
    for t in list(all_labeled_trees(5)) + sample_labeled_trees(9, 20, seed=3):
        table = SubtreeTable(t)
        for S in enumerate_subtrees(t):
            st = subtree_stats(t, S)
            assert st == table.stats(S.mask)
            if t.n <= 5:
                assert st == oracle_stats(t, S)


def test_oracle_order_filter():
    star = generate("star", [5])
    assert oracle_stats(star, k=3) == oracle_stats(star, k=3, method="table")
    assert oracle_stats(star, k=3).N == 6


def test_guard_and_override(monkeypatch):
    big = generate("path", [17])
    with pytest.raises(EnumerationGuardError):
        oracle_stats(big)
    monkeypatch.setenv("SUBTREE_MAX_ENUM", "17")
    assert oracle_stats(big).N == 17 * 18 // 2


def test_mask_stats_is_boundary_product():
    t = generate("ib-example")
    rc = RootedCounts(t)
    table = SubtreeTable(t)
    for S in enumerate_subtrees(t):
        assert rc.mask_stats(S.mask) == (int(table.N[S.mask]), int(table.R[S.mask]))


def test_lower_bound_tight_iff_astral():
    for n in range(2, 8):
        for t in all_labeled_trees(n):
            for v in range(n):
                chk = mean_lower_bound_check(t, v)
                assert chk.holds
                assert chk.tight == is_astral(t, v)


def test_local_mean_contraction_shift():
    t = generate("two-stars", [2, 3])
    S = Subtree(t, [0, 1, 2])
    assert local_mean(t, S) == Fraction(subtree_stats(t, S).R, subtree_stats(t, S).N)
