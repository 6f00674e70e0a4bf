from fractions import Fraction

import pytest

from localmean.counting import RootedCounts, local_mean
from localmean.structure import (core_decomposition, half_index_predicate, index, mu_exclude, mu_include,
                                 outer_neighbor_monotonicity_check)
from localmean.tree import Subtree, SubtreeError, all_labeled_trees, caterpillar, enumerate_subtrees, generate


@pytest.fixture
def fig2():
    # S = {0}, w = 2 (degree 3), v = 1
    return caterpillar([0, 0, 2])


def test_figure_two_indices(fig2):
    assert index(fig2, 2, 0) == Fraction(2, 5)
    assert index(fig2, 1, 0) == Fraction(13, 30)


def test_index_range_and_half_case():
    p = generate("path", [5])
    assert all(index(p, v + 1, v) == Fraction(1, 2) for v in range(4))
    # middle of a P3 seen from outside: component is a path but v is not its end
    t = generate("spider", [1, 1, 1])  # star with centre 0
    assert index(t, 1, 0) == Fraction(1, 2)
    assert index(t, 0, 1) < Fraction(1, 2)
    assert not half_index_predicate(t, 0, 1)


def test_index_lemma_small_example(fig2):
    S = Subtree(fig2, [0, 1])
    assert mu_include(fig2, S, 2) == local_mean(fig2, [0, 1, 2])
    assert mu_exclude(fig2, S, 1) == local_mean(fig2, [0])
    with pytest.raises(SubtreeError):
        mu_include(fig2, S, 3)
    with pytest.raises(SubtreeError):
        mu_exclude(fig2, Subtree(fig2, [0, 1, 2]), 1)


def test_index_lemma_exhaustive():
    for n in range(2, 7):
        for t in all_labeled_trees(n):
            rc = RootedCounts(t)
            for S in enumerate_subtrees(t):
                mu = local_mean(t, S)
                for w in S.neighbors():
                    assert local_mean(t, S.plus(w)) - mu == index(t, w, S, rc)
                if S.order >= 2:
                    for v in S.leaves():
                        assert mu - local_mean(t, S.minus(v)) == index(t, v, S, rc)


def test_half_index_iff_path_ending_at_v():
    for n in range(2, 8):
        for t in all_labeled_trees(n):
            rc = RootedCounts(t)
            for a, b in t.edges:
                for v, w in ((a, b), (b, a)):
                    i = rc.index(v, w)
                    assert 0 < i <= Fraction(1, 2)
                    assert (i == Fraction(1, 2)) == half_index_predicate(t, v, w)


def test_core_examples():
    d = core_decomposition(generate("two-stars", [2, 2]))
    assert d.core == {0, 1} and d.joint_vertices == {0, 1}
    assert d.core_paths == ((0, 1),)
    d = core_decomposition(generate("star", [5]))
    assert d.core == {0} and d.core_paths == () and len(d.limbs) == 4
    d = core_decomposition(generate("ib-example"))
    assert d.core == {0, 1, 2, 3}
    assert d.limbs == ((4, 6), (5, 7), (8, 10), (9, 11))
    assert d.core_paths == ((0, 1, 2, 3),)


def test_path_convention():
    d = core_decomposition(generate("path", [4]))
    assert d.degenerate and not d.core and d.limbs == ((0, 1, 2, 3),)
    assert core_decomposition(generate("path", [1])).limbs == ((0,),)


def test_limb_vertex_iff_half_index_neighbour():
    for n in range(3, 9):
        trees = all_labeled_trees(n) if n <= 6 else (generate("caterpillar", [1, 0, 2, 1]), generate("ib-example"))
        for t in trees:
            d = core_decomposition(t)
            rc = RootedCounts(t)
            for v in range(t.n):
                half = any(rc.index(v, w) == Fraction(1, 2) for w in t.adjacency[v])
                assert (v in d.limb_vertices) == half


def test_core_is_a_subtree_and_limbs_partition():
    for n in range(2, 8):
        for t in all_labeled_trees(n):
            d = core_decomposition(t)
            if d.core:
                Subtree(t, d.core)
            assert d.core | d.limb_vertices == set(range(n))
            assert not d.core & d.limb_vertices


def test_monotonicity_examples():
    t = generate("ib-example")
    assert outer_neighbor_monotonicity_check(t, [0, 4, 5]) == []
    with pytest.raises(SubtreeError):
        outer_neighbor_monotonicity_check(t, range(12))
