"""Randomised checks on trees a bit larger than the exhaustive corpus reaches."""

from fractions import Fraction

from hypothesis import given, settings
from hypothesis import strategies as st

from localmean.counting import RootedCounts, SubtreeTable, global_stats, local_mean, subtree_stats
from localmean.density import density_lower_bound_check, local_density, type_from_counts
from localmean.structure import core_decomposition, index
from localmean.tree import Subtree, Tree, contract, enumerate_subtrees


def prufer_tree(n, code):
    deg = [1] * n
    for c in code:
        deg[c] += 1
    edges = []
    for c in code:
        leaf = min(i for i in range(n) if deg[i] == 1)
        edges.append((leaf, c))
        deg[leaf] -= 1
        deg[c] -= 1
    a, b = [i for i in range(n) if deg[i] == 1]
    edges.append((a, b))
    return Tree(n, edges)


@st.composite
def trees(draw, lo=3, hi=13):
    n = draw(st.integers(lo, hi))
    code = draw(st.lists(st.integers(0, n - 1), min_size=n - 2, max_size=n - 2))
    return prufer_tree(n, code)


@st.composite
def tree_and_subtree(draw, lo=3, hi=13):
    t = draw(trees(lo, hi))
    # grow a random connected set from a random root
    S = {draw(st.integers(0, t.n - 1))}
    size = draw(st.integers(1, t.n))
    while len(S) < size:
        frontier = sorted({w for v in S for w in t.adjacency[v]} - S)
        S.add(draw(st.sampled_from(frontier)))
    return t, Subtree(t, S)


SET = settings(max_examples=60, deadline=None)


@SET
@given(tree_and_subtree())
def test_recurrences_match_table(ts):
    t, S = ts
    assert subtree_stats(t, S) == SubtreeTable(t).stats(S.mask)


@SET
@given(tree_and_subtree())
def test_index_lemma(ts):
    t, S = ts
    rc = RootedCounts(t)
    mu = local_mean(t, S)
    for w in S.neighbors():
        assert local_mean(t, S.plus(w)) - mu == index(t, w, S, rc)
    for v in S.leaves() if S.order > 1 else ():
        assert mu - local_mean(t, S.minus(v)) == index(t, v, S, rc)


@SET
@given(tree_and_subtree())
def test_density_bound_and_core_tightness(ts):
    t, S = ts
    if S.order == t.n:
        return
    holds, tight = density_lower_bound_check(t, S)
    assert holds
    assert tight == (core_decomposition(t).core <= S.vertices)
    assert Fraction(0) < local_density(t, S).value < 1


@SET
@given(tree_and_subtree(lo=2, hi=12))
def test_contraction_shifts_mean(ts):
    t, S = ts
    r = contract(t, S)
    small = Subtree(r.contracted, [r.image])
    assert local_mean(t, S) == local_mean(r.contracted, small) + S.order - 1
    if S.order < t.n:
        assert local_density(t, S).value == local_density(r.contracted, small).value


@SET
@given(trees(lo=2, hi=12))
def test_rooted_type_tests_agree(t):
    rc = RootedCounts(t)
    for v in range(t.n):
        N, R = rc.mask_stats(1 << v)
        ty = type_from_counts(N, R, t.n)
        assert ty.consistent


@settings(max_examples=25, deadline=None)
@given(trees(lo=4, hi=10))
def test_enumeration_count(t):
    assert sum(1 for _ in enumerate_subtrees(t)) == global_stats(t).stats.N
