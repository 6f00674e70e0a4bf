from fractions import Fraction

import pytest

from localmean.counting import RootedCounts
from localmean.density import (density_lower_bound_check, density_step_equivalence, global_vs_local_density,
                               limb_absorption_check, local_density, max_density_subtree, max_vertex_density,
                               rooted_type, two_vertex_comparison)
from localmean.structure import core_decomposition
from localmean.tree import SubtreeError, Tree, all_labeled_trees, enumerate_subtrees, generate

F = Fraction
HALF = F(1, 2)


@pytest.fixture
def fig10():
    # c = 0, d = 1, v = 2 (a leaf of c)
    return generate("two-stars", [2, 2])


def test_figure_ten_values(fig10):
    assert local_density(fig10, [0, 2]).value == F(21, 40)
    assert local_density(fig10, [0]).value == F(13, 25)
    assert local_density(fig10, [2]).value == F(31, 55)


def test_errors(fig10):
    with pytest.raises(SubtreeError):
        local_density(fig10, range(6))
    with pytest.raises(SubtreeError):
        local_density(fig10, [])


def test_order_n_minus_one_is_half():
    for t in all_labeled_trees(6):
        for v in t.leaves():
            assert local_density(t, [x for x in range(6) if x != v]).value == HALF


def test_star_leaf_formula():
    for n in range(3, 12):
        t = generate("star", [n])
        assert local_density(t, [1]).value == F(n * 2 ** (n - 3), (n - 1) * (2 ** (n - 2) + 1))


def test_step_equivalence_figure_ten(fig10):
    lhs, rhs, leq, req = density_step_equivalence(fig10, [0, 2], 2, "remove-leaf")
    assert lhs and rhs and not leq and not req
    with pytest.raises(SubtreeError):
        density_step_equivalence(fig10, [0], 0, "remove-leaf")


def test_step_equivalence_exhaustive():
    for n in range(3, 7):
        for t in all_labeled_trees(n):
            rc = RootedCounts(t)
            for S in enumerate_subtrees(t):
                if S.order == n:
                    continue
                if S.order >= 2:
                    for v in S.leaves():
                        lhs, rhs, leq, req = density_step_equivalence(t, S, v, "remove-leaf", rc)
                        assert lhs == rhs and leq == req
                if S.order + 1 < n:
                    for v in S.neighbors():
                        lhs, rhs, leq, req = density_step_equivalence(t, S, v, "add-neighbor", rc)
                        assert lhs == rhs and leq == req


def test_lower_bound_and_tightness():
    for n in range(2, 7):
        for t in all_labeled_trees(n):
            core = core_decomposition(t).core
            for S in enumerate_subtrees(t):
                if S.order == n:
                    continue
                holds, tight = density_lower_bound_check(t, S)
                assert holds and tight == (core <= S.vertices)
                assert local_density(t, S).value < 1


def test_lower_bound_examples(fig10):
    assert all(density_lower_bound_check(generate("path", [6]), S)[1]
               for S in enumerate_subtrees(generate("path", [6])) if S.order < 6)
    assert density_lower_bound_check(fig10, [2]) == (True, False)
    t = generate("ib-example")
    # core minus one of its leaves
    assert local_density(t, [1, 2, 3]).value > HALF


def test_limb_absorption(fig10):
    assert limb_absorption_check(fig10, [0, 2]) == []
    assert limb_absorption_check(fig10, [2]) is None
    for n in range(3, 7):
        for t in all_labeled_trees(n):
            for S in enumerate_subtrees(t):
                if S.order < n:
                    assert limb_absorption_check(t, S) in (None, [])


def test_rooted_types():
    assert rooted_type(generate("path", [2]), 0).kind == "H"
    assert rooted_type(generate("path", [2]), 0).witness == (HALF, HALF)
    for n in range(2, 8):
        for t in all_labeled_trees(n):
            for v in range(n):
                r = rooted_type(t, v)
                assert r.consistent
                if t.degree(v) >= 2:
                    assert r.kind == "L"
                elif r.kind == "H":
                    bigger = Tree(n + 1, list(t.edges) + [(v, n)])
                    assert rooted_type(bigger, n).kind == "H"
    with pytest.raises(ValueError):
        rooted_type(generate("path", [1]), 0)


def test_two_vertex_comparison(fig10):
    rep = two_vertex_comparison(fig10, 2, 0)
    assert rep.case == "leaf" and rep.violations == []
    assert rep.D_v > rep.D_vw > rep.D_w
    # P4 middle edge: both sides are single edges, identities checked inside
    rep = two_vertex_comparison(generate("path", [4]), 1, 2)
    assert rep.case == "interior" and rep.violations == []
    with pytest.raises(ValueError):
        two_vertex_comparison(fig10, 2, 3)
    with pytest.raises(SubtreeError):
        two_vertex_comparison(generate("path", [2]), 0, 1)


def test_two_vertex_corollary_on_branching_edge():
    t = generate("caterpillar", [2, 2])
    rep = two_vertex_comparison(t, 0, 1)
    assert rep.violations == [] and rep.D_vw < max(rep.D_v, rep.D_w)


def test_table_cells_exhaustive_small():
    for n in range(3, 8):
        for t in all_labeled_trees(n):
            rc = RootedCounts(t)
            for v, w in t.edges:
                assert two_vertex_comparison(t, v, w, rc).violations == []


def test_max_density(fig10):
    r = max_density_subtree(fig10)
    assert [S.sorted() for S in r.optima] == [(2,), (3,), (4,), (5,)]
    assert r.value == F(31, 55) and r.violations == ()
    assert set(r.structure_class) == {"limb-path-with-leaf"}
    star = max_density_subtree(generate("star", [7]))
    assert [S.sorted() for S in star.optima] == [(v,) for v in range(1, 7)]
    path = max_density_subtree(generate("path", [5]))
    assert path.value == HALF and len(path.optima) == 14 and set(path.structure_class) == {"degenerate"}


def test_figure_ten_half_iff_core_inside(fig10):
    # the single-centre subtrees {c, v, v'} sit at 8/15, strictly between 1/2 and 31/55
    for S in enumerate_subtrees(fig10):
        if S.order < 6:
            assert (local_density(fig10, S).value == HALF) == ({0, 1} <= S.vertices)
    assert local_density(fig10, [0, 2, 3]).value == F(8, 15)


def test_global_vs_local():
    r = global_vs_local_density(generate("star", [4]))
    assert r["max_vertex"] == F(8, 15)
    assert r["min_vertex"] < r["global"] < r["max_vertex"]
    r = global_vs_local_density(generate("path", [2]))
    assert r["min_vertex"] == r["max_vertex"] == HALF and r["global"] == F(2, 3)


def test_max_vertex_density_broom():
    d, v = max_vertex_density(generate("broom", [16, 8]))
    assert v == 0 and 0.79 < float(d) < 0.80
