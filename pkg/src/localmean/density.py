"""Local density, its lower bound, rooted tree types and the two-vertex comparison."""

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .counting import (RootedCounts, SubtreeTable, check_guard, global_stats, is_astral,
                       subtree_stats)
from .report import Violation
from .structure import HALF, core_decomposition, direction
from .tree import Subtree, SubtreeError, _bits, _popcount, as_subtree

DENSITY_MAX_N = 14

STRUCTURE_CLASSES = (
    "core-proper-avoiding-joints",
    "core-part-plus-whole-limbs",
    "limb-path-with-leaf",
)


@dataclass(frozen=True)
class DensityValue:
    value: Fraction

    def __float__(self):
        return float(self.value)


def _density(N, R, k, n):
    return Fraction(R - k * N, N * (n - k))


def local_density(tree, S):
    """``(mu(S) - k) / (n - k)`` for a proper nonempty subtree ``S`` of order ``k``."""
    if S is None or (not isinstance(S, (int, Subtree)) and len(S) == 0):
        raise SubtreeError("local density needs a nonempty subtree; see global_stats for the global density")
    S = as_subtree(tree, S)
    if S.order == tree.n:
        raise SubtreeError("local density is undefined at the whole tree")
    st = subtree_stats(tree, S)
    return DensityValue(_density(st.N, st.R, S.order, tree.n))


def density_step_equivalence(tree, S, v, mode, rc=None):
    """Both sides of the density step law, evaluated independently.

    ``mode="remove-leaf"``: ``D(S) >= D(S - v)`` against ``D(S) >= 1 - i(v; S)``.
    ``mode="add-neighbor"``: ``D(S + v) >= D(S)`` against ``D(S) >= 1 - i(v; S)``.

    Returns ``(lhs, rhs, lhs_equal, rhs_equal)``: the two inequalities and
    whether each holds with equality.
    """
    S = as_subtree(tree, S)
    n, k = tree.n, S.order
    rc = rc or RootedCounts(tree)
    if mode == "remove-leaf":
        if not 2 <= k <= n - 1:
            raise SubtreeError("leaf removal needs 2 <= |S| <= n - 1")
        if not (S.mask >> v) & 1 or S.degree(v) != 1:
            raise SubtreeError(f"vertex {v} is not a leaf of the subtree")
        big = local_density(tree, S).value
        small = local_density(tree, S.minus(v)).value
        before, after = small, big
    elif mode == "add-neighbor":
        if (S.mask >> v) & 1 or not tree.nbr_mask[v] & S.mask:
            raise SubtreeError(f"vertex {v} is not a neighbour of the subtree")
        if k + 1 >= n:
            raise SubtreeError("S + v must be proper")
        before = local_density(tree, S).value
        after = local_density(tree, S.plus(v)).value
        big = before
    else:
        raise ValueError(f"unknown mode {mode!r}")
    bound = 1 - rc.index(v, direction(tree, v, S.mask))
    return after >= before, big >= bound, after == before, big == bound


def density_lower_bound_check(tree, S):
    """``(holds, tight)`` for ``D(S) >= 1/2``; tight should match ``core <= S``."""
    D = local_density(tree, S).value
    return D >= HALF, D == HALF


@dataclass(frozen=True)
class RootedType:
    kind: str  # "H" or "L"
    witness: tuple  # (D_{T_v}(v), i(T_v))
    algebraic_low: bool  # the closed-form low-type test on N, R and n

    @property
    def consistent(self):
        return (self.kind == "L") == self.algebraic_low


def type_from_counts(N, R, n):
    """Classify a rooted tree of order ``n >= 2`` from its rooted counts."""
    if n < 2:
        raise ValueError("rooted type needs order at least 2")
    D = Fraction(R - N, N * (n - 1))
    i = Fraction(R, N * (N + 1))
    # mu < (N n + n) / (N + n), cross-multiplied
    low = R * (N + n) < N * (N * n + n)
    return RootedType("H" if D >= 1 - i else "L", (D, i), low)


def rooted_type(tree, root):
    """Type of ``tree`` viewed as rooted at ``root``.

    H when the density at the root is at least ``1 - i`` (``i`` the index of
    the whole rooted tree), L otherwise.
    """
    if tree.n < 2:
        raise ValueError("rooted type is undefined on a single vertex")
    N, R = RootedCounts(tree).away(root)
    return type_from_counts(N, R, tree.n)


def component_type(tree, v, w, rc=None):
    """Type of the component of ``v`` in ``T - vw``, rooted at ``v``; None for a singleton."""
    rc = rc or RootedCounts(tree)
    size = _popcount(tree.component(v, 1 << w))
    if size < 2:
        return None
    N, R = rc.away(v, w)
    return type_from_counts(N, R, size)


def limb_absorption_check(tree, S, decomp=None):
    """``D(S & core) <= D(S)`` with equality exactly when ``S <= core`` or ``core <= S``.

    Returns ``None`` (skip) when ``S`` misses the core.
    """
    S = as_subtree(tree, S)
    decomp = decomp or core_decomposition(tree)
    if S.order == tree.n:
        raise SubtreeError("subtree must be proper")
    cm = decomp.core_mask
    inner = S.mask & cm
    if not inner:
        return None
    D = local_density(tree, S).value
    Ds = local_density(tree, Subtree.from_mask(tree, inner)).value
    eq_expected = inner == S.mask or inner == cm
    out = []
    if not Ds <= D or (Ds == D) != eq_expected:
        out.append(Violation("limb-absorption", tree, S.sorted(), "D(S*) <= D(S), equal iff S<=T* or T*<=S",
                             {"D(S*)": Ds, "D(S)": D}))
    return out


def half_index_pair_check(tree, v, w, rc=None):
    """With ``i(w; v) = 1/2``: ``D(v) <= D(v, w)``, equal exactly when ``T`` is astral over ``v``."""
    rc = rc or RootedCounts(tree)
    if rc.index(w, v) != HALF or tree.n <= 2:
        return None
    Dv = local_density(tree, [v]).value
    Dvw = local_density(tree, [v, w]).value
    if not Dv <= Dvw or (Dv == Dvw) != is_astral(tree, v):
        return [Violation("limb-absorption/pair", tree, (v, w), "D(v) <= D(v,w), equal iff astral over v",
                          {"D(v)": Dv, "D(v,w)": Dvw})]
    return []


# ---------------------------------------------------------------------------
# two adjacent vertices


@dataclass
class PairReport:
    v: int
    w: int
    D_vw: Fraction
    D_v: Fraction
    D_w: Fraction
    type_v: object
    type_w: object
    case: str  # "leaf" or "interior"
    cell: str = ""
    violations: list = field(default_factory=list)
    notes: dict = field(default_factory=dict)

    def to_dict(self):
        t = lambda x: None if x is None else x.kind
        return {"v": self.v, "w": self.w, "D(v,w)": self.D_vw, "D(v)": self.D_v, "D(w)": self.D_w,
                "type_v": t(self.type_v), "type_w": t(self.type_w), "case": self.case, "cell": self.cell,
                "notes": self.notes, "violations": self.violations}


def two_vertex_comparison(tree, v, w, rc=None):
    """Compare ``D(v, w)`` with ``D(v)`` and ``D(w)`` for an edge ``vw``.

    The component types decide the shape of the comparison.  With a leaf
    endpoint only the other side's type matters.  Otherwise the sides are
    ordered so that ``a`` has the larger rooted density and the table cells
    are checked in their corrected orientation: ``a`` of type L forces
    ``D(b) > D(a, b)``, and ``b`` of type H on top of that gives
    ``D(a, b) >= D(a)``.  The cell as printed (``D(a) >= D(a, b)``) is
    recorded in ``notes["literal-cell"]`` and not asserted.  The H/L cell
    carries no conclusion and is only tallied.
    """
    if w not in tree.adjacency[v]:
        raise ValueError(f"vertices {v} and {w} are not adjacent")
    n = tree.n
    if n <= 2:
        raise SubtreeError("{v, w} is the whole tree")
    rc = rc or RootedCounts(tree)
    dens = {}
    for S in ((v,), (w,), (v, w)):
        N, R = rc.mask_stats(sum(1 << x for x in S))
        dens[S] = _density(N, R, len(S), n)
    Dv, Dw, Dvw = dens[(v,)], dens[(w,)], dens[(v, w)]
    tv, tw = component_type(tree, v, w, rc), component_type(tree, w, v, rc)
    viol = []
    sv = sorted((v, w))

    def bad(what, expected, actual):
        viol.append(Violation("table1", tree, tuple(sv), expected, actual, what))

    if tv is None or tw is None:
        if tv is None and tw is None:
            raise SubtreeError("{v, w} is the whole tree")
        # leaf endpoint x with neighbour y
        x, y, ty = (v, w, tw) if tv is None else (w, v, tv)
        Dx, Dy = dens[(x,)], dens[(y,)]
        rep = PairReport(v, w, Dvw, Dv, Dw, tv, tw, "leaf", f"leaf/{ty.kind}")
        if not Dvw >= Dy or (Dvw == Dy) != is_astral(tree, y):
            bad("leaf side: D(v,w) >= D(w), equal iff astral", "D(x,y) >= D(y)", (Dvw, Dy))
        if ty.kind == "H" and not Dvw >= Dx:
            bad("leaf side, H: D(v,w) >= D(v)", "D(x,y) >= D(x)", (Dvw, Dx))
        if ty.kind == "L" and not Dvw < Dx:
            bad("leaf side, L: D(v,w) < D(v)", "D(x,y) < D(x)", (Dvw, Dx))
        rep.notes["both-exceeded"] = Dvw >= Dv and Dvw >= Dw
        rep.violations = viol
        return rep

    rep = PairReport(v, w, Dvw, Dv, Dw, tv, tw, "interior")
    nv = _popcount(tree.component(v, 1 << w))
    nw = n - nv
    dv, dw = tv.witness[0], tw.witness[0]
    iv, iw = tv.witness[1], tw.witness[1]  # i(v; w), i(w; v)
    # convex-combination identities
    base = Fraction(nv - 1, n - 1) * dv + Fraction(nw - 1, n - 1) * dw
    if Dv != base + Fraction(1, n - 1) * (1 - iw):
        bad("convex combination at v", base + Fraction(1, n - 1) * (1 - iw), Dv)
    if Dw != base + Fraction(1, n - 1) * (1 - iv):
        bad("convex combination at w", base + Fraction(1, n - 1) * (1 - iv), Dw)
    if not min(dv, dw) <= Dvw <= max(dv, dw):
        bad("D(v,w) between the component densities", (dv, dw), Dvw)

    if dv >= dw:
        a, b, ta, tb, Da, Db = v, w, tv, tw, Dv, Dw
    else:
        a, b, ta, tb, Da, Db = w, v, tw, tv, Dw, Dv
    rep.cell = f"{ta.kind}/{tb.kind}"
    if ta.kind == "H" and tb.kind == "H":
        if not Dvw >= max(Dv, Dw):
            bad("H/H: D(v,w) >= max", "D(v,w) >= max(D(v), D(w))", (Dvw, Dv, Dw))
    elif ta.kind == "L":
        if not Db > Dvw:
            bad("L row: smaller-side vertex beats the pair", "D(b) > D(a,b)", (Db, Dvw))
        if tb.kind == "H" and not Dvw >= Da:
            bad("L/H: D(a,b) >= D(a)", "D(a,b) >= D(a)", (Dvw, Da))
        rep.notes["literal-cell"] = Da >= Dvw if tb.kind == "L" else Da >= Dvw >= Db
    else:
        rep.notes["no-conclusion"] = "pair-max" if Dvw >= max(Dv, Dw) else "pair-not-max"
    if tree.degree(v) > 2 and tree.degree(w) > 2 and not Dvw < max(Dv, Dw):
        bad("both degrees > 2: D(v,w) < max", "D(v,w) < max(D(v), D(w))", (Dvw, Dv, Dw))
    if Dvw >= Dv and Dvw >= Dw and not (tree.degree(v) == 2 and tree.degree(w) == 2):
        bad("pair beating both needs degree 2 at both ends", "deg(v) = deg(w) = 2",
            (tree.degree(v), tree.degree(w)))
    rep.violations = viol
    return rep


# ---------------------------------------------------------------------------
# maximal density


@dataclass(frozen=True)
class DensityMaxResult:
    optima: tuple
    value: Fraction
    structure_class: tuple
    violations: tuple = ()

    def to_dict(self):
        return {"value": self.value,
                "optima": [{"subtree": list(S.sorted()), "class": c} for S, c in zip(self.optima, self.structure_class)],
                "violations": list(self.violations)}


def structure_class(tree, mask, decomp):
    """Which of the three structural shapes a subtree has; ``degenerate`` on paths."""
    if decomp.degenerate:
        return "degenerate"
    cm = decomp.core_mask
    if mask & cm == cm:
        return "contains-core"
    limb_masks = [sum(1 << x for x in limb) for limb in decomp.limbs]
    joints = [x for x in decomp.joint_vertices if (mask >> x) & 1]
    if not mask & ~cm:
        return "core-proper-avoiding-joints" if not joints else "unclassified"
    if not mask & cm:
        for limb, lm in zip(decomp.limbs, limb_masks):
            if mask & ~lm == 0 and (mask >> limb[-1]) & 1:
                return "limb-path-with-leaf"
        return "unclassified"
    # mixed: every limb touched must be whole and hang off a joint in S
    for j, lm in zip(decomp.limb_joints, limb_masks):
        hit = mask & lm
        if (mask >> j) & 1:
            if hit != lm:
                return "unclassified"
        elif hit:
            return "unclassified"
    return "core-part-plus-whole-limbs"


def max_density_subtree(tree, *, max_n=None, table=None, decomp=None):
    """Every proper nonempty subtree of maximal local density, with its structural class.

    Also checks each optimum has the maximal local mean among subtrees of
    its order; failures are returned in ``violations``.
    """
    if tree.n < 2:
        raise ValueError("need at least two vertices")
    check_guard(tree, DENSITY_MAX_N, max_n, "maximal-density search")
    table = table or SubtreeTable(tree)
    decomp = decomp or core_decomposition(tree)
    n = tree.n
    masks, num, den = density_arrays(table)
    approx = num / den
    top = approx.max()
    cand = masks[approx >= top - 1e-9]
    vals = {int(m): table.density(int(m)) for m in cand}
    best = max(vals.values())
    optima = sorted(m for m, d in vals.items() if d == best)
    classes = []
    viol = []
    for m in optima:
        cls = structure_class(tree, m, decomp)
        classes.append(cls)
        if cls == "unclassified":
            viol.append(Violation("density-max/class", tree, tuple(_bits(m)), STRUCTURE_CLASSES, cls))
        k = _popcount(m)
        R, N = table.R, table.N
        sel = table.connected & (table.pop == k)
        # no order-k subtree may have a larger mean: R'/N' > R/N
        if np.any(sel & (R * int(N[m]) > int(R[m]) * N)):
            viol.append(Violation("density-max/order-maximal", tree, tuple(_bits(m)), "maximal mean at its order", table.mean(m)))
    subs = tuple(Subtree.from_mask(tree, m) for m in optima)
    return DensityMaxResult(subs, best, tuple(classes), tuple(viol))


def density_arrays(table):
    """Masks of proper nonempty subtrees with density numerators and denominators (int64)."""
    n = table.tree.n
    full = (1 << n) - 1
    sel = table.connected.copy()
    sel[0] = False
    sel[full] = False
    masks = np.flatnonzero(sel)
    k = table.pop[masks]
    N = table.N[masks]
    num = table.R[masks] - k * N
    den = N * (n - k)
    return masks, num, den


def global_vs_local_density(tree):
    """Global density against the smallest and largest single-vertex densities."""
    g = global_stats(tree).density
    if tree.n == 1:
        return {"global": g, "min_vertex": None, "max_vertex": None, "ordering": "undefined"}
    vals = [local_density(tree, [v]).value for v in range(tree.n)]
    lo, hi = min(vals), max(vals)

    def rel(x, y):
        return "<" if x < y else ("=" if x == y else ">")

    return {
        "global": g,
        "min_vertex": lo,
        "max_vertex": hi,
        "argmin": [v for v, x in enumerate(vals) if x == lo],
        "argmax": [v for v, x in enumerate(vals) if x == hi],
        "ordering": f"min {rel(lo, g)} global, global {rel(g, hi)} max, min {rel(lo, hi)} max",
    }


def max_vertex_density(tree):
    """Largest single-vertex local density, exact, via the rooted recurrences."""
    rc = RootedCounts(tree)
    best = None
    arg = None
    for v in range(tree.n):
        N, R = rc.away(v)
        d = Fraction(R - N, N * (tree.n - 1))
        if best is None or d > best:
            best, arg = d, v
    return best, arg
