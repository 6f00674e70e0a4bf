"""Subtrees of a given order with extremal local mean, and checks on their leaves."""

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import _kernels
from .counting import RootedCounts, check_guard
from .report import Violation
from .structure import core_decomposition
from .tree import Subtree, _bits, _popcount, as_subtree, enumerate_subtree_masks, generate

EXTREMAL_MAX_N = 16


@dataclass(frozen=True)
class ExtremalResult:
    k: int
    direction: str
    optima: tuple
    value: Fraction

    def to_dict(self):
        return {"k": self.k, "direction": self.direction, "value": self.value,
                "optima": [list(S.sorted()) for S in self.optima]}


@dataclass(frozen=True)
class LeafRecord:
    vertex: int
    degree: int
    kind: str  # leaf-of-T | limb | core-path | branching


@dataclass(frozen=True)
class LeafConfiguration:
    case: str  # I(a) | I(b) | II | mixed-invalid
    leaves: tuple

    def to_dict(self):
        return {"case": self.case, "leaves": [[r.vertex, r.degree, r.kind] for r in self.leaves]}


def _check_direction(direction):
    if direction not in ("max", "min"):
        raise ValueError(f"direction must be 'max' or 'min', got {direction!r}")


def k_extremal(tree, k, direction="max", *, max_n=None):
    """All order-``k`` subtrees whose local mean is maximal (or minimal), ties included.

    Exhaustive: enumerates every order-``k`` subtree and compares local
    means as exact fractions.
    """
    _check_direction(direction)
    if not 1 <= k <= tree.n:
        raise ValueError(f"k must lie in 1..{tree.n}")
    check_guard(tree, EXTREMAL_MAX_N, max_n, "k-extremal search")
    rc = RootedCounts(tree)
    best = None
    optima = []
    for mask in enumerate_subtree_masks(tree, order=k):
        N, R = rc.mask_stats(mask)
        mu = Fraction(R, N)
        if best is None or (mu > best if direction == "max" else mu < best):
            best = mu
            optima = [mask]
        elif mu == best:
            optima.append(mask)
    optima.sort()
    return ExtremalResult(k, direction, tuple(Subtree.from_mask(tree, m) for m in optima), best)


def extremal_masks_from_table(table, direction="max"):
    """Per order ``k``: exact extremal value ``(R, N)`` and all optimal masks, from a subset table."""
    n = table.tree.n
    best_max, best_min = _kernels.order_extrema(table.R, table.N, table.connected, table.pop, n)
    best = best_max if direction == "max" else best_min
    out = {}
    for k in range(1, n + 1):
        b = int(best[k])
        Rb, Nb = int(table.R[b]), int(table.N[b])
        sel = table.connected & (table.pop == k) & (table.R * Nb == Rb * table.N)
        out[k] = (Fraction(Rb, Nb), np.flatnonzero(sel).tolist())
    return out


def index_guided_search(tree, k, direction, start, rc=None):
    """Swap-move hill climbing from ``start`` over order-``k`` subtrees.

    A move adds an outside neighbour ``w`` and drops a different leaf ``v``
    of ``S + w``; its effect on the local mean is ``i(w; S) - i(v; S + w)``.
    The first strictly improving move in vertex-id order is taken until
    none remains.  The result is locally optimal only.
    """
    _check_direction(direction)
    S = as_subtree(tree, start)
    if S.order != k:
        raise ValueError(f"start has order {S.order}, expected {k}")
    rc = rc or RootedCounts(tree)
    sign = 1 if direction == "max" else -1
    mask = S.mask
    nbr = tree.nbr_mask
    while True:
        moved = False
        for w in _bits(tree.boundary_mask(mask)):
            gain_in = rc.index(w, (nbr[w] & mask).bit_length() - 1)
            grown = mask | (1 << w)
            for v in _bits(grown & ~(1 << w)):
                inside = nbr[v] & grown
                if _popcount(inside) != 1:
                    continue
                loss = rc.index(v, inside.bit_length() - 1)
                if sign * (gain_in - loss) > 0:
                    mask = grown & ~(1 << v)
                    moved = True
                    break
            if moved:
                break
        if not moved:
            return Subtree.from_mask(tree, mask)


def _leaf_kind(tree, v, decomp):
    d = tree.degree(v)
    if d <= 1:
        return "leaf-of-T"
    if d >= 3:
        return "branching"
    return "core-path" if v in decomp.core else "limb"


def classify_leaves(tree, S, decomp=None):
    """Sort a subtree's leaves into the three admissible configurations.

    ``II``: one leaf of degree above 2, every other leaf a leaf of ``T``.
    ``I(a)``: all leaves of degree at most 2 with the degree-2 ones on
    core-paths.  ``I(b)``: all leaves are limb vertices (leaves of ``T``
    count as limb vertices, so a subtree whose leaves are all leaves of
    ``T`` lands here).  Anything else is ``mixed-invalid``.
    """
    S = as_subtree(tree, S)
    decomp = decomp or core_decomposition(tree)
    records = tuple(LeafRecord(v, tree.degree(v), _leaf_kind(tree, v, decomp)) for v in S.leaves())
    kinds = [r.kind for r in records]
    if "branching" in kinds:
        ok = kinds.count("branching") == 1 and all(x in ("branching", "leaf-of-T") for x in kinds)
        return LeafConfiguration("II" if ok else "mixed-invalid", records)
    if "core-path" in kinds and "limb" in kinds:
        return LeafConfiguration("mixed-invalid", records)
    return LeafConfiguration("I(a)" if "core-path" in kinds else "I(b)", records)


def check_maximal_subtree(tree, mask, decomp):
    """Leaf conditions every order-``|mask|`` maximal subtree must meet."""
    S = Subtree.from_mask(tree, mask)
    k = S.order
    leaves = S.leaves()
    degs = {v: tree.degree(v) for v in leaves}
    big = [v for v in leaves if degs[v] > 2]
    out = []
    if len(big) > 1 or len(big) == len(leaves):
        out.append(Violation("mainthm", tree, S.sorted(), "<=1 leaf with deg>2 and >=1 leaf with deg<=2", degs))
    if big and any(degs[v] != 1 for v in leaves if v not in big):
        out.append(Violation("refinement", tree, S.sorted(), "other leaves have deg 1", degs))
    if k == 1 and not decomp.degenerate:
        (v,) = leaves
        if degs[v] != 1 and v not in decomp.core_path_vertices:
            out.append(Violation("branchingpath", tree, (v,), "leaf or core-path vertex", _leaf_kind(tree, v, decomp)))
    two = [v for v in leaves if degs[v] == 2]
    if any(v in decomp.core for v in two) and any(v not in decomp.core for v in two):
        out.append(Violation("ksubtree-leaves", tree, S.sorted(), "degree-2 leaves all on core-paths or all in limbs",
                             {v: _leaf_kind(tree, v, decomp) for v in two}))
    if classify_leaves(tree, S, decomp).case == "mixed-invalid" and not out:
        out.append(Violation("leaf-configuration", tree, S.sorted(), "I(a), I(b) or II", "mixed-invalid"))
    return out


def verify_maximal_theorems(tree, k, *, max_n=None, decomp=None):
    """Check the leaf theorems on every order-``k`` maximal subtree; returns violations."""
    decomp = decomp or core_decomposition(tree)
    res = k_extremal(tree, k, "max", max_n=max_n)
    out = []
    for S in res.optima:
        out.extend(check_maximal_subtree(tree, S.mask, decomp))
    return out


def check_minimal_subtree(tree, mask, decomp):
    S = Subtree.from_mask(tree, mask)
    leaves = S.leaves()
    degs = {v: tree.degree(v) for v in leaves}
    out = []
    if not set(S) <= decomp.core:
        out.append(Violation("minimal-case", tree, S.sorted(), "subtree inside the core", sorted(decomp.core)))
    low = [v for v in leaves if degs[v] <= 2]
    if S.order == 1:
        if low:
            out.append(Violation("minimal-case", tree, S.sorted(), "deg >= 3", degs))
    elif len(low) > 1 or len(low) == len(leaves):
        out.append(Violation("minimal-case", tree, S.sorted(), "<=1 leaf with deg<=2 and >=1 leaf with deg>=3", degs))
    return out


def verify_minimal_theorem(tree, k, *, max_n=None, decomp=None):
    """Check every order-``k`` minimal subtree; ``None`` when the hypotheses fail (skip)."""
    decomp = decomp or core_decomposition(tree)
    if not decomp.core or k > len(decomp.core):
        return None
    res = k_extremal(tree, k, "min", max_n=max_n)
    out = []
    for S in res.optima:
        out.extend(check_minimal_subtree(tree, S.mask, decomp))
    return out


# ---------------------------------------------------------------------------
# two stars K_{1,n} whose centres are joined through k - 2 path vertices


@dataclass(frozen=True)
class TwoStarForms:
    n: int
    k: int
    mu_w: dict  # b -> mean at the end of a b-vertex arm
    mu2: dict  # (a, b) -> mean at the spine edge splitting the spine into a + b
    mu2_min: Fraction
    argmin: frozenset
    argmax: frozenset


def arm_mean(n, b):
    """Mean order of rooted subtrees at the end of a ``b``-vertex arm ending in a star centre with ``n`` leaves."""
    return Fraction(b, 2) + Fraction((n + b) * 2 ** (n - 1), 2 ** n + b - 1)


def two_star_closed_forms(n, k):
    if n <= 1 or k <= 2:
        raise ValueError("closed forms need n > 1 and k > 2")
    mu_w = {b: arm_mean(n, b) for b in range(1, k)}
    mu2 = {(a, k - a): mu_w[a] + mu_w[k - a] for a in range(1, k)}
    mu2_min = Fraction(k, 2) + Fraction(n + 1, 2) + Fraction((n + k - 1) * 2 ** (n - 1), 2 ** n + k - 2)
    lo = min(mu2.values())
    hi = max(mu2.values())
    argmin = frozenset(ab for ab, m in mu2.items() if m == lo)
    argmax = frozenset(ab for ab, m in mu2.items() if m == hi)
    return TwoStarForms(n, k, mu_w, mu2, mu2_min, argmin, argmax)


def two_star_tree(n, k):
    """The host tree: spine ``0..k-1`` with ``n`` leaves on each end."""
    return generate("two-stars", [n, k])


def two_star_spine_means(n, k):
    """Direct local means on the generated tree, keyed like :func:`two_star_closed_forms`.

    Spine edge ``(j, j+1)`` has ``b = j + 1`` spine vertices on the side
    of vertex 0 and ``a = k - 1 - j`` on the other.
    """
    from .counting import local_mean, rooted_stats

    tree = two_star_tree(n, k)
    arms = {}
    pairs = {}
    for j in range(k - 1):
        b, a = j + 1, k - 1 - j
        arms[b] = rooted_stats(tree, j, [j + 1]).mean
        pairs[(a, b)] = local_mean(tree, [j, j + 1])
    return arms, pairs
