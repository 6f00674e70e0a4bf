"""Exact subtree counts and total orders.

Quantities follow one convention: for a family of subtrees, ``N`` is how
many there are and ``R`` is the sum of their orders, so the mean order is
``R / N``.  Everything is plain Python ints and :class:`fractions.Fraction`.
"""

import os
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

import numpy as np

from . import _kernels
from .tree import Subtree, SubtreeError, _bits, _popcount, as_subtree, contract, enumerate_subtree_masks

Rational = Fraction

ORACLE_MAX_N = 16


class EnumerationGuardError(RuntimeError):
    """Raised when exhaustive enumeration is requested on a tree above the size guard."""


def enum_limit(default):
    """Size guard for exhaustive routines; ``SUBTREE_MAX_ENUM`` overrides every default."""
    env = os.environ.get("SUBTREE_MAX_ENUM")
    return int(env) if env else default


def check_guard(tree, default, max_n=None, what="enumeration"):
    limit = max_n if max_n is not None else enum_limit(default)
    if tree.n > limit:
        raise EnumerationGuardError(
            f"{what} on n={tree.n} exceeds the guard n <= {limit} (set SUBTREE_MAX_ENUM to override)"
        )


@dataclass(frozen=True)
class SubtreeStats:
    N: int
    R: int

    @property
    def mean(self):
        return Fraction(self.R, self.N)


class GlobalStats(NamedTuple):
    stats: SubtreeStats
    mean: Fraction
    density: Fraction


class LowerBoundCheck(NamedTuple):
    holds: bool
    tight: bool


class RootedCounts:
    """Memoised ``(N, R)`` of subtrees containing ``v`` and avoiding neighbour ``u``.

    ``away(v, u)`` is the count for the component of ``v`` in ``T - u``
    rooted at ``v``; ``u = -1`` means nothing is blocked.  The table lives
    only as long as this object.
    """

    __slots__ = ("tree", "_memo")

    def __init__(self, tree):
        self.tree = tree
        self._memo = {}

    def away(self, v, u=-1):
        key = (v, u)
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        adj = self.tree.adjacency
        memo = self._memo
        # iterative post-order over directed edges
        stack = [(v, u, False)]
        while stack:
            x, p, ready = stack.pop()
            if (x, p) in memo:
                continue
            kids = [c for c in adj[x] if c != p]
            if not ready:
                stack.append((x, p, True))
                stack.extend((c, x, False) for c in kids if (c, x) not in memo)
                continue
            N = 1
            parts = []
            for c in kids:
                Nc, Rc = memo[(c, x)]
                parts.append((Nc, Rc))
                N *= Nc + 1
            R = N
            for Nc, Rc in parts:
                R += Rc * (N // (Nc + 1))
            memo[(x, p)] = (N, R)
        return memo[key]

    def index(self, v, u=-1):
        """``R / (N (N + 1))`` for the rooted tree at ``v`` growing away from ``u``."""
        N, R = self.away(v, u)
        return Fraction(R, N * (N + 1))

    def mask_stats(self, mask):
        """(N, R) of subtrees containing the connected set ``mask``.

        Each boundary vertex hangs off exactly one vertex of the set, so the
        count factorises over the boundary.
        """
        tree = self.tree
        N = 1
        parts = []
        for w in _bits(tree.boundary_mask(mask)):
            inner = tree.nbr_mask[w] & mask
            Nw, Rw = self.away(w, inner.bit_length() - 1)
            parts.append((Nw, Rw))
            N *= Nw + 1
        R = _popcount(mask) * N
        for Nw, Rw in parts:
            R += Rw * (N // (Nw + 1))
        return N, R


def _as_mask(tree, vertices):
    if vertices is None:
        return 0
    if isinstance(vertices, Subtree):
        return vertices.mask
    if isinstance(vertices, (int, np.integer)):
        return 1 << int(vertices)
    mask = 0
    for x in vertices:
        mask |= 1 << int(x)
    return mask


def _toward(tree, v, target_mask):
    """Neighbours of ``v`` whose side of ``T - v`` meets ``target_mask``."""
    out = []
    for u in tree.adjacency[v]:
        if (target_mask >> u) & 1 or tree.component(u, 1 << v) & target_mask:
            out.append(u)
    return out


def _rooted_blocked(tree, v, blocked):
    """Rooted recurrence at ``v`` with a set of blocked neighbours (any size)."""
    rc = RootedCounts(tree)
    N = 1
    parts = []
    for c in tree.adjacency[v]:
        if c in blocked:
            continue
        Nc, Rc = rc.away(c, v)
        parts.append((Nc, Rc))
        N *= Nc + 1
    # mean = 1 + sum R_i/(N_i+1); the quotient N/(N_i+1) is exact
    R = N
    for Nc, Rc in parts:
        R += Rc * (N // (Nc + 1))
    return N, R


def rooted_stats(tree, v, away_from=()):
    """``(N, R)`` of subtrees containing ``v`` that meet the ``away_from`` side only at ``v``.

    Parameters
    ----------
    tree : Tree
    v : int
    away_from : Subtree, int or iterable of int
        Empty for all subtrees containing ``v``; otherwise a vertex set
        not containing ``v`` (typically a subtree adjacent to ``v`` or a
        single neighbour).  Every neighbour of ``v`` leading towards it is
        blocked.
    """
    mask = _as_mask(tree, away_from)
    if (mask >> v) & 1:
        raise ValueError(f"vertex {v} lies in the reference set")
    blocked = set(_toward(tree, v, mask)) if mask else set()
    N, R = _rooted_blocked(tree, v, blocked)
    if R < N or R > N * tree.n:
        raise AssertionError("rooted recurrence produced an impossible total order")
    return SubtreeStats(N, R)


def subtree_stats(tree, S):
    """``(N_T(S), R_T(S))`` by contracting ``S`` and counting at the image vertex.

    Orders in ``T`` exceed orders in ``T/S`` by ``|S| - 1``, hence the
    shift ``R += (|S| - 1) N``.
    """
    S = as_subtree(tree, S)
    res = contract(tree, S)
    base = rooted_stats(res.contracted, res.image)
    return SubtreeStats(base.N, base.R + (S.order - 1) * base.N)


def pair_total_order(tree, v, w):
    """Total order of subtrees containing the edge ``vw``, from the two sides of ``T - vw``."""
    if w not in tree.adjacency[v]:
        raise ValueError(f"vertices {v} and {w} are not adjacent")
    rc = RootedCounts(tree)
    Nv, Rv = rc.away(v, w)
    Nw, Rw = rc.away(w, v)
    return Nw * Rv + Rw * Nv


def local_mean(tree, S):
    st = subtree_stats(tree, S)
    return Fraction(st.R, st.N)


def global_stats(tree):
    """Counts over all subtrees, the global mean, and the global density ``mean / n``.

    Rooted at vertex 0, every subtree is counted once at its vertex
    nearest the root.
    """
    rc = RootedCounts(tree)
    parent = [-1] * tree.n
    order = [0]
    seen = 1
    for x in order:
        for y in tree.adjacency[x]:
            if not (seen >> y) & 1:
                seen |= 1 << y
                parent[y] = x
                order.append(y)
    N = R = 0
    for v in range(tree.n):
        Nv, Rv = rc.away(v, parent[v])
        N += Nv
        R += Rv
    mean = Fraction(R, N)
    return GlobalStats(SubtreeStats(N, R), mean, mean / tree.n)


# ---------------------------------------------------------------------------
# brute-force oracles


class SubtreeTable:
    """``N`` and ``R`` for every vertex mask, by scanning all ``2^n`` subsets.

    ``N[m]`` counts connected sets containing mask ``m`` and ``R[m]`` sums
    their sizes; entry 0 holds the global totals.  Built by the bitmask
    kernels, independently of the recurrences.
    """

    def __init__(self, tree):
        if tree.n > _kernels.TABLE_MAX_N:
            raise EnumerationGuardError(f"subset table limited to n <= {_kernels.TABLE_MAX_N}")
        self.tree = tree
        n = tree.n
        if n == 1:
            eu = ev = np.zeros(0, dtype=np.int64)
        else:
            e = np.asarray(tree.edges, dtype=np.int64)
            eu, ev = np.ascontiguousarray(e[:, 0]), np.ascontiguousarray(e[:, 1])
        self.connected, self.pop = _kernels.connected_masks(n, eu, ev)
        self.N, self.R = _kernels.superset_sums(n, self.connected, self.pop)

    def stats(self, mask):
        return SubtreeStats(int(self.N[mask]), int(self.R[mask]))

    def mean(self, mask):
        return Fraction(int(self.R[mask]), int(self.N[mask]))

    def density(self, mask):
        k = _popcount(mask)
        n = self.tree.n
        return Fraction(int(self.R[mask]) - k * int(self.N[mask]), int(self.N[mask]) * (n - k))

    def masks(self, order=None):
        sel = self.connected if order is None else self.connected & (self.pop == order)
        return np.flatnonzero(sel)


def oracle_stats(tree, S=None, k=None, *, max_n=None, method="enumerate"):
    """Brute-force ``(N, R)`` over subtrees containing ``S`` (if given) of order ``k`` (if given).

    ``method="enumerate"`` walks :func:`enumerate_subtrees`;
    ``method="table"`` scans every vertex subset with the bitmask kernels.
    """
    check_guard(tree, ORACLE_MAX_N, max_n, "oracle enumeration")
    s_mask = _as_mask(tree, S) if S is not None else 0
    if S is not None and not tree.is_connected_mask(s_mask):
        raise SubtreeError("reference set is not a subtree")
    if method == "enumerate":
        N = R = 0
        for m in enumerate_subtree_masks(tree, containing=S, order=k):
            N += 1
            R += _popcount(m)
        return SubtreeStats(N, R)
    if method == "table":
        table = SubtreeTable(tree)
        if k is None:
            return table.stats(s_mask)
        masks = np.arange(1 << tree.n, dtype=np.int64)
        sel = table.connected & (table.pop == k) & ((masks & s_mask) == s_mask)
        count = int(sel.sum())
        return SubtreeStats(count, count * k)
    raise ValueError(f"unknown oracle method {method!r}")


def is_astral(tree, v):
    """True when ``T`` is a path or ``v`` is its only vertex of degree above 2."""
    big = [x for x in range(tree.n) if tree.degree(x) > 2]
    return not big or big == [v]


def mean_lower_bound_check(tree, v):
    """Compare the local mean at ``v`` with ``(n + 1) / 2``."""
    mu = rooted_stats(tree, v).mean
    bound = Fraction(tree.n + 1, 2)
    return LowerBoundCheck(mu >= bound, mu == bound)
