"""Indices of rooted subtrees, the add/remove identities, and the core/limb decomposition."""

from dataclasses import dataclass
from fractions import Fraction

from .counting import RootedCounts, subtree_stats
from .report import Violation
from .tree import SubtreeError, _bits, _popcount, as_subtree

HALF = Fraction(1, 2)


def direction(tree, v, mask, rc=None):
    """Blocked neighbour of ``v`` when the index is taken with respect to ``mask``.

    Returns ``-1`` when nothing is blocked (``mask == {v}``).  Raises for
    interior vertices of the set.
    """
    if (mask >> v) & 1:
        inside = tree.nbr_mask[v] & mask
        if _popcount(inside) > 1:
            raise SubtreeError(f"vertex {v} is neither outside nor a leaf of the reference subtree")
        return inside.bit_length() - 1 if inside else -1
    for u in tree.adjacency[v]:
        if (mask >> u) & 1 or tree.component(u, 1 << v) & mask:
            return u
    raise SubtreeError("reference set is empty")


def index(tree, v, reference, rc=None):
    """Index of ``v`` with respect to a reference subtree (or a single vertex).

    ``R / (N (N + 1))`` for the subtrees rooted at ``v`` that grow away
    from the reference.  ``v`` may lie outside the reference or be one of
    its leaves.  Always in ``(0, 1/2]``.
    """
    if isinstance(reference, int):
        mask = 1 << reference
    else:
        mask = as_subtree(tree, reference).mask
    rc = rc or RootedCounts(tree)
    return rc.index(v, direction(tree, v, mask))


def mu_include(tree, S, w, rc=None):
    """Local mean at ``S + w`` as ``mu(S) + i(w; S)``."""
    S = as_subtree(tree, S)
    if (S.mask >> w) & 1 or not tree.nbr_mask[w] & S.mask:
        raise SubtreeError(f"vertex {w} is not a neighbour of {S!r}")
    return subtree_stats(tree, S).mean + index(tree, w, S, rc)


def mu_exclude(tree, S, v, rc=None):
    """Local mean at ``S - v`` as ``mu(S) - i(v; S)`` for a leaf ``v`` of ``S``."""
    S = as_subtree(tree, S)
    if S.order < 2:
        raise SubtreeError("cannot remove the only vertex of a subtree")
    if not (S.mask >> v) & 1 or S.degree(v) != 1:
        raise SubtreeError(f"vertex {v} is not a leaf of {S!r}")
    return subtree_stats(tree, S).mean - index(tree, v, S, rc)


def half_index_predicate(tree, v, w):
    """Whether the component of ``v`` in ``T - w`` is a path ending at ``v``.

    This is exactly the case ``i(v; w) = 1/2``.
    """
    if w not in tree.adjacency[v]:
        raise ValueError(f"vertices {v} and {w} are not adjacent")
    prev, cur = w, v
    while True:
        nxt = [x for x in tree.adjacency[cur] if x != prev]
        if not nxt:
            return True
        if len(nxt) > 1:
            return False
        prev, cur = cur, nxt[0]


@dataclass(frozen=True)
class CoreDecomposition:
    """Core, limbs, joint vertices and core-paths of a tree.

    Each limb is listed from the vertex next to the core out to its leaf.
    A path has no core; it is recorded as a single limb running from its
    lower-numbered end, with ``degenerate`` set.
    """

    core: frozenset
    limbs: tuple
    joint_vertices: frozenset
    core_paths: tuple
    degenerate: bool = False
    limb_joints: tuple = ()

    @property
    def core_mask(self):
        return sum(1 << v for v in self.core)

    @property
    def limb_vertices(self):
        return frozenset(v for limb in self.limbs for v in limb)

    @property
    def core_path_vertices(self):
        return frozenset(v for p in self.core_paths for v in p)

    def limb_of(self, v):
        for i, limb in enumerate(self.limbs):
            if v in limb:
                return i
        return None

    def to_dict(self):
        return {
            "core": sorted(self.core),
            "limbs": [list(x) for x in self.limbs],
            "limb_joints": list(self.limb_joints),
            "joint_vertices": sorted(self.joint_vertices),
            "core_paths": [list(p) for p in self.core_paths],
            "degenerate": self.degenerate,
        }


def core_decomposition(tree):
    n = tree.n
    adj = tree.adjacency
    if tree.is_path():
        if n == 1:
            return CoreDecomposition(frozenset(), ((0,),), frozenset(), (), True, (None,))
        start = min(tree.leaves())
        walk = [start]
        prev = -1
        while True:
            nxt = [x for x in adj[walk[-1]] if x != prev]
            if not nxt:
                break
            prev = walk[-1]
            walk.append(nxt[0])
        return CoreDecomposition(frozenset(), (tuple(walk),), frozenset(), (), True, (None,))

    limbs = []
    joints = []
    for leaf in tree.leaves():
        walk = [leaf]
        prev = -1
        cur = leaf
        while True:
            nxt = [x for x in adj[cur] if x != prev][0]
            if len(adj[nxt]) != 2:
                joints.append(nxt)
                break
            walk.append(nxt)
            prev, cur = cur, nxt
        limbs.append(tuple(reversed(walk)))
    limb_set = {v for limb in limbs for v in limb}
    core = frozenset(v for v in range(n) if v not in limb_set)

    paths = []
    for a in range(n):
        if len(adj[a]) < 3:
            continue
        for b in adj[a]:
            walk = [a, b]
            while len(adj[walk[-1]]) == 2:
                walk.append([x for x in adj[walk[-1]] if x != walk[-2]][0])
            z = walk[-1]
            if len(adj[z]) >= 3 and a < z:
                paths.append(tuple(walk))
    paths.sort()
    return CoreDecomposition(core, tuple(limbs), frozenset(joints), tuple(paths), False, tuple(joints))


def outer_neighbors(tree, v, mask):
    """Neighbours of ``v`` one step farther from the subtree ``mask``."""
    if (mask >> v) & 1:
        return [u for u in tree.adjacency[v] if not (mask >> u) & 1]
    toward = direction(tree, v, mask)
    return [u for u in tree.adjacency[v] if u != toward]


def outer_neighbor_monotonicity_check(tree, S, rc=None):
    """Compare each index with the indices of its outer neighbours.

    With two or more outer neighbours the vertex must have the strictly
    smaller index; with exactly one, the larger or equal index, equality
    only when both are 1/2.  Returns the violations found.
    """
    S = as_subtree(tree, S)
    mask = S.mask
    if mask == tree.full_mask:
        raise SubtreeError("reference subtree must be proper")
    rc = rc or RootedCounts(tree)
    out = []
    leaves = set(S.leaves())
    for v in range(tree.n):
        if (mask >> v) & 1 and v not in leaves:
            continue
        outer = outer_neighbors(tree, v, mask)
        if not outer:
            continue
        iv = rc.index(v, direction(tree, v, mask))
        iw = {u: rc.index(u, v) for u in outer}
        if len(outer) >= 2:
            for u, x in iw.items():
                if not iv < x:
                    out.append(Violation("index-monotone/branching", tree, S.sorted(), f"i({v}) < i({u})", (iv, x)))
        else:
            (u, x), = iw.items()
            if not iv >= x or (iv == x) != (iv == HALF and x == HALF):
                out.append(Violation("index-monotone/path", tree, S.sorted(), f"i({v}) >= i({u}), equal iff both 1/2", (iv, x)))
    return out
