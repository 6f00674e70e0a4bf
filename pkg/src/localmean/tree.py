"""Trees on dense vertex ids, connected vertex subsets, and tree corpora."""

import hashlib

import numpy as np

from . import _kernels

CORPUS_MAX_N = 8


class TreeError(ValueError):
    """Raised for edge sets that do not describe a tree."""

    def __init__(self, reason, message):
        super().__init__(message)
        self.reason = reason


class TreeFormatError(TreeError):
    """Raised by :func:`parse_tree`; ``reason`` names the failure kind.

    Reasons: ``malformed``, ``vertex-range``, ``edge-count``,
    ``self-loop``, ``duplicate-edge``, ``disconnected``.
    """

    def __init__(self, reason, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(reason, message)
        self.line = line


class SubtreeError(ValueError):
    """Raised when a vertex set is not a subtree of the host tree."""


def _popcount(x):
    return bin(x).count("1")


def _bits(mask):
    out = []
    v = 0
    while mask:
        if mask & 1:
            out.append(v)
        mask >>= 1
        v += 1
    return out


class Tree:
    """Immutable tree on vertices ``0..n-1``.

    Parameters
    ----------
    n : int
        Number of vertices, at least 1.
    edges : iterable of (int, int)
        Exactly ``n - 1`` pairs.  Order and orientation do not matter;
        they are normalised to sorted ``(u, v)`` with ``u < v``.
    """

    __slots__ = ("n", "edges", "adjacency", "nbr_mask", "_hash")

    def __init__(self, n, edges):
        n = int(n)
        if n < 1:
            raise TreeError("malformed", f"vertex count must be >= 1, got {n}")
        norm = []
        for u, v in edges:
            u, v = int(u), int(v)
            if not (0 <= u < n and 0 <= v < n):
                raise TreeError("vertex-range", f"edge ({u}, {v}) has a vertex outside 0..{n - 1}")
            if u == v:
                raise TreeError("self-loop", f"self-loop at vertex {u}")
            norm.append((u, v) if u < v else (v, u))
        if len(norm) != n - 1:
            raise TreeError("edge-count", f"a tree on {n} vertices has {n - 1} edges, got {len(norm)}")
        norm.sort()
        for a, b in zip(norm, norm[1:]):
            if a == b:
                raise TreeError("duplicate-edge", f"duplicate edge {a}")
        adj = [[] for _ in range(n)]
        masks = [0] * n
        for u, v in norm:
            adj[u].append(v)
            adj[v].append(u)
            masks[u] |= 1 << v
            masks[v] |= 1 << u
        seen = 1
        stack = [0]
        while stack:
            x = stack.pop()
            fresh = masks[x] & ~seen
            if fresh:
                seen |= fresh
                stack.extend(_bits(fresh))
        if seen != (1 << n) - 1:
            raise TreeError("disconnected", "edges do not connect all vertices")
        self.n = n
        self.edges = tuple(norm)
        self.adjacency = tuple(tuple(sorted(a)) for a in adj)
        self.nbr_mask = tuple(masks)
        self._hash = hash((n, self.edges))

    def __eq__(self, other):
        return isinstance(other, Tree) and self.n == other.n and self.edges == other.edges

    def __hash__(self):
        return self._hash

    def __len__(self):
        return self.n

    def __repr__(self):
        return f"Tree(n={self.n}, edges={list(self.edges)})"

    @property
    def full_mask(self):
        return (1 << self.n) - 1

    def degree(self, v):
        return len(self.adjacency[v])

    def neighbors(self, v):
        return self.adjacency[v]

    def leaves(self):
        if self.n == 1:
            return (0,)
        return tuple(v for v in range(self.n) if len(self.adjacency[v]) == 1)

    def is_path(self):
        return all(len(a) <= 2 for a in self.adjacency)

    def serialize(self):
        lines = [str(self.n)] + [f"{u} {v}" for u, v in self.edges]
        return "\n".join(lines) + "\n"

    def digest(self):
        return hashlib.sha256(self.serialize().encode("ascii")).hexdigest()

    def component(self, v, blocked):
        """Mask of the component containing ``v`` after deleting ``blocked`` vertices."""
        seen = 1 << v
        stack = [v]
        while stack:
            x = stack.pop()
            fresh = self.nbr_mask[x] & ~seen & ~blocked
            if fresh:
                seen |= fresh
                stack.extend(_bits(fresh))
        return seen

    def is_connected_mask(self, mask):
        if mask == 0:
            return False
        v = (mask & -mask).bit_length() - 1
        return self.component(v, ~mask & self.full_mask) == mask

    def boundary_mask(self, mask):
        """Vertices outside ``mask`` adjacent to it."""
        out = 0
        for v in _bits(mask):
            out |= self.nbr_mask[v]
        return out & ~mask

    def induced(self, mask):
        """Relabel the subtree on ``mask`` as its own Tree (ids in increasing order)."""
        verts = _bits(mask)
        pos = {v: i for i, v in enumerate(verts)}
        edges = [(pos[u], pos[v]) for u, v in self.edges if (mask >> u) & 1 and (mask >> v) & 1]
        return Tree(len(verts), edges), verts


class Subtree:
    """Nonempty vertex set of ``tree`` that induces a connected subgraph."""

    __slots__ = ("tree", "mask")

    def __init__(self, tree, vertices):
        mask = 0
        for v in vertices:
            v = int(v)
            if not 0 <= v < tree.n:
                raise SubtreeError(f"vertex {v} not in tree of order {tree.n}")
            mask |= 1 << v
        if mask == 0:
            raise SubtreeError("subtree must be nonempty")
        if not tree.is_connected_mask(mask):
            raise SubtreeError(f"vertices {_bits(mask)} do not induce a connected subgraph")
        self.tree = tree
        self.mask = mask

    @classmethod
    def from_mask(cls, tree, mask):
        """Build without the connectivity check; caller guarantees it."""
        obj = cls.__new__(cls)
        obj.tree = tree
        obj.mask = mask
        return obj

    @property
    def vertices(self):
        return frozenset(_bits(self.mask))

    @property
    def order(self):
        return _popcount(self.mask)

    def __len__(self):
        return _popcount(self.mask)

    def __iter__(self):
        return iter(_bits(self.mask))

    def __contains__(self, v):
        return 0 <= v < self.tree.n and bool((self.mask >> v) & 1)

    def __eq__(self, other):
        return isinstance(other, Subtree) and self.mask == other.mask and self.tree == other.tree

    def __hash__(self):
        return hash((self.tree, self.mask))

    def __repr__(self):
        return f"Subtree({_bits(self.mask)})"

    def sorted(self):
        return tuple(_bits(self.mask))

    def degree(self, v):
        return _popcount(self.tree.nbr_mask[v] & self.mask)

    def leaves(self):
        """Vertices of degree <= 1 inside the subtree (a singleton is its own leaf)."""
        return tuple(v for v in _bits(self.mask) if _popcount(self.tree.nbr_mask[v] & self.mask) <= 1)

    def neighbors(self):
        return tuple(_bits(self.tree.boundary_mask(self.mask)))

    def plus(self, w):
        if not (self.tree.nbr_mask[w] & self.mask) or (self.mask >> w) & 1:
            raise SubtreeError(f"vertex {w} is not a neighbour of {self!r}")
        return Subtree.from_mask(self.tree, self.mask | (1 << w))

    def minus(self, v):
        if (self.mask >> v) & 1 == 0 or self.degree(v) > 1 or self.mask == 1 << v:
            raise SubtreeError(f"vertex {v} is not a removable leaf of {self!r}")
        return Subtree.from_mask(self.tree, self.mask & ~(1 << v))


def as_subtree(tree, S):
    """Coerce a Subtree, a vertex id, or an iterable of ids into a Subtree."""
    if isinstance(S, Subtree):
        if S.tree != tree:
            raise SubtreeError("subtree belongs to a different tree")
        return S
    if isinstance(S, (int, np.integer)):
        return Subtree(tree, (int(S),))
    return Subtree(tree, S)


# ---------------------------------------------------------------------------
# edge-list format


def parse_tree(text):
    """Parse the edge-list text format.

    ``#`` lines are comments; the first other line is ``n``; then exactly
    ``n - 1`` lines ``u v``.  Raises :class:`TreeFormatError`.
    """
    if hasattr(text, "read"):
        text = text.read()
    body = []
    for lineno, raw in enumerate(text.split("\n"), start=1):
        if raw.lstrip().startswith("#"):
            continue
        body.append((lineno, raw))
    while body and not body[-1][1].strip():
        body.pop()
    if not body:
        raise TreeFormatError("malformed", "missing vertex count")
    lineno, header = body[0]
    tokens = header.split()
    if len(tokens) != 1 or not tokens[0].isdigit():
        raise TreeFormatError("malformed", f"expected vertex count, got {header!r}", lineno)
    n = int(tokens[0])
    if n < 1:
        raise TreeFormatError("malformed", "vertex count must be >= 1", lineno)
    edges = []
    for lineno, raw in body[1:]:
        tokens = raw.split()
        if len(tokens) != 2 or not all(t.isdigit() for t in tokens):
            raise TreeFormatError("malformed", f"expected 'u v', got {raw!r}", lineno)
        u, v = int(tokens[0]), int(tokens[1])
        if u >= n or v >= n:
            raise TreeFormatError("vertex-range", f"vertex out of range 0..{n - 1} in {raw!r}", lineno)
        edges.append((u, v))
    if len(edges) != n - 1:
        raise TreeFormatError("edge-count", f"expected {n - 1} edges, found {len(edges)}")
    try:
        return Tree(n, edges)
    except TreeError as exc:
        raise TreeFormatError(exc.reason, str(exc)) from None


def serialize_tree(tree):
    return tree.serialize()


# ---------------------------------------------------------------------------
# generators

FAMILIES = ("path", "star", "two-stars", "caterpillar", "broom", "spider", "ib-example")


def _need(params, count, family):
    if len(params) != count:
        raise ValueError(f"family {family!r} takes {count} parameter(s), got {len(params)}")


def caterpillar(legs):
    """Spine ``0..s-1``; spine vertex ``i`` gets ``legs[i]`` pendant leaves.

    Leaves are numbered after the spine, spine vertex by spine vertex.
    """
    legs = [int(x) for x in legs]
    if not legs or any(x < 0 for x in legs):
        raise ValueError("caterpillar needs a nonempty sequence of nonnegative leg counts")
    s = len(legs)
    edges = [(i, i + 1) for i in range(s - 1)]
    nxt = s
    for i, m in enumerate(legs):
        for _ in range(m):
            edges.append((i, nxt))
            nxt += 1
    return Tree(nxt, edges)


def generate(family, params=()):
    """Build a member of a named family with a fixed labelling.

    ======================  ====================================================
    ``path [n]``            ``0-1-...-(n-1)``
    ``star [n]``            ``K_{1,n-1}``; centre 0, leaves ``1..n-1``
    ``two-stars [l, s]``    spine ``0..s-1`` joins two centres ``0`` and ``s-1``
                            (``s >= 2`` counts both centres); leaves of 0 are
                            ``s..s+l-1``, leaves of ``s-1`` follow
    ``caterpillar legs``    see :func:`caterpillar`
    ``broom [p, m]``        path ``0..p-1`` with ``m`` leaves on ``p-1``
    ``spider lengths``      centre 0, legs in order, each leg numbered outward
    ``ib-example []``       two 2-stars on a 4-vertex spine with every star leaf
                            extended by one pendant vertex (12 vertices)
    ======================  ====================================================

    See ``docs/families.md`` for the named vertices of the worked examples.
    """
    params = [int(p) for p in params]
    if family == "path":
        _need(params, 1, family)
        (n,) = params
        if n < 1:
            raise ValueError("path length must be >= 1")
        return Tree(n, [(i, i + 1) for i in range(n - 1)])
    if family == "star":
        _need(params, 1, family)
        (n,) = params
        if n < 1:
            raise ValueError("star order must be >= 1")
        return Tree(n, [(0, i) for i in range(1, n)])
    if family == "two-stars":
        _need(params, 2, family)
        leaves, spine = params
        if leaves < 0 or spine < 2:
            raise ValueError("two-stars needs leaves >= 0 and spine >= 2")
        return caterpillar([leaves] + [0] * (spine - 2) + [leaves])
    if family == "caterpillar":
        return caterpillar(params)
    if family == "broom":
        _need(params, 2, family)
        p, m = params
        if p < 1 or m < 0:
            raise ValueError("broom needs path length >= 1 and leaves >= 0")
        return caterpillar([0] * (p - 1) + [m])
    if family == "spider":
        if not params or any(x < 1 for x in params):
            raise ValueError("spider needs positive leg lengths")
        edges = []
        nxt = 1
        for length in params:
            prev = 0
            for _ in range(length):
                edges.append((prev, nxt))
                prev = nxt
                nxt += 1
        return Tree(nxt, edges)
    if family == "ib-example":
        _need(params, 0, family)
        edges = [(0, 1), (1, 2), (2, 3), (0, 4), (0, 5), (4, 6), (5, 7), (3, 8), (3, 9), (8, 10), (9, 11)]
        return Tree(12, edges)
    raise ValueError(f"unknown family {family!r}; known: {', '.join(FAMILIES)}")


# ---------------------------------------------------------------------------
# contraction


class ContractionResult:
    """``contracted`` is ``T/U``; ``image`` (always 0) replaces ``U``.

    ``vertex_map`` sends each vertex outside ``U`` to its id in the
    contracted tree; those ids are ``1..`` in increasing original order.
    """

    __slots__ = ("contracted", "image", "vertex_map")

    def __init__(self, contracted, image, vertex_map):
        self.contracted = contracted
        self.image = image
        self.vertex_map = vertex_map

    def map_mask(self, mask, u_mask):
        """Image of a vertex set that contains ``U`` (or avoids it)."""
        out = 1 if mask & u_mask else 0
        for v in _bits(mask & ~u_mask):
            out |= 1 << self.vertex_map[v]
        return out


def contract(tree, U):
    U = as_subtree(tree, U)
    u_mask = U.mask
    outside = [v for v in range(tree.n) if not (u_mask >> v) & 1]
    vmap = {v: i + 1 for i, v in enumerate(outside)}
    edges = []
    for a, b in tree.edges:
        ina, inb = (u_mask >> a) & 1, (u_mask >> b) & 1
        if ina and inb:
            continue
        edges.append((0 if ina else vmap[a], 0 if inb else vmap[b]))
    return ContractionResult(Tree(len(outside) + 1, edges), 0, vmap)


# ---------------------------------------------------------------------------
# subtree enumeration


def _grow(tree, start, allowed, order):
    """Connected supersets of ``start`` inside ``allowed``.

    Binary include/exclude branching over the current frontier; every set
    is reached by exactly one decision sequence.
    """
    nbr = tree.nbr_mask
    frontier0 = tree.boundary_mask(start) & allowed
    stack = [(start, frontier0, 0, _popcount(start))]
    while stack:
        S, C, X, size = stack.pop()
        if order is not None and size == order:
            yield S
            continue
        if C == 0:
            if order is None:
                yield S
            continue
        w = (C & -C).bit_length() - 1
        bit = 1 << w
        # exclude branch first on the stack so the include branch is explored first
        stack.append((S, C & ~bit, X | bit, size))
        Sw = S | bit
        stack.append((Sw, (C | nbr[w]) & ~Sw & ~X & allowed, X, size + 1))


def enumerate_subtree_masks(tree, containing=None, order=None):
    if order is not None and not 1 <= order <= tree.n:
        raise ValueError(f"order must lie in 1..{tree.n}")
    full = tree.full_mask
    if containing is not None:
        U = as_subtree(tree, containing)
        if order is not None and order < U.order:
            return
        yield from _grow(tree, U.mask, full, order)
        return
    for a in range(tree.n):
        allowed = full & ~((1 << (a + 1)) - 1)
        yield from _grow(tree, 1 << a, allowed, order)


def enumerate_subtrees(tree, containing=None, order=None):
    """Yield every subtree (optionally containing ``containing``, of order ``order``) once.

    Each subtree is grown from its smallest vertex through a frontier of
    larger vertices, so no set is produced twice.  Yield order is fixed
    for a given tree.
    """
    for mask in enumerate_subtree_masks(tree, containing, order):
        yield Subtree.from_mask(tree, mask)


# ---------------------------------------------------------------------------
# corpora


def _check_corpus_n(n):
    if not 1 <= n <= CORPUS_MAX_N:
        raise ValueError(f"exhaustive corpus supports 1 <= n <= {CORPUS_MAX_N}, got {n}")


def labeled_tree_edge_batches(n, chunk=1 << 15):
    """Edge arrays of all ``n^(n-2)`` labelled trees, in Prüfer-code order."""
    _check_corpus_n(n)
    if n == 1:
        yield np.zeros((1, 0, 2), dtype=np.int64)
        return
    if n == 2:
        yield np.array([[[0, 1]]], dtype=np.int64)
        return
    codes = _kernels.all_prufer_codes(n)
    for start in range(0, codes.shape[0], chunk):
        yield _kernels.prufer_decode(np.ascontiguousarray(codes[start : start + chunk]), n)


def all_labeled_trees(n):
    """Yield all ``n^(n-2)`` labelled trees on ``n <= 8`` vertices via Prüfer decoding."""
    for batch in labeled_tree_edge_batches(n):
        for edges in batch:
            yield Tree(n, edges.tolist())


def sample_labeled_trees(n, count, seed=0):
    """``count`` uniformly random labelled trees from a seeded Prüfer sampler."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if n <= 2:
        tree = Tree(n, [(0, 1)] if n == 2 else [])
        return [tree] * count
    rng = np.random.default_rng(np.uint64(seed))
    codes = rng.integers(0, n, size=(count, n - 2), dtype=np.int64)
    edges = _kernels.prufer_decode(codes, n)
    return [Tree(n, e.tolist()) for e in edges]
