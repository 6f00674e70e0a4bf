"""Corpus runner that checks the theorems on every small labelled tree.

Trees with ``n <= 8`` are enumerated exhaustively from Prüfer codes; larger
orders use seeded random samples.  Claims about a single vertex, an edge
or the extremal subtrees of each order are checked on every tree.  Claims
quantified over all subtrees are checked on every subtree up to
``n = 7`` and on a seeded sample of subtrees from ``n = 8`` on.
"""

import math
import time
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .counting import RootedCounts, SubtreeTable, global_stats, is_astral, oracle_stats, subtree_stats
from .density import (component_type, density_arrays, half_index_pair_check, max_density_subtree,
                      two_vertex_comparison, type_from_counts)
from .extremal import (check_maximal_subtree, check_minimal_subtree, classify_leaves, extremal_masks_from_table,
                       index_guided_search, two_star_closed_forms, two_star_spine_means)
from .report import Violation
from .structure import HALF, core_decomposition, direction, half_index_predicate
from .structure import outer_neighbor_monotonicity_check
from .tree import CORPUS_MAX_N, Subtree, Tree, _bits, _popcount, contract, labeled_tree_edge_batches
from .tree import sample_labeled_trees

EXHAUSTIVE_SUBTREES_MAX_N = 7
ORACLE_ALL_SUBTREES_MAX_N = 6
ORACLE_PER_TREE = 10
MAX_STORED_VIOLATIONS = 200


class TreeContext:
    """Lazily built per-tree data shared by all suites."""

    def __init__(self, tree, index=0):
        self.tree = tree
        self.index = index
        self._table = None
        self._rc = None
        self._decomp = None
        self._ext = {}
        self._maxcheck = {}
        self._dens = None

    @property
    def table(self):
        if self._table is None:
            self._table = SubtreeTable(self.tree)
        return self._table

    @property
    def rc(self):
        if self._rc is None:
            self._rc = RootedCounts(self.tree)
        return self._rc

    @property
    def decomp(self):
        if self._decomp is None:
            self._decomp = core_decomposition(self.tree)
        return self._decomp

    def extremal(self, direction):
        if direction not in self._ext:
            self._ext[direction] = extremal_masks_from_table(self.table, direction)
        return self._ext[direction]

    def maximal_violations(self, mask):
        if mask not in self._maxcheck:
            self._maxcheck[mask] = check_maximal_subtree(self.tree, mask, self.decomp)
        return self._maxcheck[mask]

    def density_arrays(self):
        if self._dens is None:
            self._dens = density_arrays(self.table)
        return self._dens

    def proper_masks(self):
        """Proper nonempty subtrees as ints, increasing."""
        return self.density_arrays()[0]

    def density(self, mask):
        return self.table.density(mask)


@dataclass
class SuiteResult:
    name: str
    claims: str
    checks: int = 0
    trees: int = 0
    per_n: dict = field(default_factory=dict)
    violation_count: int = 0
    violations: list = field(default_factory=list)
    info: Counter = field(default_factory=Counter)
    seconds: float = 0.0

    @property
    def ok(self):
        return self.violation_count == 0

    def add(self, violations):
        for v in violations:
            self.violation_count += 1
            if len(self.violations) < MAX_STORED_VIOLATIONS:
                self.violations.append(v)

    def to_dict(self):
        return {
            "name": self.name,
            "claims": self.claims,
            "checks": self.checks,
            "trees": self.trees,
            "per_n": {str(k): v for k, v in sorted(self.per_n.items())},
            "violation_count": self.violation_count,
            "violations": self.violations,
            "info": dict(sorted(self.info.items())),
        }


# ---------------------------------------------------------------------------
# per-tree checks; each returns (number of checks, violations)


def _from_maximal(ctx, res, names, k_filter=None):
    n = ctx.tree.n
    count = 0
    for k, (_, masks) in ctx.extremal("max").items():
        if k_filter is not None and not k_filter(k, n):
            continue
        for m in masks:
            count += 1
            res.add(v for v in ctx.maximal_violations(m) if v.check in names)
    return count


def s_mainthm(ctx, res, sample):
    return _from_maximal(ctx, res, ("mainthm", "leaf-configuration"))


def s_refinement(ctx, res, sample):
    return _from_maximal(ctx, res, ("refinement",))


def s_branchingpath(ctx, res, sample):
    return _from_maximal(ctx, res, ("branchingpath",), lambda k, n: k == 1)


def s_ksubtree_leaves(ctx, res, sample):
    count = _from_maximal(ctx, res, ("ksubtree-leaves",))
    for k, (_, masks) in ctx.extremal("max").items():
        for m in masks:
            res.info["case " + classify_leaves(ctx.tree, Subtree.from_mask(ctx.tree, m), ctx.decomp).case] += 1
    return count


def s_oldthm(ctx, res, sample):
    """Maximal single-vertex mean sits at degree 1 or 2; also compares the swap search."""
    tree = ctx.tree
    if tree.is_path():
        return 0
    _, masks = ctx.extremal("max")[1]
    out = []
    for m in masks:
        v = m.bit_length() - 1
        if tree.degree(v) > 2:
            out.append(Violation("oldthm", tree, (v,), "deg 1 or 2", tree.degree(v)))
    res.add(out)
    return len(masks)


def s_index_search(ctx, res, sample):
    """Swap search from every single vertex and from sampled subtrees; never worse than its start."""
    tree, table = ctx.tree, ctx.table
    extra = sample if sample is not None else []
    extra = extra[:: max(1, len(extra) // 4)]
    starts = [1 << v for v in range(tree.n)] + [int(m) for m in extra]
    count = 0
    for m in starts:
        k = _popcount(m)
        for direction in ("max", "min"):
            got = index_guided_search(tree, k, direction, Subtree.from_mask(tree, m), ctx.rc).mask
            best = ctx.extremal(direction)[k][0]
            a, b = table.mean(m), table.mean(got)
            worse = b < a if direction == "max" else b > a
            if worse:
                res.add([Violation("index-search", tree, tuple(_bits(m)), f"no worse than start ({direction})", b)])
            res.info[f"{direction} reached global" if b == best else f"{direction} stuck locally"] += 1
            count += 1
    return count


def s_index_monotone(ctx, res, sample):
    count = 0
    for m in sample:
        res.add(outer_neighbor_monotonicity_check(ctx.tree, Subtree.from_mask(ctx.tree, int(m)), ctx.rc))
        count += 1
    return count


def s_minimal_case(ctx, res, sample):
    core = ctx.decomp.core
    if not core:
        res.info["skipped (no core)"] += 1
        return 0
    count = 0
    for k, (_, masks) in ctx.extremal("min").items():
        if k > len(core):
            continue
        for m in masks:
            count += 1
            res.add(check_minimal_subtree(ctx.tree, m, ctx.decomp))
    return count


def s_density_bound(ctx, res, sample):
    """``1/2 <= D(S) < 1``, equality exactly when ``S`` contains the core; and the core-minus-leaf corollary."""
    tree = ctx.tree
    if tree.n < 2:
        return 0
    masks, num, den = ctx.density_arrays()
    cm = ctx.decomp.core_mask
    tight = 2 * num == den
    contains = (masks & cm) == cm
    bad = (2 * num < den) | (num >= den) | (tight != contains)
    for m in masks[bad]:
        m = int(m)
        res.add([Violation("density-bound", tree, tuple(_bits(m)), "1/2 <= D < 1, equality iff core <= S",
                           ctx.density(m))])
    count = len(masks)
    core = ctx.decomp.core
    if len(core) >= 2:
        cs = Subtree.from_mask(tree, cm)
        for v in cs.leaves():
            d = ctx.density(cm & ~(1 << v))
            count += 1
            if not d > HALF:
                res.add([Violation("density-bound/core-minus-leaf", tree, tuple(_bits(cm & ~(1 << v))), "> 1/2", d)])
    return count


def s_density_step(ctx, res, sample):
    tree, n = ctx.tree, ctx.tree.n
    nbr = tree.nbr_mask
    count = 0
    full = tree.full_mask
    for m in sample:
        m = int(m)
        k = _popcount(m)
        D = ctx.density(m)
        moves = []
        if k >= 2:
            for v in _bits(m):
                if _popcount(nbr[v] & m) == 1:
                    moves.append(("remove-leaf", v, ctx.density(m & ~(1 << v)), D))
        if k + 1 <= n - 1:
            for v in _bits(tree.boundary_mask(m)):
                moves.append(("add-neighbor", v, D, ctx.density(m | (1 << v))))
        for mode, v, before, after in moves:
            bound = 1 - ctx.rc.index(v, direction(tree, v, m))
            big = D
            lhs, rhs = after >= before, big >= bound
            count += 1
            if lhs != rhs or (after == before) != (big == bound):
                res.add([Violation("density-step", tree, tuple(_bits(m)), f"{mode} {v}: both sides agree",
                                   {"D-step": (before, after), "D": big, "1-i": bound})])
            res.info[f"{mode} {'T' if lhs else 'F'}{'=' if after == before else ''}"] += 1
    return count


def s_limb_absorption(ctx, res, sample):
    tree = ctx.tree
    if tree.n < 2:
        return 0
    cm = ctx.decomp.core_mask
    count = 0
    if cm:
        masks, num, den = ctx.density_arrays()
        inner = masks & cm
        use = inner != 0
        masks, num, den, inner = masks[use], num[use], den[use], inner[use]
        full = tree.full_mask
        # densities of S & core from the table
        k_in = ctx.table.pop[inner]
        N_in = ctx.table.N[inner]
        num_in = ctx.table.R[inner] - k_in * N_in
        den_in = N_in * (tree.n - k_in)
        lhs = num_in * den  # D(S*) * den * den_in
        rhs = num * den_in
        eq_expected = (inner == masks) | (inner == cm)
        bad = (lhs > rhs) | ((lhs == rhs) != eq_expected)
        for m in masks[bad]:
            m = int(m)
            res.add([Violation("limb-absorption", tree, tuple(_bits(m)), "D(S*) <= D(S), equal iff S<=T* or T*<=S",
                               {"D(S*)": ctx.density(m & cm), "D(S)": ctx.density(m)})])
        count += len(masks)
    for v, w in tree.edges:
        for a, b in ((v, w), (w, v)):
            out = half_index_pair_check(tree, a, b, ctx.rc)
            if out is not None:
                count += 1
                res.add(out)
    return count


def s_type_l_deg2(ctx, res, sample):
    tree, table = ctx.tree, ctx.table
    if tree.n < 2:
        return 0
    out = []
    for v in range(tree.n):
        t = type_from_counts(int(table.N[1 << v]), int(table.R[1 << v]), tree.n)
        if not t.consistent:
            out.append(Violation("type-L-deg2/definition", tree, (v,), t.kind, t.algebraic_low))
        if tree.degree(v) >= 2 and t.kind != "L":
            out.append(Violation("type-L-deg2", tree, (v,), "L", t.kind))
        res.info[f"deg {min(tree.degree(v), 2)}{'+' if tree.degree(v) >= 2 else ''} {t.kind}"] += 1
    res.add(out)
    return tree.n


def s_type_h_pendant(ctx, res, sample):
    tree, table = ctx.tree, ctx.table
    if tree.n < 2:
        return 0
    count = 0
    for v in range(tree.n):
        t = type_from_counts(int(table.N[1 << v]), int(table.R[1 << v]), tree.n)
        if t.kind != "H":
            continue
        bigger = Tree(tree.n + 1, list(tree.edges) + [(v, tree.n)])
        N, R = RootedCounts(bigger).away(tree.n)
        t2 = type_from_counts(N, R, bigger.n)
        count += 1
        if t2.kind != "H" or not t2.consistent:
            res.add([Violation("type-H-pendant", bigger, (tree.n,), "H", t2.kind)])
    return count


def s_table1(ctx, res, sample):
    tree = ctx.tree
    if tree.n <= 2:
        return 0
    count = 0
    for v, w in tree.edges:
        rep = two_vertex_comparison(tree, v, w, ctx.rc)
        count += 1
        res.add(rep.violations)
        res.info[f"cell {rep.cell}"] += 1
        if "no-conclusion" in rep.notes:
            res.info[f"no-conclusion {rep.notes['no-conclusion']}"] += 1
        if "literal-cell" in rep.notes:
            res.info[f"literal cell {rep.cell} {'holds' if rep.notes['literal-cell'] else 'fails'}"] += 1
        if rep.notes.get("both-exceeded"):
            res.info["leaf edge with pair beating both"] += 1
    return count


def s_lowerbound(ctx, res, sample):
    tree, table = ctx.tree, ctx.table
    bound = Fraction(tree.n + 1, 2)
    for v in range(tree.n):
        mu = table.mean(1 << v)
        if mu < bound or (mu == bound) != is_astral(tree, v):
            res.add([Violation("lowerbound", tree, (v,), "mu(v) >= (n+1)/2, equal iff astral", mu)])
    return tree.n


def s_half_index(ctx, res, sample):
    tree, rc, table = ctx.tree, ctx.rc, ctx.table
    if tree.n < 2:
        return 0
    limb = ctx.decomp.limb_vertices
    count = 0
    halves = set()
    for v, w in tree.edges:
        for a, b in ((v, w), (w, v)):
            i = rc.index(a, b)
            pred = half_index_predicate(tree, a, b)
            count += 1
            if not (0 < i <= HALF) or (i == HALF) != pred:
                res.add([Violation("half-index", tree, (a, b), "0 < i <= 1/2, i = 1/2 iff path ending at v", i)])
            if i == HALF:
                halves.add(a)
        mv, mw, mvw = table.mean(1 << v), table.mean(1 << w), table.mean((1 << v) | (1 << w))
        for m1 in (mv, mw):
            if not m1 < mvw <= m1 + HALF:
                res.add([Violation("half-index/band", tree, (v, w), "mu(v) < mu(v,w) <= mu(v) + 1/2", (m1, mvw))])
    for a in range(tree.n):
        if (a in limb) != (a in halves):
            res.add([Violation("half-index/limb", tree, (a,), "limb vertex iff some i(v;w) = 1/2", a in limb)])
    return count


def s_index_lemma(ctx, res, sample):
    tree, table, rc = ctx.tree, ctx.table, ctx.rc
    nbr = tree.nbr_mask
    count = 0
    for m in sample:
        m = int(m)
        mu = table.mean(m)
        for w in _bits(tree.boundary_mask(m)):
            count += 1
            if table.mean(m | (1 << w)) - mu != rc.index(w, direction(tree, w, m)):
                res.add([Violation("index-lemma/add", tree, tuple(_bits(m)), f"mu(S+{w}) - mu(S) = i", None)])
        if _popcount(m) >= 2:
            for v in _bits(m):
                if _popcount(nbr[v] & m) == 1:
                    count += 1
                    if mu - table.mean(m & ~(1 << v)) != rc.index(v, direction(tree, v, m)):
                        res.add([Violation("index-lemma/remove", tree, tuple(_bits(m)), f"mu(S) - mu(S-{v}) = i", None)])
    return count


def _contracted_mean(tree, U, S_mask):
    cr = contract(tree, Subtree.from_mask(tree, U))
    small = SubtreeTable(cr.contracted)
    img = cr.map_mask(S_mask, U)
    return small, img


def s_contraction(ctx, res, sample):
    tree, table = ctx.tree, ctx.table
    count = 0
    for m in sample:
        m = int(m)
        Us = [m]
        if _popcount(m) >= 2:
            leaf = next(v for v in _bits(m) if _popcount(tree.nbr_mask[v] & m) == 1)
            Us.append(m & ~(1 << leaf))
        for U in Us:
            small, img = _contracted_mean(tree, U, m)
            lhs = table.mean(m)
            rhs = small.mean(img) + (_popcount(U) - 1)
            count += 1
            if lhs != rhs:
                res.add([Violation("contraction/mean", tree, tuple(_bits(m)), rhs, lhs, f"U={list(_bits(U))}")])
            if U == m and m != tree.full_mask:
                if ctx.density(m) != small.density(img):
                    res.add([Violation("contraction/density", tree, tuple(_bits(m)), small.density(img), ctx.density(m))])
    return count


def s_oracle(ctx, res, sample):
    """Recurrence-based counts against the subset table (and the enumerator on small trees)."""
    tree, table = ctx.tree, ctx.table
    masks = table.masks()
    if tree.n > ORACLE_ALL_SUBTREES_MAX_N:
        L = len(masks)
        pick = (np.arange(ORACLE_PER_TREE) * L // ORACLE_PER_TREE + ctx.index) % L
        masks = masks[np.unique(pick)]
    count = 0
    for m in masks:
        m = int(m)
        st = subtree_stats(tree, Subtree.from_mask(tree, m))
        count += 1
        if (st.N, st.R) != (int(table.N[m]), int(table.R[m])):
            res.add([Violation("oracle", tree, tuple(_bits(m)), (int(table.N[m]), int(table.R[m])), (st.N, st.R))])
    g = global_stats(tree).stats
    count += 1
    if (g.N, g.R) != (int(table.N[0]), int(table.R[0])):
        res.add([Violation("oracle/global", tree, None, (int(table.N[0]), int(table.R[0])), (g.N, g.R))])
    if tree.n <= 5:
        for m in table.masks()[:4]:
            S = Subtree.from_mask(tree, int(m))
            count += 1
            if oracle_stats(tree, S) != table.stats(int(m)):
                res.add([Violation("oracle/enumerate", tree, S.sorted(), table.stats(int(m)), oracle_stats(tree, S))])
    return count


def s_density_max(ctx, res, sample):
    tree = ctx.tree
    if tree.n < 2:
        return 0
    r = max_density_subtree(tree, table=ctx.table, decomp=ctx.decomp)
    res.add(r.violations)
    for c in r.structure_class:
        res.info[c] += 1
    return len(r.optima)


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Suite:
    name: str
    claims: str
    check: object
    subtrees: bool = False  # quantified over subtrees: sampled from n = 8 on


SUITES = {s.name: s for s in (
    Suite("mainthm", "k-maximal: <=1 leaf of degree >2, >=1 leaf of degree <=2", s_mainthm),
    Suite("refinement", "k-maximal with a leaf of degree >2: other leaves have degree 1", s_refinement),
    Suite("branchingpath", "maximal single vertex of a non-path: a leaf or on a core-path", s_branchingpath),
    Suite("ksubtree-leaves", "k-maximal: degree-2 leaves all on core-paths or all in limbs", s_ksubtree_leaves),
    Suite("index-monotone", "outer-neighbour index comparisons", s_index_monotone, True),
    Suite("minimal-case", "k-minimal (k <= |core|): inside the core, leaf degrees", s_minimal_case),
    Suite("density-bound", "1/2 <= D(S) < 1, equality iff core <= S; D(core - leaf) > 1/2", s_density_bound),
    Suite("density-step", "D(S) vs D(S -/+ v) decided by 1 - i(v; S), equality clause", s_density_step, True),
    Suite("limb-absorption", "D(S & core) <= D(S) with equality clause; half-index edge growth", s_limb_absorption),
    Suite("type-L-deg2", "root degree >= 2 gives type L; definitional and algebraic tests agree", s_type_l_deg2),
    Suite("type-H-pendant", "pendant extension of a type-H rooted tree is type H", s_type_h_pendant),
    Suite("table1", "two-vertex density comparison cells and corollaries", s_table1),
    Suite("two-star-forms", "closed forms on two stars joined by a path", None),
    Suite("oldthm", "maximal single-vertex mean at degree 1 or 2 (non-paths)", s_oldthm),
    Suite("lowerbound", "mu(v) >= (n+1)/2, equality iff astral over v", s_lowerbound),
    Suite("half-index", "0 < i <= 1/2, i = 1/2 iff path ending at v, limb test, edge band", s_half_index),
    Suite("index-lemma", "mu(S+w) - mu(S) = i(w; S) and the removal dual", s_index_lemma, True),
    Suite("contraction", "mean shift and density invariance under contraction", s_contraction, True),
    Suite("oracle", "recurrence counts equal brute-force counts", s_oracle),
    Suite("density-max", "maximal-density optima: structural class and order-maximality", s_density_max),
    Suite("index-search", "swap search never ends below its start (agreement logged)", s_index_search, True),
)}

SPEC_SUITES = ("mainthm", "refinement", "branchingpath", "ksubtree-leaves", "index-monotone", "minimal-case",
               "density-bound", "density-step", "limb-absorption", "type-L-deg2", "type-H-pendant", "table1",
               "two-star-forms")


def run_two_star_forms(res, n_range=range(2, 6), k_range=range(3, 9)):
    for n in n_range:
        for k in k_range:
            f = two_star_closed_forms(n, k)
            arms, pairs = two_star_spine_means(n, k)
            res.checks += 1
            tree = f"two-stars [{n}, {k}]"
            if f.mu_w != arms:
                res.add([Violation("two-star-forms/arm", tree, None, f.mu_w, arms)])
            if f.mu2 != pairs:
                res.add([Violation("two-star-forms/pair", tree, None, f.mu2, pairs)])
            if f.mu2_min != min(pairs.values()):
                res.add([Violation("two-star-forms/min", tree, None, f.mu2_min, min(pairs.values()))])
            if f.argmin != {(1, k - 1), (k - 1, 1)}:
                res.add([Violation("two-star-forms/argmin", tree, None, [(1, k - 1), (k - 1, 1)], sorted(f.argmin))])
            mid = {(k // 2, k - k // 2), (k - k // 2, k // 2)}
            if not f.argmax <= mid:
                res.add([Violation("two-star-forms/argmax", tree, None, sorted(mid), sorted(f.argmax))])


def corpus(max_n, seed=0, samples=10_000, min_n=1, chunk=1 << 14):
    """Yield ``(n, index, tree)`` in canonical order: Prüfer order up to ``n = 8``, seeded samples beyond."""
    for n in range(min_n, max_n + 1):
        if n <= CORPUS_MAX_N:
            idx = 0
            for batch in labeled_tree_edge_batches(n, chunk):
                for edges in batch:
                    yield n, idx, Tree(n, edges.tolist())
                    idx += 1
        else:
            for idx, t in enumerate(sample_labeled_trees(n, samples, seed=seed * 1000003 + n)):
                yield n, idx, t


def corpus_size(n, samples):
    if n <= CORPUS_MAX_N:
        return max(1, n ** (n - 2)) if n >= 2 else 1
    return samples


def run(names, max_n=7, *, seed=0, samples=10_000, min_n=1, progress=None):
    """Run the named suites over the corpus; returns ``{name: SuiteResult}``.

    Subtree-quantified suites visit every proper subtree up to ``n = 7``.
    From ``n = 8`` on they visit ``ceil(samples / trees)`` seeded random
    subtrees per tree, so at least ``samples`` subtrees per order.
    """
    unknown = [x for x in names if x not in SUITES]
    if unknown:
        raise KeyError(f"unknown theorem suite(s): {', '.join(unknown)}")
    results = {x: SuiteResult(x, SUITES[x].claims) for x in names}
    clock = {x: 0.0 for x in names}
    if "two-star-forms" in results:
        t0 = time.perf_counter()
        run_two_star_forms(results["two-star-forms"])
        clock["two-star-forms"] += time.perf_counter() - t0
    tree_suites = [SUITES[x] for x in names if SUITES[x].check is not None]
    if tree_suites:
        rngs = {}
        for n, idx, tree in corpus(max_n, seed, samples, min_n):
            ctx = TreeContext(tree, idx)
            sample = None
            if any(s.subtrees for s in tree_suites):
                masks = ctx.proper_masks()
                if n <= EXHAUSTIVE_SUBTREES_MAX_N:
                    sample = masks
                else:
                    rng = rngs.get(n)
                    if rng is None:
                        rng = rngs[n] = np.random.default_rng([seed, n])
                    per = max(1, math.ceil(samples / corpus_size(n, samples)))
                    sample = np.sort(rng.choice(masks, size=min(per, len(masks)), replace=False)) if len(masks) else masks
            for s in tree_suites:
                t0 = time.perf_counter()
                r = results[s.name]
                c = s.check(ctx, r, sample if s.subtrees else None) if (sample is not None or not s.subtrees) else 0
                r.checks += c
                r.trees += 1
                pn = r.per_n.setdefault(n, {"trees": 0, "checks": 0})
                pn["trees"] += 1
                pn["checks"] += c
                clock[s.name] += time.perf_counter() - t0
            if progress and idx % 50000 == 0:
                progress(n, idx)
    for x, r in results.items():
        r.seconds = clock[x]
    return results
