"""Bitmask and Prüfer kernels with a numba path and a pure-numpy path.

The backend is picked once at import time from ``LOCALMEAN_BACKEND``
(``numba`` or ``numpy``).  When the variable is unset numba is used if it
imports, otherwise numpy.  Both paths return identical int64 arrays; the
test-suite runs them against each other.

All kernels work on subsets of ``{0..n-1}`` encoded as integer masks, so
they are limited to small ``n`` (see ``TABLE_MAX_N``).
"""

import os

import numpy as np

TABLE_MAX_N = 22

_requested = os.environ.get("LOCALMEAN_BACKEND", "").strip().lower()
if _requested not in ("", "numba", "numpy"):
    raise ImportError(f"LOCALMEAN_BACKEND must be 'numba' or 'numpy', got {_requested!r}")

try:
    if _requested == "numpy":
        raise ImportError
    from numba import njit
except ImportError:
    njit = None

BACKEND = "numba" if njit is not None else "numpy"


# ---------------------------------------------------------------------------
# pure numpy implementations


def _popcount_np(n):
    masks = np.arange(1 << n, dtype=np.int64)
    pop = np.zeros(1 << n, dtype=np.int64)
    for i in range(n):
        pop += (masks >> i) & 1
    return pop


def connected_masks_np(n, eu, ev):
    """Flag every nonempty vertex set that induces a connected subgraph.

    In a forest a vertex set is connected exactly when it spans
    ``|set| - 1`` edges.
    """
    masks = np.arange(1 << n, dtype=np.int64)
    pop = _popcount_np(n)
    inner = np.zeros(1 << n, dtype=np.int64)
    for u, v in zip(eu.tolist(), ev.tolist()):
        inner += ((masks >> u) & (masks >> v)) & 1
    conn = (pop > 0) & (inner == pop - 1)
    return conn, pop


def superset_sums_np(n, conn, pop):
    """Sum count and order over connected supersets of every mask.

    Returns ``(N, R)`` where ``N[m]`` is the number of connected sets
    containing ``m`` and ``R[m]`` their total size.  ``N[0], R[0]`` are the
    global totals.
    """
    N = conn.astype(np.int64)
    R = N * pop
    size = 1 << n
    for i in range(n):
        step = 1 << i
        Nv = N.reshape(size // (2 * step), 2, step)
        Rv = R.reshape(size // (2 * step), 2, step)
        Nv[:, 0, :] += Nv[:, 1, :]
        Rv[:, 0, :] += Rv[:, 1, :]
    return N, R


def prufer_decode_np(codes, n):
    """Decode a batch of Prüfer codes, shape ``(m, n-2)``, into edge arrays.

    Vectorised over the batch axis; the loop runs over code positions.
    """
    codes = np.asarray(codes, dtype=np.int64)
    m = codes.shape[0]
    rows = np.arange(m)
    deg = np.ones((m, n), dtype=np.int64)
    for j in range(n - 2):
        np.add.at(deg, (rows, codes[:, j]), 1)
    edges = np.empty((m, n - 1, 2), dtype=np.int64)
    for j in range(n - 2):
        leaf = np.argmax(deg == 1, axis=1)
        edges[:, j, 0] = leaf
        edges[:, j, 1] = codes[:, j]
        deg[rows, leaf] -= 1
        deg[rows, codes[:, j]] -= 1
    ones = deg == 1
    first = np.argmax(ones, axis=1)
    last = n - 1 - np.argmax(ones[:, ::-1], axis=1)
    edges[:, n - 2, 0] = first
    edges[:, n - 2, 1] = last
    return edges


def _exact_best_np(num, den, idx, sign):
    # float ratios only steer the search; acceptance is by exact cross products
    ratio = num[idx] / den[idx]
    b = idx[np.argmax(sign * ratio)]
    while True:
        if sign > 0:
            better = idx[num[idx] * den[b] > num[b] * den[idx]]
        else:
            better = idx[num[idx] * den[b] < num[b] * den[idx]]
        if better.size == 0:
            return b
        b = better[np.argmax(sign * (num[better] / den[better]))]


def ratio_best_np(num, den, valid, sign):
    idx = np.flatnonzero(valid)
    if idx.size == 0:
        return -1
    return int(_exact_best_np(num, den, idx, sign))


def order_extrema_np(num, den, valid, pop, n):
    """Exact arg-max and arg-min of ``num/den`` among valid masks of each order."""
    best_max = np.full(n + 1, -1, dtype=np.int64)
    best_min = np.full(n + 1, -1, dtype=np.int64)
    for k in range(1, n + 1):
        idx = np.flatnonzero(valid & (pop == k))
        if idx.size:
            best_max[k] = _exact_best_np(num, den, idx, 1)
            best_min[k] = _exact_best_np(num, den, idx, -1)
    return best_max, best_min


# ---------------------------------------------------------------------------
# numba implementations

if njit is not None:

    @njit(cache=True)
    def connected_masks_nb(n, eu, ev):
        size = 1 << n
        conn = np.zeros(size, dtype=np.bool_)
        pop = np.zeros(size, dtype=np.int64)
        m = eu.shape[0]
        for mask in range(1, size):
            p = 0
            x = mask
            while x:
                x &= x - 1
                p += 1
            pop[mask] = p
            inner = 0
            for e in range(m):
                if (mask >> eu[e]) & 1 and (mask >> ev[e]) & 1:
                    inner += 1
            conn[mask] = inner == p - 1
        return conn, pop

    @njit(cache=True)
    def superset_sums_nb(n, conn, pop):
        size = 1 << n
        N = np.zeros(size, dtype=np.int64)
        R = np.zeros(size, dtype=np.int64)
        for mask in range(size):
            if conn[mask]:
                N[mask] = 1
                R[mask] = pop[mask]
        for i in range(n):
            bit = 1 << i
            for mask in range(size):
                if not mask & bit:
                    N[mask] += N[mask | bit]
                    R[mask] += R[mask | bit]
        return N, R

    @njit(cache=True)
    def prufer_decode_nb(codes, n):
        m = codes.shape[0]
        edges = np.empty((m, n - 1, 2), dtype=np.int64)
        deg = np.empty(n, dtype=np.int64)
        for r in range(m):
            for i in range(n):
                deg[i] = 1
            for j in range(n - 2):
                deg[codes[r, j]] += 1
            for j in range(n - 2):
                leaf = 0
                while deg[leaf] != 1:
                    leaf += 1
                c = codes[r, j]
                edges[r, j, 0] = leaf
                edges[r, j, 1] = c
                deg[leaf] -= 1
                deg[c] -= 1
            a = -1
            for i in range(n):
                if deg[i] == 1:
                    if a < 0:
                        a = i
                    else:
                        edges[r, n - 2, 0] = a
                        edges[r, n - 2, 1] = i
        return edges

    @njit(cache=True)
    def ratio_best_nb(num, den, valid, sign):
        b = -1
        for i in range(num.shape[0]):
            if not valid[i]:
                continue
            if b < 0:
                b = i
            elif sign > 0:
                if num[i] * den[b] > num[b] * den[i]:
                    b = i
            elif num[i] * den[b] < num[b] * den[i]:
                b = i
        return b

    @njit(cache=True)
    def order_extrema_nb(num, den, valid, pop, n):
        best_max = np.full(n + 1, -1, dtype=np.int64)
        best_min = np.full(n + 1, -1, dtype=np.int64)
        for i in range(num.shape[0]):
            if not valid[i]:
                continue
            k = pop[i]
            b = best_max[k]
            if b < 0 or num[i] * den[b] > num[b] * den[i]:
                best_max[k] = i
            b = best_min[k]
            if b < 0 or num[i] * den[b] < num[b] * den[i]:
                best_min[k] = i
        return best_max, best_min

    connected_masks = connected_masks_nb
    superset_sums = superset_sums_nb
    prufer_decode = prufer_decode_nb
    ratio_best = ratio_best_nb
    order_extrema = order_extrema_nb
else:
    connected_masks = connected_masks_np
    superset_sums = superset_sums_np
    prufer_decode = prufer_decode_np
    ratio_best = ratio_best_np
    order_extrema = order_extrema_np


def all_prufer_codes(n):
    """Every length ``n-2`` code over ``{0..n-1}`` in lexicographic order."""
    if n < 3:
        return np.zeros((1, 0), dtype=np.int64)
    m = n ** (n - 2)
    idx = np.arange(m, dtype=np.int64)
    powers = n ** np.arange(n - 3, -1, -1, dtype=np.int64)
    return (idx[:, None] // powers[None, :]) % n
