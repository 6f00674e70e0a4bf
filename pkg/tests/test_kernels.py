import os
import subprocess
import sys

import numpy as np
import pytest

from localmean import _kernels as K
from localmean.tree import Tree, all_labeled_trees, sample_labeled_trees

needs_numba = pytest.mark.skipif(K.njit is None, reason="numba not importable")


def edge_arrays(t):
    e = np.array(t.edges, dtype=np.int64).reshape(-1, 2)
    return e[:, 0].copy(), e[:, 1].copy()


@needs_numba
@pytest.mark.parametrize("n", [1, 2, 5, 9, 13])
def test_mask_kernels_agree(n):
    for t in sample_labeled_trees(n, 4, seed=n):
        eu, ev = edge_arrays(t)
        c1, p1 = K.connected_masks_np(n, eu, ev)
        c2, p2 = K.connected_masks_nb(n, eu, ev)
        assert np.array_equal(c1, c2) and np.array_equal(p1, p2)
        N1, R1 = K.superset_sums_np(n, c1, p1)
        N2, R2 = K.superset_sums_nb(n, c2, p2)
        assert np.array_equal(N1, N2) and np.array_equal(R1, R2)
        assert c1.sum() == N1[0]


@needs_numba
@pytest.mark.parametrize("n", [3, 4, 6, 7])
def test_prufer_decoders_agree(n):
    codes = K.all_prufer_codes(n)
    a = K.prufer_decode_np(codes, n)
    b = K.prufer_decode_nb(codes, n)
    assert np.array_equal(a, b)
    trees = {Tree(n, [tuple(e) for e in edges]) for edges in a}
    assert len(trees) == n ** (n - 2)


def test_prufer_corpus_matches_decoder():
    trees = list(all_labeled_trees(5))
    dec = K.prufer_decode(K.all_prufer_codes(5), 5)
    assert trees == [Tree(5, [tuple(e) for e in edges]) for edges in dec]


@needs_numba
def test_extrema_kernels_agree():
    rng = np.random.default_rng(4)
    n = 10
    size = 1 << n
    num = rng.integers(1, 50, size).astype(np.int64)
    den = rng.integers(1, 50, size).astype(np.int64)
    valid = rng.random(size) < 0.4
    pop = np.array([bin(m).count("1") for m in range(size)], dtype=np.int64)
    m1, n1 = K.order_extrema_np(num, den, valid, pop, n)
    m2, n2 = K.order_extrema_nb(num, den, valid, pop, n)
    # tie-breaking may differ, the attained ratios may not
    for a, b in ((m1, m2), (n1, n2)):
        for k in range(1, n + 1):
            assert (a[k] < 0) == (b[k] < 0)
            if a[k] >= 0:
                assert num[a[k]] * den[b[k]] == num[b[k]] * den[a[k]]
    for sign in (1, -1):
        i, j = K.ratio_best_np(num, den, valid, sign), K.ratio_best_nb(num, den, valid, sign)
        assert num[i] * den[j] == num[j] * den[i]


def test_ratio_best_exact_where_floats_tie():
    # 10**17+1 over 10**17 and 1 look equal as doubles
    num = np.array([10 ** 17 + 1, 1, 3], dtype=np.int64)
    den = np.array([10 ** 17, 1, 4], dtype=np.int64)
    valid = np.ones(3, dtype=np.bool_)
    assert K.ratio_best_np(num, den, valid, 1) == 0
    assert K.ratio_best(num, den, valid, 1) == 0
    assert K.ratio_best_np(num, den, valid, -1) == 2


@pytest.mark.parametrize("backend", ["numpy", "numba"])
def test_backend_flag(backend):
    env = dict(os.environ, LOCALMEAN_BACKEND=backend)
    code = ("import localmean; from localmean import generate, global_stats;"
            "print(localmean.BACKEND, global_stats(generate('star', [9])).stats.N)")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True).stdout
    name, count = out.split()
    assert count == str(2 ** 8 + 8)
    if backend == "numpy" or K.njit is not None:
        assert name == backend


def test_bad_backend_flag():
    env = dict(os.environ, LOCALMEAN_BACKEND="fortran")
    proc = subprocess.run([sys.executable, "-c", "import localmean"], env=env, capture_output=True, text=True)
    assert proc.returncode != 0 and "LOCALMEAN_BACKEND" in proc.stderr
