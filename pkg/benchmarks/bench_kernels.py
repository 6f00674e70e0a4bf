"""Time the numba kernels against the pure-numpy fallbacks.

    python benchmarks/bench_kernels.py [--repeat 5]

Each kernel is run once untimed (JIT warm-up) and then ``--repeat`` times;
the best wall time is reported.  Outputs of the two backends are compared
for equality before timing.
"""

import argparse
import time

import numpy as np

from localmean import _kernels as K
from localmean.tree import sample_labeled_trees


def best_of(fn, repeat):
    fn()
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def edges_of(n, seed=1):
    t = sample_labeled_trees(n, 1, seed=seed)[0]
    e = np.asarray(t.edges, dtype=np.int64)
    return np.ascontiguousarray(e[:, 0]), np.ascontiguousarray(e[:, 1])


def cases():
    for n in (12, 16, 20):
        eu, ev = edges_of(n)
        yield f"connected_masks n={n}", (lambda n=n, eu=eu, ev=ev: (n, eu, ev)), "connected_masks"
        yield f"superset_sums n={n}", (lambda n=n, eu=eu, ev=ev: (n, *K.connected_masks_np(n, eu, ev))), "superset_sums"
    for n in (7, 8):
        codes = np.ascontiguousarray(K.all_prufer_codes(n))
        yield f"prufer_decode n={n} ({len(codes)} trees)", (lambda n=n, c=codes: (c, n)), "prufer_decode"
    for n in (16, 20):
        eu, ev = edges_of(n)

        def args(n=n, eu=eu, ev=ev):
            conn, pop = K.connected_masks_np(n, eu, ev)
            N, R = K.superset_sums_np(n, conn, pop)
            return R, N, conn, pop, n

        yield f"order_extrema n={n}", args, "order_extrema"


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=5)
    a = p.parse_args(argv)
    if K.njit is None:
        print("numba is not importable; only the numpy path can run")
        return 1
    print(f"{'kernel':40s} {'numpy [ms]':>12s} {'numba [ms]':>12s} {'speed-up':>9s}")
    for label, make_args, name in cases():
        args = make_args()
        f_np = getattr(K, name + "_np")
        f_nb = getattr(K, name + "_nb")
        r_np, r_nb = f_np(*args), f_nb(*args)
        for x, y in zip(r_np if isinstance(r_np, tuple) else (r_np,), r_nb if isinstance(r_nb, tuple) else (r_nb,)):
            if not np.array_equal(x, y):
                raise SystemExit(f"{label}: backends disagree")
        t_np = best_of(lambda: f_np(*args), a.repeat)
        t_nb = best_of(lambda: f_nb(*args), a.repeat)
        print(f"{label:40s} {t_np * 1e3:12.3f} {t_nb * 1e3:12.3f} {t_np / t_nb:9.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
