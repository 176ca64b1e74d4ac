"""Compare the jitted kernels against the pure-numpy fallback.

Each kernel pair is first checked for bit-identical output, then timed
(best of --reps). Run from a source checkout:

    python3 benchmarks/backend_bench.py --m-list 8,16,20,24 --reps 3

The propagate row covers the histogram fold, the finalize row the exact
digit-plane moment reduction, and the smaller exhaustive/pairwise rows the
oracle kernels (exhaustive enumeration is capped at m=14 by design, so the
benchmark stops at 12 there).
"""

import argparse
import time

import numpy as np

from apxadder import random_config
from apxadder import _kernels_np
from apxadder.histogram import _plane_geometry

try:
    from apxadder import _kernels as _kernels_nb
except ImportError as exc:
    raise SystemExit(f"numba backend unavailable ({exc}); nothing to compare")


def best_of(fn, reps):
    best = None
    for _ in range(reps):
        t0 = time.perf_counter()
        fn()
        dt = time.perf_counter() - t0
        best = dt if best is None or dt < best else best
    return best


def fmt_ms(seconds):
    return f"{1000.0 * seconds:10.2f}"


def run_pair(name, m, k, nb_fn, np_fn, reps):
    nb_out = nb_fn()
    np_out = np_fn()
    for a, b in zip(nb_out, np_out):
        assert np.array_equal(np.asarray(a), np.asarray(b)), f"{name} m={m} differs"
    t_nb = best_of(nb_fn, reps)
    t_np = best_of(np_fn, reps)
    print(f"{name:<11} m={m:<3} k={k} {fmt_ms(t_nb)} {fmt_ms(t_np)} "
          f"{t_np / t_nb:7.1f}x")


def bench_width(m, k, seed, samples, reps):
    cfg = random_config(m, k, seed)
    couts, sums = cfg.slot_arrays()
    args = (couts, sums, k, m, 0)

    run_pair("propagate", m, k,
             lambda: _kernels_nb.propagate_histogram(*args)[:1],
             lambda: _kernels_np.propagate_histogram(*args)[:1], reps)

    mats = np.asarray(_kernels_nb.propagate_histogram(*args)[0])
    pb, j1, j2 = _plane_geometry(m)

    def finalize(mod):
        return tuple(
            np.concatenate([np.atleast_1d(np.asarray(x)).ravel()
                            for x in mod.matrix_moment_planes(mats[i], pb, j1, j2)])
            for i in range(4)
        )

    run_pair("finalize", m, k,
             lambda: finalize(_kernels_nb), lambda: finalize(_kernels_np), reps)

    if m <= 12:
        run_pair("exhaustive", m, k,
                 lambda: _kernels_nb.exhaustive_ed_sums(*args),
                 lambda: _kernels_np.exhaustive_ed_sums(*args), reps)

    rng = np.random.default_rng(seed)
    a = rng.integers(0, 1 << m, size=samples, dtype=np.int64)
    b = rng.integers(0, 1 << m, size=samples, dtype=np.int64)
    run_pair("pairwise", m, k,
             lambda: (_kernels_nb.pairwise_ed(couts, sums, k, m, 0, a, b),),
             lambda: (_kernels_np.pairwise_ed(couts, sums, k, m, 0, a, b),), reps)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--m-list", default="8,16,20,24")
    ap.add_argument("--k", type=int, default=1)
    ap.add_argument("--samples", type=int, default=1 << 16,
                    help="operand pairs for the pairwise kernel (default 65536)")
    ap.add_argument("--reps", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    widths = [int(x) for x in args.m_list.split(",") if x]
    # warm-up compiles the jitted kernels outside any timed region
    wcfg = random_config(4 * args.k, args.k, 0)
    wc, ws = wcfg.slot_arrays()
    mats = np.asarray(_kernels_nb.propagate_histogram(wc, ws, args.k, wcfg.m, 0)[0])
    _kernels_nb.exhaustive_ed_sums(wc, ws, args.k, wcfg.m, 0)
    ops = np.zeros(8, dtype=np.int64)
    _kernels_nb.pairwise_ed(wc, ws, args.k, wcfg.m, 0, ops, ops)
    _kernels_nb.matrix_moment_planes(mats[0], *_plane_geometry(wcfg.m))

    print(f"{'kernel':<11} {'case':<9} {'numba ms':>10} {'numpy ms':>10} {'ratio':>8}")
    for m in widths:
        if m % args.k:
            print(f"skipping m={m}: k={args.k} does not divide it")
            continue
        bench_width(m, args.k, args.seed, args.samples, args.reps)


if __name__ == "__main__":
    main()
